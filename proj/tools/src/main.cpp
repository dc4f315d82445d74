#include "tpinn_cli/cli.h"

int main(int argc, char** argv) { return tpinn::cli::run_cli(argc, argv); }
