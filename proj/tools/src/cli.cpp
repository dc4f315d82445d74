#include "tpinn_cli/cli.h"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>

#include "tpinn/checkpoint.h"
#include "tpinn/config.h"
#include "tpinn/dataset_io.h"
#include "tpinn/errors.h"
#include "tpinn/fd_check.h"
#include "tpinn/report.h"
#include "tpinn/trainer.h"

namespace tpinn::cli {

namespace fs = std::filesystem;

namespace {

struct Globals {
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::string format = "table";
};

fs::path output_path(const Globals& g, const std::string& p) {
  fs::path out(p);
  if (!g.out_dir.empty() && out.is_relative()) out = fs::path(g.out_dir) / out;
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  return out;
}

void print_report(const Globals& g, const MetricsReport& report, std::ostream& out) {
  if (g.format == "csv") {
    report.write_csv(out);
  } else {
    report.write_table(out);
  }
}

int cmd_generate(const Globals& g, const std::string& config_path, const std::string& output,
                 std::ostream& out) {
  const GenerateConfig cfg = load_generate_config(config_path);
  const auto t0 = std::chrono::steady_clock::now();
  const Dataset d = make_dataset(cfg.scenario, cfg.moc_dt, cfg.dataset_dx, cfg.dataset_dt);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const fs::path path = output_path(g, output);
  write_dataset(path, d);
  out << "wrote " << path.string() << " (" << d.field.nx() << " x " << d.field.nt()
      << " points, a = " << d.meta.moc_wave_speed << " m/s, f = " << d.meta.pipe.friction_factor
      << ", " << secs << " s)\n";
  return 0;
}

int cmd_train(const Globals& g, const std::string& config_path, const std::string& dataset_path,
              const std::string& output, const std::string& trace_path, const std::string& label,
              std::ostream& out, std::ostream& err) {
  TrainConfig cfg = load_train_config(config_path);
  if (g.seed) cfg.seed = *g.seed;
  const Dataset data = read_dataset(dataset_path);
  const TrainData td = make_train_data(data);
  const TrainResult r = train(cfg, td);
  for (const StageSummary& s : r.stages) {
    out << "stage " << s.stage << ": " << s.iterations << " iterations, objective "
        << s.start_objective << " -> " << s.final_objective << " (best at " << s.best_iteration
        << ", " << s.seconds << " s)\n";
  }
  for (const std::string& w : r.trace.warnings) err << "warning: " << w << '\n';

  Checkpoint ckpt{label.empty() ? to_string(cfg.baseline) : label, r.spec, r.params};
  const fs::path path = output_path(g, output);
  save_checkpoint(path, ckpt);
  out << "wrote " << path.string() << '\n';
  if (!trace_path.empty()) {
    const fs::path tp = output_path(g, trace_path);
    std::ofstream os(tp);
    if (!os) throw IoError("cannot write " + tp.string());
    r.trace.write_csv(os);
  }
  return 0;
}

int cmd_eval(const Globals& g, const std::string& ckpt_path, const std::string& dataset_path,
             const std::string& residual_path, std::ostream& out) {
  const Dataset data = read_dataset(dataset_path);
  const Checkpoint ckpt = load_checkpoint(ckpt_path);
  const FieldGrid pred = predict_on(ckpt, data);
  print_report(g, evaluate_field(ckpt.label.empty() ? "model" : ckpt.label, pred, data), out);
  if (!residual_path.empty()) {
    const ResidualSeries rs =
        residual_series(pred, data.field, interior_columns(data.field, data.meta.offtake_position));
    const fs::path rp = output_path(g, residual_path);
    std::ofstream os(rp);
    if (!os) throw IoError("cannot write " + rp.string());
    os << "t_s,mean_abs_dp_mpa\n";
    char buf[64];
    for (std::size_t j = 0; j < rs.ts.size(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", rs.ts[j], rs.per_time[j]);
      os << buf;
    }
  }
  return 0;
}

int cmd_compare(const Globals& g, const std::vector<std::string>& paths, std::ostream& out) {
  if (paths.size() < 2) throw UsageError("compare needs at least one checkpoint and a dataset");
  const Dataset data = read_dataset(paths.back());
  std::vector<Checkpoint> models;
  for (std::size_t k = 0; k + 1 < paths.size(); ++k) {
    Checkpoint c = load_checkpoint(paths[k]);
    if (c.label.empty()) c.label = fs::path(paths[k]).stem().string();
    models.push_back(std::move(c));
  }
  print_report(g, compare(models, data), out);
  return 0;
}

// Gradient check of the configured objective on random points of the
// default steady state at 154 m3/h.
int cmd_adcheck(const Globals& g, const std::string& config_path, int points, FdOptions opts,
                std::ostream& out) {
  TrainConfig cfg = load_train_config(config_path);
  if (g.seed) cfg.seed = *g.seed;
  const auto t0 = std::chrono::steady_clock::now();

  PipelineSpec pipe;
  FluidSpec fluid;
  const double duration = 600.0;
  const double p_in = 1.48;
  const double q = m3h_to_m3s(154.0);
  const PhysicsCoeffs c = PhysicsCoeffs::from(fluid, pipe);

  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> ux(0.0, pipe.length), ut(0.0, duration);
  const double v = flowrate_to_velocity(q, pipe.diameter);
  auto steady_p = [&](double x) { return p_in + darcy_gradient(fluid, pipe, v) * x; };
  CollocationSet set;
  for (int k = 0; k < points; ++k) {
    set.xf.push_back(ux(rng));
    set.tf.push_back(ut(rng));
    const double xb = (k % 2 == 0) ? 0.0 : pipe.length;
    set.boundary.push_back({xb, ut(rng), steady_p(xb), v});
    const double xi = ux(rng);
    set.initial.push_back({xi, 0.0, steady_p(xi), v});
  }

  const NetSpec spec = make_net_spec(cfg, {0.0, pipe.length, 0.0, duration});
  const NetParams params = init_params(spec, cfg.seed);
  const Objective obj = cfg.baseline == Baseline::Dnn
                            ? Objective{1.0, 1.0, 0.0, 0.0, BcLossForm::Split}
                            : Objective::coupled(cfg.weights, cfg.bc_loss_form);
  const FdReport rep = fd_check(spec, params, c, set, obj, opts);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  char buf[256];
  std::snprintf(buf, sizeof buf,
                "adcheck: %s net %dx%d, %d points per family, %zu coordinates, h=%g\n"
                "max relative error %.3e at coordinate %zu (tolerance %g)\n",
                to_string(spec.output_mode).c_str(), spec.hidden_layers, spec.width, points,
                rep.checked, rep.step, rep.max_rel_error, rep.worst_index, rep.tolerance);
  out << buf;
  std::snprintf(buf, sizeof buf, "%s (%zu failing, %.1f s)\n", rep.passed() ? "PASS" : "FAIL",
                rep.failing.size(), secs);
  out << buf;
  return rep.passed() ? 0 : 1;
}

}  // namespace

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"tpinn: pipeline transient simulation and physics-informed network training"};
  app.require_subcommand(1);

  Globals g;
  app.add_option("--seed", g.seed, "Override the seed of a training or adcheck config");
  app.add_option("--out-dir", g.out_dir, "Directory for relative output paths");
  app.add_option("--format", g.format, "Report format")->check(CLI::IsMember({"csv", "table"}));

  std::string a1, a2, output, trace, residuals, label;
  std::vector<std::string> many;

  auto* gen = app.add_subcommand("generate", "Run the characteristic solver and export a dataset");
  gen->add_option("scenario", a1, "Scenario config (JSON)")->required();
  gen->add_option("-o,--output", output, "Dataset CSV path")->required();

  auto* trn = app.add_subcommand("train", "Train a model on a dataset");
  trn->add_option("config", a1, "Training config (JSON)")->required();
  trn->add_option("dataset", a2, "Dataset CSV")->required();
  trn->add_option("-o,--output", output, "Checkpoint path")->required();
  trn->add_option("--trace", trace, "Write the loss trace CSV here");
  trn->add_option("--label", label, "Model name in reports (default: baseline tag)");

  auto* evl = app.add_subcommand("eval", "Score a checkpoint against a dataset");
  evl->add_option("checkpoint", a1)->required();
  evl->add_option("dataset", a2)->required();
  evl->add_option("--residuals", residuals, "Write the per-time mean |dP| series here");

  auto* cmp = app.add_subcommand("compare", "Score several checkpoints (last argument is the dataset)");
  cmp->add_option("paths", many, "checkpoint... dataset")->required()->expected(2, -1);

  int points = 32;
  FdOptions fd;
  auto* adc = app.add_subcommand("adcheck", "Check tape gradients against finite differences");
  adc->add_option("config", a1, "Training config (JSON)")->required();
  adc->add_option("--points", points, "Points per family")->check(CLI::PositiveNumber);
  adc->add_option("--step", fd.step, "Central-difference step")->check(CLI::PositiveNumber);
  adc->add_option("--tolerance", fd.tolerance)->check(CLI::PositiveNumber);
  adc->add_option("--max-coordinates", fd.max_coordinates, "0 checks every parameter");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*gen) return cmd_generate(g, a1, output, out);
    if (*trn) return cmd_train(g, a1, a2, output, trace, label, out, err);
    if (*evl) return cmd_eval(g, a1, a2, residuals, out);
    if (*cmp) return cmd_compare(g, many, out);
    if (*adc) return cmd_adcheck(g, a1, points, fd, out);
  } catch (const UsageError& e) {
    err << "error: usage: " << e.what() << '\n' << app.help();
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.category() << ": " << e.what() << '\n';
    return 1;
  } catch (const fs::filesystem_error& e) {
    err << "error: io: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: internal: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

int run_cli(int argc, char** argv) { return run_cli(argc, argv, std::cout, std::cerr); }

}  // namespace tpinn::cli
