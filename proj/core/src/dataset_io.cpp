#include "tpinn/dataset_io.h"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "config_json.h"
#include "tpinn/errors.h"

namespace tpinn {

using nlohmann::json;

namespace {

void put(std::ostream& os, double v) {
  char buf[32];
  const int n = std::snprintf(buf, sizeof buf, "%.17g", v);
  os.write(buf, n);
}

double parse_double(std::string_view s, std::size_t line) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw IoError("dataset line " + std::to_string(line) + ": cannot parse '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace

void write_field_csv(const FieldGrid& field, std::ostream& os) {
  os << "x_m,t_s,pressure_mpa,velocity_mps\n";
  for (std::size_t j = 0; j < field.nt(); ++j) {
    for (std::size_t i = 0; i < field.nx(); ++i) {
      put(os, field.xs()[i]);
      os << ',';
      put(os, field.ts()[j]);
      os << ',';
      put(os, field.pressure(j, i));
      os << ',';
      put(os, field.velocity(j, i));
      os << '\n';
    }
  }
}

FieldGrid read_field_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw IoError("dataset is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "x_m,t_s,pressure_mpa,velocity_mps") {
    throw IoError("dataset header must be x_m,t_s,pressure_mpa,velocity_mps");
  }
  struct Row {
    double x, t, p, v;
  };
  std::vector<Row> rows;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::array<std::string_view, 4> cell;
    std::string_view rest(line);
    for (std::size_t c = 0; c < 4; ++c) {
      const auto comma = rest.find(',');
      if ((comma == std::string_view::npos) != (c == 3)) {
        throw IoError("dataset line " + std::to_string(lineno) + ": expected 4 columns");
      }
      cell[c] = rest.substr(0, comma);
      rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
    }
    rows.push_back({parse_double(cell[0], lineno), parse_double(cell[1], lineno),
                    parse_double(cell[2], lineno), parse_double(cell[3], lineno)});
  }
  if (rows.empty()) throw IoError("dataset has no rows");

  std::vector<double> xs;
  for (const Row& r : rows) {
    if (r.t != rows.front().t) break;
    xs.push_back(r.x);
  }
  if (rows.size() % xs.size() != 0) throw IoError("dataset rows do not form a rectangular grid");
  std::vector<double> ts;
  for (std::size_t k = 0; k < rows.size(); k += xs.size()) ts.push_back(rows[k].t);

  FieldGrid field(xs, ts);
  for (std::size_t j = 0; j < ts.size(); ++j) {
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const Row& r = rows[j * xs.size() + i];
      if (r.x != xs[i] || r.t != ts[j]) {
        throw IoError("dataset row " + std::to_string(j * xs.size() + i + 2) +
                      " breaks the t-then-x ordering");
      }
      field.pressure(j, i) = r.p;
      field.velocity(j, i) = r.v;
    }
  }
  field.validate();
  return field;
}

std::filesystem::path meta_path(const std::filesystem::path& csv) {
  std::filesystem::path p = csv;
  p += ".meta.json";
  return p;
}

void write_dataset(const std::filesystem::path& csv, const Dataset& dataset) {
  {
    std::ofstream os(csv);
    if (!os) throw IoError("cannot write " + csv.string());
    write_field_csv(dataset.field, os);
    if (!os) throw IoError("write failed for " + csv.string());
  }
  const DatasetMeta& m = dataset.meta;
  json j;
  j["format"] = "tpinn-dataset";
  j["version"] = 1;
  j["pipe"] = detail::pipe_to_json(m.pipe);
  j["fluid"] = detail::fluid_to_json(m.fluid);
  j["wave_speed"] = m.wave_speed;
  j["moc_wave_speed"] = m.moc_wave_speed;
  j["moc_dt"] = m.moc_dt;
  j["duration"] = m.duration;
  j["offtake_position"] = m.offtake_position ? json(*m.offtake_position) : json(nullptr);
  j["segments"] = json::array();
  for (const auto& s : m.segments) {
    j["segments"].push_back({{"name", s.name}, {"x_begin", s.x_begin}, {"x_end", s.x_end}});
  }
  std::ofstream os(meta_path(csv));
  if (!os) throw IoError("cannot write " + meta_path(csv).string());
  os << j.dump(2) << '\n';
}

Dataset read_dataset(const std::filesystem::path& csv) {
  std::ifstream is(csv);
  if (!is) throw IoError("cannot open dataset " + csv.string());
  Dataset d;
  d.field = read_field_csv(is);

  const auto mp = meta_path(csv);
  std::ifstream ms(mp);
  if (!ms) throw IoError("cannot open dataset metadata " + mp.string());
  json j;
  try {
    j = json::parse(ms);
    d.meta.pipe = detail::pipe_from_json(j.at("pipe"), nullptr);
    d.meta.fluid = detail::fluid_from_json(j.at("fluid"));
    d.meta.wave_speed = j.at("wave_speed").get<double>();
    d.meta.moc_wave_speed = j.value("moc_wave_speed", d.meta.wave_speed);
    d.meta.moc_dt = j.value("moc_dt", 0.0);
    d.meta.duration = j.value("duration", d.field.ts().back());
    if (j.contains("offtake_position") && !j["offtake_position"].is_null()) {
      d.meta.offtake_position = j["offtake_position"].get<double>();
    }
    for (const auto& s : j.value("segments", json::array())) {
      d.meta.segments.push_back(
          {s.at("name").get<std::string>(), s.at("x_begin").get<double>(), s.at("x_end").get<double>()});
    }
  } catch (const json::exception& e) {
    throw IoError("malformed dataset metadata " + mp.string() + ": " + e.what());
  }
  if (d.meta.segments.empty()) {
    d.meta.segments = default_segments(d.meta.pipe.length, d.meta.offtake_position);
  }
  return d;
}

Dataset make_dataset(const Scenario& scenario, double moc_dt, double dx, double dt) {
  scenario.validate();
  const MocSystem system = make_system(scenario, moc_dt);
  const FieldGrid full = run_from(scenario, system, steady_state(scenario, system));
  Dataset d;
  d.field = sample(full, uniform_axis(scenario.pipe.length, dx), uniform_axis(scenario.duration, dt));
  d.meta.pipe = scenario.pipe;
  d.meta.fluid = scenario.fluid;
  d.meta.wave_speed = system.grid.nominal_wave_speed;
  d.meta.moc_wave_speed = system.grid.wave_speed;
  d.meta.moc_dt = system.grid.dt;
  d.meta.duration = scenario.duration;
  if (scenario.offtake) d.meta.offtake_position = scenario.offtake->position;
  d.meta.segments = default_segments(scenario.pipe.length, d.meta.offtake_position);
  return d;
}

std::vector<Segment> default_segments(double length, std::optional<double> offtake_position) {
  if (!offtake_position) return {{"G1", 0.0, length}};
  return {{"G1", 0.0, *offtake_position}, {"G2", *offtake_position, length}};
}

}  // namespace tpinn
