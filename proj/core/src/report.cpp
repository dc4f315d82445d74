#include "tpinn/report.h"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "tpinn/errors.h"
#include "tpinn/losses.h"

namespace tpinn {

namespace {

std::string num(double v, const char* fmt) {
  if (std::isnan(v)) return "nan";
  char buf[48];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

MetricTriple score(const std::vector<double>& pred, const std::vector<double>& truth) {
  MetricTriple m;
  m.rmse = rmse(pred, truth);
  const MapeResult mp = mape(pred, truth);
  m.mape_pct = mp.percent;
  m.mape_skipped = mp.skipped;
  try {
    m.r2 = r2(pred, truth);
  } catch (const UndefinedMetric&) {
    m.r2 = std::numeric_limits<double>::quiet_NaN();
  }
  return m;
}

}  // namespace

void MetricsReport::write_csv(std::ostream& os) const {
  os << "model,segment,quantity,rmse,mape_pct,r2\n";
  for (const MetricsRow& r : rows) {
    os << r.model << ',' << r.segment << ',' << r.quantity << ',' << num(r.metrics.rmse, "%.17g")
       << ',' << num(r.metrics.mape_pct, "%.17g") << ',' << num(r.metrics.r2, "%.17g") << '\n';
  }
}

void MetricsReport::write_table(std::ostream& os) const {
  struct Line {
    std::string model, segment;
    const MetricTriple* p = nullptr;
    const MetricTriple* q = nullptr;
  };
  std::vector<Line> lines;
  for (const MetricsRow& r : rows) {
    Line* line = nullptr;
    for (Line& l : lines) {
      if (l.model == r.model && l.segment == r.segment) line = &l;
    }
    if (!line) {
      lines.push_back({r.model, r.segment});
      line = &lines.back();
    }
    (r.quantity == "pressure" ? line->p : line->q) = &r.metrics;
  }

  std::size_t wm = 5, ws = 7;
  for (const Line& l : lines) {
    wm = std::max(wm, l.model.size());
    ws = std::max(ws, l.segment.size());
  }
  auto cell = [](const MetricTriple* m, int which) -> std::string {
    if (!m) return "-";
    switch (which) {
      case 0: return num(m->rmse, "%.4f");
      case 1: return num(m->mape_pct, "%.3f");
      default: return num(m->r2, "%.3f");
    }
  };
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-*s  %-*s  %12s %10s %10s  %12s %10s %10s\n", int(wm), "model",
                int(ws), "segment", "P_RMSE/MPa", "P_MAPE/%", "P_R2", "Q_RMSE/m3h", "Q_MAPE/%", "Q_R2");
  os << buf;
  for (const Line& l : lines) {
    std::snprintf(buf, sizeof buf, "%-*s  %-*s  %12s %10s %10s  %12s %10s %10s\n", int(wm),
                  l.model.c_str(), int(ws), l.segment.c_str(), cell(l.p, 0).c_str(),
                  cell(l.p, 1).c_str(), cell(l.p, 2).c_str(), cell(l.q, 0).c_str(),
                  cell(l.q, 1).c_str(), cell(l.q, 2).c_str());
    os << buf;
  }
}

void MetricsReport::append(const MetricsReport& other) {
  rows.insert(rows.end(), other.rows.begin(), other.rows.end());
}

FieldGrid predict_on(const Checkpoint& ckpt, const Dataset& data) {
  return predict_field(ckpt.spec, ckpt.params, data.meta.fluid, data.meta.pipe.gravity,
                       data.field.xs(), data.field.ts());
}

std::vector<std::size_t> segment_columns(const Dataset& data, const Segment& segment) {
  std::vector<std::size_t> out;
  for (std::size_t i : interior_columns(data.field, data.meta.offtake_position)) {
    const double x = data.field.xs()[i];
    if (x >= segment.x_begin && x <= segment.x_end) out.push_back(i);
  }
  return out;
}

MetricsReport evaluate_field(const std::string& model, const FieldGrid& pred, const Dataset& data) {
  const FieldGrid& truth = data.field;
  if (!pred.congruent(truth)) throw ShapeError("prediction grid does not match the dataset grid");
  const double to_m3h = data.meta.pipe.area() * kSecondsPerHour;

  std::vector<Segment> segments = data.meta.segments;
  if (segments.empty()) segments = default_segments(data.meta.pipe.length, data.meta.offtake_position);

  MetricsReport report;
  for (const Segment& seg : segments) {
    const auto cols = segment_columns(data, seg);
    if (cols.empty()) continue;
    std::vector<double> pp, pt, qp, qt;
    for (std::size_t j = 0; j < truth.nt(); ++j) {
      for (std::size_t i : cols) {
        pp.push_back(pred.pressure(j, i));
        pt.push_back(truth.pressure(j, i));
        qp.push_back(pred.velocity(j, i) * to_m3h);
        qt.push_back(truth.velocity(j, i) * to_m3h);
      }
    }
    report.rows.push_back({model, seg.name, "pressure", score(pp, pt)});
    report.rows.push_back({model, seg.name, "flowrate", score(qp, qt)});
  }
  return report;
}

MetricsReport evaluate_model(const Checkpoint& ckpt, const Dataset& data) {
  return evaluate_field(ckpt.label.empty() ? "model" : ckpt.label, predict_on(ckpt, data), data);
}

MetricsReport compare(const std::vector<Checkpoint>& models, const Dataset& data) {
  MetricsReport report;
  for (const Checkpoint& m : models) report.append(evaluate_model(m, data));
  return report;
}

}  // namespace tpinn
