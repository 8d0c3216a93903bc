#include "cadseq/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <json.hpp>

#include "cadseq/error.hpp"
#include "cadseq/io.hpp"
#include "parallel.hpp"

namespace cadseq {

using json = nlohmann::ordered_json;

std::vector<ParameterCurve> parameter_slots() {
  auto curve = [](const char* name, OpType t, Slot s) {
    ParameterCurve c;
    c.name = name;
    c.type = t;
    c.slot = s;
    return c;
  };
  return {
      curve("sketch.I", OpType::Sketch, Slot::Plane), curve("line.x", OpType::Line, Slot::X),
      curve("line.y", OpType::Line, Slot::Y),         curve("arc.x", OpType::Arc, Slot::X),
      curve("arc.y", OpType::Arc, Slot::Y),           curve("arc.alpha", OpType::Arc, Slot::Sweep),
      curve("circle.x", OpType::Circle, Slot::X),     curve("circle.y", OpType::Circle, Slot::Y),
      curve("circle.r", OpType::Circle, Slot::Radius), curve("extrude.d", OpType::Extrude, Slot::Depth),
  };
}

namespace {

struct GeometrySample {
  bool parsed = false;
  bool compared = false;
  double iou = 0.0;
  double mse = 0.0;
};

std::pair<double, double> mean_std(const std::vector<double>& v) {
  if (v.empty()) return {0.0, 0.0};
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double var = 0.0;
  for (double x : v) var += (x - mean) * (x - mean);
  return {mean, std::sqrt(var / static_cast<double>(v.size()))};
}

GeometryMetrics geometry_metrics(std::span<const PredictionPair> pairs, const ReportOptions& opt) {
  std::vector<GeometrySample> samples(pairs.size());
  detail::parallel_for(pairs.size(), detail::resolve_thread_count(opt.threads), [&](std::size_t i) {
    GeometrySample& s = samples[i];
    SolidScene pred;
    try {
      pred = evaluate_program(devectorize(pairs[i].pred), opt.resolution);
      s.parsed = true;
    } catch (const Error&) {
      return;
    }
    SolidScene gt;
    try {
      gt = evaluate_program(devectorize(pairs[i].gt), opt.resolution);
    } catch (const Error&) {
      return;
    }
    // Both scenes share the lattice only when their scales agree.
    if (!(gt.lattice == pred.lattice)) return;
    s.compared = true;
    s.iou = voxel_iou(gt.occupancy(), pred.occupancy());
    s.mse = image_mse(render(gt, opt.camera, opt.width, opt.height), render(pred, opt.camera, opt.width, opt.height));
  });

  GeometryMetrics g;
  g.evaluated = pairs.size();
  std::vector<double> ious, mses;
  for (const auto& s : samples) {
    g.parsed += s.parsed;
    if (!s.compared) continue;
    ious.push_back(s.iou);
    mses.push_back(s.mse);
  }
  g.compared = ious.size();
  g.parsing_rate = g.evaluated ? static_cast<double>(g.parsed) / static_cast<double>(g.evaluated) : 0.0;
  std::tie(g.iou_mean, g.iou_std) = mean_std(ious);
  std::tie(g.mse_mean, g.mse_std) = mean_std(mses);
  return g;
}

json number_or_null(double v) { return std::isnan(v) ? json(nullptr) : json(v); }

double number_from(const json& j) { return j.is_null() ? std::nan("") : j.get<double>(); }

std::vector<double> numbers_from(const json& j) {
  std::vector<double> out;
  for (const auto& v : j) out.push_back(number_from(v));
  return out;
}

json numbers_to_json(const std::vector<double>& v) {
  json arr = json::array();
  for (double x : v) arr.push_back(number_or_null(x));
  return arr;
}

std::string fixed(double v, int digits = 4) {
  if (std::isnan(v)) return "n/a";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

MetricsReport compute_report(std::span<const PredictionPair> pairs, const ReportOptions& opt) {
  if (pairs.empty()) throw Error(ErrorCode::EmptyInput, "no prediction pairs");
  if (opt.eta < 0 || opt.eta > kMaxTolerance) throw Error(ErrorCode::RangeError, "tolerance must be in 0..255");
  if (opt.prefix_max < 1 || opt.prefix_max > kMaxProgramRows) {
    throw Error(ErrorCode::RangeError, "prefix maximum must be in 1..10");
  }

  MetricsReport r;
  r.pairs = pairs.size();
  r.eta = opt.eta;
  r.prefix_max = opt.prefix_max;
  for (int n = 1; n <= opt.prefix_max; ++n) {
    PrefixMetrics m;
    m.n = n;
    m.acp = acp(pairs, n, opt.eta);
    m.asot = asot(pairs, n);
    m.edsot = edsot(pairs, n);
    m.neg_edsot = 0.0 - m.edsot;
    m.aot = aot(pairs, n);
    m.ap1 = ap1(pairs, n, opt.eta);
    m.ap2 = ap2(pairs, n, opt.eta);
    auto sim = msot(pairs, n);
    m.msot_tc = sim.tc;
    m.msot_cs = sim.cs;
    r.prefixes.push_back(m);

    ToleranceSweep sweep;
    sweep.n = n;
    for (int eta = 0; eta <= kMaxTolerance; ++eta) {
      sweep.acp.push_back(acp(pairs, n, eta));
      sweep.ap1.push_back(ap1(pairs, n, eta));
    }
    r.sweeps.push_back(std::move(sweep));
  }
  r.ap1_auc = auc_ap1(r.sweeps.back().ap1);

  r.parameters = parameter_slots();
  for (auto& c : r.parameters) {
    for (int eta = 0; eta <= kMaxTolerance; ++eta) c.ap1.push_back(ap1_parameter(pairs, opt.prefix_max, eta, c.type, c.slot));
    c.auc = std::isnan(c.ap1.front()) ? std::nan("") : auc_ap1(c.ap1);
  }

  if (opt.geometry) r.geometry = geometry_metrics(pairs, opt);
  return r;
}

std::string report_to_json(const MetricsReport& r) {
  json doc;
  doc["format"] = "cadseq-report";
  doc["version"] = io::kReportFormatVersion;
  doc["pairs"] = r.pairs;
  doc["eta"] = r.eta;
  doc["prefix_max"] = r.prefix_max;
  json prefixes = json::array();
  for (const auto& m : r.prefixes) {
    prefixes.push_back({{"n", m.n},
                        {"acp", m.acp},
                        {"asot", m.asot},
                        {"edsot", m.edsot},
                        {"neg_edsot", m.neg_edsot},
                        {"aot", m.aot},
                        {"ap1", m.ap1},
                        {"ap2", m.ap2},
                        {"msot_tc", m.msot_tc},
                        {"msot_cs", m.msot_cs}});
  }
  doc["prefix"] = prefixes;
  json sweeps = json::array();
  for (const auto& s : r.sweeps) {
    sweeps.push_back({{"n", s.n}, {"acp", numbers_to_json(s.acp)}, {"ap1", numbers_to_json(s.ap1)}});
  }
  doc["tolerance_sweep"] = sweeps;
  doc["ap1_auc"] = number_or_null(r.ap1_auc);
  json params = json::array();
  for (const auto& c : r.parameters) {
    params.push_back({{"name", c.name}, {"auc", number_or_null(c.auc)}, {"ap1", numbers_to_json(c.ap1)}});
  }
  doc["parameters"] = params;
  if (r.geometry) {
    const auto& g = *r.geometry;
    doc["geometry"] = {{"evaluated", g.evaluated}, {"parsed", g.parsed},     {"compared", g.compared},
                       {"parsing_rate", g.parsing_rate}, {"iou_mean", g.iou_mean}, {"iou_std", g.iou_std},
                       {"mse_mean", g.mse_mean},  {"mse_std", g.mse_std}};
  } else {
    doc["geometry"] = nullptr;
  }
  return doc.dump(2) + "\n";
}

MetricsReport report_from_json(std::string_view text) {
  try {
    const json doc = json::parse(text);
    if (doc.value("format", "") != "cadseq-report") throw Error(ErrorCode::FormatError, "not a report document");
    MetricsReport r;
    r.pairs = doc.at("pairs").get<std::size_t>();
    r.eta = doc.at("eta").get<int>();
    r.prefix_max = doc.at("prefix_max").get<int>();
    for (const auto& m : doc.at("prefix")) {
      PrefixMetrics p;
      p.n = m.at("n").get<int>();
      p.acp = m.at("acp").get<double>();
      p.asot = m.at("asot").get<double>();
      p.edsot = m.at("edsot").get<double>();
      p.neg_edsot = m.at("neg_edsot").get<double>();
      p.aot = m.at("aot").get<double>();
      p.ap1 = m.at("ap1").get<double>();
      p.ap2 = m.at("ap2").get<double>();
      p.msot_tc = m.at("msot_tc").get<double>();
      p.msot_cs = m.at("msot_cs").get<double>();
      r.prefixes.push_back(p);
    }
    for (const auto& s : doc.at("tolerance_sweep")) {
      r.sweeps.push_back({s.at("n").get<int>(), numbers_from(s.at("acp")), numbers_from(s.at("ap1"))});
    }
    r.ap1_auc = number_from(doc.at("ap1_auc"));
    auto slots = parameter_slots();
    for (const auto& c : doc.at("parameters")) {
      ParameterCurve curve;
      curve.name = c.at("name").get<std::string>();
      for (const auto& s : slots) {
        if (s.name == curve.name) {
          curve.type = s.type;
          curve.slot = s.slot;
        }
      }
      curve.auc = number_from(c.at("auc"));
      curve.ap1 = numbers_from(c.at("ap1"));
      r.parameters.push_back(std::move(curve));
    }
    if (doc.contains("geometry") && !doc["geometry"].is_null()) {
      const auto& g = doc["geometry"];
      GeometryMetrics m;
      m.evaluated = g.at("evaluated").get<std::size_t>();
      m.parsed = g.at("parsed").get<std::size_t>();
      m.compared = g.at("compared").get<std::size_t>();
      m.parsing_rate = g.at("parsing_rate").get<double>();
      m.iou_mean = g.at("iou_mean").get<double>();
      m.iou_std = g.at("iou_std").get<double>();
      m.mse_mean = g.at("mse_mean").get<double>();
      m.mse_std = g.at("mse_std").get<double>();
      r.geometry = m;
    }
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::FormatError, std::string("report: ") + e.what());
  }
}

std::string report_to_text(const MetricsReport& r) {
  std::string out;
  char buf[160];
  std::snprintf(buf, sizeof buf, "pairs: %zu  tolerance: %d\n\n", r.pairs, r.eta);
  out += buf;

  std::snprintf(buf, sizeof buf, "%-8s", "metric");
  out += buf;
  for (const auto& m : r.prefixes) {
    std::snprintf(buf, sizeof buf, " %8s", ("n=" + std::to_string(m.n)).c_str());
    out += buf;
  }
  out += "\n";
  auto row = [&](const char* name, double PrefixMetrics::*field) {
    std::snprintf(buf, sizeof buf, "%-8s", name);
    out += buf;
    for (const auto& m : r.prefixes) {
      std::snprintf(buf, sizeof buf, " %8s", fixed(m.*field).c_str());
      out += buf;
    }
    out += "\n";
  };
  row("ACP", &PrefixMetrics::acp);
  row("ASOT", &PrefixMetrics::asot);
  row("-EDSOT", &PrefixMetrics::neg_edsot);
  row("AOT", &PrefixMetrics::aot);
  row("AP1", &PrefixMetrics::ap1);
  row("AP2", &PrefixMetrics::ap2);
  row("TC", &PrefixMetrics::msot_tc);
  row("CS", &PrefixMetrics::msot_cs);

  std::snprintf(buf, sizeof buf, "\nAP1 AUC over tolerance 0..255 (n=%d)\n", r.prefix_max);
  out += buf;
  std::snprintf(buf, sizeof buf, "  %-10s %s\n", "overall", fixed(r.ap1_auc).c_str());
  out += buf;
  for (const auto& c : r.parameters) {
    std::snprintf(buf, sizeof buf, "  %-10s %s\n", c.name.c_str(), fixed(c.auc).c_str());
    out += buf;
  }

  if (r.geometry) {
    const auto& g = *r.geometry;
    out += "\ngeometry\n";
    std::snprintf(buf, sizeof buf, "  parsing rate %s (%zu/%zu)\n", fixed(g.parsing_rate).c_str(), g.parsed,
                  g.evaluated);
    out += buf;
    std::snprintf(buf, sizeof buf, "  IoU          mean %s  std %s  (%zu pairs)\n", fixed(g.iou_mean).c_str(),
                  fixed(g.iou_std).c_str(), g.compared);
    out += buf;
    std::snprintf(buf, sizeof buf, "  image MSE    mean %s  std %s\n", fixed(g.mse_mean, 6).c_str(),
                  fixed(g.mse_std, 6).c_str());
    out += buf;
  }
  return out;
}

std::vector<PredictionPair> load_pairs(const std::filesystem::path& gt_dir, const std::filesystem::path& pred_dir) {
  namespace fs = std::filesystem;
  for (const auto& dir : {gt_dir, pred_dir}) {
    if (!fs::is_directory(dir)) throw Error(ErrorCode::IoError, "not a directory: " + dir.string());
  }
  std::vector<fs::path> names;
  for (const auto& entry : fs::directory_iterator(gt_dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json" && entry.path().filename() != "manifest.json") {
      names.push_back(entry.path().filename());
    }
  }
  if (names.empty()) throw Error(ErrorCode::EmptyInput, "no matrices in " + gt_dir.string());
  std::sort(names.begin(), names.end());

  std::vector<PredictionPair> pairs;
  for (const auto& name : names) {
    const fs::path pred_path = pred_dir / name;
    if (!fs::exists(pred_path)) throw Error(ErrorCode::IoError, "missing prediction " + pred_path.string());
    PredictionPair p;
    p.id = name.stem().string();
    p.gt = io::matrix_from_json(io::read_text(gt_dir / name));
    p.pred = io::matrix_from_json(io::read_text(pred_path));
    pairs.push_back(std::move(p));
  }
  return pairs;
}

}  // namespace cadseq
