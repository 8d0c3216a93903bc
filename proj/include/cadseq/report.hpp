#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cadseq/metrics.hpp"
#include "cadseq/render.hpp"

namespace cadseq {

struct PrefixMetrics {
  int n = 1;
  double acp = 0.0;
  double asot = 0.0;
  double edsot = 0.0;
  double neg_edsot = 0.0;
  double aot = 0.0;
  double ap1 = 0.0;
  double ap2 = 0.0;
  double msot_tc = 0.0;
  double msot_cs = 0.0;
};

// ACP and AP1 at eta = 0..255 for one prefix length.
struct ToleranceSweep {
  int n = 1;
  std::vector<double> acp;
  std::vector<double> ap1;
};

// AP1 of a single slot of one operation type against eta; NaN entries when
// the GT prefixes never contain that type.
struct ParameterCurve {
  std::string name;  // e.g. "arc.alpha"
  OpType type = OpType::Line;
  Slot slot = Slot::X;
  std::vector<double> ap1;
  double auc = 0.0;
};

struct GeometryMetrics {
  std::size_t evaluated = 0;
  std::size_t parsed = 0;
  std::size_t compared = 0;  // parsed pairs whose GT also evaluates
  double parsing_rate = 0.0;
  double iou_mean = 0.0;
  double iou_std = 0.0;
  double mse_mean = 0.0;
  double mse_std = 0.0;
};

struct MetricsReport {
  std::size_t pairs = 0;
  int eta = kDefaultTolerance;
  int prefix_max = kDefaultPrefixMax;
  std::vector<PrefixMetrics> prefixes;
  std::vector<ToleranceSweep> sweeps;
  double ap1_auc = 0.0;  // overall, at prefix_max
  std::vector<ParameterCurve> parameters;
  std::optional<GeometryMetrics> geometry;
};

struct ReportOptions {
  int eta = kDefaultTolerance;
  int prefix_max = kDefaultPrefixMax;
  bool geometry = true;
  int resolution = kDefaultResolution;
  int width = kDefaultImageSize;
  int height = kDefaultImageSize;
  Camera camera;
  int threads = 0;
};

// The parameter curves reported, in order:
// sketch.I, line.x, line.y, arc.x, arc.y, arc.alpha, circle.x, circle.y,
// circle.r, extrude.d.
std::vector<ParameterCurve> parameter_slots();

// Throws EmptyInput for no pairs, RangeError for bad options.
MetricsReport compute_report(std::span<const PredictionPair> pairs, const ReportOptions& options = {});

std::string report_to_json(const MetricsReport& report);
MetricsReport report_from_json(std::string_view text);
std::string report_to_text(const MetricsReport& report);

// Pairs every *.json matrix in gt_dir with the same file name in pred_dir,
// ordered by file name. IoError for a missing prediction, EmptyInput for an
// empty GT directory.
std::vector<PredictionPair> load_pairs(const std::filesystem::path& gt_dir, const std::filesystem::path& pred_dir);

}  // namespace cadseq
