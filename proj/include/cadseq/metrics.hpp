#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "cadseq/dsl.hpp"
#include "cadseq/geom.hpp"
#include "cadseq/vector_rep.hpp"

namespace cadseq {

inline constexpr int kDefaultTolerance = 3;
inline constexpr int kMaxTolerance = kQuantLevels - 1;
inline constexpr int kDefaultPrefixMax = 6;
inline constexpr int kToleranceSteps = kMaxTolerance + 1;

struct PredictionPair {
  FeatureMatrix gt;
  FeatureMatrix pred;
  std::string id;
};

// Rows 1..n after truncating at the first end mark (mark included).
std::vector<OpVector> prefix_rows(const FeatureMatrix& matrix, int n);
std::vector<int> prefix_types(const FeatureMatrix& matrix, int n);

// Slot-level agreement shared by ACP and the AP variants: an unused GT slot
// needs an unused prediction; otherwise the prediction must lie in 0..255
// and within eta (the sketch-plane slot must match exactly).
bool slot_matches(int gt, int pred, Slot slot, int eta);

// All of these throw EmptyInput for an empty pair set and RangeError for n
// outside 1..10 or eta outside 0..255.
double acp(std::span<const PredictionPair> pairs, int n, int eta);
double asot(std::span<const PredictionPair> pairs, int n);
double edsot(std::span<const PredictionPair> pairs, int n);
double aot(std::span<const PredictionPair> pairs, int n);
double ap1(std::span<const PredictionPair> pairs, int n, int eta);
double ap2(std::span<const PredictionPair> pairs, int n, int eta);

// AP1 restricted to one slot of one operation type. NaN when no GT row in
// the prefixes has that type.
double ap1_parameter(std::span<const PredictionPair> pairs, int n, int eta, OpType type, Slot slot);

struct MultisetSimilarity {
  double tc = 0.0;
  double cs = 0.0;
};
MultisetSimilarity msot(std::span<const PredictionPair> pairs, int n);

std::size_t levenshtein(std::span<const int> a, std::span<const int> b);
std::array<int, kOpTypeCount> multiset_vector(std::span<const int> types);
double tanimoto(std::span<const int> a, std::span<const int> b);
double cosine_similarity(std::span<const int> a, std::span<const int> b);

// Chance-level AP1 for uniform guessing over 256 bins. RangeError outside 0..255.
double baseline_ap1_no_sketch(int eta);
double baseline_ap1_with_sketch(int eta);

// Trapezoidal area over eta = 0..255, divided by 255. LengthMismatch unless
// 256 values.
double auc_ap1(std::span<const double> curve);

// |A and B| / |A or B|; 1 when both are empty. LatticeMismatch.
double voxel_iou(const VoxelGrid& a, const VoxelGrid& b);

// Fraction of programs that evaluate to a solid. EmptyInput.
double parsing_rate(std::span<const CadProgram> programs, int resolution = kDefaultResolution);

}  // namespace cadseq
