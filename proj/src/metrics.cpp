#include "cadseq/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

#include "cadseq/error.hpp"

namespace cadseq {

namespace {

void check_pairs(std::span<const PredictionPair> pairs) {
  if (pairs.empty()) throw Error(ErrorCode::EmptyInput, "no prediction pairs");
}

void check_prefix(int n) {
  if (n < 1 || n > kMaxProgramRows) throw Error(ErrorCode::RangeError, "prefix length must be in 1..10");
}

void check_eta(int eta) {
  if (eta < 0 || eta > kMaxTolerance) throw Error(ErrorCode::RangeError, "tolerance must be in 0..255");
}

// Number of matching slots (0..6) between two rows of the same type.
int row_score(const OpVector& gt, const OpVector& pred, int eta) {
  int score = 0;
  for (int k = 0; k < kParamCount; ++k) score += slot_matches(gt.params[k], pred.params[k], static_cast<Slot>(k), eta);
  return score;
}

int row_distance(const OpVector& a, const OpVector& b) {
  int d = 0;
  for (int k = 0; k < kParamCount; ++k) d += std::abs(a.params[k] - b.params[k]);
  return d;
}

}  // namespace

std::vector<OpVector> prefix_rows(const FeatureMatrix& matrix, int n) {
  const int len = std::min(matrix.length(), n);
  return {matrix.rows.begin(), matrix.rows.begin() + std::max(0, len)};
}

std::vector<int> prefix_types(const FeatureMatrix& matrix, int n) {
  std::vector<int> out;
  for (const OpVector& row : prefix_rows(matrix, n)) out.push_back(row.t);
  return out;
}

bool slot_matches(int gt, int pred, Slot slot, int eta) {
  if (gt == kUnused) return pred == kUnused;
  if (pred < 0 || pred > kMaxTolerance) return false;
  if (slot == Slot::Plane) return pred == gt;
  return std::abs(pred - gt) <= eta;
}

double acp(std::span<const PredictionPair> pairs, int n, int eta) {
  check_pairs(pairs);
  check_prefix(n);
  check_eta(eta);
  std::size_t hits = 0;
  for (const auto& p : pairs) {
    const auto g = prefix_rows(p.gt, n), q = prefix_rows(p.pred, n);
    bool ok = g.size() == q.size();
    for (std::size_t j = 0; ok && j < g.size(); ++j) {
      if (g[j].t != q[j].t) {
        ok = false;
      } else if (eta < kMaxTolerance) {
        ok = row_score(g[j], q[j], eta) == kParamCount;
      }
    }
    // At the saturating tolerance every parameter value is admissible, so
    // program accuracy reduces to type-sequence accuracy.
    hits += ok;
  }
  return static_cast<double>(hits) / static_cast<double>(pairs.size());
}

double asot(std::span<const PredictionPair> pairs, int n) {
  check_pairs(pairs);
  check_prefix(n);
  std::size_t hits = 0;
  for (const auto& p : pairs) hits += prefix_types(p.gt, n) == prefix_types(p.pred, n);
  return static_cast<double>(hits) / static_cast<double>(pairs.size());
}

std::size_t levenshtein(std::span<const int> a, std::span<const int> b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] != b[j - 1])});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

double edsot(std::span<const PredictionPair> pairs, int n) {
  check_pairs(pairs);
  check_prefix(n);
  double total = 0.0;
  for (const auto& p : pairs) {
    total += static_cast<double>(levenshtein(prefix_types(p.gt, n), prefix_types(p.pred, n)));
  }
  return total / static_cast<double>(pairs.size());
}

double aot(std::span<const PredictionPair> pairs, int n) {
  check_pairs(pairs);
  check_prefix(n);
  std::size_t hits = 0, total = 0;
  for (const auto& p : pairs) {
    const auto g = prefix_types(p.gt, n), q = prefix_types(p.pred, n);
    const std::size_t l = std::min(g.size(), q.size());
    for (std::size_t j = 0; j < l; ++j) hits += g[j] == q[j];
    total += g.size();
  }
  return total ? static_cast<double>(hits) / static_cast<double>(total) : 0.0;
}

double ap1(std::span<const PredictionPair> pairs, int n, int eta) {
  check_pairs(pairs);
  check_prefix(n);
  check_eta(eta);
  std::size_t hits = 0, total = 0;
  for (const auto& p : pairs) {
    const auto g = prefix_rows(p.gt, n), q = prefix_rows(p.pred, n);
    const std::size_t l = std::min(g.size(), q.size());
    for (std::size_t j = 0; j < l; ++j) {
      if (g[j].t == q[j].t) hits += static_cast<std::size_t>(row_score(g[j], q[j], eta));
    }
    total += kParamCount * g.size();
  }
  return total ? static_cast<double>(hits) / static_cast<double>(total) : 0.0;
}

double ap1_parameter(std::span<const PredictionPair> pairs, int n, int eta, OpType type, Slot slot) {
  check_pairs(pairs);
  check_prefix(n);
  check_eta(eta);
  const int t = static_cast<int>(type);
  const int k = static_cast<int>(slot);
  std::size_t hits = 0, total = 0;
  for (const auto& p : pairs) {
    const auto g = prefix_rows(p.gt, n), q = prefix_rows(p.pred, n);
    for (std::size_t j = 0; j < g.size(); ++j) {
      if (g[j].t != t) continue;
      ++total;
      if (j < q.size() && q[j].t == t) hits += slot_matches(g[j].params[k], q[j].params[k], slot, eta);
    }
  }
  if (total == 0) return std::numeric_limits<double>::quiet_NaN();
  return static_cast<double>(hits) / static_cast<double>(total);
}

double ap2(std::span<const PredictionPair> pairs, int n, int eta) {
  check_pairs(pairs);
  check_prefix(n);
  check_eta(eta);
  std::size_t hits = 0, total = 0;
  for (const auto& p : pairs) {
    const auto g = prefix_rows(p.gt, n), q = prefix_rows(p.pred, n);
    total += kParamCount * g.size();
    // Candidate matches (distance, gt index, pred index) within each type.
    std::vector<std::tuple<int, std::size_t, std::size_t>> candidates;
    for (std::size_t i = 0; i < g.size(); ++i) {
      for (std::size_t j = 0; j < q.size(); ++j) {
        if (g[i].t == q[j].t) candidates.emplace_back(row_distance(g[i], q[j]), i, j);
      }
    }
    std::sort(candidates.begin(), candidates.end());
    std::vector<bool> gt_used(g.size()), pred_used(q.size());
    for (const auto& [d, i, j] : candidates) {
      if (gt_used[i] || pred_used[j]) continue;
      gt_used[i] = pred_used[j] = true;
      hits += static_cast<std::size_t>(row_score(g[i], q[j], eta));
    }
  }
  return total ? static_cast<double>(hits) / static_cast<double>(total) : 0.0;
}

std::array<int, kOpTypeCount> multiset_vector(std::span<const int> types) {
  std::array<int, kOpTypeCount> v{};
  for (int t : types) {
    if (t >= 0 && t < kOpTypeCount) ++v[static_cast<std::size_t>(t)];
  }
  return v;
}

double tanimoto(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size()) throw Error(ErrorCode::LengthMismatch, "vectors differ in length");
  double ab = 0, aa = 0, bb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab += static_cast<double>(a[i]) * b[i];
    aa += static_cast<double>(a[i]) * a[i];
    bb += static_cast<double>(b[i]) * b[i];
  }
  if (aa == 0 && bb == 0) return 1.0;
  double denom = aa + bb - ab;
  return denom == 0 ? 0.0 : ab / denom;
}

double cosine_similarity(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size()) throw Error(ErrorCode::LengthMismatch, "vectors differ in length");
  double ab = 0, aa = 0, bb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab += static_cast<double>(a[i]) * b[i];
    aa += static_cast<double>(a[i]) * a[i];
    bb += static_cast<double>(b[i]) * b[i];
  }
  if (aa == 0 && bb == 0) return 1.0;
  if (aa == 0 || bb == 0) return 0.0;
  return ab / (std::sqrt(aa) * std::sqrt(bb));
}

MultisetSimilarity msot(std::span<const PredictionPair> pairs, int n) {
  check_pairs(pairs);
  check_prefix(n);
  MultisetSimilarity sum;
  for (const auto& p : pairs) {
    const auto a = multiset_vector(prefix_types(p.gt, n));
    const auto b = multiset_vector(prefix_types(p.pred, n));
    sum.tc += tanimoto(a, b);
    sum.cs += cosine_similarity(a, b);
  }
  const auto count = static_cast<double>(pairs.size());
  return {sum.tc / count, sum.cs / count};
}

double baseline_ap1_no_sketch(int eta) {
  check_eta(eta);
  const double e = eta;
  return (-e * e + 511.0 * e + 256.0) / 65536.0;
}

double baseline_ap1_with_sketch(int eta) {
  return (1.0 / 3.0) * (11.0 / 91.0) + baseline_ap1_no_sketch(eta) * (80.0 / 91.0);
}

double auc_ap1(std::span<const double> curve) {
  if (curve.size() != static_cast<std::size_t>(kToleranceSteps)) {
    throw Error(ErrorCode::LengthMismatch, "tolerance curve needs 256 values");
  }
  double area = 0.0;
  for (std::size_t i = 1; i < curve.size(); ++i) area += 0.5 * (curve[i - 1] + curve[i]);
  return area / kMaxTolerance;
}

double voxel_iou(const VoxelGrid& a, const VoxelGrid& b) {
  if (!(a.lattice() == b.lattice())) throw Error(ErrorCode::LatticeMismatch, "grids are on different lattices");
  const auto ca = a.cells(), cb = b.cells();
  std::size_t inter = 0, uni = 0;
  for (std::size_t i = 0; i < ca.size(); ++i) {
    inter += ca[i] && cb[i];
    uni += ca[i] || cb[i];
  }
  return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

double parsing_rate(std::span<const CadProgram> programs, int resolution) {
  if (programs.empty()) throw Error(ErrorCode::EmptyInput, "no programs");
  std::size_t parsed = 0;
  for (const auto& program : programs) {
    try {
      evaluate_program(program, resolution);
      ++parsed;
    } catch (const Error&) {
    }
  }
  return static_cast<double>(parsed) / static_cast<double>(programs.size());
}

}  // namespace cadseq
