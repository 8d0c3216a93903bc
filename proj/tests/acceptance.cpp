#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "cadseq/error.hpp"
#include "cadseq/io.hpp"
#include "cadseq/metrics.hpp"
#include "cadseq/report.hpp"
#include "cadseq/synth.hpp"

using namespace cadseq;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void criterion(const char* name, const std::function<Outcome()>& check) {
  Outcome o;
  try {
    o = check();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  std::printf("%s  %s  (%s)\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
  std::fflush(stdout);
  failures += !o.pass;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::size_t levenshtein_oracle(const std::vector<int>& a, const std::vector<int>& b, std::size_t i, std::size_t j) {
  if (i == 0) return j;
  if (j == 0) return i;
  return std::min({levenshtein_oracle(a, b, i - 1, j) + 1, levenshtein_oracle(a, b, i, j - 1) + 1,
                   levenshtein_oracle(a, b, i - 1, j - 1) + (a[i - 1] != b[j - 1])});
}

CadProgram cylinder() {
  return CadProgram::from_body({CadOp::sketch(Plane::XY), CadOp::circle(0.0, 0.0, 0.5), CadOp::extrude(1.0)});
}

CadProgram tri_prism() {
  return CadProgram::from_body({CadOp::sketch(Plane::XY), CadOp::line(0.8, 0.0), CadOp::line(0.0, 0.8),
                                CadOp::line(0.0, 0.0), CadOp::extrude(0.5)});
}

std::vector<FeatureMatrix> load_matrices(const fs::path& root, const DatasetManifest& m) {
  std::vector<FeatureMatrix> out;
  for (const auto& r : m.records) out.push_back(io::matrix_from_json(io::read_text(root / r.matrix_path)));
  return out;
}

// Jitters parameters and occasionally rewrites types; keeps -1 slots unused
// only some of the time so out-of-range and unused disagreements also occur.
std::vector<PredictionPair> perturbed_pairs(const std::vector<FeatureMatrix>& gts, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> pct(0, 99), jitter(-24, 24), type(0, 6), bin(0, 255);
  const int strength = pct(rng);
  std::vector<PredictionPair> pairs;
  for (const auto& g : gts) {
    FeatureMatrix p = g;
    for (auto& row : p.rows) {
      for (int& v : row.params) {
        if (v == kUnused) {
          if (pct(rng) < 2) v = bin(rng);
        } else if (pct(rng) < strength) {
          v = std::clamp(v + jitter(rng), 0, 255);
        }
      }
      if (pct(rng) < strength / 10) row.t = type(rng);
    }
    pairs.push_back({g, p, ""});
  }
  return pairs;
}

std::string dir_digest(const fs::path& root) {
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) files.push_back(fs::relative(e.path(), root));
  }
  std::sort(files.begin(), files.end());
  std::string all;
  for (const auto& f : files) {
    all += f.generic_string();
    all += '\0';
    all += io::read_text(root / f);
    all += '\0';
  }
  return all;
}

}  // namespace

int main() {
  const fs::path work = fs::temp_directory_path() / "cadseq_acceptance";
  fs::remove_all(work);

  criterion("representation round trip on 1000 instantiations", [] {
    RoundTripResult r = roundtrip_check(2024, 1000);
    return Outcome{r.checked == 1000 && r.failures == 0,
                   std::to_string(r.checked) + " checked, " + std::to_string(r.failures) + " failures"};
  });

  criterion("cylinder ground truth at R=64", [] {
    SolidScene s = evaluate_program(cylinder(), 64);
    const double exact = std::numbers::pi * 25.0 * 10.0;
    const double volume = s.bodies.size() == 1 ? s.bodies[0].voxels.volume() : 0.0;
    const double rel = std::abs(volume - exact) / exact;
    // Analytic voxelization: cell centers inside r <= 5, 0 <= z <= 10.
    VoxelGrid analytic(s.lattice);
    const int r = s.lattice.resolution;
    for (int k = 0; k < r; ++k) {
      for (int j = 0; j < r; ++j) {
        for (int i = 0; i < r; ++i) {
          double x = s.lattice.cell_center(i), y = s.lattice.cell_center(j), z = s.lattice.cell_center(k);
          analytic.set(i, j, k, x * x + y * y <= 25.0 && z >= 0.0 && z <= 10.0);
        }
      }
    }
    const double iou = voxel_iou(s.occupancy(), analytic);
    return Outcome{s.bodies.size() == 1 && rel <= 0.03 && iou >= 0.95,
                   "bodies " + std::to_string(s.bodies.size()) + ", volume " + fmt("%.3f", volume) + " vs " +
                       fmt("%.3f", exact) + ", rel err " + fmt("%.4f", rel) + ", IoU " + fmt("%.4f", iou)};
  });

  criterion("metric oracles", [] {
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<int> len(0, 6), sym(0, 6);
    int lev_bad = 0;
    for (int i = 0; i < 10000; ++i) {
      std::vector<int> a(static_cast<std::size_t>(len(rng))), b(static_cast<std::size_t>(len(rng)));
      for (int& v : a) v = sym(rng);
      for (int& v : b) v = sym(rng);
      lev_bad += levenshtein(a, b) != levenshtein_oracle(a, b, a.size(), b.size());
    }
    auto prism = multiset_vector(prefix_types(vectorize(tri_prism()), 10));
    auto cyl = multiset_vector(prefix_types(vectorize(cylinder()), 10));
    const double tc_err = std::abs(tanimoto(prism, cyl) - 4.0 / 14.0);
    const double cs_err = std::abs(cosine_similarity(prism, cyl) - 4.0 / std::sqrt(65.0));
    std::uniform_int_distribution<int> bin(0, 255);
    double mc_worst = 0.0;
    for (int eta : {0, 3, 16, 64, 255}) {
      int hits = 0;
      for (int i = 0; i < 100000; ++i) hits += std::abs(bin(rng) - bin(rng)) <= eta;
      mc_worst = std::max(mc_worst, std::abs(hits / 100000.0 - baseline_ap1_no_sketch(eta)));
    }
    return Outcome{lev_bad == 0 && tc_err <= 1e-9 && cs_err <= 1e-9 && mc_worst <= 0.01,
                   "levenshtein mismatches " + std::to_string(lev_bad) + "/10000, TC err " + fmt("%.2e", tc_err) +
                       ", CS err " + fmt("%.2e", cs_err) + ", worst Monte-Carlo gap " + fmt("%.4f", mc_worst)};
  });

  criterion("baseline endpoints", [] {
    const double b0 = baseline_ap1_no_sketch(0), b255 = baseline_ap1_no_sketch(255);
    const double s255 = baseline_ap1_with_sketch(255);
    const double err = std::abs(s255 - (11.0 / 273.0 + 80.0 / 91.0));
    return Outcome{b0 == 1.0 / 256.0 && b255 == 1.0 && err <= 1e-9,
                   "no_sketch(0) " + fmt("%.10g", b0) + ", no_sketch(255) " + fmt("%.10g", b255) +
                       ", with_sketch(255) " + fmt("%.12g", s255)};
  });

  DatasetManifest desk;
  bool desk_ok = false;
  criterion("synthesis determinism and validity (desk, 220 samples)", [&] {
    SynthConfig c;
    c.counts = desk_counts();
    c.mode = SynthMode::Rules;
    c.seed = 7;
    c.resolution = 64;
    c.width = c.height = 128;
    const auto t0 = std::chrono::steady_clock::now();
    c.out_dir = work / "desk_a";
    desk = synthesize_dataset(c);
    c.out_dir = work / "desk_b";
    synthesize_dataset(c);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool identical = dir_digest(work / "desk_a") == dir_digest(work / "desk_b");

    std::vector<CadProgram> programs;
    for (const auto& r : desk.records) programs.push_back(parse_program(io::read_text(work / "desk_a" / r.program_path)));
    const double rate = parsing_rate(programs, 64);
    const auto tr = desk.split_size("train"), va = desk.split_size("validation"), te = desk.split_size("test");

    std::vector<PredictionPair> self;
    for (const auto& m : load_matrices(work / "desk_a", desk)) self.push_back({m, m, ""});
    ReportOptions o;
    MetricsReport rep = compute_report(self, o);
    bool perfect = rep.geometry && rep.geometry->parsing_rate == 1.0 && rep.geometry->iou_mean == 1.0 &&
                   rep.geometry->mse_mean == 0.0 && std::abs(rep.ap1_auc - 1.0) < 1e-12;
    for (const auto& p : rep.prefixes) {
      perfect = perfect && p.acp == 1.0 && p.asot == 1.0 && p.edsot == 0.0 && p.aot == 1.0 && p.ap1 == 1.0 &&
                p.ap2 == 1.0 && p.msot_tc == 1.0 && std::abs(p.msot_cs - 1.0) < 1e-12;
    }
    desk_ok = desk.records.size() == 220 && identical && rate == 1.0 && tr == 176 && va == 22 && te == 22 &&
              perfect && seconds < 300.0;
    return Outcome{desk_ok, std::to_string(desk.records.size()) + " samples, byte-identical " +
                                (identical ? "yes" : "no") + ", parsing rate " + fmt("%.3f", rate) + ", splits " +
                                std::to_string(tr) + "/" + std::to_string(va) + "/" + std::to_string(te) +
                                ", GT-vs-GT perfect " + (perfect ? "yes" : "no") + ", two runs " +
                                fmt("%.1f", seconds) + " s"};
  });

  criterion("protocol identity: ACP(255) equals ASOT for n = 1..6", [&] {
    std::vector<FeatureMatrix> gts = desk.records.empty() ? std::vector<FeatureMatrix>{vectorize(cylinder())}
                                                          : load_matrices(work / "desk_a", desk);
    std::mt19937_64 rng(55);
    int sets = 0, mismatches = 0;
    for (int trial = 0; trial < 20; ++trial) {
      ReportOptions o;
      o.geometry = false;
      MetricsReport r = compute_report(perturbed_pairs(gts, rng), o);
      for (std::size_t n = 0; n < 6; ++n) mismatches += r.sweeps[n].acp[255] != r.prefixes[n].asot;
      ++sets;
    }
    return Outcome{mismatches == 0 && desk_ok,
                   std::to_string(sets) + " prediction sets, " + std::to_string(mismatches) + " mismatched columns"};
  });

  criterion("monotonicity of ACP and AP1 over eta on 100 perturbations", [&] {
    std::vector<FeatureMatrix> gts = desk.records.empty() ? std::vector<FeatureMatrix>{vectorize(cylinder())}
                                                          : load_matrices(work / "desk_a", desk);
    std::mt19937_64 rng(77);
    int violations = 0;
    for (int trial = 0; trial < 100; ++trial) {
      auto pairs = perturbed_pairs(gts, rng);
      for (int n = 1; n <= 6; ++n) {
        double prev_acp = -1.0, prev_ap1 = -1.0;
        for (int eta = 0; eta <= kMaxTolerance; ++eta) {
          const double c = acp(pairs, n, eta), p = ap1(pairs, n, eta);
          violations += c < prev_acp || p < prev_ap1;
          prev_acp = c;
          prev_ap1 = p;
        }
      }
    }
    return Outcome{violations == 0 && desk_ok,
                   "100 perturbations x 6 prefixes x 256 tolerances, " + std::to_string(violations) + " decreases"};
  });

  fs::remove_all(work);
  std::printf("%d of 7 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
