#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cadseq/dsl.hpp"
#include "cadseq/geom.hpp"
#include "cadseq/render.hpp"
#include "cadseq/vec.hpp"

namespace cadseq {

enum class SynthMode { Random, Rules };

const char* synth_mode_name(SynthMode mode) noexcept;
std::optional<SynthMode> synth_mode_from_name(std::string_view name) noexcept;

// A template shape's operation-type sequence: one sketch, `curves`, one
// extrude, bracketed by start/end marks.
struct TemplateSequence {
  std::string id;
  int template_shape = 1;
  int variant = 1;
  std::vector<OpType> curves;

  std::vector<OpType> op_types() const;
  // e.g. "S,L,A,A,E"
  std::string signature() const;
};

// The nine sequences: ts1, ts2, ts3, ts4a-c, ts5a-c.
std::span<const TemplateSequence> template_sequences();
// Throws RangeError for an unknown id.
const TemplateSequence& find_template(std::string_view id);

// mt19937_64 with platform-independent real/integer draws.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  std::uint64_t next() { return engine_(); }
  double uniform();  // [0, 1)
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  int below(int n);

 private:
  std::mt19937_64 engine_;
};

std::uint64_t sample_seed(std::uint64_t seed, std::uint64_t sample_index);

inline constexpr int kMaxSynthesisAttempts = 100;
inline constexpr int kRuleSetVersion = 1;
inline constexpr double kRuleSweeps[] = {0.25, 0.5, 0.75, 1.0};

// depth = clamp(0.3 + 0.5 * (|x| + |y|) / 2, 0.1, 1.0)
double cylinder_depth_rule(double x, double y);
// depth = clamp(0.2 + 0.6 * max |vertex|, 0.1, 1.0)
double polygon_depth_rule(std::span<const Vec2> vertices);

// True when a program's depth (and arc sweeps) are what the rule set
// produces from its own quantized parameters, compared bin for bin.
bool follows_rules(const CadProgram& program);

// One raw parameter draw for the sequence, loop closure applied, not yet
// snapped to quantization bins and not checked geometrically.
CadProgram draw_template_program(const TemplateSequence& seq, SynthMode mode, Rng& rng);

// Draws until the bin-snapped program evaluates to a solid, at most
// kMaxSynthesisAttempts times; throws SynthesisExhausted.
CadProgram instantiate_template(const TemplateSequence& seq, SynthMode mode, Rng& rng,
                                int resolution = kDefaultResolution);

struct SynthConfig {
  std::vector<std::pair<std::string, int>> counts;
  SynthMode mode = SynthMode::Random;
  std::uint64_t seed = 0;
  int resolution = kDefaultResolution;
  int width = kDefaultImageSize;
  int height = kDefaultImageSize;
  Camera camera;
  std::filesystem::path out_dir;
  int threads = 0;
};

// 1:100 of the full recipe: 60 samples for ts1, 20 for every other sequence.
std::vector<std::pair<std::string, int>> desk_counts();

struct ManifestRecord {
  std::string id;
  std::string sequence;
  std::string split;
  std::string program_path;
  std::string matrix_path;
  std::string image_path;
};

struct DatasetManifest {
  SynthMode mode = SynthMode::Random;
  std::uint64_t seed = 0;
  int resolution = kDefaultResolution;
  int width = kDefaultImageSize;
  int height = kDefaultImageSize;
  std::vector<std::pair<std::string, int>> counts;
  std::vector<ManifestRecord> records;

  std::size_t split_size(std::string_view split) const;
};

inline constexpr const char* kSplitNames[] = {"train", "validation", "test"};

// 8:1:1 split: ids ordered by a stable 64-bit hash, first 80% train, next
// 10% validation, remainder test. Returns one split name per id.
std::vector<std::string> assign_splits(std::span<const std::string> ids);

// Writes programs/, matrices/, images/ and per-split matrix folders, then
// manifest.json last. Deterministic for a given config.
DatasetManifest synthesize_dataset(const SynthConfig& config);

std::string manifest_to_json(const DatasetManifest& manifest);
DatasetManifest manifest_from_json(std::string_view text);

struct RoundTripResult {
  int checked = 0;
  int failures = 0;
  std::vector<std::string> messages;
};

// Representation round trip over `count` raw draws spread across all nine
// sequences and both modes.
RoundTripResult roundtrip_check(std::uint64_t seed, int count);

}  // namespace cadseq
