#include "cadseq/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include <json.hpp>

#include "cadseq/error.hpp"
#include "cadseq/io.hpp"
#include "cadseq/vector_rep.hpp"
#include "parallel.hpp"

namespace cadseq {

using json = nlohmann::ordered_json;

const char* synth_mode_name(SynthMode mode) noexcept { return mode == SynthMode::Rules ? "rules" : "random"; }

std::optional<SynthMode> synth_mode_from_name(std::string_view name) noexcept {
  if (name == "random") return SynthMode::Random;
  if (name == "rules") return SynthMode::Rules;
  return std::nullopt;
}

std::vector<OpType> TemplateSequence::op_types() const {
  std::vector<OpType> out{OpType::Start, OpType::Sketch};
  out.insert(out.end(), curves.begin(), curves.end());
  out.push_back(OpType::Extrude);
  out.push_back(OpType::End);
  return out;
}

std::string TemplateSequence::signature() const {
  std::string s = "S";
  for (OpType t : curves) s += t == OpType::Line ? ",L" : t == OpType::Arc ? ",A" : ",C";
  return s + ",E";
}

std::span<const TemplateSequence> template_sequences() {
  constexpr OpType L = OpType::Line, A = OpType::Arc, C = OpType::Circle;
  static const std::vector<TemplateSequence> table{
      {"ts1", 1, 1, {C}},         {"ts2", 2, 1, {L, L, A}},  {"ts3", 3, 1, {A, A, A}},
      {"ts4a", 4, 1, {L, A, A}},  {"ts4b", 4, 2, {A, L, A}}, {"ts4c", 4, 3, {A, A, L}},
      {"ts5a", 5, 1, {A, L, L}},  {"ts5b", 5, 2, {L, A, L}}, {"ts5c", 5, 3, {L, L, L}},
  };
  return table;
}

const TemplateSequence& find_template(std::string_view id) {
  for (const auto& seq : template_sequences()) {
    if (seq.id == id) return seq;
  }
  throw Error(ErrorCode::RangeError, "unknown template sequence '" + std::string(id) + "'");
}

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

int Rng::below(int n) {
  if (n <= 0) throw Error(ErrorCode::RangeError, "empty draw range");
  const std::uint64_t bound = static_cast<std::uint64_t>(n);
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t v;
  do v = engine_();
  while (v >= limit);
  return static_cast<int>(v % bound);
}

std::uint64_t sample_seed(std::uint64_t seed, std::uint64_t sample_index) {
  std::uint64_t z = (seed ^ sample_index) + 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double cylinder_depth_rule(double x, double y) {
  return std::clamp(0.3 + 0.5 * (std::abs(x) + std::abs(y)) / 2.0, 0.1, 1.0);
}

double polygon_depth_rule(std::span<const Vec2> vertices) {
  double reach = 0.0;
  for (const Vec2& v : vertices) reach = std::max(reach, length(v));
  return std::clamp(0.2 + 0.6 * reach, 0.1, 1.0);
}

namespace {

std::vector<Vec2> chain_vertices(std::span<const CadOp> curves) {
  std::vector<Vec2> pts{{0.0, 0.0}};
  for (const CadOp& op : curves) pts.push_back({*op.x, *op.y});
  return pts;
}

double draw_coord(Rng& rng) { return rng.uniform(-1.0, 1.0); }
double draw_unit(Rng& rng) { return 1.0 - rng.uniform(); }

double draw_depth(Rng& rng) {
  for (;;) {
    double d = rng.uniform(-1.0, 1.0);
    if (d != 0.0) return d;
  }
}

}  // namespace

bool follows_rules(const CadProgram& program) {
  const auto body = program.body();
  if (body.size() < 3 || body.front().type != OpType::Sketch || body.back().type != OpType::Extrude) return false;
  const auto curves = body.subspan(1, body.size() - 2);
  const double depth = *body.back().depth;
  double expected;
  if (curves.size() == 1 && curves[0].type == OpType::Circle) {
    expected = cylinder_depth_rule(*curves[0].x, *curves[0].y);
  } else {
    for (const CadOp& op : curves) {
      if (op.type == OpType::Circle || !op.x || !op.y) return false;
      if (op.type == OpType::Arc) {
        const int bin = quantize_value(*op.sweep, kUnitRange);
        bool allowed = std::any_of(std::begin(kRuleSweeps), std::end(kRuleSweeps),
                                   [&](double s) { return quantize_value(s, kUnitRange) == bin; });
        if (!allowed) return false;
      }
    }
    expected = polygon_depth_rule(chain_vertices(curves));
  }
  return quantize_value(expected, kDepthRange) == quantize_value(depth, kDepthRange);
}

CadProgram draw_template_program(const TemplateSequence& seq, SynthMode mode, Rng& rng) {
  std::vector<CadOp> body;
  body.push_back(CadOp::sketch(static_cast<Plane>(rng.below(3))));

  if (seq.curves.size() == 1 && seq.curves[0] == OpType::Circle) {
    double x = draw_coord(rng), y = draw_coord(rng), r = draw_unit(rng);
    body.push_back(CadOp::circle(x, y, r));
    double d = mode == SynthMode::Rules
                   ? cylinder_depth_rule(snap_value(x, kCoordRange), snap_value(y, kCoordRange))
                   : draw_depth(rng);
    body.push_back(CadOp::extrude(d));
    return CadProgram::from_body(std::move(body));
  }

  std::vector<Vec2> snapped{{0.0, 0.0}};
  for (std::size_t k = 0; k < seq.curves.size(); ++k) {
    const bool last = k + 1 == seq.curves.size();
    double x = draw_coord(rng), y = draw_coord(rng);
    if (last) x = y = 0.0;
    snapped.push_back(last ? Vec2{0.0, 0.0} : Vec2{snap_value(x, kCoordRange), snap_value(y, kCoordRange)});
    if (seq.curves[k] == OpType::Arc) {
      double sweep = mode == SynthMode::Rules ? kRuleSweeps[rng.below(4)] : draw_unit(rng);
      body.push_back(CadOp::arc(x, y, sweep));
    } else {
      body.push_back(CadOp::line(x, y));
    }
  }
  double d = mode == SynthMode::Rules ? polygon_depth_rule(snapped) : draw_depth(rng);
  body.push_back(CadOp::extrude(d));
  return CadProgram::from_body(std::move(body));
}

CadProgram instantiate_template(const TemplateSequence& seq, SynthMode mode, Rng& rng, int resolution) {
  for (int attempt = 0; attempt < kMaxSynthesisAttempts; ++attempt) {
    CadProgram program = snap_to_bins(draw_template_program(seq, mode, rng));
    try {
      evaluate_program(program, resolution);
      return program;
    } catch (const Error&) {
    }
  }
  throw Error(ErrorCode::SynthesisExhausted,
              "no valid " + seq.id + " sample after " + std::to_string(kMaxSynthesisAttempts) + " attempts");
}

std::vector<std::pair<std::string, int>> desk_counts() {
  std::vector<std::pair<std::string, int>> out;
  for (const auto& seq : template_sequences()) out.emplace_back(seq.id, seq.id == "ts1" ? 60 : 20);
  return out;
}

std::size_t DatasetManifest::split_size(std::string_view split) const {
  return static_cast<std::size_t>(
      std::count_if(records.begin(), records.end(), [&](const ManifestRecord& r) { return r.split == split; }));
}

namespace {

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Counts in canonical sequence order; unknown ids and negative counts rejected.
std::vector<std::pair<std::string, int>> normalized_counts(const std::vector<std::pair<std::string, int>>& counts) {
  std::vector<std::pair<std::string, int>> out;
  for (const auto& seq : template_sequences()) out.emplace_back(seq.id, 0);
  for (const auto& [id, n] : counts) {
    find_template(id);
    if (n < 0) throw Error(ErrorCode::RangeError, "negative sample count for " + id);
    for (auto& entry : out) {
      if (entry.first == id) entry.second = n;
    }
  }
  return out;
}

std::string sample_id(const std::string& seq, int index) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%05d", index);
  return seq + "-" + buf;
}

}  // namespace

std::vector<std::string> assign_splits(std::span<const std::string> ids) {
  std::vector<std::size_t> order(ids.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    auto ha = fnv1a(ids[a]), hb = fnv1a(ids[b]);
    return ha != hb ? ha < hb : ids[a] < ids[b];
  });
  const std::size_t n = ids.size();
  const std::size_t train = n * 8 / 10;
  const std::size_t validation = n / 10;
  std::vector<std::string> splits(n);
  for (std::size_t rank = 0; rank < n; ++rank) {
    splits[order[rank]] = rank < train ? kSplitNames[0] : rank < train + validation ? kSplitNames[1] : kSplitNames[2];
  }
  return splits;
}

DatasetManifest synthesize_dataset(const SynthConfig& config) {
  if (config.width <= 0 || config.height <= 0 || config.width > kMaxImageSize || config.height > kMaxImageSize) {
    throw Error(ErrorCode::RangeError, "image size out of range");
  }
  if (config.resolution < 4 || config.resolution > 512) throw Error(ErrorCode::RangeError, "resolution out of range");

  DatasetManifest manifest;
  manifest.mode = config.mode;
  manifest.seed = config.seed;
  manifest.resolution = config.resolution;
  manifest.width = config.width;
  manifest.height = config.height;
  manifest.counts = normalized_counts(config.counts);

  std::vector<const TemplateSequence*> seq_of;
  for (const auto& [id, n] : manifest.counts) {
    const TemplateSequence& seq = find_template(id);
    for (int i = 0; i < n; ++i) {
      seq_of.push_back(&seq);
      manifest.records.push_back({sample_id(id, i), id, "", "", "", ""});
    }
  }
  std::vector<std::string> ids;
  for (const auto& r : manifest.records) ids.push_back(r.id);
  const auto splits = assign_splits(ids);
  for (std::size_t i = 0; i < manifest.records.size(); ++i) {
    auto& r = manifest.records[i];
    r.split = splits[i];
    r.program_path = "programs/" + r.id + ".txt";
    r.matrix_path = "matrices/" + r.id + ".json";
    r.image_path = "images/" + r.id + ".pgm";
  }

  const auto& out = config.out_dir;
  std::error_code ec;
  std::filesystem::create_directories(out, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + out.string() + ": " + ec.message());
  if (!manifest.records.empty()) {
    for (const char* sub : {"programs", "matrices", "images", "train", "validation", "test"}) {
      std::filesystem::create_directories(out / sub, ec);
      if (ec) throw Error(ErrorCode::IoError, "cannot create " + (out / sub).string() + ": " + ec.message());
    }
  }

  detail::parallel_for(manifest.records.size(), detail::resolve_thread_count(config.threads), [&](std::size_t i) {
    const ManifestRecord& r = manifest.records[i];
    Rng rng(sample_seed(config.seed, i));
    CadProgram program = instantiate_template(*seq_of[i], config.mode, rng, config.resolution);
    SolidScene scene = evaluate_program(program, config.resolution);
    std::string matrix = io::matrix_to_json(vectorize(program), r.id);
    io::write_text(out / r.program_path, emit_sim_gallery(program));
    io::write_text(out / r.matrix_path, matrix);
    io::write_text(out / r.split / (r.id + ".json"), matrix);
    io::write_text(out / r.image_path, io::encode_pgm(render(scene, config.camera, config.width, config.height)));
  });

  io::write_text(out / "manifest.json", manifest_to_json(manifest));
  return manifest;
}

std::string manifest_to_json(const DatasetManifest& m) {
  json doc;
  doc["format"] = "cadseq-manifest";
  doc["version"] = io::kManifestFormatVersion;
  doc["mode"] = synth_mode_name(m.mode);
  doc["seed"] = m.seed;
  doc["resolution"] = m.resolution;
  doc["image_size"] = {m.width, m.height};
  doc["rule_set_version"] = kRuleSetVersion;
  json templates = json::array();
  for (const auto& seq : template_sequences()) {
    templates.push_back({{"id", seq.id}, {"template_shape", seq.template_shape}, {"ops", seq.signature()}});
  }
  doc["templates"] = templates;
  json counts = json::object();
  for (const auto& [id, n] : m.counts) counts[id] = n;
  doc["counts"] = counts;
  json splits = json::object();
  for (const char* s : kSplitNames) splits[s] = m.split_size(s);
  doc["splits"] = splits;
  json samples = json::array();
  for (const auto& r : m.records) {
    samples.push_back({{"id", r.id},
                       {"sequence", r.sequence},
                       {"split", r.split},
                       {"program", r.program_path},
                       {"matrix", r.matrix_path},
                       {"image", r.image_path}});
  }
  doc["samples"] = samples;
  return doc.dump(2) + "\n";
}

DatasetManifest manifest_from_json(std::string_view text) {
  try {
    json doc = json::parse(text);
    if (doc.value("format", "") != "cadseq-manifest") throw Error(ErrorCode::FormatError, "not a manifest document");
    DatasetManifest m;
    auto mode = synth_mode_from_name(doc.at("mode").get<std::string>());
    if (!mode) throw Error(ErrorCode::FormatError, "unknown mode");
    m.mode = *mode;
    m.seed = doc.at("seed").get<std::uint64_t>();
    m.resolution = doc.at("resolution").get<int>();
    m.width = doc.at("image_size").at(0).get<int>();
    m.height = doc.at("image_size").at(1).get<int>();
    for (const auto& [id, n] : doc.at("counts").items()) m.counts.emplace_back(id, n.get<int>());
    for (const auto& s : doc.at("samples")) {
      m.records.push_back({s.at("id").get<std::string>(), s.at("sequence").get<std::string>(),
                           s.at("split").get<std::string>(), s.at("program").get<std::string>(),
                           s.at("matrix").get<std::string>(), s.at("image").get<std::string>()});
    }
    return m;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::FormatError, std::string("manifest: ") + e.what());
  }
}

RoundTripResult roundtrip_check(std::uint64_t seed, int count) {
  RoundTripResult result;
  const auto seqs = template_sequences();
  for (int i = 0; i < count; ++i) {
    const TemplateSequence& seq = seqs[static_cast<std::size_t>(i) % seqs.size()];
    const SynthMode mode = (i / static_cast<int>(seqs.size())) % 2 ? SynthMode::Rules : SynthMode::Random;
    Rng rng(sample_seed(seed, static_cast<std::uint64_t>(i)));
    const CadProgram raw = draw_template_program(seq, mode, rng);
    ++result.checked;
    std::string failure;
    try {
      const FeatureMatrix m = vectorize(raw);
      if (!(devectorize(m) == snap_to_bins(raw))) {
        failure = "devectorize(vectorize(p)) differs from the bin-snapped program";
      } else if (!(vectorize(devectorize(m)) == m)) {
        failure = "matrix not stable under devectorize/vectorize";
      } else if (!(parse_program(emit_sim_gallery(raw)) == raw)) {
        failure = "text form does not parse back to the same program";
      }
    } catch (const Error& e) {
      failure = e.what();
    }
    if (!failure.empty()) {
      ++result.failures;
      result.messages.push_back(seq.id + " #" + std::to_string(i) + ": " + failure);
    }
  }
  return result;
}

}  // namespace cadseq
