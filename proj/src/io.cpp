#include "cadseq/io.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "cadseq/error.hpp"
#include "json.hpp"

namespace cadseq::io {

using nlohmann::json;

namespace {

const char* boolean_name(BooleanOp op) {
  switch (op) {
    case BooleanOp::Join: return "join";
    case BooleanOp::Cut: return "cut";
    case BooleanOp::Intersect: return "intersect";
    case BooleanOp::Add: return "add";
  }
  return "add";
}

BooleanOp boolean_from(const json& j) {
  if (j.is_number_integer()) {
    int v = j.get<int>();
    if (v >= 0 && v <= 3) return static_cast<BooleanOp>(v);
  } else if (j.is_string()) {
    auto s = j.get<std::string>();
    if (s == "join") return BooleanOp::Join;
    if (s == "cut") return BooleanOp::Cut;
    if (s == "intersect") return BooleanOp::Intersect;
    if (s == "add") return BooleanOp::Add;
  }
  throw Error(ErrorCode::FormatError, "bad boolean operation " + j.dump());
}

json parse_json(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::exception& e) {
    throw Error(ErrorCode::FormatError, std::string("malformed JSON: ") + e.what());
  }
}

double number(const json& op, const char* key) {
  if (!op.contains(key) || !op[key].is_number()) {
    throw Error(ErrorCode::FormatError, std::string("operation needs numeric '") + key + "'");
  }
  return op[key].get<double>();
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

struct Reader {
  std::span<const std::uint8_t> bytes;
  std::size_t pos = 0;

  void need(std::size_t n) const {
    if (pos + n > bytes.size()) throw Error(ErrorCode::FormatError, "truncated voxel file");
  }
  std::uint64_t uint(int width) {
    need(static_cast<std::size_t>(width));
    std::uint64_t v = 0;
    for (int i = 0; i < width; ++i) v |= static_cast<std::uint64_t>(bytes[pos + i]) << (8 * i);
    pos += static_cast<std::size_t>(width);
    return v;
  }
};

}  // namespace

std::string program_to_json(const CadProgram& program) {
  json ops = json::array();
  for (const CadOp& op : program.body()) {
    json j;
    j["op"] = op_type_name(op.type);
    switch (op.type) {
      case OpType::Sketch: j["plane"] = plane_name(*op.plane); break;
      case OpType::Line: j["x"] = *op.x; j["y"] = *op.y; break;
      case OpType::Arc: j["x"] = *op.x; j["y"] = *op.y; j["sweep"] = *op.sweep; break;
      case OpType::Circle: j["x"] = *op.x; j["y"] = *op.y; j["radius"] = *op.radius; break;
      case OpType::Extrude:
        j["profile"] = op.profile_index;
        j["depth"] = *op.depth;
        j["boolean"] = boolean_name(op.boolean_op);
        j["scale"] = op.scale;
        break;
      case OpType::Start:
      case OpType::End: break;
    }
    ops.push_back(std::move(j));
  }
  json doc{{"format", "cadseq-program"}, {"version", kProgramFormatVersion}, {"ops", std::move(ops)}};
  return doc.dump(2) + "\n";
}

CadProgram program_from_json(std::string_view text) {
  json doc = parse_json(text);
  if (!doc.is_object() || !doc.contains("ops") || !doc["ops"].is_array()) {
    throw Error(ErrorCode::FormatError, "program document needs an 'ops' array");
  }
  std::vector<CadOp> body;
  for (const json& j : doc["ops"]) {
    if (!j.is_object() || !j.contains("op") || !j["op"].is_string()) {
      throw Error(ErrorCode::FormatError, "each operation needs an 'op' name");
    }
    auto name = j["op"].get<std::string>();
    if (name == "sketch") {
      if (!j.contains("plane")) throw Error(ErrorCode::FormatError, "sketch needs 'plane'");
      const json& p = j["plane"];
      std::optional<Plane> plane;
      if (p.is_string()) plane = plane_from_name(p.get<std::string>());
      if (p.is_number_integer() && p.get<int>() >= 0 && p.get<int>() <= 2) plane = static_cast<Plane>(p.get<int>());
      if (!plane) throw Error(ErrorCode::FormatError, "bad sketch plane " + p.dump());
      body.push_back(CadOp::sketch(*plane));
    } else if (name == "line") {
      body.push_back(CadOp::line(number(j, "x"), number(j, "y")));
    } else if (name == "arc") {
      body.push_back(CadOp::arc(number(j, "x"), number(j, "y"), number(j, "sweep")));
    } else if (name == "circle") {
      body.push_back(CadOp::circle(number(j, "x"), number(j, "y"), number(j, "radius")));
    } else if (name == "extrude") {
      CadOp op = CadOp::extrude(number(j, "depth"), j.contains("boolean") ? boolean_from(j["boolean"]) : kDefaultBooleanOp);
      if (j.contains("scale")) op.scale = number(j, "scale");
      if (j.contains("profile")) {
        if (!j["profile"].is_number_integer()) throw Error(ErrorCode::FormatError, "profile must be an integer");
        op.profile_index = j["profile"].get<int>();
      }
      body.push_back(op);
    } else {
      throw Error(ErrorCode::FormatError, "unknown operation '" + name + "'");
    }
  }
  return CadProgram::from_body(std::move(body));
}

std::string matrix_to_json(const FeatureMatrix& matrix, std::string_view id) {
  // One row per line keeps the files diffable.
  std::string out = "{\n";
  out += "  \"format\": \"cadseq-matrix\",\n";
  out += "  \"version\": " + std::to_string(kMatrixFormatVersion) + ",\n";
  if (!id.empty()) out += "  \"id\": " + json(std::string(id)).dump() + ",\n";
  out += "  \"matrix\": [\n";
  for (int i = 0; i < kMaxProgramRows; ++i) {
    const OpVector& r = matrix.rows[i];
    json row = json::array({r.t});
    for (int v : r.params) row.push_back(v);
    out += "    " + row.dump();
    out += i + 1 < kMaxProgramRows ? ",\n" : "\n";
  }
  out += "  ]\n}\n";
  return out;
}

FeatureMatrix matrix_from_json(std::string_view text) {
  json doc = parse_json(text);
  if (!doc.is_object() || !doc.contains("matrix")) throw Error(ErrorCode::FormatError, "document has no 'matrix'");
  const json& m = doc["matrix"];
  if (!m.is_array() || m.size() != static_cast<std::size_t>(kMaxProgramRows)) {
    throw Error(ErrorCode::FormatError, "matrix must have 10 rows");
  }
  FeatureMatrix out;
  for (int r = 0; r < kMaxProgramRows; ++r) {
    const json& row = m[static_cast<std::size_t>(r)];
    if (!row.is_array() || row.size() != 1 + kParamCount) {
      throw Error(ErrorCode::FormatError, "matrix row " + std::to_string(r) + " must have 7 entries");
    }
    for (const json& v : row) {
      if (!v.is_number_integer()) throw Error(ErrorCode::FormatError, "matrix entries must be integers");
    }
    out.rows[r].t = row[0].get<int>();
    for (int k = 0; k < kParamCount; ++k) out.rows[r].params[k] = row[static_cast<std::size_t>(k + 1)].get<int>();
  }
  return out;
}

std::vector<std::uint8_t> matrices_to_binary(std::span<const FeatureMatrix> matrices) {
  std::vector<std::uint8_t> out;
  out.reserve(matrices.size() * kMaxProgramRows * 7 * 2);
  auto put = [&](int v) {
    if (v < -32768 || v > 32767) throw Error(ErrorCode::RangeError, "matrix entry does not fit 16 bits");
    auto u = static_cast<std::uint16_t>(static_cast<std::int16_t>(v));
    out.push_back(static_cast<std::uint8_t>(u & 0xff));
    out.push_back(static_cast<std::uint8_t>(u >> 8));
  };
  for (const auto& m : matrices) {
    for (const auto& r : m.rows) {
      put(r.t);
      for (int v : r.params) put(v);
    }
  }
  return out;
}

std::vector<FeatureMatrix> matrices_from_binary(std::span<const std::uint8_t> bytes) {
  constexpr std::size_t kRecord = kMaxProgramRows * 7 * 2;
  if (bytes.size() % kRecord != 0) throw Error(ErrorCode::FormatError, "binary matrix size is not a multiple of 140");
  std::vector<FeatureMatrix> out(bytes.size() / kRecord);
  std::size_t pos = 0;
  auto get = [&] {
    auto u = static_cast<std::uint16_t>(bytes[pos] | (bytes[pos + 1] << 8));
    pos += 2;
    return static_cast<int>(static_cast<std::int16_t>(u));
  };
  for (auto& m : out) {
    for (auto& r : m.rows) {
      r.t = get();
      for (int& v : r.params) v = get();
    }
  }
  return out;
}

std::string encode_pgm(const Image& image) {
  std::string out = "P5\n" + std::to_string(image.width) + " " + std::to_string(image.height) + "\n255\n";
  out.reserve(out.size() + image.pixels.size());
  for (float v : image.pixels) {
    double c = std::clamp(static_cast<double>(v), 0.0, 1.0);
    out.push_back(static_cast<char>(static_cast<unsigned char>(std::lround(c * 255.0))));
  }
  return out;
}

Image decode_pgm(std::string_view bytes) {
  std::size_t pos = 0;
  auto token = [&]() -> std::string {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(static_cast<unsigned char>(bytes[pos]))) {
        ++pos;
      } else {
        break;
      }
    }
    std::size_t start = pos;
    while (pos < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
    return std::string(bytes.substr(start, pos - start));
  };
  if (token() != "P5") throw Error(ErrorCode::FormatError, "not a binary PGM");
  int w = 0, h = 0, maxval = 0;
  try {
    w = std::stoi(token());
    h = std::stoi(token());
    maxval = std::stoi(token());
  } catch (const std::exception&) {
    throw Error(ErrorCode::FormatError, "bad PGM header");
  }
  if (w <= 0 || h <= 0 || maxval != 255) throw Error(ErrorCode::FormatError, "unsupported PGM header");
  ++pos;  // single whitespace after maxval
  auto n = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  if (bytes.size() < pos + n) throw Error(ErrorCode::FormatError, "truncated PGM");
  Image img = Image::filled(w, h, 0.0f);
  for (std::size_t i = 0; i < n; ++i) img.pixels[i] = static_cast<unsigned char>(bytes[pos + i]) / 255.0f;
  return img;
}

std::string encode_stl(const SolidScene& scene, std::string_view name) {
  std::ostringstream out;
  out.precision(9);
  out << "solid " << name << "\n";
  for (const Body& body : scene.bodies) {
    const Mesh& m = body.mesh;
    for (const auto& t : m.triangles) {
      Vec3 a = m.vertices[t[0]], b = m.vertices[t[1]], c = m.vertices[t[2]];
      Vec3 n = cross(b - a, c - a);
      double len = length(n);
      if (len > 0) n = (1.0 / len) * n;
      out << "  facet normal " << n.x << " " << n.y << " " << n.z << "\n    outer loop\n";
      for (Vec3 v : {a, b, c}) out << "      vertex " << v.x << " " << v.y << " " << v.z << "\n";
      out << "    endloop\n  endfacet\n";
    }
  }
  out << "endsolid " << name << "\n";
  return out.str();
}

std::vector<std::uint8_t> encode_voxels(const VoxelGrid& grid) {
  std::vector<std::uint8_t> out = {'C', 'S', 'Q', 'V'};
  put_u32(out, kVoxelFormatVersion);
  put_u32(out, static_cast<std::uint32_t>(grid.resolution()));
  std::uint64_t extent_bits = 0;
  double extent = grid.lattice().half_extent;
  std::memcpy(&extent_bits, &extent, sizeof extent);
  put_u64(out, extent_bits);

  std::vector<std::uint32_t> runs;
  std::uint8_t current = 0;
  std::uint32_t run = 0;
  for (std::uint8_t c : grid.cells()) {
    if (c != current) {
      runs.push_back(run);
      current = c;
      run = 0;
    }
    ++run;
  }
  runs.push_back(run);
  put_u64(out, runs.size());
  for (auto r : runs) put_u32(out, r);
  return out;
}

VoxelGrid decode_voxels(std::span<const std::uint8_t> bytes) {
  Reader in{bytes};
  in.need(4);
  if (std::memcmp(bytes.data(), "CSQV", 4) != 0) throw Error(ErrorCode::FormatError, "not a voxel file");
  in.pos = 4;
  if (in.uint(4) != static_cast<std::uint64_t>(kVoxelFormatVersion)) {
    throw Error(ErrorCode::FormatError, "unsupported voxel file version");
  }
  auto resolution = static_cast<int>(in.uint(4));
  std::uint64_t extent_bits = in.uint(8);
  double extent = 0.0;
  std::memcpy(&extent, &extent_bits, sizeof extent);
  if (resolution <= 0 || resolution > 4096 || !(extent > 0)) throw Error(ErrorCode::FormatError, "bad voxel header");
  VoxelGrid grid(Lattice{resolution, extent});
  std::uint64_t run_count = in.uint(8);
  auto cells = grid.cells();
  std::size_t pos = 0;
  std::uint8_t value = 0;
  for (std::uint64_t r = 0; r < run_count; ++r) {
    auto len = static_cast<std::size_t>(in.uint(4));
    if (pos + len > cells.size()) throw Error(ErrorCode::FormatError, "voxel runs overflow the grid");
    std::fill_n(cells.begin() + static_cast<std::ptrdiff_t>(pos), len, value);
    pos += len;
    value ^= 1;
  }
  if (pos != cells.size()) throw Error(ErrorCode::FormatError, "voxel runs do not cover the grid");
  return grid;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path.string());
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path) {
  std::string s = read_text(path);
  return std::vector<std::uint8_t>(s.begin(), s.end());
}

void write_text(const std::filesystem::path& path, std::string_view data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) throw Error(ErrorCode::IoError, "short write to " + path.string());
}

void write_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> data) {
  write_text(path, std::string_view(reinterpret_cast<const char*>(data.data()), data.size()));
}

CadProgram load_program(const std::filesystem::path& path) {
  std::string text = read_text(path);
  std::string_view s = text;
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  if (!s.empty() && s.front() == '{') {
    json doc = parse_json(text);
    if (doc.contains("matrix")) return devectorize(matrix_from_json(text));
    return program_from_json(text);
  }
  return parse_program(text);
}

}  // namespace cadseq::io
