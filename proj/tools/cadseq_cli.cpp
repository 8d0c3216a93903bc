#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cadseq/cadseq.h"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr int kExitDomain = 1;
constexpr int kExitUsage = 2;

constexpr const char* kSequenceIds[] = {"ts1", "ts2", "ts3", "ts4a", "ts4b", "ts4c", "ts5a", "ts5b", "ts5c"};

struct DomainError {
  std::string message;
};

void check(cadseq_status status) {
  if (status != CADSEQ_OK) throw DomainError{cadseq_last_error()};
}

// Owns a string returned by the library.
struct OwnedString {
  char* ptr = nullptr;
  ~OwnedString() { cadseq_string_free(ptr); }
  std::string str() const { return ptr ? ptr : ""; }
};

template <typename T, void (*Free)(T*)>
struct Handle {
  T* ptr = nullptr;
  Handle() = default;
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  ~Handle() { Free(ptr); }
};

using Program = Handle<cadseq_program, cadseq_program_free>;
using Matrix = Handle<cadseq_matrix, cadseq_matrix_free>;
using Scene = Handle<cadseq_scene, cadseq_scene_free>;
using ImageHandle = Handle<cadseq_image, cadseq_image_free>;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DomainError{"IoError: cannot read " + path};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& data) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DomainError{"IoError: cannot write " + path.string()};
  out << data;
  if (!out) throw DomainError{"IoError: cannot write " + path.string()};
}

struct Options {
  bool dry_run = false;
  std::string size = "128x128";
  std::string camera;
  int resolution = 64;
  int threads = 0;
};

struct ImageSize {
  int width = 128;
  int height = 128;
};

ImageSize parse_size(const std::string& text) {
  ImageSize s;
  char x = 0;
  std::istringstream in(text);
  if (!(in >> s.width >> x >> s.height) || (x != 'x' && x != 'X') || !in.eof()) {
    throw CLI::ValidationError("--size", "expected WxH, got '" + text + "'");
  }
  if (s.width < 1 || s.height < 1 || s.width > 512 || s.height > 512) {
    throw CLI::ValidationError("--size", "each side must be in 1..512");
  }
  return s;
}

std::optional<std::array<double, 3>> parse_camera(const std::string& text) {
  if (text.empty()) return std::nullopt;
  std::array<double, 3> v{};
  char c1 = 0, c2 = 0;
  std::istringstream in(text);
  if (!(in >> v[0] >> c1 >> v[1] >> c2 >> v[2]) || c1 != ',' || c2 != ',' || !in.eof()) {
    throw CLI::ValidationError("--camera", "expected x,y,z, got '" + text + "'");
  }
  return v;
}

cadseq_camera make_camera(const Options& opt) {
  cadseq_camera cam;
  cadseq_camera_default(&cam);
  if (auto eye = parse_camera(opt.camera)) {
    for (int i = 0; i < 3; ++i) cam.eye[i] = (*eye)[i];
  }
  return cam;
}

json camera_json(const cadseq_camera& cam) {
  return {{"eye", {cam.eye[0], cam.eye[1], cam.eye[2]}},
          {"target", {cam.target[0], cam.target[1], cam.target[2]}},
          {"up", {cam.up[0], cam.up[1], cam.up[2]}},
          {"fov", cam.fov_y_deg}};
}

// Writes to --out when given, stdout otherwise.
void deliver(const Options& opt, const std::string& out, const std::string& data) {
  if (out.empty()) {
    std::cout << data;
    return;
  }
  if (opt.dry_run) {
    std::cout << "would write " << out << " (" << data.size() << " bytes)\n";
    return;
  }
  write_file(out, data);
}

void load_program(const std::string& path, Program& program) { check(cadseq_program_load(path.c_str(), &program.ptr)); }

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sketch-and-extrude CAD program toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("cadseq ") + cadseq_version() + "\nformats: " + cadseq_format_versions());

  Options opt;
  app.add_flag("--dry-run", opt.dry_run, "Print planned writes without writing");

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a synthetic dataset");
  std::string synth_out, synth_mode = "random";
  std::uint64_t synth_seed = 0;
  std::vector<std::string> synth_counts;
  synth->add_option("--out", synth_out, "Output directory")->required();
  synth->add_option("--seed", synth_seed, "Random seed");
  synth->add_option("--mode", synth_mode, "random or rules")->check(CLI::IsMember({"random", "rules"}));
  synth->add_option("--counts,--count", synth_counts, "Per-sequence counts, e.g. ts1=60,ts2=20 (default desk counts)")
      ->delimiter(',');
  synth->add_option("--resolution", opt.resolution, "Voxel lattice cells per axis")->check(CLI::Range(4, 512));
  synth->add_option("--size", opt.size, "Image size WxH");
  synth->add_option("--camera", opt.camera, "Camera eye x,y,z");
  synth->add_option("--threads", opt.threads, "Worker threads (0 = CADSEQ_THREADS or all cores)");

  // parse
  auto* parse = app.add_subcommand("parse", "Parse a text program and print its program document");
  std::string parse_in, parse_out;
  parse->add_option("file", parse_in, "Text program")->required();
  parse->add_option("--out", parse_out, "Output file");

  // emit
  auto* emit = app.add_subcommand("emit", "Emit a program as text or as a client script");
  std::string emit_in, emit_out, emit_format = "sim";
  emit->add_option("file", emit_in, "Program (text, program document or matrix document)")->required();
  emit->add_option("--format", emit_format, "sim or gallery")->check(CLI::IsMember({"sim", "gallery"}));
  emit->add_option("--out", emit_out, "Output file");

  // vectorize
  auto* vec = app.add_subcommand("vectorize", "Convert a program to a feature matrix document");
  std::string vec_in, vec_out, vec_id;
  vec->add_option("file", vec_in, "Program")->required();
  vec->add_option("--id", vec_id, "Sample id recorded in the document");
  vec->add_option("--out", vec_out, "Output file");

  // devectorize
  auto* devec = app.add_subcommand("devectorize", "Convert a feature matrix document to a text program");
  std::string devec_in, devec_out;
  devec->add_option("file", devec_in, "Matrix document")->required();
  devec->add_option("--out", devec_out, "Output file");

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "Build the solid and report bodies and volume");
  std::string eval_in, eval_out;
  evaluate->add_option("file", eval_in, "Program")->required();
  evaluate->add_option("--resolution", opt.resolution, "Voxel lattice cells per axis")->check(CLI::Range(4, 512));
  evaluate->add_option("--out", eval_out, "Directory for <name>.stl and <name>.csqv");

  // render
  auto* rend = app.add_subcommand("render", "Render a program to a PGM image");
  std::string render_in, render_out;
  rend->add_option("file", render_in, "Program")->required();
  rend->add_option("--out", render_out, "Output PGM file")->required();
  rend->add_option("--size", opt.size, "Image size WxH");
  rend->add_option("--camera", opt.camera, "Camera eye x,y,z");
  rend->add_option("--resolution", opt.resolution, "Voxel lattice cells per axis")->check(CLI::Range(4, 512));

  // eval
  auto* ev = app.add_subcommand("eval", "Score predicted matrices against ground truth");
  std::string ev_gt, ev_pred, ev_out;
  int ev_eta = 3, ev_prefix = 6;
  bool ev_no_geometry = false;
  ev->add_option("--gt", ev_gt, "Ground-truth matrix directory")->required();
  ev->add_option("--pred", ev_pred, "Predicted matrix directory")->required();
  ev->add_option("--eta", ev_eta, "Tolerance")->check(CLI::Range(0, 255));
  ev->add_option("--prefix-max", ev_prefix, "Largest prefix length n")->check(CLI::Range(1, 10));
  ev->add_flag("--no-geometry", ev_no_geometry, "Skip parsing rate, IoU and image MSE");
  ev->add_option("--resolution", opt.resolution, "Voxel lattice cells per axis")->check(CLI::Range(4, 512));
  ev->add_option("--size", opt.size, "Image size WxH");
  ev->add_option("--camera", opt.camera, "Camera eye x,y,z");
  ev->add_option("--threads", opt.threads, "Worker threads");
  ev->add_option("--out", ev_out, "Write the JSON report here");

  // baseline
  auto* base = app.add_subcommand("baseline", "Chance-level AP1 for uniform guessing");
  int base_eta = 3;
  bool base_with_sketch = false;
  base->add_option("--eta", base_eta, "Tolerance")->check(CLI::Range(0, 255));
  base->add_flag("--with-sketch", base_with_sketch, "Include the three-valued sketch-plane slot");

  // report
  auto* rep = app.add_subcommand("report", "Print a JSON report as a table");
  std::string rep_in;
  rep->add_option("file", rep_in, "Report JSON")->required();

  // roundtrip-check
  auto* rt = app.add_subcommand("roundtrip-check", "Check representation round trips on random draws");
  std::uint64_t rt_seed = 0;
  int rt_count = 1000;
  rt->add_option("--seed", rt_seed, "Random seed");
  rt->add_option("--count", rt_count, "Number of draws")->check(CLI::Range(0, 10000000));

  try {
    app.parse(argc, argv);
    if (synth->parsed() || rend->parsed() || ev->parsed()) {
      parse_size(opt.size);
      parse_camera(opt.camera);
    }
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (synth->parsed()) {
      const ImageSize size = parse_size(opt.size);
      json counts = json::object();
      if (synth_counts.empty()) {
        for (const char* id : kSequenceIds) counts[id] = std::string(id) == "ts1" ? 60 : 20;
      } else {
        for (const auto& entry : synth_counts) {
          auto eq = entry.find('=');
          int n = -1;
          try {
            if (eq != std::string::npos) n = std::stoi(entry.substr(eq + 1));
          } catch (const std::exception&) {
          }
          if (eq == std::string::npos || n < 0) {
            std::cerr << "--counts: expected <sequence>=<non-negative count>, got '" << entry << "'\n";
            return kExitUsage;
          }
          counts[entry.substr(0, eq)] = n;
        }
      }
      json cfg{{"out", synth_out},       {"seed", synth_seed},   {"mode", synth_mode},
               {"counts", counts},       {"resolution", opt.resolution}, {"width", size.width},
               {"height", size.height},  {"camera", camera_json(make_camera(opt))}, {"threads", opt.threads}};
      if (opt.dry_run) {
        int total = 0;
        for (auto& [id, n] : counts.items()) total += n.get<int>();
        std::cout << "would synthesize " << total << " samples (" << synth_mode << ", seed " << synth_seed
                  << ") into " << synth_out << "\n";
        for (auto& [id, n] : counts.items()) std::cout << "  " << id << ": " << n.get<int>() << "\n";
        std::cout << "would write programs/, matrices/, images/, train/, validation/, test/ and manifest.json\n";
        return 0;
      }
      OwnedString manifest;
      check(cadseq_synthesize(cfg.dump().c_str(), &manifest.ptr));
      const json m = json::parse(manifest.str());
      std::cout << "wrote " << m["samples"].size() << " samples to " << synth_out << " (train "
                << m["splits"]["train"] << ", validation " << m["splits"]["validation"] << ", test "
                << m["splits"]["test"] << ")\n";
    } else if (parse->parsed()) {
      Program program;
      check(cadseq_program_parse(read_file(parse_in).c_str(), &program.ptr));
      OwnedString report;
      check(cadseq_program_validate(program.ptr, &report.ptr));
      const json r = json::parse(report.str());
      if (!r["ok"].get<bool>()) {
        std::string msg = "InvalidProgram:";
        for (const auto& v : r["violations"]) {
          msg += " [op " + std::to_string(v["index"].get<int>()) + "] " + v["message"].get<std::string>() + ";";
        }
        throw DomainError{msg};
      }
      OwnedString doc;
      check(cadseq_program_to_json(program.ptr, &doc.ptr));
      deliver(opt, parse_out, doc.str());
    } else if (emit->parsed()) {
      Program program;
      load_program(emit_in, program);
      OwnedString text;
      check(cadseq_program_emit(program.ptr, emit_format == "sim" ? CADSEQ_EMIT_SIM : CADSEQ_EMIT_GALLERY, &text.ptr));
      deliver(opt, emit_out, text.str());
    } else if (vec->parsed()) {
      Program program;
      load_program(vec_in, program);
      Matrix matrix;
      check(cadseq_vectorize(program.ptr, &matrix.ptr));
      OwnedString doc;
      check(cadseq_matrix_to_json(matrix.ptr, vec_id.c_str(), &doc.ptr));
      deliver(opt, vec_out, doc.str());
    } else if (devec->parsed()) {
      Matrix matrix;
      check(cadseq_matrix_from_json(read_file(devec_in).c_str(), &matrix.ptr));
      Program program;
      check(cadseq_devectorize(matrix.ptr, &program.ptr));
      OwnedString text;
      check(cadseq_program_emit(program.ptr, CADSEQ_EMIT_SIM, &text.ptr));
      deliver(opt, devec_out, text.str());
    } else if (evaluate->parsed()) {
      Program program;
      load_program(eval_in, program);
      Scene scene;
      check(cadseq_evaluate(program.ptr, opt.resolution, &scene.ptr));
      size_t bodies = 0;
      double volume = 0.0;
      check(cadseq_scene_body_count(scene.ptr, &bodies));
      check(cadseq_scene_volume(scene.ptr, &volume));
      std::cout << "bodies: " << bodies << "\nvolume: " << format_number(volume) << "\n";
      if (!eval_out.empty()) {
        const std::string stem = fs::path(eval_in).stem().string();
        const fs::path stl = fs::path(eval_out) / (stem + ".stl");
        const fs::path vox = fs::path(eval_out) / (stem + ".csqv");
        if (opt.dry_run) {
          std::cout << "would write " << stl.string() << "\nwould write " << vox.string() << "\n";
        } else {
          fs::create_directories(eval_out);
          check(cadseq_scene_write_stl(scene.ptr, stl.c_str()));
          check(cadseq_scene_write_voxels(scene.ptr, vox.c_str()));
        }
      }
    } else if (rend->parsed()) {
      const ImageSize size = parse_size(opt.size);
      const cadseq_camera cam = make_camera(opt);
      Program program;
      load_program(render_in, program);
      Scene scene;
      check(cadseq_evaluate(program.ptr, opt.resolution, &scene.ptr));
      ImageHandle image;
      check(cadseq_render(scene.ptr, &cam, size.width, size.height, &image.ptr));
      if (opt.dry_run) {
        std::cout << "would write " << render_out << "\n";
      } else {
        if (fs::path(render_out).has_parent_path()) fs::create_directories(fs::path(render_out).parent_path());
        check(cadseq_image_write_pgm(image.ptr, render_out.c_str()));
      }
    } else if (ev->parsed()) {
      const ImageSize size = parse_size(opt.size);
      json options{{"eta", ev_eta},           {"prefix_max", ev_prefix}, {"geometry", !ev_no_geometry},
                   {"resolution", opt.resolution}, {"width", size.width},    {"height", size.height},
                   {"camera", camera_json(make_camera(opt))}, {"threads", opt.threads}};
      OwnedString report;
      check(cadseq_evaluate_dirs(ev_gt.c_str(), ev_pred.c_str(), options.dump().c_str(), &report.ptr));
      OwnedString text;
      check(cadseq_report_to_text(report.ptr, &text.ptr));
      std::cout << text.str();
      if (!ev_out.empty()) {
        if (opt.dry_run) {
          std::cout << "would write " << ev_out << "\n";
        } else {
          write_file(ev_out, report.str());
        }
      }
    } else if (base->parsed()) {
      double no_sketch = 0.0, with_sketch = 0.0;
      check(cadseq_baseline(base_eta, &no_sketch, &with_sketch));
      std::cout << format_number(base_with_sketch ? with_sketch : no_sketch) << "\n";
    } else if (rep->parsed()) {
      OwnedString text;
      check(cadseq_report_to_text(read_file(rep_in).c_str(), &text.ptr));
      std::cout << text.str();
    } else if (rt->parsed()) {
      OwnedString result;
      check(cadseq_roundtrip_check(rt_seed, rt_count, &result.ptr));
      const json r = json::parse(result.str());
      for (const auto& m : r["messages"]) std::cerr << m.get<std::string>() << "\n";
      std::cout << "checked " << r["checked"] << ", failures " << r["failures"] << "\n";
      if (r["failures"].get<int>() != 0) return kExitDomain;
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.message << "\n";
    return kExitDomain;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDomain;
  }
  return 0;
}
