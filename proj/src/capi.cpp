#include "cadseq/cadseq.h"

#include <cstdlib>
#include <cstring>
#include <string>

#include <json.hpp>

#include "cadseq/dsl.hpp"
#include "cadseq/error.hpp"
#include "cadseq/geom.hpp"
#include "cadseq/io.hpp"
#include "cadseq/metrics.hpp"
#include "cadseq/render.hpp"
#include "cadseq/report.hpp"
#include "cadseq/synth.hpp"
#include "cadseq/vector_rep.hpp"

struct cadseq_program {
  cadseq::CadProgram value;
};
struct cadseq_matrix {
  cadseq::FeatureMatrix value;
};
struct cadseq_scene {
  cadseq::SolidScene value;
};
struct cadseq_image {
  cadseq::Image value;
};

namespace {

using json = nlohmann::json;

struct LastError {
  std::string message;
  int line = 0;
  cadseq_status cause = CADSEQ_OK;
};

thread_local LastError last_error;

cadseq_status fail(cadseq_status status, std::string message, int line = 0, cadseq_status cause = CADSEQ_OK) {
  last_error = {std::move(message), line, cause};
  return status;
}

struct InvalidArgument {
  const char* what;
};

template <typename T>
void require(const T* p, const char* name) {
  if (p == nullptr) throw InvalidArgument{name};
}

// Runs fn and converts every exception into a status code.
template <typename Fn>
cadseq_status guarded(Fn&& fn) {
  try {
    fn();
    last_error = {};
    return CADSEQ_OK;
  } catch (const InvalidArgument& e) {
    return fail(CADSEQ_ERR_INVALID_ARGUMENT, std::string("null argument: ") + e.what);
  } catch (const cadseq::Error& e) {
    auto cause = e.code() == cadseq::ErrorCode::ParseFailure ? static_cast<cadseq_status>(e.cause()) : CADSEQ_OK;
    return fail(static_cast<cadseq_status>(e.code()), e.what(), e.line(), cause);
  } catch (const json::exception& e) {
    return fail(CADSEQ_ERR_FORMAT, std::string("FormatError: ") + e.what());
  } catch (const std::bad_alloc&) {
    return fail(CADSEQ_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(CADSEQ_ERR_INTERNAL, e.what());
  }
}

char* dup_string(const std::string& s) {
  auto* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

cadseq::Vec3 vec3_from(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()}; }

cadseq::Camera camera_from(const cadseq_camera* c) {
  cadseq::Camera cam;
  if (c == nullptr) return cam;
  cam.eye = {c->eye[0], c->eye[1], c->eye[2]};
  cam.target = {c->target[0], c->target[1], c->target[2]};
  cam.up = {c->up[0], c->up[1], c->up[2]};
  cam.fov_y_deg = c->fov_y_deg;
  return cam;
}

cadseq::Camera camera_from(const json& j) {
  cadseq::Camera cam;
  if (j.contains("eye")) cam.eye = vec3_from(j["eye"]);
  if (j.contains("target")) cam.target = vec3_from(j["target"]);
  if (j.contains("up")) cam.up = vec3_from(j["up"]);
  if (j.contains("fov")) cam.fov_y_deg = j["fov"].get<double>();
  return cam;
}

}  // namespace

extern "C" {

const char* cadseq_version(void) { return "1.0.0"; }

const char* cadseq_format_versions(void) {
  static const std::string text = "program " + std::to_string(cadseq::io::kProgramFormatVersion) + ", matrix " +
                                  std::to_string(cadseq::io::kMatrixFormatVersion) + ", manifest " +
                                  std::to_string(cadseq::io::kManifestFormatVersion) + ", report " +
                                  std::to_string(cadseq::io::kReportFormatVersion) + ", voxel " +
                                  std::to_string(cadseq::io::kVoxelFormatVersion);
  return text.c_str();
}

const char* cadseq_status_name(cadseq_status status) {
  switch (status) {
    case CADSEQ_OK:
      return "Ok";
    case CADSEQ_ERR_INVALID_ARGUMENT:
      return "InvalidArgument";
    case CADSEQ_ERR_INTERNAL:
      return "InternalError";
    default:
      if (status >= CADSEQ_ERR_UNKNOWN_FUNCTION && status <= CADSEQ_ERR_FORMAT) {
        return cadseq::error_code_name(static_cast<cadseq::ErrorCode>(status));
      }
      return "Unknown";
  }
}

const char* cadseq_last_error(void) { return last_error.message.c_str(); }
int cadseq_last_error_line(void) { return last_error.line; }
cadseq_status cadseq_last_error_cause(void) { return last_error.cause; }

void cadseq_string_free(char* s) { std::free(s); }
void cadseq_bytes_free(uint8_t* bytes) { std::free(bytes); }

cadseq_status cadseq_program_parse(const char* text, cadseq_program** out) {
  return guarded([&] {
    require(text, "text");
    require(out, "out");
    *out = new cadseq_program{cadseq::parse_program(text)};
  });
}

cadseq_status cadseq_program_from_json(const char* text, cadseq_program** out) {
  return guarded([&] {
    require(text, "json");
    require(out, "out");
    *out = new cadseq_program{cadseq::io::program_from_json(text)};
  });
}

cadseq_status cadseq_program_load(const char* path, cadseq_program** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new cadseq_program{cadseq::io::load_program(path)};
  });
}

cadseq_status cadseq_program_to_json(const cadseq_program* program, char** out) {
  return guarded([&] {
    require(program, "program");
    require(out, "out");
    *out = dup_string(cadseq::io::program_to_json(program->value));
  });
}

cadseq_status cadseq_program_emit(const cadseq_program* program, int format, char** out) {
  return guarded([&] {
    require(program, "program");
    require(out, "out");
    if (format == CADSEQ_EMIT_SIM) {
      *out = dup_string(cadseq::emit_sim_gallery(program->value));
    } else if (format == CADSEQ_EMIT_GALLERY) {
      *out = dup_string(cadseq::emit_gallery_script(program->value));
    } else {
      throw cadseq::Error(cadseq::ErrorCode::RangeError, "unknown emit format");
    }
  });
}

cadseq_status cadseq_program_validate(const cadseq_program* program, char** report_json) {
  return guarded([&] {
    require(program, "program");
    require(report_json, "report_json");
    auto report = cadseq::validate_grammar(program->value);
    json doc{{"ok", report.ok}, {"violations", json::array()}};
    for (const auto& v : report.violations) {
      doc["violations"].push_back({{"index", v.index}, {"rule", v.rule}, {"message", v.message}});
    }
    *report_json = dup_string(doc.dump(2) + "\n");
  });
}

cadseq_status cadseq_program_snap(const cadseq_program* program, cadseq_program** out) {
  return guarded([&] {
    require(program, "program");
    require(out, "out");
    *out = new cadseq_program{cadseq::snap_to_bins(program->value)};
  });
}

int cadseq_program_equal(const cadseq_program* a, const cadseq_program* b) {
  if (a == nullptr || b == nullptr) return 0;
  return a->value == b->value ? 1 : 0;
}

void cadseq_program_free(cadseq_program* program) { delete program; }

cadseq_status cadseq_vectorize(const cadseq_program* program, cadseq_matrix** out) {
  return guarded([&] {
    require(program, "program");
    require(out, "out");
    *out = new cadseq_matrix{cadseq::vectorize(program->value)};
  });
}

cadseq_status cadseq_devectorize(const cadseq_matrix* matrix, cadseq_program** out) {
  return guarded([&] {
    require(matrix, "matrix");
    require(out, "out");
    *out = new cadseq_program{cadseq::devectorize(matrix->value)};
  });
}

cadseq_status cadseq_matrix_from_values(const int32_t* values, cadseq_matrix** out) {
  return guarded([&] {
    require(values, "values");
    require(out, "out");
    cadseq::FeatureMatrix m;
    for (int i = 0; i < CADSEQ_MATRIX_ROWS; ++i) {
      const int32_t* row = values + i * CADSEQ_MATRIX_COLS;
      m.rows[i].t = row[0];
      for (int k = 0; k < cadseq::kParamCount; ++k) m.rows[i].params[k] = row[k + 1];
    }
    *out = new cadseq_matrix{m};
  });
}

cadseq_status cadseq_matrix_values(const cadseq_matrix* matrix, int32_t* values) {
  return guarded([&] {
    require(matrix, "matrix");
    require(values, "values");
    for (int i = 0; i < CADSEQ_MATRIX_ROWS; ++i) {
      int32_t* row = values + i * CADSEQ_MATRIX_COLS;
      row[0] = matrix->value.rows[i].t;
      for (int k = 0; k < cadseq::kParamCount; ++k) row[k + 1] = matrix->value.rows[i].params[k];
    }
  });
}

cadseq_status cadseq_matrix_from_json(const char* text, cadseq_matrix** out) {
  return guarded([&] {
    require(text, "json");
    require(out, "out");
    *out = new cadseq_matrix{cadseq::io::matrix_from_json(text)};
  });
}

cadseq_status cadseq_matrix_to_json(const cadseq_matrix* matrix, const char* id, char** out) {
  return guarded([&] {
    require(matrix, "matrix");
    require(out, "out");
    *out = dup_string(cadseq::io::matrix_to_json(matrix->value, id ? id : ""));
  });
}

cadseq_status cadseq_matrices_to_binary(const cadseq_matrix* const* matrices, size_t count, uint8_t** out,
                                        size_t* length) {
  return guarded([&] {
    require(out, "out");
    require(length, "length");
    if (count > 0) require(matrices, "matrices");
    std::vector<cadseq::FeatureMatrix> list;
    for (size_t i = 0; i < count; ++i) {
      require(matrices[i], "matrix");
      list.push_back(matrices[i]->value);
    }
    auto bytes = cadseq::io::matrices_to_binary(list);
    auto* buf = static_cast<uint8_t*>(std::malloc(bytes.empty() ? 1 : bytes.size()));
    if (buf == nullptr) throw std::bad_alloc();
    if (!bytes.empty()) std::memcpy(buf, bytes.data(), bytes.size());
    *out = buf;
    *length = bytes.size();
  });
}

void cadseq_matrix_free(cadseq_matrix* matrix) { delete matrix; }

cadseq_status cadseq_evaluate(const cadseq_program* program, int resolution, cadseq_scene** out) {
  return guarded([&] {
    require(program, "program");
    require(out, "out");
    *out = new cadseq_scene{cadseq::evaluate_program(program->value, resolution)};
  });
}

cadseq_status cadseq_scene_body_count(const cadseq_scene* scene, size_t* out) {
  return guarded([&] {
    require(scene, "scene");
    require(out, "out");
    *out = scene->value.bodies.size();
  });
}

cadseq_status cadseq_scene_volume(const cadseq_scene* scene, double* out) {
  return guarded([&] {
    require(scene, "scene");
    require(out, "out");
    *out = scene->value.occupancy().volume();
  });
}

cadseq_status cadseq_scene_iou(const cadseq_scene* a, const cadseq_scene* b, double* out) {
  return guarded([&] {
    require(a, "a");
    require(b, "b");
    require(out, "out");
    *out = cadseq::voxel_iou(a->value.occupancy(), b->value.occupancy());
  });
}

cadseq_status cadseq_scene_write_stl(const cadseq_scene* scene, const char* path) {
  return guarded([&] {
    require(scene, "scene");
    require(path, "path");
    cadseq::io::write_text(path, cadseq::io::encode_stl(scene->value));
  });
}

cadseq_status cadseq_scene_write_voxels(const cadseq_scene* scene, const char* path) {
  return guarded([&] {
    require(scene, "scene");
    require(path, "path");
    cadseq::io::write_bytes(path, cadseq::io::encode_voxels(scene->value.occupancy()));
  });
}

void cadseq_scene_free(cadseq_scene* scene) { delete scene; }

void cadseq_camera_default(cadseq_camera* camera) {
  if (camera == nullptr) return;
  const cadseq::Camera c;
  camera->eye[0] = c.eye.x;
  camera->eye[1] = c.eye.y;
  camera->eye[2] = c.eye.z;
  camera->target[0] = c.target.x;
  camera->target[1] = c.target.y;
  camera->target[2] = c.target.z;
  camera->up[0] = c.up.x;
  camera->up[1] = c.up.y;
  camera->up[2] = c.up.z;
  camera->fov_y_deg = c.fov_y_deg;
}

cadseq_status cadseq_render(const cadseq_scene* scene, const cadseq_camera* camera, int width, int height,
                            cadseq_image** out) {
  return guarded([&] {
    require(scene, "scene");
    require(out, "out");
    if (width > cadseq::kMaxImageSize || height > cadseq::kMaxImageSize) {
      throw cadseq::Error(cadseq::ErrorCode::RangeError, "image size above 512");
    }
    *out = new cadseq_image{cadseq::render(scene->value, camera_from(camera), width, height)};
  });
}

cadseq_status cadseq_image_size(const cadseq_image* image, int* width, int* height) {
  return guarded([&] {
    require(image, "image");
    require(width, "width");
    require(height, "height");
    *width = image->value.width;
    *height = image->value.height;
  });
}

cadseq_status cadseq_image_pixels(const cadseq_image* image, const float** pixels) {
  return guarded([&] {
    require(image, "image");
    require(pixels, "pixels");
    *pixels = image->value.pixels.data();
  });
}

cadseq_status cadseq_image_write_pgm(const cadseq_image* image, const char* path) {
  return guarded([&] {
    require(image, "image");
    require(path, "path");
    cadseq::io::write_text(path, cadseq::io::encode_pgm(image->value));
  });
}

cadseq_status cadseq_image_read_pgm(const char* path, cadseq_image** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new cadseq_image{cadseq::io::decode_pgm(cadseq::io::read_text(path))};
  });
}

cadseq_status cadseq_image_mse(const cadseq_image* a, const cadseq_image* b, double* out) {
  return guarded([&] {
    require(a, "a");
    require(b, "b");
    require(out, "out");
    *out = cadseq::image_mse(a->value, b->value);
  });
}

void cadseq_image_free(cadseq_image* image) { delete image; }

cadseq_status cadseq_synthesize(const char* config_json, char** manifest_json) {
  return guarded([&] {
    require(config_json, "config_json");
    const json cfg = json::parse(config_json);
    cadseq::SynthConfig config;
    config.out_dir = cfg.at("out").get<std::string>();
    config.seed = cfg.value("seed", std::uint64_t{0});
    const auto mode_name = cfg.value("mode", std::string("random"));
    auto mode = cadseq::synth_mode_from_name(mode_name);
    if (!mode) throw cadseq::Error(cadseq::ErrorCode::RangeError, "unknown mode '" + mode_name + "'");
    config.mode = *mode;
    if (cfg.contains("counts")) {
      for (const auto& [id, n] : cfg["counts"].items()) config.counts.emplace_back(id, n.get<int>());
    } else {
      config.counts = cadseq::desk_counts();
    }
    config.resolution = cfg.value("resolution", cadseq::kDefaultResolution);
    config.width = cfg.value("width", cadseq::kDefaultImageSize);
    config.height = cfg.value("height", cadseq::kDefaultImageSize);
    if (cfg.contains("camera")) config.camera = camera_from(cfg["camera"]);
    config.threads = cfg.value("threads", 0);
    auto manifest = cadseq::synthesize_dataset(config);
    if (manifest_json != nullptr) *manifest_json = dup_string(cadseq::manifest_to_json(manifest));
  });
}

cadseq_status cadseq_evaluate_dirs(const char* gt_dir, const char* pred_dir, const char* options_json,
                                   char** report_json) {
  return guarded([&] {
    require(gt_dir, "gt_dir");
    require(pred_dir, "pred_dir");
    require(report_json, "report_json");
    cadseq::ReportOptions opt;
    if (options_json != nullptr && *options_json != '\0') {
      const json o = json::parse(options_json);
      opt.eta = o.value("eta", opt.eta);
      opt.prefix_max = o.value("prefix_max", opt.prefix_max);
      opt.geometry = o.value("geometry", opt.geometry);
      opt.resolution = o.value("resolution", opt.resolution);
      opt.width = o.value("width", opt.width);
      opt.height = o.value("height", opt.height);
      if (o.contains("camera")) opt.camera = camera_from(o["camera"]);
      opt.threads = o.value("threads", 0);
    }
    const auto pairs = cadseq::load_pairs(gt_dir, pred_dir);
    *report_json = dup_string(cadseq::report_to_json(cadseq::compute_report(pairs, opt)));
  });
}

cadseq_status cadseq_report_to_text(const char* report_json, char** text) {
  return guarded([&] {
    require(report_json, "report_json");
    require(text, "text");
    *text = dup_string(cadseq::report_to_text(cadseq::report_from_json(report_json)));
  });
}

cadseq_status cadseq_baseline(int eta, double* no_sketch, double* with_sketch) {
  return guarded([&] {
    double a = cadseq::baseline_ap1_no_sketch(eta);
    double b = cadseq::baseline_ap1_with_sketch(eta);
    if (no_sketch != nullptr) *no_sketch = a;
    if (with_sketch != nullptr) *with_sketch = b;
  });
}

cadseq_status cadseq_roundtrip_check(uint64_t seed, int count, char** result_json) {
  return guarded([&] {
    require(result_json, "result_json");
    if (count < 0) throw cadseq::Error(cadseq::ErrorCode::RangeError, "negative count");
    auto r = cadseq::roundtrip_check(seed, count);
    json doc{{"checked", r.checked}, {"failures", r.failures}, {"messages", r.messages}};
    *result_json = dup_string(doc.dump(2) + "\n");
  });
}

}  // extern "C"
