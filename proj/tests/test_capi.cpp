#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <string>

#include "cadseq/cadseq.h"

namespace fs = std::filesystem;

namespace {

const char* kCylinder = "add_sketch(\"XY\")\nadd_circle(0.0, 0.0, 0.5)\nadd_extrude(0, 1.0)\n";

std::string take(char* s) {
  std::string out = s ? s : "";
  cadseq_string_free(s);
  return out;
}

}  // namespace

TEST_CASE("version strings") {
  CHECK(std::strlen(cadseq_version()) > 0);
  CHECK(std::string(cadseq_format_versions()).find("matrix 1") != std::string::npos);
  CHECK(std::string(cadseq_status_name(CADSEQ_ERR_RANGE)) == "RangeError");
  CHECK(std::string(cadseq_status_name(CADSEQ_OK)) == "Ok");
}

TEST_CASE("parse errors report status, message and line") {
  cadseq_program* p = nullptr;
  CHECK(cadseq_program_parse("add_sketch(\"XY\")\nadd_circle(0,0,1.5)", &p) == CADSEQ_ERR_RANGE);
  CHECK(p == nullptr);
  CHECK(cadseq_last_error_line() == 2);
  CHECK(std::strlen(cadseq_last_error()) > 0);
  CHECK(cadseq_program_parse("add_spline(1)", &p) == CADSEQ_ERR_UNKNOWN_FUNCTION);
  CHECK(cadseq_program_parse(nullptr, &p) == CADSEQ_ERR_INVALID_ARGUMENT);
  CHECK(cadseq_program_parse(kCylinder, nullptr) == CADSEQ_ERR_INVALID_ARGUMENT);
}

TEST_CASE("program, matrix and scene round trip through handles") {
  cadseq_program* p = nullptr;
  REQUIRE(cadseq_program_parse(kCylinder, &p) == CADSEQ_OK);

  char* text = nullptr;
  REQUIRE(cadseq_program_emit(p, CADSEQ_EMIT_SIM, &text) == CADSEQ_OK);
  CHECK(take(text) == "add_sketch(\"XY\")\nadd_circle(0.000000, 0.000000, 0.500000)\nadd_extrude(0, 1.000000)\n");
  CHECK(cadseq_program_emit(p, 7, &text) == CADSEQ_ERR_RANGE);

  char* report = nullptr;
  REQUIRE(cadseq_program_validate(p, &report) == CADSEQ_OK);
  CHECK(take(report).find("\"ok\": true") != std::string::npos);

  cadseq_matrix* m = nullptr;
  REQUIRE(cadseq_vectorize(p, &m) == CADSEQ_OK);
  int32_t values[70];
  REQUIRE(cadseq_matrix_values(m, values) == CADSEQ_OK);
  CHECK(values[0] == 5);
  CHECK(values[7 * 2] == 3);
  CHECK(values[7 * 2 + 5] == 128);

  cadseq_matrix* m2 = nullptr;
  REQUIRE(cadseq_matrix_from_values(values, &m2) == CADSEQ_OK);
  cadseq_program* back = nullptr;
  REQUIRE(cadseq_devectorize(m2, &back) == CADSEQ_OK);
  CHECK(cadseq_program_equal(p, back) == 0);
  cadseq_program* snapped = nullptr;
  REQUIRE(cadseq_program_snap(p, &snapped) == CADSEQ_OK);
  CHECK(cadseq_program_equal(snapped, back) == 1);
  cadseq_program_free(snapped);

  const cadseq_matrix* both[] = {m, m2};
  uint8_t* bytes = nullptr;
  size_t length = 0;
  REQUIRE(cadseq_matrices_to_binary(both, 2, &bytes, &length) == CADSEQ_OK);
  CHECK(length == 280);
  cadseq_bytes_free(bytes);

  cadseq_scene* s = nullptr;
  REQUIRE(cadseq_evaluate(p, 64, &s) == CADSEQ_OK);
  size_t bodies = 0;
  REQUIRE(cadseq_scene_body_count(s, &bodies) == CADSEQ_OK);
  CHECK(bodies == 1);
  double volume = 0, iou = 0;
  REQUIRE(cadseq_scene_volume(s, &volume) == CADSEQ_OK);
  CHECK(std::abs(volume - 785.398) / 785.398 < 0.03);
  REQUIRE(cadseq_scene_iou(s, s, &iou) == CADSEQ_OK);
  CHECK(iou == 1.0);

  cadseq_image* img = nullptr;
  REQUIRE(cadseq_render(s, nullptr, 48, 40, &img) == CADSEQ_OK);
  int w = 0, h = 0;
  REQUIRE(cadseq_image_size(img, &w, &h) == CADSEQ_OK);
  CHECK(w == 48);
  CHECK(h == 40);
  double mse = 1;
  REQUIRE(cadseq_image_mse(img, img, &mse) == CADSEQ_OK);
  CHECK(mse == 0.0);
  CHECK(cadseq_render(s, nullptr, 0, 40, &img) != CADSEQ_OK);

  fs::path dir = fs::temp_directory_path() / "cadseq_capi_test";
  fs::create_directories(dir);
  CHECK(cadseq_image_write_pgm(img, (dir / "c.pgm").c_str()) == CADSEQ_OK);
  cadseq_image* read = nullptr;
  REQUIRE(cadseq_image_read_pgm((dir / "c.pgm").c_str(), &read) == CADSEQ_OK);
  CHECK(cadseq_image_mse(img, read, &mse) == CADSEQ_OK);
  CHECK(mse < 1e-5);
  CHECK(cadseq_scene_write_stl(s, (dir / "c.stl").c_str()) == CADSEQ_OK);
  CHECK(cadseq_scene_write_voxels(s, (dir / "c.csqv").c_str()) == CADSEQ_OK);
  CHECK(fs::file_size(dir / "c.stl") > 0);
  fs::remove_all(dir);

  cadseq_image_free(read);
  cadseq_image_free(img);
  cadseq_scene_free(s);
  cadseq_program_free(back);
  cadseq_matrix_free(m2);
  cadseq_matrix_free(m);
  cadseq_program_free(p);
}

TEST_CASE("evaluating a program with no solid reports the cause") {
  cadseq_program* p = nullptr;
  REQUIRE(cadseq_program_parse("", &p) == CADSEQ_OK);
  cadseq_scene* s = nullptr;
  CHECK(cadseq_evaluate(p, 16, &s) != CADSEQ_OK);
  CHECK(s == nullptr);
  cadseq_program_free(p);
}

TEST_CASE("baseline, round trip and dataset entry points") {
  double a = 0, b = 0;
  REQUIRE(cadseq_baseline(0, &a, &b) == CADSEQ_OK);
  CHECK(a == 1.0 / 256.0);
  CHECK(cadseq_baseline(300, &a, &b) == CADSEQ_ERR_RANGE);

  char* rt = nullptr;
  REQUIRE(cadseq_roundtrip_check(1, 50, &rt) == CADSEQ_OK);
  CHECK(take(rt).find("\"failures\": 0") != std::string::npos);

  fs::path dir = fs::temp_directory_path() / "cadseq_capi_synth";
  fs::remove_all(dir);
  std::string config = "{\"out\": \"" + dir.string() +
                       "\", \"seed\": 3, \"mode\": \"rules\", \"counts\": {\"ts1\": 5, \"ts3\": 5}, "
                       "\"resolution\": 24, \"width\": 32, \"height\": 32}";
  char* manifest = nullptr;
  REQUIRE(cadseq_synthesize(config.c_str(), &manifest) == CADSEQ_OK);
  CHECK(take(manifest).find("\"ts3-00004\"") != std::string::npos);

  char* report = nullptr;
  std::string matrices = (dir / "matrices").string();
  REQUIRE(cadseq_evaluate_dirs(matrices.c_str(), matrices.c_str(), "{\"resolution\": 24, \"width\": 32, \"height\": 32}",
                               &report) == CADSEQ_OK);
  std::string json = take(report);
  CHECK(json.find("\"format\": \"cadseq-report\"") != std::string::npos);
  char* text = nullptr;
  REQUIRE(cadseq_report_to_text(json.c_str(), &text) == CADSEQ_OK);
  CHECK(take(text).find("ASOT") != std::string::npos);

  CHECK(cadseq_synthesize("{\"seed\": 1}", &manifest) != CADSEQ_OK);
  CHECK(cadseq_synthesize("not json", &manifest) != CADSEQ_OK);
  fs::remove_all(dir);
}
