#ifndef CADSEQ_CADSEQ_H
#define CADSEQ_CADSEQ_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(CADSEQ_BUILDING_LIBRARY)
#define CADSEQ_API __attribute__((visibility("default")))
#else
#define CADSEQ_API
#endif

/* Status codes. Domain codes share values with cadseq::ErrorCode. */
typedef enum cadseq_status {
  CADSEQ_OK = 0,
  CADSEQ_ERR_UNKNOWN_FUNCTION = 1,
  CADSEQ_ERR_ARITY = 2,
  CADSEQ_ERR_RANGE = 3,
  CADSEQ_ERR_SYNTAX = 4,
  CADSEQ_ERR_INVALID_PROGRAM = 5,
  CADSEQ_ERR_PROGRAM_TOO_LONG = 6,
  CADSEQ_ERR_MALFORMED_ROW = 7,
  CADSEQ_ERR_DEGENERATE_CHORD = 8,
  CADSEQ_ERR_OPEN_PROFILE = 9,
  CADSEQ_ERR_SELF_INTERSECTING = 10,
  CADSEQ_ERR_EMPTY_RESULT = 11,
  CADSEQ_ERR_PARSE_FAILURE = 12,
  CADSEQ_ERR_EMPTY_SCENE = 13,
  CADSEQ_ERR_DIMENSION_MISMATCH = 14,
  CADSEQ_ERR_EMPTY_INPUT = 15,
  CADSEQ_ERR_LATTICE_MISMATCH = 16,
  CADSEQ_ERR_LENGTH_MISMATCH = 17,
  CADSEQ_ERR_SYNTHESIS_EXHAUSTED = 18,
  CADSEQ_ERR_IO = 19,
  CADSEQ_ERR_FORMAT = 20,
  CADSEQ_ERR_INVALID_ARGUMENT = 100,
  CADSEQ_ERR_INTERNAL = 101
} cadseq_status;

typedef struct cadseq_program cadseq_program;
typedef struct cadseq_matrix cadseq_matrix;
typedef struct cadseq_scene cadseq_scene;
typedef struct cadseq_image cadseq_image;

typedef struct cadseq_camera {
  double eye[3];
  double target[3];
  double up[3];
  double fov_y_deg;
} cadseq_camera;

enum { CADSEQ_MATRIX_ROWS = 10, CADSEQ_MATRIX_COLS = 7 };
enum { CADSEQ_EMIT_SIM = 0, CADSEQ_EMIT_GALLERY = 1 };

CADSEQ_API const char* cadseq_version(void);
/* e.g. "program 1, matrix 1, manifest 1, report 1, voxel 1" */
CADSEQ_API const char* cadseq_format_versions(void);
CADSEQ_API const char* cadseq_status_name(cadseq_status status);

/* Message and 1-based text line (0 if none) of the last failure on this thread. */
CADSEQ_API const char* cadseq_last_error(void);
CADSEQ_API int cadseq_last_error_line(void);
/* Cause of the last ParseFailure, CADSEQ_OK otherwise. */
CADSEQ_API cadseq_status cadseq_last_error_cause(void);

CADSEQ_API void cadseq_string_free(char* s);
CADSEQ_API void cadseq_bytes_free(uint8_t* bytes);

/* Programs */
CADSEQ_API cadseq_status cadseq_program_parse(const char* text, cadseq_program** out);
CADSEQ_API cadseq_status cadseq_program_from_json(const char* json, cadseq_program** out);
CADSEQ_API cadseq_status cadseq_program_load(const char* path, cadseq_program** out);
CADSEQ_API cadseq_status cadseq_program_to_json(const cadseq_program* program, char** out);
CADSEQ_API cadseq_status cadseq_program_emit(const cadseq_program* program, int format, char** out);
/* Always succeeds for a valid handle; writes {"ok": bool, "violations": [...]}. */
CADSEQ_API cadseq_status cadseq_program_validate(const cadseq_program* program, char** report_json);
CADSEQ_API cadseq_status cadseq_program_snap(const cadseq_program* program, cadseq_program** out);
CADSEQ_API int cadseq_program_equal(const cadseq_program* a, const cadseq_program* b);
CADSEQ_API void cadseq_program_free(cadseq_program* program);

/* Feature matrices: 10 rows of [t, I, x, y, alpha, r, d], row-major. */
CADSEQ_API cadseq_status cadseq_vectorize(const cadseq_program* program, cadseq_matrix** out);
CADSEQ_API cadseq_status cadseq_devectorize(const cadseq_matrix* matrix, cadseq_program** out);
CADSEQ_API cadseq_status cadseq_matrix_from_values(const int32_t* values, cadseq_matrix** out);
CADSEQ_API cadseq_status cadseq_matrix_values(const cadseq_matrix* matrix, int32_t* values);
CADSEQ_API cadseq_status cadseq_matrix_from_json(const char* json, cadseq_matrix** out);
CADSEQ_API cadseq_status cadseq_matrix_to_json(const cadseq_matrix* matrix, const char* id, char** out);
CADSEQ_API cadseq_status cadseq_matrices_to_binary(const cadseq_matrix* const* matrices, size_t count,
                                                   uint8_t** out, size_t* length);
CADSEQ_API void cadseq_matrix_free(cadseq_matrix* matrix);

/* Geometry */
CADSEQ_API cadseq_status cadseq_evaluate(const cadseq_program* program, int resolution, cadseq_scene** out);
CADSEQ_API cadseq_status cadseq_scene_body_count(const cadseq_scene* scene, size_t* out);
CADSEQ_API cadseq_status cadseq_scene_volume(const cadseq_scene* scene, double* out);
CADSEQ_API cadseq_status cadseq_scene_iou(const cadseq_scene* a, const cadseq_scene* b, double* out);
CADSEQ_API cadseq_status cadseq_scene_write_stl(const cadseq_scene* scene, const char* path);
CADSEQ_API cadseq_status cadseq_scene_write_voxels(const cadseq_scene* scene, const char* path);
CADSEQ_API void cadseq_scene_free(cadseq_scene* scene);

/* Rendering. A NULL camera means the default view. */
CADSEQ_API void cadseq_camera_default(cadseq_camera* camera);
CADSEQ_API cadseq_status cadseq_render(const cadseq_scene* scene, const cadseq_camera* camera, int width,
                                       int height, cadseq_image** out);
CADSEQ_API cadseq_status cadseq_image_size(const cadseq_image* image, int* width, int* height);
CADSEQ_API cadseq_status cadseq_image_pixels(const cadseq_image* image, const float** pixels);
CADSEQ_API cadseq_status cadseq_image_write_pgm(const cadseq_image* image, const char* path);
CADSEQ_API cadseq_status cadseq_image_read_pgm(const char* path, cadseq_image** out);
CADSEQ_API cadseq_status cadseq_image_mse(const cadseq_image* a, const cadseq_image* b, double* out);
CADSEQ_API void cadseq_image_free(cadseq_image* image);

/* Dataset synthesis. config_json keys: out (required), seed, mode
 * ("random"|"rules"), counts (object, default desk counts), resolution,
 * width, height, camera {eye, target, up, fov}, threads. */
CADSEQ_API cadseq_status cadseq_synthesize(const char* config_json, char** manifest_json);

/* Metrics over two matrix directories. options_json (may be NULL) keys:
 * eta, prefix_max, geometry, resolution, width, height, camera, threads. */
CADSEQ_API cadseq_status cadseq_evaluate_dirs(const char* gt_dir, const char* pred_dir, const char* options_json,
                                              char** report_json);
CADSEQ_API cadseq_status cadseq_report_to_text(const char* report_json, char** text);

CADSEQ_API cadseq_status cadseq_baseline(int eta, double* no_sketch, double* with_sketch);
CADSEQ_API cadseq_status cadseq_roundtrip_check(uint64_t seed, int count, char** result_json);

#ifdef __cplusplus
}
#endif

#endif
