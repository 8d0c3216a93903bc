#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cadseq/dsl.hpp"
#include "cadseq/geom.hpp"
#include "cadseq/render.hpp"
#include "cadseq/vector_rep.hpp"

namespace cadseq::io {

inline constexpr int kProgramFormatVersion = 1;
inline constexpr int kMatrixFormatVersion = 1;
inline constexpr int kManifestFormatVersion = 1;
inline constexpr int kReportFormatVersion = 1;
inline constexpr int kVoxelFormatVersion = 1;

// Structured program document; start/end marks are implicit.
std::string program_to_json(const CadProgram& program);
CadProgram program_from_json(std::string_view text);

// {"format": "cadseq-matrix", "version": 1, "id": ..., "matrix": 10 x 7 ints}
std::string matrix_to_json(const FeatureMatrix& matrix, std::string_view id = {});
// Accepts any document with a 10 x 7 integer "matrix" field. FormatError otherwise.
FeatureMatrix matrix_from_json(std::string_view text);

// 70 signed 16-bit little-endian integers per matrix, row-major.
std::vector<std::uint8_t> matrices_to_binary(std::span<const FeatureMatrix> matrices);
std::vector<FeatureMatrix> matrices_from_binary(std::span<const std::uint8_t> bytes);

// Binary PGM (P5), maxval 255, pixel = round(value * 255).
std::string encode_pgm(const Image& image);
Image decode_pgm(std::string_view bytes);

std::string encode_stl(const SolidScene& scene, std::string_view name = "cadseq");

// Run-length voxel file: "CSQV", u32 version, u32 resolution, f64 half
// extent, u64 run count, then u32 run lengths alternating empty/filled
// starting with empty. Cells ordered x fastest, then y, then z.
std::vector<std::uint8_t> encode_voxels(const VoxelGrid& grid);
VoxelGrid decode_voxels(std::span<const std::uint8_t> bytes);

// Plain file helpers; throw IoError.
std::string read_text(const std::filesystem::path& path);
std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, std::string_view data);
void write_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> data);

// Loads a program from Sim-Gallery text, a program document or a matrix
// document, chosen by content.
CadProgram load_program(const std::filesystem::path& path);

}  // namespace cadseq::io
