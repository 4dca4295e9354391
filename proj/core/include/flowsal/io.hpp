/// @file io.hpp
/// @brief File formats: Middlebury .flo, PGM/PPM frames, PFM scalar maps,
/// heatmap and mask export.

#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "flowsal/field.hpp"
#include "flowsal/optical_flow.hpp"

namespace flowsal {

/// Middlebury optical-flow format: float32 magic 202021.25 (LE), int32
/// width, int32 height, then height*width*2 float32 LE interleaved u,v per
/// pixel, row-major. Throws BadMagic / TruncatedFile / DimensionMismatch.
VectorField2 read_flo(const std::filesystem::path& path);
void write_flo(const VectorField2& field, const std::filesystem::path& path);

/// Grayscale frame from PGM (P2/P5) or PPM (P3/P6, converted with luma
/// weights 0.299/0.587/0.114). 8-bit samples; intensities map to [0, 1].
Frame read_frame(const std::filesystem::path& path);
void write_pgm(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes,
               GridShape shape);
std::vector<std::uint8_t> read_pgm_bytes(const std::filesystem::path& path, GridShape& shape);

/// 8-bit grayscale heatmap, values rescaled from [min, max] to [0, 255];
/// a degenerate range maps to 128. The range lands in <path>.range.txt.
void write_heatmap(const ScalarField& field, const std::filesystem::path& path);

/// PGM with values {0, 255}; any nonzero mask pixel becomes 255.
void write_mask(const ScalarField& mask, const std::filesystem::path& path);

/// Portable float map (Pf, scale -1.0, rows bottom-up) for full-precision
/// scalar exports.
void write_pfm(const ScalarField& field, const std::filesystem::path& path);
ScalarField read_pfm(const std::filesystem::path& path);

/// Regular files in dir whose lowercased extension matches, sorted by path.
/// Throws InputUnreadable when dir is not a directory.
std::vector<std::filesystem::path> list_files_sorted(
    const std::filesystem::path& dir, std::initializer_list<const char*> extensions);

}  // namespace flowsal
