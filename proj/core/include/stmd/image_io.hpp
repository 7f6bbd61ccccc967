#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "stmd/grid.hpp"

namespace stmd {

// 8-bit binary PGM (P5). Values are clamped to [0, 1] and scaled by 255.
void write_pgm(const std::filesystem::path& path, const Grid2D& frame);
std::string encode_pgm(const Grid2D& frame);

// P5 or P2 PGM with maxval <= 255, scaled to [0, 1].
Grid2D read_pgm(const std::filesystem::path& path);
// 8-bit PNG; colour images are converted to luma.
Grid2D read_png(const std::filesystem::path& path);
// Dispatches on extension (.pgm / .png).
Grid2D read_frame(const std::filesystem::path& path);

// .pgm and .png files in a directory, sorted lexicographically.
std::vector<std::filesystem::path> list_frames(const std::filesystem::path& dir);

// Writes to a sibling temp file and renames it over the target.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace stmd
