#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "easrn/tensor.hpp"

namespace easrn::io {

/// Decodes 8- or 16-bit PNG to a planar image in [0, 1]. Gray(+alpha) gives
/// one channel, RGB(A) and palette give three; alpha is dropped.
Image read_png(const std::filesystem::path& path);
Image decode_png(const std::vector<std::uint8_t>& bytes);

/// Clamps to [0, 1] and rounds to the nearest code. bit_depth is 8 or 16.
std::vector<std::uint8_t> encode_png(const Image& img, int bit_depth = 8);
void write_png(const std::filesystem::path& path, const Image& img, int bit_depth = 8);

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path);
/// Writes through a temporary sibling and renames it into place.
void write_bytes(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes);

/// Lowercase hex SHA-256.
std::string sha256_hex(const std::vector<std::uint8_t>& bytes);

/// Regular files with a .png extension (any case), sorted by filename.
std::vector<std::filesystem::path> list_pngs(const std::filesystem::path& dir);

}  // namespace easrn::io
