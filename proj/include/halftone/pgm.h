#ifndef HALFTONE_PGM_H_
#define HALFTONE_PGM_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "halftone/image.h"

namespace halftone {

// Reads P2 (ASCII) or P5 (binary) graymaps with maxval up to 65535.
// Samples are divided by maxval. Throws ParseError with the failing byte
// offset on malformed input.
GrayImage ParsePgm(std::span<const uint8_t> bytes);
GrayImage LoadPgm(const std::filesystem::path& path);

// P5, maxval 255, header "P5\n<w> <h>\n255\n", no comments.
// Gray u is written as floor(255*u + 0.5); binary q as 0 (q=-1) or 255.
std::vector<uint8_t> EncodePgm(const GrayImage& image);
std::vector<uint8_t> EncodePgm(const BinaryImage& image);
void SavePgm(const GrayImage& image, const std::filesystem::path& path);
void SavePgm(const BinaryImage& image, const std::filesystem::path& path);

// Interprets a gray image whose pixels are all exactly 0 or 1 as binary.
// Throws ValidationError otherwise.
BinaryImage ToBinary(const GrayImage& image);

}  // namespace halftone

#endif  // HALFTONE_PGM_H_
