#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <vector>

namespace grasscap {

struct PgmImage {
  Eigen::Index width = 0;
  Eigen::Index height = 0;
  std::vector<std::uint8_t> pixels;  // row-major, width * height bytes
};

// Binary PGM (P5), maxval 255 only. Header tokens separated by whitespace
// runs, exactly one whitespace byte between maxval and the pixel data; no
// comment support. Throws ParseError naming the file and the defect.
PgmImage read_pgm(const std::filesystem::path& path);

void write_pgm(const std::filesystem::path& path, const PgmImage& image);

}  // namespace grasscap
