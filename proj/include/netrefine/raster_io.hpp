#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>

#include "netrefine/raster.hpp"

namespace netrefine {

// Binary PGM (P5). Masks are written with maxval 255 (0 / 255); on read any
// nonzero byte is foreground. 16-bit PGM is rejected.
BinaryMask read_pgm(std::istream& in);
BinaryMask read_pgm(const std::filesystem::path& path);
void write_pgm(std::ostream& out, const BinaryMask& mask);
void write_pgm(const std::filesystem::path& path, const BinaryMask& mask);

struct PfmImage {
  LikelihoodRaster raster;
  // Number of samples that were outside [0, 1] and got clamped.
  std::size_t clamped = 0;
};

// Grayscale PFM ("Pf"). Rows are stored bottom-up; a negative scale marks
// little-endian samples. NaN samples are a FormatError.
PfmImage read_pfm(std::istream& in);
PfmImage read_pfm(const std::filesystem::path& path);
// Always writes little-endian with scale -1.
void write_pfm(std::ostream& out, const LikelihoodRaster& raster);
void write_pfm(const std::filesystem::path& path, const LikelihoodRaster& raster);

}  // namespace netrefine
