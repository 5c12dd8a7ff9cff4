#include "netrefine/raster_io.hpp"

#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "netrefine/error.hpp"

namespace netrefine {

namespace {

// Reads the next whitespace-delimited header token, skipping '#' comments.
std::string header_token(std::istream& in) {
  std::string token;
  int ch;
  while ((ch = in.get()) != EOF) {
    if (ch == '#') {
      while ((ch = in.get()) != EOF && ch != '\n' && ch != '\r') {
      }
      continue;
    }
    if (std::isspace(ch)) {
      if (!token.empty()) return token;
      continue;
    }
    token.push_back(static_cast<char>(ch));
  }
  if (token.empty()) throw FormatError("truncated header");
  return token;
}

long header_int(std::istream& in, const char* what) {
  const std::string token = header_token(in);
  try {
    std::size_t used = 0;
    const long v = std::stol(token, &used);
    if (used != token.size()) throw std::invalid_argument(token);
    return v;
  } catch (const std::exception&) {
    throw FormatError(std::string("bad ") + what + " '" + token + "'");
  }
}

GridShape header_shape(std::istream& in) {
  const long cols = header_int(in, "width");
  const long rows = header_int(in, "height");
  if (cols < 1 || rows < 1 || cols > std::numeric_limits<int>::max() ||
      rows > std::numeric_limits<int>::max()) {
    throw FormatError("bad dimensions " + std::to_string(cols) + "x" + std::to_string(rows));
  }
  return GridShape(static_cast<int>(rows), static_cast<int>(cols));
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write " + path.string());
  return out;
}

void finish(std::ostream& out, const std::string& what) {
  out.flush();
  if (!out) throw FormatError("write failed: " + what);
}

}  // namespace

BinaryMask read_pgm(std::istream& in) {
  if (header_token(in) != "P5") throw FormatError("not a binary PGM (P5)");
  const GridShape shape = header_shape(in);
  const long maxval = header_int(in, "maxval");
  if (maxval < 1 || maxval > 255) {
    throw FormatError("unsupported PGM maxval " + std::to_string(maxval));
  }
  std::vector<std::uint8_t> bytes(shape.size());
  in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (static_cast<std::size_t>(in.gcount()) != bytes.size()) {
    throw FormatError("truncated PGM pixel data");
  }
  return BinaryMask(shape, bytes);
}

BinaryMask read_pgm(const std::filesystem::path& path) {
  auto in = open_in(path);
  try {
    return read_pgm(in);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_pgm(std::ostream& out, const BinaryMask& mask) {
  out << "P5\n" << mask.cols() << ' ' << mask.rows() << "\n255\n";
  std::vector<char> bytes(mask.bits().size());
  auto bits = mask.bits();
  for (std::size_t i = 0; i < bytes.size(); ++i) bytes[i] = bits[i] ? '\xff' : '\0';
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

void write_pgm(const std::filesystem::path& path, const BinaryMask& mask) {
  auto out = open_out(path);
  write_pgm(out, mask);
  finish(out, path.string());
}

PfmImage read_pfm(std::istream& in) {
  const std::string magic = header_token(in);
  if (magic != "Pf") {
    throw FormatError(magic == "PF" ? "colour PFM not supported" : "not a grayscale PFM (Pf)");
  }
  const GridShape shape = header_shape(in);
  const std::string scale_token = header_token(in);
  double scale = 0.0;
  {
    std::istringstream ss(scale_token);
    if (!(ss >> scale) || scale == 0.0 || !std::isfinite(scale)) {
      throw FormatError("bad PFM scale '" + scale_token + "'");
    }
  }
  const bool file_little = scale < 0.0;
  const bool swap = file_little != (std::endian::native == std::endian::little);

  std::vector<std::uint32_t> raw(shape.size());
  in.read(reinterpret_cast<char*>(raw.data()),
          static_cast<std::streamsize>(raw.size() * sizeof(std::uint32_t)));
  if (static_cast<std::size_t>(in.gcount()) != raw.size() * sizeof(std::uint32_t)) {
    throw FormatError("truncated PFM sample data");
  }

  PfmImage result{LikelihoodRaster(shape), 0};
  std::vector<float> values(shape.size());
  const auto cols = static_cast<std::size_t>(shape.cols());
  for (int file_row = 0; file_row < shape.rows(); ++file_row) {
    const auto row = static_cast<std::size_t>(shape.rows() - 1 - file_row);
    for (std::size_t c = 0; c < cols; ++c) {
      std::uint32_t word = raw[static_cast<std::size_t>(file_row) * cols + c];
      if (swap) word = __builtin_bswap32(word);
      float v = std::bit_cast<float>(word);
      if (std::isnan(v)) throw FormatError("NaN sample in PFM");
      if (v < 0.0f || v > 1.0f) {
        v = v < 0.0f ? 0.0f : 1.0f;
        ++result.clamped;
      }
      values[row * cols + c] = v;
    }
  }
  result.raster = LikelihoodRaster(shape, std::move(values));
  return result;
}

PfmImage read_pfm(const std::filesystem::path& path) {
  auto in = open_in(path);
  try {
    return read_pfm(in);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_pfm(std::ostream& out, const LikelihoodRaster& raster) {
  const GridShape& shape = raster.shape();
  out << "Pf\n" << shape.cols() << ' ' << shape.rows() << "\n-1.0\n";
  const auto cols = static_cast<std::size_t>(shape.cols());
  std::vector<std::uint32_t> row_words(cols);
  auto values = raster.values();
  for (int row = shape.rows() - 1; row >= 0; --row) {
    for (std::size_t c = 0; c < cols; ++c) {
      std::uint32_t word = std::bit_cast<std::uint32_t>(values[static_cast<std::size_t>(row) * cols + c]);
      if constexpr (std::endian::native == std::endian::big) word = __builtin_bswap32(word);
      row_words[c] = word;
    }
    out.write(reinterpret_cast<const char*>(row_words.data()),
              static_cast<std::streamsize>(cols * sizeof(std::uint32_t)));
  }
}

void write_pfm(const std::filesystem::path& path, const LikelihoodRaster& raster) {
  auto out = open_out(path);
  write_pfm(out, raster);
  finish(out, path.string());
}

}  // namespace netrefine
