#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace fringe {

// Dense row-major single-channel raster of doubles.
struct Image {
  int width = 0;
  int height = 0;
  std::vector<double> data;

  Image() = default;
  Image(int w, int h, double fill = 0.0) : width(w), height(h) {
    if (w <= 0 || h <= 0) throw std::invalid_argument("Image: dimensions must be positive");
    data.assign(static_cast<size_t>(w) * h, fill);
  }

  double& at(int x, int y) { return data[static_cast<size_t>(y) * width + x]; }
  double at(int x, int y) const { return data[static_cast<size_t>(y) * width + x]; }
  size_t size() const { return data.size(); }
  bool same_shape(const Image& o) const { return width == o.width && height == o.height; }
};

// Binary 16-bit PGM (P5, maxval 65535, big-endian samples).  Values are
// taken as normalized intensities: quantized by round-half-up to 65535
// steps and clamped into [0, 65535].
inline void write_pgm16(const Image& img, const std::string& path) {
  if (img.width <= 0 || img.height <= 0) throw std::invalid_argument("write_pgm16: empty image");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_pgm16: cannot open " + path);
  out << "P5\n" << img.width << " " << img.height << "\n65535\n";
  std::vector<unsigned char> buf;
  buf.reserve(img.size() * 2);
  for (double v : img.data) {
    double q = std::floor(v * 65535.0 + 0.5);
    q = std::clamp(q, 0.0, 65535.0);
    auto u = static_cast<uint16_t>(q);
    buf.push_back(static_cast<unsigned char>(u >> 8));
    buf.push_back(static_cast<unsigned char>(u & 0xff));
  }
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (!out) throw std::runtime_error("write_pgm16: short write to " + path);
}

// Reader for the same subset; used by tests to round-trip.
inline Image read_pgm16(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_pgm16: cannot open " + path);
  std::string magic;
  int w = 0, h = 0, maxval = 0;
  in >> magic >> w >> h >> maxval;
  if (magic != "P5" || w <= 0 || h <= 0 || maxval != 65535)
    throw std::runtime_error("read_pgm16: unsupported header in " + path);
  in.get();  // single whitespace after maxval
  Image img(w, h);
  std::vector<unsigned char> buf(img.size() * 2);
  in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (!in) throw std::runtime_error("read_pgm16: truncated payload in " + path);
  for (size_t i = 0; i < img.size(); ++i) {
    uint16_t u = static_cast<uint16_t>((buf[2 * i] << 8) | buf[2 * i + 1]);
    img.data[i] = static_cast<double>(u) / 65535.0;
  }
  return img;
}

}  // namespace fringe
