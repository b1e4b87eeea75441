#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace mlog {

/// Row-major 8-bit grayscale image.
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  GrayImage() = default;
  GrayImage(int w, int h, std::uint8_t fill = 0)
      : width(w), height(h), pixels(std::size_t(w) * std::size_t(h), fill) {}

  std::uint8_t& at(int x, int y) { return pixels[std::size_t(y) * width + x]; }
  std::uint8_t at(int x, int y) const { return pixels[std::size_t(y) * width + x]; }
  bool valid() const {
    return width > 0 && height > 0 &&
           pixels.size() == std::size_t(width) * std::size_t(height);
  }
};

/// Reads a binary PGM (P5, maxval <= 255) file. Throws std::runtime_error
/// on malformed input.
GrayImage read_pgm(const std::string& path);

/// Writes a binary PGM (P5) file. Throws std::runtime_error on I/O failure.
void write_pgm(const GrayImage& img, const std::string& path);

} // namespace mlog
