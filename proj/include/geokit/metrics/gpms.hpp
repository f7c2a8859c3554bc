#pragma once

// Pixel-level diagram agreement: Dice coefficient over the black-pixel sets
// of two binarized diagrams.

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "geokit/error.hpp"

namespace geokit::metrics {

struct GrayImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> pixels;  // row-major luminance
};

struct RgbImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> pixels;  // row-major, interleaved RGB
};

inline constexpr int kDefaultThreshold = 128;

/// round(0.299 R + 0.587 G + 0.114 B)
inline std::uint8_t luminance(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  return static_cast<std::uint8_t>(std::lround(0.299 * r + 0.587 * g + 0.114 * b));
}

inline GrayImage to_gray(const RgbImage& img) {
  if (img.pixels.size() != img.width * img.height * 3) {
    throw InvalidArgument("RGB buffer size does not match dimensions");
  }
  GrayImage g{img.width, img.height, std::vector<std::uint8_t>(img.width * img.height)};
  for (std::size_t i = 0; i < g.pixels.size(); ++i) {
    g.pixels[i] = luminance(img.pixels[3 * i], img.pixels[3 * i + 1], img.pixels[3 * i + 2]);
  }
  return g;
}

class BinaryDiagram {
 public:
  BinaryDiagram(std::size_t width, std::size_t height)
      : width_(width), height_(height), black_(width * height, 0) {}

  std::size_t width() const { return width_; }
  std::size_t height() const { return height_; }

  bool is_black(std::size_t x, std::size_t y) const { return black_[y * width_ + x] != 0; }

  void set_black(std::size_t x, std::size_t y, bool value = true) {
    if (x >= width_ || y >= height_) throw InvalidArgument("pixel outside diagram");
    black_[y * width_ + x] = value ? 1 : 0;
  }

  std::size_t black_count() const {
    std::size_t n = 0;
    for (auto b : black_) n += b;
    return n;
  }

  /// Black pixels as (x, y), row-major order.
  std::vector<std::pair<std::size_t, std::size_t>> black_pixels() const {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t y = 0; y < height_; ++y) {
      for (std::size_t x = 0; x < width_; ++x) {
        if (is_black(x, y)) out.emplace_back(x, y);
      }
    }
    return out;
  }

  const std::vector<std::uint8_t>& mask() const { return black_; }

  bool operator==(const BinaryDiagram&) const = default;

 private:
  std::size_t width_;
  std::size_t height_;
  std::vector<std::uint8_t> black_;
};

/// Black = luminance strictly below `threshold`.
inline BinaryDiagram binarize(const GrayImage& img, int threshold = kDefaultThreshold) {
  if (img.width == 0 || img.height == 0) throw InvalidArgument("binarize: zero-sized image");
  if (img.pixels.size() != img.width * img.height) {
    throw InvalidArgument("binarize: buffer size does not match dimensions");
  }
  BinaryDiagram d(img.width, img.height);
  for (std::size_t y = 0; y < img.height; ++y) {
    for (std::size_t x = 0; x < img.width; ++x) {
      if (img.pixels[y * img.width + x] < threshold) d.set_black(x, y);
    }
  }
  return d;
}

inline BinaryDiagram binarize(const RgbImage& img, int threshold = kDefaultThreshold) {
  if (img.width == 0 || img.height == 0) throw InvalidArgument("binarize: zero-sized image");
  return binarize(to_gray(img), threshold);
}

/// 2|A ∩ B| / (|A| + |B|); two empty diagrams agree perfectly (1.0).
inline double gpms(const BinaryDiagram& gt, const BinaryDiagram& rec) {
  if (gt.width() != rec.width() || gt.height() != rec.height()) {
    throw InvalidArgument("gpms: dimension mismatch (" + std::to_string(gt.width()) + "x" +
                          std::to_string(gt.height()) + " vs " + std::to_string(rec.width()) +
                          "x" + std::to_string(rec.height()) + ")");
  }
  const auto& a = gt.mask();
  const auto& b = rec.mask();
  std::size_t na = 0, nb = 0, both = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    na += a[i];
    nb += b[i];
    both += a[i] & b[i];
  }
  if (na + nb == 0) return 1.0;
  return 2.0 * static_cast<double>(both) / static_cast<double>(na + nb);
}

}  // namespace geokit::metrics
