#pragma once

// Lookup-free quantization: every feature channel is quantized to its sign,
// and a cell's sign vector is read as a little-endian binary code index.

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "geokit/detail/numeric.hpp"
#include "geokit/error.hpp"

namespace geokit::quantizer {

inline constexpr int kMaxBits = 24;
inline constexpr int kMaxExpandBits = 16;

struct LossWeights {
  double rec = 1.0;
  double commit = 0.25;
  double entropy = 0.1;
};

struct QuantizerConfig {
  int bits = 1;
  std::size_t grid_h = 16;
  std::size_t grid_w = 16;
  LossWeights lambdas;

  std::uint32_t codebook_size() const { return std::uint32_t{1} << bits; }

  void validate() const {
    if (bits < 1 || bits > kMaxBits) {
      throw InvalidArgument("quantizer bits must be in [1, " + std::to_string(kMaxBits) + "]");
    }
    if (grid_h == 0 || grid_w == 0) throw InvalidArgument("quantizer grid dims must be positive");
    if (lambdas.rec < 0 || lambdas.commit < 0 || lambdas.entropy < 0) {
      throw InvalidArgument("loss weights must be nonnegative");
    }
  }
};

/// H' x W' x b encoder output, row-major with the bit axis innermost.
class FeatureGrid {
 public:
  FeatureGrid(std::size_t h, std::size_t w, int bits, std::vector<double> values)
      : h_(h), w_(w), bits_(bits), values_(std::move(values)) {
    if (bits < 1 || bits > kMaxBits) throw InvalidArgument("feature grid: bad bit width");
    if (values_.size() != h * w * static_cast<std::size_t>(bits)) {
      throw InvalidArgument("feature grid: " + std::to_string(values_.size()) +
                            " values for shape " + std::to_string(h) + "x" + std::to_string(w) +
                            "x" + std::to_string(bits));
    }
    for (double v : values_) {
      if (!std::isfinite(v)) throw InvalidArgument("feature grid: non-finite entry");
    }
  }

  std::size_t height() const { return h_; }
  std::size_t width() const { return w_; }
  int bits() const { return bits_; }
  std::size_t cells() const { return h_ * w_; }
  const std::vector<double>& values() const { return values_; }

  std::span<const double> cell(std::size_t i) const {
    return std::span<const double>(values_).subspan(i * static_cast<std::size_t>(bits_),
                                                    static_cast<std::size_t>(bits_));
  }

  bool same_shape(const FeatureGrid& o) const {
    return h_ == o.h_ && w_ == o.w_ && bits_ == o.bits_;
  }

  bool operator==(const FeatureGrid&) const = default;

 private:
  std::size_t h_, w_;
  int bits_;
  std::vector<double> values_;
};

struct CodeGrid {
  std::size_t height = 0;
  std::size_t width = 0;
  int bits = 0;
  std::vector<std::int8_t> signs;      // height*width*bits entries in {-1, +1}
  std::vector<std::uint32_t> indices;  // height*width entries in [0, 2^bits)

  std::span<const std::int8_t> cell_signs(std::size_t i) const {
    return std::span<const std::int8_t>(signs).subspan(i * static_cast<std::size_t>(bits),
                                                       static_cast<std::size_t>(bits));
  }
};

/// -1 for x <= 0, +1 for x > 0.
inline std::int8_t lfq_sign(double x) { return x > 0.0 ? 1 : -1; }

/// sum_{j=1..b} 2^(j-2) (s_j + 1). Each term is an integer since s_j + 1 is 0 or 2.
inline std::uint32_t index_of(std::span<const std::int8_t> signs) {
  if (signs.empty() || signs.size() > static_cast<std::size_t>(kMaxBits)) {
    throw InvalidArgument("index_of: sign vector length must be in [1, 24]");
  }
  std::uint32_t index = 0;
  for (std::size_t j = 1; j <= signs.size(); ++j) {
    const int s = signs[j - 1];
    if (s != 1 && s != -1) throw InvalidArgument("index_of: entries must be -1 or +1");
    index += (static_cast<std::uint32_t>(s + 1) << (j - 1)) >> 1;
  }
  return index;
}

/// Inverse of index_of.
inline std::vector<std::int8_t> signs_of_index(std::uint32_t index, int bits) {
  if (bits < 1 || bits > kMaxBits) throw InvalidArgument("signs_of_index: bad bit width");
  if (index >> bits) throw InvalidArgument("signs_of_index: index out of range");
  std::vector<std::int8_t> s(static_cast<std::size_t>(bits));
  for (int j = 0; j < bits; ++j) s[static_cast<std::size_t>(j)] = (index >> j) & 1u ? 1 : -1;
  return s;
}

inline CodeGrid lfq_quantize(const FeatureGrid& z) {
  CodeGrid q;
  q.height = z.height();
  q.width = z.width();
  q.bits = z.bits();
  q.signs.reserve(z.values().size());
  for (double v : z.values()) q.signs.push_back(lfq_sign(v));
  q.indices.reserve(z.cells());
  for (std::size_t i = 0; i < z.cells(); ++i) q.indices.push_back(index_of(q.cell_signs(i)));
  return q;
}

/// Forward value of z_e + sg[q - z_e]. Evaluated as q itself: the literal
/// floating-point expression loses q for large |z_e|.
inline FeatureGrid straight_through_compose(const FeatureGrid& z_e, const CodeGrid& q) {
  if (z_e.height() != q.height || z_e.width() != q.width || z_e.bits() != q.bits ||
      q.signs.size() != z_e.values().size()) {
    throw InvalidArgument("straight_through_compose: shape mismatch");
  }
  std::vector<double> out(q.signs.begin(), q.signs.end());
  return FeatureGrid(z_e.height(), z_e.width(), z_e.bits(), std::move(out));
}

/// Mean over cells of ||z_e - q||^2.
inline double commit_loss(const FeatureGrid& z_e, const CodeGrid& q) {
  if (z_e.height() != q.height || z_e.width() != q.width || z_e.bits() != q.bits) {
    throw InvalidArgument("commit_loss: shape mismatch");
  }
  if (z_e.cells() == 0) return 0.0;
  geokit::detail::CompensatedSum acc;
  for (std::size_t i = 0; i < q.signs.size(); ++i) {
    const double d = z_e.values()[i] - q.signs[i];
    acc.add(d * d);
  }
  return acc.value() / static_cast<double>(z_e.cells());
}

}  // namespace geokit::quantizer
