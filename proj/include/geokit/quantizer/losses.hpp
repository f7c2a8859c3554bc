#pragma once

// Reconstruction-side losses: plain L1, masked text-region L1, feature-space
// topology loss, their sum, and the weighted tokenizer objective.

#include <cmath>
#include <concepts>
#include <cstdint>
#include <string>
#include <vector>

#include "geokit/detail/numeric.hpp"
#include "geokit/error.hpp"
#include "geokit/quantizer/lfq.hpp"

namespace geokit::quantizer {

/// Row-major H x W x channels image with values in [0, 1].
struct Raster {
  std::size_t width = 0;
  std::size_t height = 0;
  std::size_t channels = 1;
  std::vector<double> values;

  Raster() = default;
  Raster(std::size_t w, std::size_t h, std::size_t ch, std::vector<double> v)
      : width(w), height(h), channels(ch), values(std::move(v)) {
    if (values.size() != w * h * ch) throw InvalidArgument("raster: buffer size mismatch");
  }
  Raster(std::size_t w, std::size_t h, std::size_t ch = 1, double fill = 0.0)
      : width(w), height(h), channels(ch), values(w * h * ch, fill) {}

  double& at(std::size_t x, std::size_t y, std::size_t c = 0) {
    return values[(y * width + x) * channels + c];
  }
  double at(std::size_t x, std::size_t y, std::size_t c = 0) const {
    return values[(y * width + x) * channels + c];
  }

  bool same_shape(const Raster& o) const {
    return width == o.width && height == o.height && channels == o.channels;
  }

  bool operator==(const Raster&) const = default;
};

/// Binary H x W region mask, applied across all channels.
struct Mask {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> bits;

  Mask() = default;
  Mask(std::size_t w, std::size_t h, bool fill = false)
      : width(w), height(h), bits(w * h, fill ? 1 : 0) {}

  bool test(std::size_t x, std::size_t y) const { return bits[y * width + x] != 0; }
  void set(std::size_t x, std::size_t y, bool v = true) { bits[y * width + x] = v ? 1 : 0; }
};

enum class Reduction {
  Sum,   // literal ||.||_1
  Mean,  // divided by the number of summed entries
};

inline double l1_distance(const Raster& a, const Raster& b, Reduction mode = Reduction::Sum) {
  if (!a.same_shape(b)) throw InvalidArgument("l1_distance: shape mismatch");
  geokit::detail::CompensatedSum acc;
  for (std::size_t i = 0; i < a.values.size(); ++i) acc.add(std::fabs(a.values[i] - b.values[i]));
  if (mode == Reduction::Mean && !a.values.empty()) {
    return acc.value() / static_cast<double>(a.values.size());
  }
  return acc.value();
}

/// || M ⊙ (gt - rec) ||_1
inline double text_region_loss(const Raster& gt, const Raster& rec, const Mask& mask,
                               Reduction mode = Reduction::Sum) {
  if (!gt.same_shape(rec)) throw InvalidArgument("text_region_loss: image shape mismatch");
  if (mask.width != gt.width || mask.height != gt.height) {
    throw InvalidArgument("text_region_loss: mask shape mismatch");
  }
  geokit::detail::CompensatedSum acc;
  std::size_t n = 0;
  for (std::size_t y = 0; y < gt.height; ++y) {
    for (std::size_t x = 0; x < gt.width; ++x) {
      if (!mask.test(x, y)) continue;
      for (std::size_t c = 0; c < gt.channels; ++c) {
        acc.add(std::fabs(gt.at(x, y, c) - rec.at(x, y, c)));
        ++n;
      }
    }
  }
  if (mode == Reduction::Mean && n > 0) return acc.value() / static_cast<double>(n);
  return acc.value();
}

/// Anything mapping an image to a list of feature maps.
template <typename E>
concept FeatureExtractor = requires(const E& e, const Raster& r) {
  { e.extract(r) } -> std::convertible_to<std::vector<Raster>>;
};

/// Single layer: the image itself.
struct IdentityExtractor {
  std::vector<Raster> extract(const Raster& r) const { return {r}; }
};

/// 2x2 average pooling; odd trailing rows/columns are dropped.
inline Raster avg_pool_2x2(const Raster& r) {
  Raster out(r.width / 2, r.height / 2, r.channels);
  for (std::size_t y = 0; y < out.height; ++y) {
    for (std::size_t x = 0; x < out.width; ++x) {
      for (std::size_t c = 0; c < r.channels; ++c) {
        const double s = r.at(2 * x, 2 * y, c) + r.at(2 * x + 1, 2 * y, c) +
                         r.at(2 * x, 2 * y + 1, c) + r.at(2 * x + 1, 2 * y + 1, c);
        out.at(x, y, c) = 0.25 * s;
      }
    }
  }
  return out;
}

/// Stand-in for a pretrained perceptual network: the images obtained by
/// pooling 1..levels times. Stops early once a side drops below 2 pixels.
struct PyramidExtractor {
  int levels = 3;

  std::vector<Raster> extract(const Raster& r) const {
    std::vector<Raster> out;
    Raster cur = r;
    for (int k = 0; k < levels && cur.width >= 2 && cur.height >= 2; ++k) {
      cur = avg_pool_2x2(cur);
      out.push_back(cur);
    }
    return out;
  }
};

/// sum_i || F_i(gt) - F_i(rec) ||_1
template <FeatureExtractor E>
double topo_loss(const Raster& gt, const Raster& rec, const E& extractor,
                 Reduction mode = Reduction::Sum) {
  if (!gt.same_shape(rec)) throw InvalidArgument("topo_loss: image shape mismatch");
  const std::vector<Raster> fa = extractor.extract(gt);
  const std::vector<Raster> fb = extractor.extract(rec);
  if (fa.size() != fb.size()) throw InvalidArgument("topo_loss: extractor layer count mismatch");
  geokit::detail::CompensatedSum acc;
  for (std::size_t i = 0; i < fa.size(); ++i) {
    if (!fa[i].same_shape(fb[i])) {
      throw InvalidArgument("topo_loss: layer " + std::to_string(i) + " shape mismatch");
    }
    acc.add(l1_distance(fa[i], fb[i], mode));
  }
  return acc.value();
}

struct ReconstructionTerms {
  double l1 = 0.0;
  double topo = 0.0;
  double text = 0.0;
  double total() const { return l1 + topo + text; }
};

template <FeatureExtractor E>
ReconstructionTerms reconstruction_terms(const Raster& gt, const Raster& rec, const Mask& mask,
                                         const E& extractor, Reduction mode = Reduction::Sum) {
  return {l1_distance(gt, rec, mode), topo_loss(gt, rec, extractor, mode),
          text_region_loss(gt, rec, mask, mode)};
}

/// ||gt - rec||_1 + L_topo + L_text
template <FeatureExtractor E>
double reconstruction_loss(const Raster& gt, const Raster& rec, const Mask& mask,
                           const E& extractor, Reduction mode = Reduction::Sum) {
  return reconstruction_terms(gt, rec, mask, extractor, mode).total();
}

/// L_GAN + λ_rec L_rec + λ_commit L_commit + λ_entropy L_entropy. The GAN term
/// comes from an external discriminator.
inline double magvit_total_loss(double gan, double rec, double commit, double entropy,
                                const LossWeights& w) {
  return gan + w.rec * rec + w.commit * commit + w.entropy * entropy;
}

inline double magvit_total_loss(double gan, double rec, double commit, double entropy,
                                const QuantizerConfig& cfg) {
  return magvit_total_loss(gan, rec, commit, entropy, cfg.lambdas);
}

}  // namespace geokit::quantizer
