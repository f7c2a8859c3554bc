#pragma once

// Codebook entropy loss E[H(p)] - H(E[p]) + ln C.
//
// By Jensen the unshifted part lies in [-ln C, 0], so the shifted loss lies in
// [0, ln C]. The minimum is reached by C one-hot rows covering every code.

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "geokit/detail/numeric.hpp"
#include "geokit/error.hpp"
#include "geokit/quantizer/lfq.hpp"

namespace geokit::quantizer {

inline constexpr double kRowSumTolerance = 1e-9;

/// B x C row-stochastic matrix.
class DistributionBatch {
 public:
  DistributionBatch(std::size_t rows, std::size_t cols, std::vector<double> values)
      : rows_(rows), cols_(cols), values_(std::move(values)) {
    if (rows_ == 0 || cols_ == 0) throw InvalidArgument("distribution batch: empty shape");
    if (values_.size() != rows_ * cols_) {
      throw InvalidArgument("distribution batch: " + std::to_string(values_.size()) +
                            " values for shape " + std::to_string(rows_) + "x" +
                            std::to_string(cols_));
    }
    for (std::size_t r = 0; r < rows_; ++r) {
      geokit::detail::CompensatedSum s;
      for (double p : row(r)) {
        if (!std::isfinite(p) || p < 0.0) {
          throw InvalidArgument("distribution batch: row " + std::to_string(r) +
                                " has a negative or non-finite entry");
        }
        s.add(p);
      }
      if (std::fabs(s.value() - 1.0) > kRowSumTolerance) {
        throw InvalidArgument("distribution batch: row " + std::to_string(r) + " sums to " +
                              std::to_string(s.value()));
      }
    }
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::span<const double> row(std::size_t r) const {
    return std::span<const double>(values_).subspan(r * cols_, cols_);
  }
  const std::vector<double>& values() const { return values_; }

 private:
  std::size_t rows_, cols_;
  std::vector<double> values_;
};

/// Shannon entropy in nats with 0 ln 0 = 0.
inline double entropy(std::span<const double> p) {
  geokit::detail::CompensatedSum acc;
  for (double x : p) {
    if (x > 0.0) acc.add(-x * std::log(x));
  }
  return acc.value();
}

/// Shifted entropy loss over the rows of `batch`; C is the row width. The
/// result is clamped to [0, ln C] to absorb last-ulp rounding.
inline double entropy_loss(const DistributionBatch& batch) {
  const std::size_t B = batch.rows();
  const std::size_t C = batch.cols();

  geokit::detail::CompensatedSum mean_h;
  for (std::size_t r = 0; r < B; ++r) mean_h.add(entropy(batch.row(r)));
  const double expected_entropy = mean_h.value() / static_cast<double>(B);

  std::vector<double> mean_row(C);
  for (std::size_t c = 0; c < C; ++c) {
    geokit::detail::CompensatedSum col;
    for (std::size_t r = 0; r < B; ++r) col.add(batch.row(r)[c]);
    mean_row[c] = col.value() / static_cast<double>(B);
  }
  const double entropy_of_mean = entropy(mean_row);

  const double log_c = std::log(static_cast<double>(C));
  const double loss = (expected_entropy - entropy_of_mean) + log_c;
  return std::clamp(loss, 0.0, log_c);
}

/// Factorized Bernoulli code distribution: bit j is +1 with probability
/// logistic(z_j); codes are laid out by index_of.
inline std::vector<double> factorized_distribution(std::span<const double> logits) {
  const std::size_t b = logits.size();
  if (b == 0 || b > static_cast<std::size_t>(kMaxExpandBits)) {
    throw InvalidArgument("factorized_distribution: bit width must be in [1, 16]");
  }
  std::vector<double> plus(b), minus(b);
  for (std::size_t j = 0; j < b; ++j) {
    if (!std::isfinite(logits[j])) throw InvalidArgument("factorized_distribution: non-finite logit");
    plus[j] = 1.0 / (1.0 + std::exp(-logits[j]));
    minus[j] = 1.0 / (1.0 + std::exp(logits[j]));
  }
  const std::size_t C = std::size_t{1} << b;
  std::vector<double> out(C);
  for (std::size_t idx = 0; idx < C; ++idx) {
    double p = 1.0;
    for (std::size_t j = 0; j < b; ++j) p *= (idx >> j) & 1u ? plus[j] : minus[j];
    out[idx] = p;
  }
  return out;
}

/// One factorized distribution per grid cell.
inline DistributionBatch factorized_batch(const FeatureGrid& z) {
  const std::size_t C = std::size_t{1} << z.bits();
  if (z.bits() > kMaxExpandBits) throw InvalidArgument("factorized_batch: bit width exceeds 16");
  std::vector<double> values;
  values.reserve(z.cells() * C);
  for (std::size_t i = 0; i < z.cells(); ++i) {
    const auto row = factorized_distribution(z.cell(i));
    values.insert(values.end(), row.begin(), row.end());
  }
  return DistributionBatch(z.cells(), C, std::move(values));
}

}  // namespace geokit::quantizer
