#pragma once

// Probability distributions over item categories and the divergences built on them.
//
// All logarithms are natural. Divergences require strictly positive q wherever p > 0;
// callers blend toward uniform with smooth() first.

#include <cstddef>
#include <span>
#include <vector>

namespace recaudit {

inline constexpr double kDefaultSmoothing = 0.01;
inline constexpr double kSumTolerance = 1e-9;

class PreferenceDistribution {
 public:
  PreferenceDistribution() = default;

  // Validates: non-empty, every weight >= 0, sum within kSumTolerance of 1.
  explicit PreferenceDistribution(std::vector<double> weights);

  std::span<const double> weights() const noexcept { return weights_; }
  std::size_t size() const noexcept { return weights_.size(); }
  bool empty() const noexcept { return weights_.empty(); }
  double operator[](std::size_t c) const noexcept { return weights_[c]; }

  auto begin() const noexcept { return weights_.begin(); }
  auto end() const noexcept { return weights_.end(); }

  friend bool operator==(const PreferenceDistribution&, const PreferenceDistribution&) = default;

 private:
  struct Unchecked {};
  PreferenceDistribution(std::vector<double> weights, Unchecked) : weights_(std::move(weights)) {}

  friend PreferenceDistribution normalize(std::span<const double> raw);
  friend PreferenceDistribution smooth(const PreferenceDistribution& d, double alpha);
  friend PreferenceDistribution mean_distribution(std::span<const PreferenceDistribution> ds);

  std::vector<double> weights_;
};

/// Scales non-negative raw masses to sum to one.
/// Throws NegativeWeight for any entry < 0 and AllZero when nothing is positive.
PreferenceDistribution normalize(std::span<const double> raw);

/// (1 - alpha) * d + alpha * uniform. alpha must lie in (0, 1).
PreferenceDistribution smooth(const PreferenceDistribution& d, double alpha = kDefaultSmoothing);

/// sum_c p(c) ln(p(c) / q(c)); terms with p(c) = 0 contribute nothing.
/// Throws ZeroInQ if q(c) = 0 where p(c) > 0.
double kl_divergence(const PreferenceDistribution& p, const PreferenceDistribution& q);

/// Symmetrized KL, (KL(p||q) + KL(q||p)) / 2. This is the "JS" used throughout the
/// audit measures; it is not the mixture-midpoint Jensen-Shannon divergence and is unbounded.
double js_divergence(const PreferenceDistribution& p, const PreferenceDistribution& q);

/// Element-wise arithmetic mean.
PreferenceDistribution mean_distribution(std::span<const PreferenceDistribution> ds);

/// Shannon entropy divided by ln(category count), clamped to [0, 1].
double entropy_normalized(const PreferenceDistribution& d);

}  // namespace recaudit
