#include "recaudit/prefdist.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "recaudit/error.hpp"

namespace recaudit {

PreferenceDistribution::PreferenceDistribution(std::vector<double> weights)
    : weights_(std::move(weights)) {
  if (weights_.empty()) throw Error(ErrorCode::EmptyInput, "distribution has no categories");
  double sum = 0.0;
  for (double w : weights_) {
    if (!(w >= 0.0)) throw Error(ErrorCode::NegativeWeight, "weight " + std::to_string(w));
    sum += w;
  }
  if (std::abs(sum - 1.0) > kSumTolerance) {
    throw Error(ErrorCode::InvalidDistribution, "weights sum to " + std::to_string(sum));
  }
}

PreferenceDistribution normalize(std::span<const double> raw) {
  if (raw.empty()) throw Error(ErrorCode::EmptyInput, "no categories");
  double total = 0.0;
  for (double w : raw) {
    if (!(w >= 0.0)) throw Error(ErrorCode::NegativeWeight, "weight " + std::to_string(w));
    total += w;
  }
  if (total <= 0.0) throw Error(ErrorCode::AllZero, "every entry is zero");
  std::vector<double> out(raw.begin(), raw.end());
  for (double& w : out) w /= total;
  return PreferenceDistribution(std::move(out), PreferenceDistribution::Unchecked{});
}

PreferenceDistribution smooth(const PreferenceDistribution& d, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw Error(ErrorCode::InvalidAlpha, "alpha " + std::to_string(alpha) + " outside (0,1)");
  }
  const double floor = alpha / static_cast<double>(d.size());
  std::vector<double> out(d.size());
  for (std::size_t c = 0; c < d.size(); ++c) out[c] = (1.0 - alpha) * d[c] + floor;
  return PreferenceDistribution(std::move(out), PreferenceDistribution::Unchecked{});
}

double kl_divergence(const PreferenceDistribution& p, const PreferenceDistribution& q) {
  if (p.size() != q.size()) {
    throw Error(ErrorCode::LengthMismatch,
                std::to_string(p.size()) + " vs " + std::to_string(q.size()) + " categories");
  }
  double sum = 0.0;
  for (std::size_t c = 0; c < p.size(); ++c) {
    if (p[c] <= 0.0) continue;
    if (q[c] <= 0.0) throw Error(ErrorCode::ZeroInQ, "q is zero at category " + std::to_string(c));
    sum += p[c] * std::log(p[c] / q[c]);
  }
  // Gibbs: the true value is non-negative; only rounding can push it below.
  return std::max(sum, 0.0);
}

double js_divergence(const PreferenceDistribution& p, const PreferenceDistribution& q) {
  return 0.5 * (kl_divergence(p, q) + kl_divergence(q, p));
}

PreferenceDistribution mean_distribution(std::span<const PreferenceDistribution> ds) {
  if (ds.empty()) throw Error(ErrorCode::EmptyInput, "mean of zero distributions");
  const std::size_t n = ds.front().size();
  std::vector<double> acc(n, 0.0);
  for (const auto& d : ds) {
    if (d.size() != n) throw Error(ErrorCode::LengthMismatch, "distributions differ in length");
    for (std::size_t c = 0; c < n; ++c) acc[c] += d[c];
  }
  const double count = static_cast<double>(ds.size());
  for (double& v : acc) v /= count;
  return PreferenceDistribution(std::move(acc), PreferenceDistribution::Unchecked{});
}

double entropy_normalized(const PreferenceDistribution& d) {
  if (d.size() < 2) throw Error(ErrorCode::SingleCategory, "entropy needs at least two categories");
  double h = 0.0;
  for (double w : d) {
    if (w > 0.0) h -= w * std::log(w);
  }
  return std::clamp(h / std::log(static_cast<double>(d.size())), 0.0, 1.0);
}

}  // namespace recaudit
