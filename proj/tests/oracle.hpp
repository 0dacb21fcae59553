#pragma once

// Long-double loops written directly from the measure definitions. Test-only; takes plain
// vectors so nothing here goes through the library's distribution type.

#include <cmath>
#include <random>
#include <vector>

namespace oracle {

using Vec = std::vector<long double>;

inline Vec smooth(const Vec& d, long double alpha) {
  Vec out(d.size());
  for (std::size_t c = 0; c < d.size(); ++c) out[c] = (1 - alpha) * d[c] + alpha / d.size();
  return out;
}

inline long double kl(const Vec& p, const Vec& q) {
  long double s = 0;
  for (std::size_t c = 0; c < p.size(); ++c) {
    if (p[c] > 0) s += p[c] * std::log(p[c] / q[c]);
  }
  return s;
}

inline long double js(const Vec& p, const Vec& q) { return (kl(p, q) + kl(q, p)) / 2; }

inline long double kl_s(const Vec& p, const Vec& q, long double a) { return kl(smooth(p, a), smooth(q, a)); }
inline long double js_s(const Vec& p, const Vec& q, long double a) { return js(smooth(p, a), smooth(q, a)); }

inline long double entropy_norm(const Vec& d) {
  long double h = 0;
  for (auto x : d) {
    if (x > 0) h -= x * std::log(x);
  }
  return std::fmin(std::fmax(h / std::log(static_cast<long double>(d.size())), 0.0L), 1.0L);
}

inline Vec mean(const std::vector<Vec>& ds) {
  Vec m(ds.front().size(), 0);
  for (const auto& d : ds) {
    for (std::size_t c = 0; c < d.size(); ++c) m[c] += d[c];
  }
  for (auto& x : m) x /= ds.size();
  return m;
}

struct Row {
  long double mc, be, ve, st, idv, at, dv;
};

inline Row measures(const Vec& p, const Vec& q, const Vec& pb, const Vec& qb, long double a) {
  Row r;
  r.mc = kl_s(p, q, a);
  r.be = kl_s(p, qb, a) - kl_s(p, pb, a);
  r.ve = kl_s(p, q, a) - kl_s(p, qb, a);
  r.st = js_s(p, pb, a) - js_s(q, qb, a);
  r.idv = entropy_norm(p) - entropy_norm(q);
  r.at = js_s(p, pb, a);
  r.dv = entropy_norm(p);
  return r;
}

// Random distribution; with sparse = true roughly a third of the entries are exactly zero.
inline std::vector<double> random_distribution(std::mt19937_64& rng, std::size_t n, bool sparse) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> w(n);
  double total = 0.0;
  for (auto& x : w) {
    x = (sparse && u(rng) < 0.33) ? 0.0 : u(rng);
    total += x;
  }
  if (total == 0.0) {
    w[0] = 1.0;
    total = 1.0;
  }
  for (auto& x : w) x /= total;
  return w;
}

inline Vec widen(const std::vector<double>& v) { return Vec(v.begin(), v.end()); }

}  // namespace oracle
