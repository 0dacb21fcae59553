#include "recaudit/kernels.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>

#include <Eigen/Dense>

#include "recaudit/error.hpp"

namespace recaudit::kernels {
namespace {

std::vector<double> row_norms(const CsrView& m) {
  std::vector<double> out(m.rows(), 0.0);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    double s = 0.0;
    for (std::size_t k = m.ptr[r]; k < m.ptr[r + 1]; ++k) s += m.val[k] * m.val[k];
    out[r] = std::sqrt(s);
  }
  return out;
}

bool neighbor_before(const Neighbor& a, const Neighbor& b) {
  if (a.similarity != b.similarity) return a.similarity > b.similarity;
  return a.index < b.index;
}

void keep_top(std::vector<Neighbor>& cands, std::size_t k) {
  const std::size_t take = std::min(k, cands.size());
  std::partial_sort(cands.begin(), cands.begin() + static_cast<std::ptrdiff_t>(take), cands.end(),
                    neighbor_before);
  cands.resize(take);
}

NeighborLists pack(std::vector<std::vector<Neighbor>>& rows) {
  NeighborLists out;
  out.row_ptr.assign(rows.size() + 1, 0);
  for (std::size_t r = 0; r < rows.size(); ++r) out.row_ptr[r + 1] = out.row_ptr[r] + rows[r].size();
  out.entries.reserve(out.row_ptr.back());
  for (auto& r : rows) out.entries.insert(out.entries.end(), r.begin(), r.end());
  return out;
}

}  // namespace

CsrView by_user(const TrainingMatrix& m) { return {m.row_ptr(), m.cols(), m.counts()}; }
CsrView by_item(const TrainingMatrix& m) { return {m.col_ptr(), m.rows(), m.col_counts()}; }

NeighborLists cosine_topk(const CsrView& rows, const CsrView& transposed, std::size_t k, Exec exec) {
  const std::size_t n = rows.rows();
  const auto norms = row_norms(rows);
  std::vector<std::vector<Neighbor>> result(n);

#pragma omp parallel if (exec == Exec::Parallel)
  {
    std::vector<double> dot(n, 0.0);
    std::vector<std::uint32_t> touched;
    std::vector<Neighbor> cands;
#pragma omp for schedule(dynamic, 16)
    for (std::size_t a = 0; a < n; ++a) {
      touched.clear();
      // Features ascending, so each dot product accumulates in the same order as a merge.
      for (std::size_t ka = rows.ptr[a]; ka < rows.ptr[a + 1]; ++ka) {
        const auto f = rows.idx[ka];
        const double va = rows.val[ka];
        for (std::size_t kb = transposed.ptr[f]; kb < transposed.ptr[f + 1]; ++kb) {
          const auto b = transposed.idx[kb];
          if (dot[b] == 0.0) touched.push_back(b);
          dot[b] += va * transposed.val[kb];
        }
      }
      cands.clear();
      for (auto b : touched) {
        if (b != a && dot[b] > 0.0) cands.push_back({b, dot[b] / (norms[a] * norms[b])});
        dot[b] = 0.0;
      }
      keep_top(cands, k);
      result[a] = cands;
    }
  }
  return pack(result);
}

NeighborLists cosine_topk_reference(const CsrView& rows, std::size_t k) {
  const std::size_t n = rows.rows();
  const auto norms = row_norms(rows);
  std::vector<std::vector<Neighbor>> result(n);
  for (std::size_t a = 0; a < n; ++a) {
    std::vector<Neighbor> cands;
    for (std::size_t b = 0; b < n; ++b) {
      if (a == b) continue;
      double dot = 0.0;
      std::size_t ia = rows.ptr[a];
      std::size_t ib = rows.ptr[b];
      while (ia < rows.ptr[a + 1] && ib < rows.ptr[b + 1]) {
        if (rows.idx[ia] < rows.idx[ib]) {
          ++ia;
        } else if (rows.idx[ib] < rows.idx[ia]) {
          ++ib;
        } else {
          dot += rows.val[ia++] * rows.val[ib++];
        }
      }
      if (dot > 0.0) cands.push_back({static_cast<std::uint32_t>(b), dot / (norms[a] * norms[b])});
    }
    std::sort(cands.begin(), cands.end(), neighbor_before);
    if (cands.size() > k) cands.resize(k);
    result[a] = std::move(cands);
  }
  return pack(result);
}

void als_half_step(const CsrView& rows, std::span<const double> fixed, std::span<double> solved,
                   std::size_t dim, double reg, double confidence_alpha, Exec exec) {
  using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const std::size_t n_fixed = fixed.size() / dim;
  Eigen::Map<const Mat> f(fixed.data(), static_cast<Eigen::Index>(n_fixed),
                          static_cast<Eigen::Index>(dim));
  const Eigen::MatrixXd gram = f.transpose() * f;
  const auto d = static_cast<Eigen::Index>(dim);
  std::atomic<bool> singular{false};

#pragma omp parallel if (exec == Exec::Parallel)
  {
    Eigen::MatrixXd a(d, d);
    Eigen::VectorXd b(d);
    Eigen::LLT<Eigen::MatrixXd> llt(d);
#pragma omp for schedule(dynamic, 32)
    for (std::size_t r = 0; r < rows.rows(); ++r) {
      a = gram;
      a.diagonal().array() += reg;
      b.setZero();
      for (std::size_t k = rows.ptr[r]; k < rows.ptr[r + 1]; ++k) {
        const double conf = 1.0 + confidence_alpha * rows.val[k];
        const auto fj = f.row(rows.idx[k]).transpose();
        a.noalias() += (conf - 1.0) * fj * fj.transpose();
        b.noalias() += conf * fj;
      }
      llt.compute(a);
      if (llt.info() != Eigen::Success) {
        singular = true;
        continue;
      }
      Eigen::Map<Eigen::VectorXd>(solved.data() + r * dim, d) = llt.solve(b);
    }
  }
  if (singular) throw Error(ErrorCode::SingularSystem, "ALS normal equations not positive definite");
}

void als_half_step_reference(const CsrView& rows, std::span<const double> fixed,
                             std::span<double> solved, std::size_t dim, double reg,
                             double confidence_alpha) {
  const std::size_t n_fixed = fixed.size() / dim;
  const auto d = static_cast<Eigen::Index>(dim);
  std::vector<double> conf(n_fixed);
  for (std::size_t r = 0; r < rows.rows(); ++r) {
    std::fill(conf.begin(), conf.end(), 1.0);
    std::vector<double> pref(n_fixed, 0.0);
    for (std::size_t k = rows.ptr[r]; k < rows.ptr[r + 1]; ++k) {
      conf[rows.idx[k]] = 1.0 + confidence_alpha * rows.val[k];
      pref[rows.idx[k]] = 1.0;
    }
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(d, d) * reg;
    Eigen::VectorXd b = Eigen::VectorXd::Zero(d);
    for (std::size_t j = 0; j < n_fixed; ++j) {
      Eigen::Map<const Eigen::VectorXd> fj(fixed.data() + j * dim, d);
      a += conf[j] * fj * fj.transpose();
      b += conf[j] * pref[j] * fj;
    }
    Eigen::LLT<Eigen::MatrixXd> llt(a);
    if (llt.info() != Eigen::Success) {
      throw Error(ErrorCode::SingularSystem, "ALS normal equations not positive definite");
    }
    Eigen::Map<Eigen::VectorXd>(solved.data() + r * dim, d) = llt.solve(b);
  }
}

std::vector<TopKList> recommend_all(const Model& model, std::size_t k, Exec exec) {
  const std::size_t n = model.training().user_count();
  std::vector<TopKList> out(n);
  std::atomic<bool> failed{false};
#pragma omp parallel for schedule(dynamic, 16) if (exec == Exec::Parallel)
  for (std::size_t u = 0; u < n; ++u) {
    try {
      out[u] = model.recommend(u, k);
    } catch (...) {
      failed = true;
    }
  }
  if (failed) throw Error(ErrorCode::EmptyList, "ranking failed for at least one user");
  return out;
}

TopKList select_topk_reference(UserId user, std::span<const double> scores,
                               std::span<const ItemId> item_ids,
                               std::span<const std::uint32_t> seen, std::size_t k) {
  std::vector<std::uint32_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0u);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::uint32_t a, std::uint32_t b) { return scores[a] > scores[b]; });
  TopKList out;
  out.user = user;
  for (auto i : order) {
    if (out.items.size() == k) break;
    if (std::find(seen.begin(), seen.end(), i) != seen.end()) continue;
    out.items.push_back({item_ids[i], scores[i]});
  }
  out.truncated = out.items.size() < k;
  return out;
}

std::vector<UserAudit> audit_rows(std::span<const PreferenceDistribution> actual,
                                  std::span<const PreferenceDistribution> predicted,
                                  const PreferenceDistribution& p_bar,
                                  const PreferenceDistribution& q_bar, double alpha, Exec exec) {
  if (actual.size() != predicted.size()) throw Error(ErrorCode::LengthMismatch, "P and Q differ");
  std::vector<UserAudit> out(actual.size());
  std::atomic<bool> failed{false};
#pragma omp parallel for schedule(static) if (exec == Exec::Parallel)
  for (std::size_t u = 0; u < actual.size(); ++u) {
    try {
      out[u] = audit_user(actual[u], predicted[u], p_bar, q_bar, alpha);
    } catch (...) {
      failed = true;
    }
  }
  if (failed) throw Error(ErrorCode::LengthMismatch, "per-user audit failed");
  return out;
}

std::vector<UserAudit> audit_rows_reference(std::span<const PreferenceDistribution> actual,
                                            std::span<const PreferenceDistribution> predicted,
                                            const PreferenceDistribution& p_bar,
                                            const PreferenceDistribution& q_bar, double alpha) {
  std::vector<UserAudit> out;
  out.reserve(actual.size());
  for (std::size_t u = 0; u < actual.size(); ++u) {
    const auto& p = actual[u];
    const auto& q = predicted[u];
    UserAudit row;
    row.atypicality = atypicality_user(p, p_bar, alpha);
    row.diversity = diversity_user(p);
    row.miscalibration = miscalibration_user(p, q, alpha);
    const auto fx = effects_user(p, q, p_bar, q_bar, alpha);
    row.bias_effect = fx.bias_effect;
    row.variance_effect = fx.variance_effect;
    row.stereotype = stereotype_user(p, q, p_bar, q_bar, alpha);
    row.inflated_diversity = inflated_diversity_user(p, q);
    out.push_back(row);
  }
  return out;
}

}  // namespace recaudit::kernels
