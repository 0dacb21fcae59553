#pragma once

// Data-parallel inner loops. Each OpenMP kernel has a plainly written serial reference kept
// for tests and the benchmark; both produce per-row results independently, so the parallel
// output does not depend on thread count or scheduling.

#include <span>
#include <vector>

#include "recaudit/metrics.hpp"
#include "recaudit/recsys.hpp"

namespace recaudit::kernels {

// Read-only CSR slice: row r owns idx/val[ptr[r] .. ptr[r+1]), idx ascending.
struct CsrView {
  std::span<const std::size_t> ptr;
  std::span<const std::uint32_t> idx;
  std::span<const double> val;

  std::size_t rows() const noexcept { return ptr.size() - 1; }
};

CsrView by_user(const TrainingMatrix& m);
CsrView by_item(const TrainingMatrix& m);

/// Top-k cosine neighbors of every row, by sparse accumulation over the transpose.
/// Self-similarity and non-positive similarities are excluded.
NeighborLists cosine_topk(const CsrView& rows, const CsrView& transposed, std::size_t k,
                          Exec exec = Exec::Parallel);
/// Reference: every pair of rows by sorted-list merge.
NeighborLists cosine_topk_reference(const CsrView& rows, std::size_t k);

/// One ALS half-step: for every row r solve
///   (F^T F + sum_j (c_rj - 1) f_j f_j^T + reg I) x_r = sum_j c_rj f_j,  c_rj = 1 + alpha * count
/// where j runs over the row's observed entries. `fixed` is n_other x dim, `solved` n_rows x dim.
void als_half_step(const CsrView& rows, std::span<const double> fixed, std::span<double> solved,
                   std::size_t dim, double reg, double confidence_alpha, Exec exec = Exec::Parallel);
/// Reference: forms the full confidence-weighted Gram matrix over every column.
void als_half_step_reference(const CsrView& rows, std::span<const double> fixed,
                             std::span<double> solved, std::size_t dim, double reg,
                             double confidence_alpha);

/// Top-k lists for every training user, in user-index order.
std::vector<TopKList> recommend_all(const Model& model, std::size_t k, Exec exec = Exec::Parallel);
/// Reference ranking: full sort of all unseen items.
TopKList select_topk_reference(UserId user, std::span<const double> scores,
                               std::span<const ItemId> item_ids,
                               std::span<const std::uint32_t> seen, std::size_t k);

/// Per-user measures (fused evaluation via audit_user).
std::vector<UserAudit> audit_rows(std::span<const PreferenceDistribution> actual,
                                  std::span<const PreferenceDistribution> predicted,
                                  const PreferenceDistribution& p_bar,
                                  const PreferenceDistribution& q_bar, double alpha,
                                  Exec exec = Exec::Parallel);
/// Reference: one call per measure through the individual metric functions.
std::vector<UserAudit> audit_rows_reference(std::span<const PreferenceDistribution> actual,
                                            std::span<const PreferenceDistribution> predicted,
                                            const PreferenceDistribution& p_bar,
                                            const PreferenceDistribution& q_bar, double alpha);

}  // namespace recaudit::kernels
