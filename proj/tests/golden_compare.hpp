#pragma once

// Comparison of an audit report against the frozen toy oracle tables in tests/golden.

#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "recaudit/evalreport.hpp"
#include "recaudit/textio.hpp"

namespace testing {

struct GoldenDiff {
  std::vector<std::string> mismatches;
  std::size_t compared = 0;

  bool ok() const { return mismatches.empty() && compared > 0; }
};

namespace detail {

inline bool close(double got, double want, double tol) {
  if (std::isnan(want)) return std::isnan(got);
  if (std::isinf(want)) return got == want;
  return std::abs(got - want) <= tol * std::max(1.0, std::abs(want));
}

inline void expect(GoldenDiff& d, const std::string& where, double got, double want, double tol) {
  ++d.compared;
  if (!close(got, want, tol)) {
    d.mismatches.push_back(where + ": got " + recaudit::format_double(got) + ", want " +
                           recaudit::format_double(want));
  }
}

inline void expect_text(GoldenDiff& d, const std::string& where, const std::string& got,
                        const std::string& want) {
  ++d.compared;
  if (got != want) d.mismatches.push_back(where + ": got '" + got + "', want '" + want + "'");
}

}  // namespace detail

inline GoldenDiff compare_report_to_golden(const recaudit::AuditReport& r,
                                           const std::filesystem::path& dir, double tol = 1e-9) {
  using namespace recaudit;
  using detail::expect;
  using detail::expect_text;
  GoldenDiff d;

  const auto per_user = read_tsv(dir / "toy_userknn_per_user.tsv");
  if (per_user.rows.size() != r.per_user.size()) {
    d.mismatches.push_back("per_user row count " + std::to_string(r.per_user.size()) + " vs " +
                           std::to_string(per_user.rows.size()));
    return d;
  }
  for (std::size_t i = 0; i < r.per_user.size(); ++i) {
    const auto& row = per_user.rows[i];
    const auto& u = r.per_user[i];
    const std::string where = "user " + row[per_user.column("user_id")];
    expect_text(d, where + " id", std::to_string(u.user_id), row[per_user.column("user_id")]);
    expect_text(d, where + " gender", u.gender == Gender::Female ? "F" : "M", row[per_user.column("gender")]);
    expect_text(d, where + " age", group_label(u.age_group), row[per_user.column("age_group")]);
    for (auto m : measure_names()) {
      expect(d, where + " " + std::string(m), measure_value(u, m), parse_double(row[per_user.column(m)]), tol);
    }
    expect_text(d, where + " test_items", std::to_string(u.test_items), row[per_user.column("test_items")]);
    expect_text(d, where + " rank", std::to_string(u.typicality_rank), row[per_user.column("typicality_rank")]);
  }

  const auto sys = read_tsv(dir / "toy_userknn_system.tsv");
  for (const auto& row : sys.rows) {
    const auto& key = row[0];
    const double want = parse_double(row[1]);
    double got = NAN;
    if (key == "miscalibration_mean") got = r.system.miscalibration_mean;
    else if (key == "bias_term") got = r.system.bias_term;
    else if (key == "variance_term") got = r.system.variance_term;
    else if (key == "decomposition_residual") got = r.system.decomposition_residual;
    else if (key == "stereotype") got = r.system.stereotype;
    else if (key == "bias_variance_ratio") got = r.system.bias_variance_ratio;
    else if (key == "ndcg_mean") got = r.ndcg_mean;
    else if (key == "ndcg_users") got = static_cast<double>(r.ndcg_users);
    else if (key == "stereotyped_share") got = r.stereotyped_share;
    expect(d, "system " + key, got, want, tol);
  }

  const auto groups = read_tsv(dir / "toy_userknn_groups.tsv");
  for (const auto& row : groups.rows) {
    const auto& attr = row[groups.column("attribute")];
    const auto& measure = row[groups.column("measure")];
    const MeasureComparison* found = nullptr;
    for (const auto& g : r.groups) {
      if (to_string(g.attribute) != attr) continue;
      for (const auto& m : g.measures) {
        if (m.measure == measure) found = &m;
      }
    }
    const std::string where = "groups " + attr + "/" + measure;
    if (found == nullptr) {
      d.mismatches.push_back(where + ": missing");
      continue;
    }
    auto col = [&](const char* name) { return parse_double(row[groups.column(name)]); };
    expect(d, where + " minority_n", static_cast<double>(found->minority.count), col("minority_n"), 0);
    expect(d, where + " minority_mean", found->minority.mean, col("minority_mean"), tol);
    expect(d, where + " minority_sd", found->minority.stddev, col("minority_sd"), tol);
    expect(d, where + " majority_n", static_cast<double>(found->majority.count), col("majority_n"), 0);
    expect(d, where + " majority_mean", found->majority.mean, col("majority_mean"), tol);
    expect(d, where + " majority_sd", found->majority.stddev, col("majority_sd"), tol);
    expect(d, where + " t", found->welch.t, col("t"), tol);
    expect(d, where + " df", found->welch.df, col("df"), tol);
    // p-values go through the incomplete beta; its continued fraction is accurate to ~1e-13.
    expect(d, where + " p", found->welch.p_value, col("p_value"), std::max(tol, 1e-10));
  }

  const auto bd = read_tsv(dir / "toy_userknn_bias_disparity.tsv");
  for (const auto& row : bd.rows) {
    const auto& attr = row[0];
    const auto& group = row[1];
    const BiasDisparityTable* table = nullptr;
    for (const auto& t : r.bias_disparity) {
      if (to_string(t.attribute) == attr) table = &t;
    }
    std::size_t gi = 0;
    while (table != nullptr && gi < table->groups.size() && table->groups[gi] != group) ++gi;
    const std::string where = "bias_disparity " + attr + "/" + group;
    if (table == nullptr || gi == table->groups.size()) {
      d.mismatches.push_back(where + ": missing");
      continue;
    }
    for (std::size_t c = 2; c < bd.header.size(); ++c) {
      std::size_t ci = 0;
      while (ci < r.categories.size() && r.categories[ci] != bd.header[c]) ++ci;
      const auto cell_where = where + "/" + bd.header[c];
      if (ci == r.categories.size()) {
        d.mismatches.push_back(cell_where + ": unknown category");
        continue;
      }
      const auto& got = table->values[gi][ci];
      if (row[c].empty()) {
        ++d.compared;
        if (got.has_value()) d.mismatches.push_back(cell_where + ": expected undefined");
      } else if (!got.has_value()) {
        d.mismatches.push_back(cell_where + ": unexpectedly undefined");
      } else {
        expect(d, cell_where, *got, parse_double(row[c]), tol);
      }
    }
  }
  return d;
}

inline GoldenDiff compare_topk_to_golden(const std::vector<recaudit::TopKList>& lists,
                                         const std::filesystem::path& dir) {
  GoldenDiff d;
  const auto t = recaudit::read_tsv(dir / "toy_userknn_topk.tsv");
  if (t.rows.size() != lists.size()) {
    d.mismatches.push_back("top-k list count differs");
    return d;
  }
  for (std::size_t u = 0; u < lists.size(); ++u) {
    std::string items;
    for (const auto& s : lists[u].items) {
      if (!items.empty()) items += ',';
      items += std::to_string(s.item);
    }
    detail::expect_text(d, "topk user " + t.rows[u][0] + " id", std::to_string(lists[u].user), t.rows[u][0]);
    detail::expect_text(d, "topk user " + t.rows[u][0], items, t.rows[u][1]);
  }
  return d;
}

}  // namespace testing
