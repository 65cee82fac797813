#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "coarsekit/errors.hpp"
#include "coarsekit/rng.hpp"
#include "coarsekit/sparse_matrix.hpp"

namespace coarsekit {

enum class CoarsenMode { scaled, unscaled };
enum class VisitOrder { random, natural };

struct CoarsenConfig {
  std::vector<double> epsilon_schedule;  // one epsilon per level, nondecreasing
  CoarsenMode mode = CoarsenMode::scaled;
  VisitOrder visit_order = VisitOrder::random;
  std::uint64_t seed = 0;
  // Stop the candidate scan at the first column clearing the angle
  // threshold instead of taking the argmax. Off by default: argmax is what
  // the matching algorithm states.
  bool early_exit = false;

  std::size_t levels() const { return epsilon_schedule.size(); }

  void validate() const {
    for (std::size_t i = 0; i < epsilon_schedule.size(); ++i) {
      const double e = epsilon_schedule[i];
      if (!(e > 0.0 && e < 1.0))
        throw config_error("epsilon must lie strictly in (0,1), got " + std::to_string(e));
      if (i > 0 && e < epsilon_schedule[i - 1])
        throw config_error("epsilon schedule must be nondecreasing");
    }
  }
};

/// One level of column matching. Coarse column l retains original column
/// kept[l]; partner[l] is the absorbed column (-1 if unmatched) and
/// cos2_theta[l] the matched pair's squared cosine (NaN if unmatched).
struct MatchingResult {
  SparseMatrix coarse;
  std::vector<index_t> kept;
  std::vector<index_t> partner;
  std::vector<double> cos2_theta;
  int level = 1;
  double epsilon = 0.0;
  std::vector<std::string> warnings;

  index_t matched_pairs() const {
    index_t n = 0;
    for (const index_t p : partner) n += (p >= 0);
    return n;
  }
};

/// Hypergraph coarsening by column matching, one level. Visits unmatched
/// columns, accumulates the sparse row of A^T A belonging to the visited
/// column i in ip[], and matches i with the argmax candidate j when
/// cos^2(theta_ij) >= 1/(1+eps^2). The denser column of a matched pair is
/// retained (ties keep the visiting column) and, in scaled mode, multiplied
/// by sqrt(1+cos^2(theta)). Unmatched columns are copied verbatim.
inline MatchingResult coarsen_level(const SparseMatrix& a, double epsilon,
                                    CoarsenMode mode = CoarsenMode::scaled,
                                    VisitOrder visit_order = VisitOrder::random,
                                    std::uint64_t seed = 0, bool early_exit = false) {
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw config_error("epsilon must lie strictly in (0,1), got " + std::to_string(epsilon));
  const index_t n = a.cols();
  if (n == 0 || a.rows() == 0) throw dimension_error("coarsen_level: empty matrix");

  const double threshold = 1.0 / (1.0 + epsilon * epsilon);
  const Vector norm2 = column_squared_norms(a);

  std::vector<index_t> order;
  if (visit_order == VisitOrder::random) {
    Rng rng(seed);
    order = rng.permutation(n);
  } else {
    order.resize(static_cast<std::size_t>(n));
    for (index_t i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  }

  std::vector<bool> matched(static_cast<std::size_t>(n), false);
  std::vector<double> ip(static_cast<std::size_t>(n), 0.0);
  std::vector<index_t> stamp(static_cast<std::size_t>(n), -1);
  std::vector<index_t> touched;
  touched.reserve(64);

  MatchingResult out;
  out.epsilon = epsilon;
  std::vector<index_t> col_ptr{0};
  std::vector<index_t> rows;
  std::vector<double> vals;

  index_t n_unmatched = n;
  index_t visit_id = 0;
  bool any_nonzero_column = false;

  for (const index_t i : order) {
    if (matched[static_cast<std::size_t>(i)]) continue;
    matched[static_cast<std::size_t>(i)] = true;
    --n_unmatched;
    ++visit_id;

    index_t match_j = -1;
    double match_csq = 0.0;

    if (norm2[i] > 0.0) {
      any_nonzero_column = true;
      // ip[k] = <a^(i), a^(k)> accumulated over the rows adjacent to column i
      touched.clear();
      auto ci = a.col_indices(i);
      auto vi = a.col_values(i);
      for (std::size_t p = 0; p < ci.size(); ++p) {
        const index_t r = ci[p];
        const double a_ri = vi[p];
        auto rk = a.row_indices(r);
        auto rv = a.row_values(r);
        for (std::size_t q = 0; q < rk.size(); ++q) {
          const index_t k = rk[q];
          if (stamp[static_cast<std::size_t>(k)] != visit_id) {
            stamp[static_cast<std::size_t>(k)] = visit_id;
            ip[static_cast<std::size_t>(k)] = 0.0;
            touched.push_back(k);
          }
          ip[static_cast<std::size_t>(k)] += a_ri * rv[q];
        }
      }

      if (early_exit) {
        for (const index_t k : touched) {
          if (k == i || matched[static_cast<std::size_t>(k)]) continue;
          const double v = ip[static_cast<std::size_t>(k)];
          if (v == 0.0) continue;
          const double csq = v * v / (norm2[i] * norm2[k]);
          if (csq >= threshold) {
            match_j = k;
            match_csq = csq;
            break;
          }
        }
      } else {
        // argmax over the unmatched candidate set; off-pattern candidates
        // hold an implicit zero
        index_t best = -1;
        double best_val = 0.0;
        index_t touched_in_idx = 0;
        for (const index_t k : touched) {
          if (k == i || matched[static_cast<std::size_t>(k)]) continue;
          ++touched_in_idx;
          const double v = ip[static_cast<std::size_t>(k)];
          if (best < 0 || v > best_val || (v == best_val && k < best)) {
            best = k;
            best_val = v;
          }
        }
        const bool untouched_candidates = n_unmatched > touched_in_idx;
        if (best >= 0 && best_val != 0.0 && !(best_val < 0.0 && untouched_candidates)) {
          const double csq = best_val * best_val / (norm2[i] * norm2[best]);
          if (csq >= threshold) {
            match_j = best;
            match_csq = csq;
          }
        }
      }
    }

    if (match_j >= 0) {
      matched[static_cast<std::size_t>(match_j)] = true;
      --n_unmatched;
      const index_t keep =
          a.col_nnz(match_j) > a.col_nnz(i) ? match_j : i;
      const index_t absorbed = keep == i ? match_j : i;
      const double scale = mode == CoarsenMode::scaled ? std::sqrt(1.0 + match_csq) : 1.0;
      detail::append_scaled_column(a, keep, scale, col_ptr, rows, vals);
      out.kept.push_back(keep);
      out.partner.push_back(absorbed);
      out.cos2_theta.push_back(match_csq);
    } else {
      detail::append_scaled_column(a, i, 1.0, col_ptr, rows, vals);
      out.kept.push_back(i);
      out.partner.push_back(-1);
      out.cos2_theta.push_back(std::numeric_limits<double>::quiet_NaN());
    }
  }

  if (!any_nonzero_column)
    out.warnings.push_back("all columns have zero norm; nothing can be matched");

  out.coarse = SparseMatrix::from_csc(a.rows(), static_cast<index_t>(out.kept.size()),
                                      std::move(col_ptr), std::move(rows), std::move(vals));
  return out;
}

/// Multilevel driver: level i coarsens level i-1's output with
/// epsilon_schedule[i-1] and a per-level sub-seed derived from the master
/// seed. Stops early when a level matches nothing.
struct CoarseningHierarchy {
  SparseMatrix original;
  std::vector<MatchingResult> levels;
  bool stopped_early = false;
  std::vector<std::string> notes;

  const SparseMatrix& final_coarse() const {
    return levels.empty() ? original : levels.back().coarse;
  }

  /// Composition of the per-level kept maps: final coarse column l came
  /// from original column result[l].
  std::vector<index_t> selected_original_indices() const {
    std::vector<index_t> sel(static_cast<std::size_t>(original.cols()));
    for (std::size_t i = 0; i < sel.size(); ++i) sel[i] = static_cast<index_t>(i);
    for (const auto& level : levels) {
      std::vector<index_t> next(level.kept.size());
      for (std::size_t l = 0; l < level.kept.size(); ++l)
        next[l] = sel[static_cast<std::size_t>(level.kept[l])];
      sel = std::move(next);
    }
    return sel;
  }

  /// Original columns absorbed somewhere along the hierarchy.
  std::vector<index_t> dropped_original_indices() const {
    const auto sel = selected_original_indices();
    std::vector<bool> keep(static_cast<std::size_t>(original.cols()), false);
    for (const index_t s : sel) keep[static_cast<std::size_t>(s)] = true;
    std::vector<index_t> dropped;
    for (index_t j = 0; j < original.cols(); ++j)
      if (!keep[static_cast<std::size_t>(j)]) dropped.push_back(j);
    return dropped;
  }
};

inline CoarseningHierarchy coarsen_multilevel(const SparseMatrix& a,
                                              const CoarsenConfig& cfg) {
  cfg.validate();
  CoarseningHierarchy h;
  h.original = a;
  const SparseMatrix* current = &h.original;
  for (std::size_t i = 0; i < cfg.epsilon_schedule.size(); ++i) {
    MatchingResult res =
        coarsen_level(*current, cfg.epsilon_schedule[i], cfg.mode, cfg.visit_order,
                      derive_seed(cfg.seed, i), cfg.early_exit);
    res.level = static_cast<int>(i) + 1;
    if (res.matched_pairs() == 0) {
      h.stopped_early = true;
      h.notes.push_back("level " + std::to_string(i + 1) +
                        " matched no columns; coarsening stopped");
      break;
    }
    h.levels.push_back(std::move(res));
    current = &h.levels.back().coarse;
  }
  return h;
}

/// Row coarsening for graph sparsification: the matching algorithm applied
/// to B^T, reported in the row space of B. coarse_rows is B-tilde with
/// fewer rows; its Laplacian B~^T B~ sparsifies B^T B.
struct RowCoarsening {
  SparseMatrix coarse_rows;
  CoarseningHierarchy hierarchy;  // levels run on B^T: kept indices are rows of B
};

inline RowCoarsening coarsen_rows(const SparseMatrix& b, const CoarsenConfig& cfg) {
  RowCoarsening out;
  out.hierarchy = coarsen_multilevel(transpose(b), cfg);
  out.coarse_rows = transpose(out.hierarchy.final_coarse());
  return out;
}

/// Column subset selection by coarsening: unscaled multilevel matching, so
/// every selected column is a verbatim column of A.
struct CsspSelection {
  std::vector<index_t> indices;
  SparseMatrix C;
  CoarseningHierarchy hierarchy;
};

inline CsspSelection cssp_select(const SparseMatrix& a, CoarsenConfig cfg) {
  cfg.mode = CoarsenMode::unscaled;
  CsspSelection out;
  out.hierarchy = coarsen_multilevel(a, cfg);
  out.indices = out.hierarchy.selected_original_indices();
  out.C = out.hierarchy.final_coarse();
  return out;
}

}  // namespace coarsekit
