#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "coarsekit/coarsen.hpp"
#include "coarsekit/errors.hpp"
#include "coarsekit/rng.hpp"
#include "coarsekit/sparse_matrix.hpp"
#include "coarsekit/svd.hpp"

namespace coarsekit {

struct SamplingConfig {
  index_t c = 1;               // sample count
  double beta = 1.0;           // global probability scaling, renormalized away
  std::uint64_t seed = 0;
  bool with_replacement = true;
  bool scale_columns = true;   // scale drawn columns by 1/sqrt(c * p_i)

  void validate() const {
    if (c < 1) throw config_error("sample count must be >= 1");
    if (!(beta > 0.0 && beta <= 1.0)) throw config_error("beta must lie in (0, 1]");
  }
};

struct SampledMatrix {
  SparseMatrix matrix;
  std::vector<index_t> indices;  // original column (or row) index per sample
};

namespace detail {

inline SparseMatrix gather_columns(const SparseMatrix& a,
                                   const std::vector<index_t>& idx,
                                   const std::vector<double>& scales) {
  std::vector<index_t> col_ptr{0};
  std::vector<index_t> rows;
  std::vector<double> vals;
  for (std::size_t t = 0; t < idx.size(); ++t)
    append_scaled_column(a, idx[t], scales.empty() ? 1.0 : scales[t], col_ptr, rows, vals);
  return SparseMatrix::from_csc(a.rows(), static_cast<index_t>(idx.size()),
                                std::move(col_ptr), std::move(rows), std::move(vals));
}

// One weighted draw from an unnormalized weight vector.
inline index_t weighted_draw(const std::vector<double>& weights, double total, Rng& rng) {
  const double r = rng.next_double() * total;
  double acc = 0.0;
  index_t last = -1;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    acc += weights[i];
    last = static_cast<index_t>(i);
    if (r < acc) return last;
  }
  return last;  // r landed on accumulated rounding; take the final positive weight
}

}  // namespace detail

/// p_i = beta ||a^(i)||^2 / ||A||_F^2, renormalized to sum to one.
inline std::vector<double> column_sampling_probabilities(const SparseMatrix& a,
                                                         double beta = 1.0) {
  const double fro = frobenius_norm(a);
  if (fro == 0.0)
    throw numerical_error("column sampling: all-zero matrix has no sampling distribution");
  const Vector norm2 = column_squared_norms(a);
  std::vector<double> p(static_cast<std::size_t>(a.cols()));
  double total = 0.0;
  for (index_t j = 0; j < a.cols(); ++j) {
    p[static_cast<std::size_t>(j)] = beta * norm2[j] / (fro * fro);
    total += p[static_cast<std::size_t>(j)];
  }
  for (auto& v : p) v /= total;  // beta rescales uniformly, so this restores sum 1
  return p;
}

/// Column-norm sampling: columns drawn i.i.d. with probability proportional
/// to their squared norm; in scaled mode column t of C is a^(i)/sqrt(c p_i),
/// which makes C C^T an unbiased estimator of A A^T.
inline SampledMatrix column_norm_sample(const SparseMatrix& a, const SamplingConfig& cfg) {
  cfg.validate();
  const std::vector<double> p = column_sampling_probabilities(a, cfg.beta);

  Rng rng(cfg.seed);
  SampledMatrix out;
  out.indices.reserve(static_cast<std::size_t>(cfg.c));
  std::vector<double> scales;
  std::vector<double> weights = p;
  double wsum = 1.0;
  for (index_t t = 0; t < cfg.c; ++t) {
    const index_t j = detail::weighted_draw(weights, wsum, rng);
    out.indices.push_back(j);
    if (cfg.scale_columns)
      scales.push_back(1.0 / std::sqrt(static_cast<double>(cfg.c) * p[static_cast<std::size_t>(j)]));
    if (!cfg.with_replacement) {
      wsum -= weights[static_cast<std::size_t>(j)];
      weights[static_cast<std::size_t>(j)] = 0.0;
      if (wsum <= 0.0 && t + 1 < cfg.c)
        throw numerical_error("column_norm_sample: ran out of columns with nonzero weight");
    }
  }
  out.matrix = detail::gather_columns(a, out.indices, scales);
  return out;
}

/// c distinct columns chosen uniformly without replacement, unscaled.
inline SampledMatrix uniform_sample(const SparseMatrix& a, index_t c, std::uint64_t seed) {
  if (c < 1 || c > a.cols())
    throw dimension_error("uniform_sample: c = " + std::to_string(c) +
                          " out of range for " + std::to_string(a.cols()) + " columns");
  Rng rng(seed);
  // partial Fisher-Yates: the first c entries of a random permutation
  std::vector<index_t> pool(static_cast<std::size_t>(a.cols()));
  for (index_t i = 0; i < a.cols(); ++i) pool[static_cast<std::size_t>(i)] = i;
  SampledMatrix out;
  out.indices.reserve(static_cast<std::size_t>(c));
  for (index_t t = 0; t < c; ++t) {
    const index_t pick = t + rng.next_index(a.cols() - t);
    std::swap(pool[static_cast<std::size_t>(t)], pool[static_cast<std::size_t>(pick)]);
    out.indices.push_back(pool[static_cast<std::size_t>(t)]);
  }
  out.matrix = detail::gather_columns(a, out.indices, {});
  return out;
}

struct LeverageScores {
  Vector scores;
  index_t k = 0;
};

/// Column leverage scores from an orthonormal top-k right singular basis:
/// the scaled squared row norms of V_k, summing to 1.
inline LeverageScores leverage_scores(const DenseMatrix& v, index_t k) {
  if (k != v.cols())
    throw config_error("leverage_scores: k must equal the basis column count");
  if (k < 1) throw config_error("leverage_scores: empty basis");
  if (orthonormality_error(v) > 1e-8)
    throw config_error("leverage_scores: basis columns are not orthonormal");
  LeverageScores out;
  out.k = k;
  out.scores = v.rowwise().squaredNorm() / static_cast<double>(k);
  return out;
}

enum class Axis { columns, rows };

struct LeverageSampleOptions {
  index_t c = 1;
  index_t k = 1;
  Axis axis = Axis::columns;
  std::uint64_t seed = 0;
  bool scaled_sketch = false;  // false: CSSP mode, unscaled, without replacement
  int svd_iters = 60;          // subspace iterations for the top-k factors
};

/// Leverage-score sampling of columns (scores from V_k, scaled) or rows
/// (scores ||U_k(i,:)||^2, each at most 1). Selection weights are
/// min{1, l_i} renormalized to a proper distribution.
inline SampledMatrix leverage_sample(const SparseMatrix& a, const LeverageSampleOptions& opt) {
  if (opt.k < 1 || opt.k > std::min(a.rows(), a.cols()))
    throw dimension_error("leverage_sample: k out of range");
  if (opt.c < 1) throw config_error("leverage_sample: c must be >= 1");
  const PartialSVD svd = partial_svd(a, opt.k, opt.svd_iters, derive_seed(opt.seed, 7));

  Vector raw;
  if (opt.axis == Axis::columns)
    raw = leverage_scores(svd.V, svd.rank()).scores;
  else
    raw = svd.U.rowwise().squaredNorm();  // row scores, each <= 1

  std::vector<double> weights(static_cast<std::size_t>(raw.size()));
  double total = 0.0;
  for (index_t i = 0; i < raw.size(); ++i) {
    weights[static_cast<std::size_t>(i)] = std::min(1.0, raw[i]);
    total += weights[static_cast<std::size_t>(i)];
  }
  if (total <= 0.0) throw numerical_error("leverage_sample: all scores are zero");

  const SparseMatrix& source = opt.axis == Axis::columns ? a : transpose(a);
  if (!opt.scaled_sketch && opt.c > source.cols())
    throw dimension_error("leverage_sample: c exceeds the candidate count");

  Rng rng(opt.seed);
  SampledMatrix picked;
  std::vector<double> scales;
  if (opt.scaled_sketch) {
    for (index_t t = 0; t < opt.c; ++t) {
      const index_t j = detail::weighted_draw(weights, total, rng);
      picked.indices.push_back(j);
      const double pj = weights[static_cast<std::size_t>(j)] / total;
      scales.push_back(1.0 / std::sqrt(static_cast<double>(opt.c) * pj));
    }
  } else {
    double wsum = total;
    std::vector<double> w = weights;
    for (index_t t = 0; t < opt.c; ++t) {
      const index_t j = detail::weighted_draw(w, wsum, rng);
      if (j < 0) throw numerical_error("leverage_sample: ran out of positive scores");
      picked.indices.push_back(j);
      wsum -= w[static_cast<std::size_t>(j)];
      w[static_cast<std::size_t>(j)] = 0.0;
    }
  }
  picked.matrix = detail::gather_columns(source, picked.indices, scales);
  if (opt.axis == Axis::rows) picked.matrix = transpose(picked.matrix);
  return picked;
}

/// Hybrid reduction: uniformly downsample to ceil(n/2) columns, then run the
/// multilevel coarsening on the half-sample.
struct RandCoarsenResult {
  std::vector<index_t> sampled;  // original indices of the uniform half-sample
  CoarseningHierarchy hierarchy;

  std::vector<index_t> selected_original_indices() const {
    std::vector<index_t> sel = hierarchy.selected_original_indices();
    for (auto& s : sel) s = sampled[static_cast<std::size_t>(s)];
    return sel;
  }
};

inline RandCoarsenResult rand_plus_coarsen(const SparseMatrix& a,
                                           const CoarsenConfig& coarsen_cfg,
                                           std::uint64_t seed) {
  if (a.cols() < 2) throw dimension_error("rand_plus_coarsen: need at least 2 columns");
  const index_t half = (a.cols() + 1) / 2;
  RandCoarsenResult out;
  SampledMatrix s = uniform_sample(a, half, derive_seed(seed, 1));
  out.sampled = std::move(s.indices);
  CoarsenConfig cfg = coarsen_cfg;
  cfg.seed = derive_seed(seed, 2);
  out.hierarchy = coarsen_multilevel(s.matrix, cfg);
  return out;
}

}  // namespace coarsekit
