#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/QR>

#include "coarsekit/errors.hpp"
#include "coarsekit/rng.hpp"
#include "coarsekit/sparse_matrix.hpp"
#include "coarsekit/svd.hpp"

namespace coarsekit {

/// ||A - H H^T A||_F computed through the trace identity
/// sqrt(||A||_F^2 - ||A^T H||_F^2); the m-by-n residual is never formed.
inline double projection_error_frobenius(const SparseMatrix& a, const DenseMatrix& h) {
  if (h.rows() != a.rows())
    throw dimension_error("projection_error_frobenius: row count mismatch");
  if (orthonormality_error(h) > 1e-8)
    throw config_error("projection_error_frobenius: H columns are not orthonormal");
  const double fro2 = frobenius_norm(a) * frobenius_norm(a);
  const DenseMatrix ath = multiply_dense(a, h, Side::left, true);  // n x k
  double radicand = fro2 - ath.squaredNorm();
  if (radicand < 0.0) {
    if (radicand < -1e-10 * std::max(fro2, 1.0))
      throw numerical_error("projection_error_frobenius: radicand " +
                            std::to_string(radicand) + " below tolerance");
    radicand = 0.0;
  }
  return std::sqrt(radicand);
}

/// Mean relative singular value error over the top k:
/// (1/k) sum |sigma_hat_i - sigma_i| / sigma_i.
inline double mean_sv_error(const Vector& sigma_hat, const Vector& sigma, index_t k) {
  if (sigma_hat.size() < k || sigma.size() < k)
    throw dimension_error("mean_sv_error: fewer than k singular values given");
  if (k < 1) throw config_error("mean_sv_error: k must be >= 1");
  double sum = 0.0;
  for (index_t i = 0; i < k; ++i) {
    if (sigma[i] <= 0.0)
      throw numerical_error("mean_sv_error: reference singular value " +
                            std::to_string(i) + " is not positive");
    sum += std::abs(sigma_hat[i] - sigma[i]) / sigma[i];
  }
  return sum / static_cast<double>(k);
}

struct RayleighDeviation {
  double max = 0.0;
  double mean = 0.0;
};

/// max / mean of |x^T A A^T x - x^T C C^T x| over random unit probes,
/// evaluated as |"A^T x"^2 - "C^T x"^2| with two sparse matvecs per probe.
inline RayleighDeviation rayleigh_deviation(const SparseMatrix& a, const SparseMatrix& c,
                                            int n_probes, std::uint64_t seed) {
  if (a.rows() != c.rows())
    throw dimension_error("rayleigh_deviation: row count mismatch");
  if (n_probes < 1) throw config_error("rayleigh_deviation: need at least one probe");
  RayleighDeviation out;
  double sum = 0.0;
  for (int t = 0; t < n_probes; ++t) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
    Vector x(a.rows());
    double norm = 0.0;
    while (norm == 0.0) {
      for (index_t i = 0; i < x.size(); ++i) x[i] = rng.next_gaussian();
      norm = x.norm();
    }
    x /= norm;
    const double qa = multiply_vector(a, x, true).squaredNorm();
    const double qc = multiply_vector(c, x, true).squaredNorm();
    const double dev = std::abs(qa - qc);
    out.max = std::max(out.max, dev);
    sum += dev;
  }
  out.mean = sum / n_probes;
  return out;
}

struct CsspErrors {
  double frobenius = 0.0;
  std::optional<double> nnz_ratio_error;  // nnz(A_hat - A) / nnz(A)
};

struct CsspErrorOptions {
  bool compute_nnz_error = true;
  bool integer_data = false;  // round A_hat before counting mismatches
  double nnz_threshold = 1e-8;
  index_t dense_cap = 4000;   // cap on ncols(C) for the dense basis
  // When set, project onto the top-r left singular basis of C instead of
  // the full span (the cheap projector used for large runs).
  std::optional<index_t> projector_rank;
};

/// Errors of projecting A onto the span of selected columns C:
/// ||A - C C+ A||_F via an orthonormal basis Q of span(C) (rank-deficient C
/// is truncated), plus the nonzero-mismatch ratio of A_hat = Q Q^T A.
inline CsspErrors cssp_errors(const SparseMatrix& a, const SparseMatrix& c,
                              const CsspErrorOptions& opt = {}) {
  if (a.rows() != c.rows()) throw dimension_error("cssp_errors: row count mismatch");
  if (c.cols() > opt.dense_cap)
    throw dimension_error("cssp_errors: ncols(C) exceeds the dense cap");
  DenseMatrix q;
  if (opt.projector_rank) {
    const auto svd = dense_svd(to_dense(c), opt.dense_cap);
    const index_t r = std::min(*opt.projector_rank, svd.rank());
    if (r < 1) throw config_error("cssp_errors: projector rank must be >= 1");
    q = svd.U.leftCols(r);
  } else {
    Eigen::ColPivHouseholderQR<DenseMatrix> qr(to_dense(c));
    const index_t rank = qr.rank();
    if (rank == 0) throw numerical_error("cssp_errors: selected columns are all zero");
    q = qr.householderQ() * DenseMatrix::Identity(a.rows(), rank);
  }

  CsspErrors out;
  out.frobenius = projection_error_frobenius(a, q);
  if (!opt.compute_nnz_error) return out;

  const DenseMatrix atq = multiply_dense(a, q, Side::left, true);  // n x r
  index_t mismatches = 0;
  Vector ahat_col(a.rows());
  Vector a_col(a.rows());
  for (index_t j = 0; j < a.cols(); ++j) {
    ahat_col.noalias() = q * atq.row(j).transpose();
    a_col.setZero();
    auto idx = a.col_indices(j);
    auto val = a.col_values(j);
    for (std::size_t p = 0; p < idx.size(); ++p) a_col[idx[p]] = val[p];
    if (opt.integer_data) {
      for (index_t i = 0; i < a.rows(); ++i)
        mismatches += std::llround(ahat_col[i]) != std::llround(a_col[i]);
    } else {
      for (index_t i = 0; i < a.rows(); ++i)
        mismatches += std::abs(ahat_col[i] - a_col[i]) > opt.nnz_threshold;
    }
  }
  if (a.nnz() == 0) throw numerical_error("cssp_errors: nnz(A) is zero");
  out.nnz_ratio_error = static_cast<double>(mismatches) / static_cast<double>(a.nnz());
  return out;
}

struct SparsifierError {
  double sv_error = 0.0;  // (1/r) sum |sigma_i(K~) - sigma_i(K)| / sigma_i(K)
  double nnz_ratio = 0.0; // nnz(K~) / nnz(K)
};

struct SparsifierErrorOptions {
  index_t dense_cap = 4000;
  int svd_iters = 120;          // used above the dense cap
  std::uint64_t seed = 0x5eedULL;
};

/// Normalized mean absolute error of the top-r singular values between a
/// Laplacian and its sparsified counterpart.
inline SparsifierError sparsifier_error(const SparseMatrix& k, const SparseMatrix& k_tilde,
                                        index_t r, const SparsifierErrorOptions& opt = {}) {
  if (k.rows() != k.cols() || k_tilde.rows() != k_tilde.cols())
    throw dimension_error("sparsifier_error: Laplacians must be square");
  if (k.rows() != k_tilde.rows())
    throw dimension_error("sparsifier_error: dimension mismatch");
  if (r < 1 || r > k.rows()) throw config_error("sparsifier_error: r out of range");

  const auto spectrum = [&](const SparseMatrix& m) -> Vector {
    if (m.rows() <= opt.dense_cap) return dense_svd(to_dense(m), opt.dense_cap).sigma.head(r);
    return partial_svd(m, r, opt.svd_iters, opt.seed).sigma;
  };
  const Vector s_k = spectrum(k);
  const Vector s_kt = spectrum(k_tilde);

  SparsifierError out;
  out.sv_error = mean_sv_error(s_kt, s_k, r);
  if (k.nnz() == 0) throw numerical_error("sparsifier_error: nnz(K) is zero");
  out.nnz_ratio = static_cast<double>(k_tilde.nnz()) / static_cast<double>(k.nnz());
  return out;
}

/// Spectral norm through the dense oracle; used for bound checks only.
inline double spectral_norm_dense(const DenseMatrix& a, index_t cap = 4000) {
  const Vector sigma = dense_svd(a, cap).sigma;
  return sigma.size() > 0 ? sigma[0] : 0.0;
}

/// Named scalar metrics of a run plus the metadata needed to reproduce it.
struct MetricsReport {
  std::optional<double> error1_frobenius;
  std::optional<double> error2_mean_sv;
  std::optional<double> spectral_error;
  std::optional<double> rayleigh_max_dev;
  std::optional<double> cssp_frob_error;
  std::optional<double> cssp_nnz_error;
  std::optional<double> sparsifier_sv_error;
  std::optional<double> nnz_ratio;

  std::string method;
  std::optional<index_t> c;
  std::optional<index_t> k;
  std::optional<index_t> levels;
  std::vector<double> epsilons;
  std::uint64_t seed = 0;
  std::string note;
  double wall_time_s = 0.0;  // serialized under the timing key, not the payload
};

}  // namespace coarsekit
