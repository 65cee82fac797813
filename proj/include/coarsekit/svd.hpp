#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "coarsekit/errors.hpp"
#include "coarsekit/rng.hpp"
#include "coarsekit/sparse_matrix.hpp"

namespace coarsekit {

/// Factor triple U * diag(sigma) * V^T with orthonormal U, V and sigma
/// sorted nonincreasing. `deflations` counts columns dropped because the
/// tracked subspace lost rank.
struct PartialSVD {
  DenseMatrix U;
  Vector sigma;
  DenseMatrix V;
  int deflations = 0;

  index_t rank() const { return sigma.size(); }
};

inline double orthonormality_error(const DenseMatrix& m) {
  if (m.cols() == 0) return 0.0;
  DenseMatrix g = m.transpose() * m;
  g.diagonal().array() -= 1.0;
  return g.cwiseAbs().maxCoeff();
}

inline DenseMatrix reconstruct(const PartialSVD& svd) {
  return svd.U * svd.sigma.asDiagonal() * svd.V.transpose();
}

/// Largest-magnitude entry of each left singular vector is made
/// nonnegative; the right vector flips with it.
inline void normalize_signs(DenseMatrix& u, DenseMatrix& v) {
  for (index_t j = 0; j < u.cols(); ++j) {
    index_t imax = 0;
    u.col(j).cwiseAbs().maxCoeff(&imax);
    if (u(imax, j) < 0.0) {
      u.col(j) = -u.col(j);
      if (j < v.cols()) v.col(j) = -v.col(j);
    }
  }
}

struct OrthResult {
  DenseMatrix q;
  int dropped = 0;
};

/// Modified Gram-Schmidt with one reorthogonalization pass. Columns whose
/// post-projection norm falls under drop_tol times their input norm are
/// deflated.
inline OrthResult orthonormalize_columns(const DenseMatrix& x, double drop_tol = 1e-12) {
  OrthResult out;
  out.q.resize(x.rows(), x.cols());
  index_t kept = 0;
  for (index_t j = 0; j < x.cols(); ++j) {
    Vector v = x.col(j);
    const double input_norm = v.norm();
    for (int pass = 0; pass < 2; ++pass)
      for (index_t i = 0; i < kept; ++i) v -= out.q.col(i).dot(v) * out.q.col(i);
    const double norm = v.norm();
    if (input_norm == 0.0 || norm < drop_tol * input_norm) {
      ++out.dropped;
      continue;
    }
    out.q.col(kept++) = v / norm;
  }
  out.q.conservativeResize(x.rows(), kept);
  return out;
}

/// Exact SVD of a dense matrix (the desk-scale oracle). Rejects matrices
/// whose smaller dimension exceeds `cap`.
inline PartialSVD dense_svd(const DenseMatrix& a, index_t cap = 4000) {
  if (a.rows() == 0 || a.cols() == 0) throw dimension_error("dense_svd: empty matrix");
  if (std::min(a.rows(), a.cols()) > cap)
    throw dimension_error("dense_svd: min dimension " +
                          std::to_string(std::min(a.rows(), a.cols())) +
                          " exceeds cap " + std::to_string(cap));
  Eigen::BDCSVD<DenseMatrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  PartialSVD out;
  out.U = svd.matrixU();
  out.sigma = svd.singularValues();
  out.V = svd.matrixV();
  normalize_signs(out.U, out.V);
  return out;
}

inline PartialSVD truncate(const PartialSVD& svd, index_t k) {
  if (k >= svd.rank()) return svd;
  PartialSVD out;
  out.U = svd.U.leftCols(k);
  out.sigma = svd.sigma.head(k);
  out.V = svd.V.leftCols(k);
  out.deflations = svd.deflations;
  return out;
}

namespace detail {

struct SparseOp {
  const SparseMatrix& a;
  index_t rows() const { return a.rows(); }
  index_t cols() const { return a.cols(); }
  DenseMatrix apply(const DenseMatrix& x) const {
    return multiply_dense(a, x, Side::left, false);
  }
  DenseMatrix apply_transpose(const DenseMatrix& x) const {
    return multiply_dense(a, x, Side::left, true);
  }
};

struct DenseOp {
  const DenseMatrix& a;
  index_t rows() const { return a.rows(); }
  index_t cols() const { return a.cols(); }
  DenseMatrix apply(const DenseMatrix& x) const { return a * x; }
  DenseMatrix apply_transpose(const DenseMatrix& x) const { return a.transpose() * x; }
};

template <class Op>
void rayleigh_ritz(const Op& op, DenseMatrix& u, DenseMatrix& v, Vector& sigma) {
  const DenseMatrix s = u.transpose() * op.apply(v);
  Eigen::JacobiSVD<DenseMatrix> svd(s, Eigen::ComputeThinU | Eigen::ComputeThinV);
  u = u * svd.matrixU();
  v = v * svd.matrixV();
  sigma = svd.singularValues();
}

// Subspace iteration step order: V = A^T U; U = A V; thin
// orthonormalization of both; S = U^T A V diagonalized on the final
// iteration (or every iteration when estimates are requested en route).
template <class Op>
PartialSVD subspace_iterate_impl(const Op& op, const DenseMatrix& u_start,
                                 int iters, bool estimates_each_iteration) {
  if (u_start.rows() != op.rows())
    throw dimension_error("subspace start has " + std::to_string(u_start.rows()) +
                          " rows, matrix has " + std::to_string(op.rows()));
  PartialSVD out;
  auto ou = orthonormalize_columns(u_start);
  out.deflations += ou.dropped;
  DenseMatrix u = std::move(ou.q);
  if (u.cols() == 0) throw numerical_error("starting subspace collapsed to rank zero");
  DenseMatrix v;
  if (iters == 0) {
    auto ov = orthonormalize_columns(op.apply_transpose(u));
    out.deflations += ov.dropped;
    v = std::move(ov.q);
    rayleigh_ritz(op, u, v, out.sigma);
  }
  for (int t = 1; t <= iters; ++t) {
    v = op.apply_transpose(u);
    u = op.apply(v);
    ou = orthonormalize_columns(u);
    out.deflations += ou.dropped;
    u = std::move(ou.q);
    auto ov = orthonormalize_columns(v);
    out.deflations += ov.dropped;
    v = std::move(ov.q);
    if (u.cols() == 0 || v.cols() == 0)
      throw numerical_error("subspace collapsed to rank zero (zero matrix?)");
    if (estimates_each_iteration || t == iters) rayleigh_ritz(op, u, v, out.sigma);
  }
  out.U = std::move(u);
  out.V = std::move(v);
  normalize_signs(out.U, out.V);
  return out;
}

inline DenseMatrix gaussian_matrix(index_t rows, index_t cols, std::uint64_t seed) {
  Rng rng(seed);
  DenseMatrix g(rows, cols);
  for (index_t j = 0; j < cols; ++j)
    for (index_t i = 0; i < rows; ++i) g(i, j) = rng.next_gaussian();
  return g;
}

}  // namespace detail

inline PartialSVD subspace_iterate(const DenseMatrix& u_start, const SparseMatrix& a_t,
                                   int iters, bool estimates_each_iteration = false) {
  if (iters < 0) throw config_error("subspace_iterate: negative iteration count");
  return detail::subspace_iterate_impl(detail::SparseOp{a_t}, u_start, iters,
                                       estimates_each_iteration);
}

/// Partial SVD by subspace iteration from a seeded Gaussian start.
inline PartialSVD partial_svd(const SparseMatrix& a, index_t k, int iters,
                              std::uint64_t seed) {
  if (k < 1 || k > std::min(a.rows(), a.cols()))
    throw dimension_error("partial_svd: k = " + std::to_string(k) +
                          " out of range for " + std::to_string(a.rows()) + "x" +
                          std::to_string(a.cols()));
  if (iters < 1) throw config_error("partial_svd: iters must be >= 1");
  const DenseMatrix start = detail::gaussian_matrix(a.rows(), k, seed);
  return detail::subspace_iterate_impl(detail::SparseOp{a}, start, iters, false);
}

/// Subspace iteration driven to a fixed point of the singular values,
/// in chunks, for use as a reference spectrum when the dense oracle is
/// out of reach. Returns the factors plus a convergence flag.
struct ConvergedSVD {
  PartialSVD svd;
  bool converged = false;
  int iterations = 0;
};

inline ConvergedSVD partial_svd_converged(const SparseMatrix& a, index_t k,
                                          double tol = 1e-9, int max_iters = 1000,
                                          std::uint64_t seed = 0xC0A125EULL) {
  constexpr int kChunk = 20;
  ConvergedSVD out;
  out.svd = partial_svd(a, k, kChunk, seed);
  out.iterations = kChunk;
  while (out.iterations < max_iters) {
    const Vector prev = out.svd.sigma;
    out.svd = subspace_iterate(out.svd.U, a, kChunk);
    out.iterations += kChunk;
    double rel = 0.0;
    const index_t r = std::min<index_t>(prev.size(), out.svd.sigma.size());
    for (index_t i = 0; i < r; ++i) {
      const double denom = std::max(std::abs(prev[i]), 1e-300);
      rel = std::max(rel, std::abs(out.svd.sigma[i] - prev[i]) / denom);
    }
    if (rel < tol) {
      out.converged = true;
      break;
    }
  }
  return out;
}

/// Intermediates of the SVD update algorithms, exposed for inspection.
struct SvdUpdateWorkspace {
  DenseMatrix U_hat_p;  // orthonormal residual basis (X_l in the rank-l variant)
  DenseMatrix R;        // upper-trapezoidal residual factor (S_l * Y_l^T in the rank-l variant)
  DenseMatrix H_D;
  Vector Theta;
  DenseMatrix F;
  DenseMatrix G;
};

/// SVD update after appending columns D to A: thin QR of (I - U U^T) D,
/// small SVD of the block matrix H_D, then the rotations back. The QR is
/// rank-revealing and truncated to the residual's numerical rank r: padding
/// a deficient Q up to p columns would inject directions that are not
/// orthogonal to U_k, and the discarded rows of R are zero anyway.
inline PartialSVD zha_simon_update(const PartialSVD& svd, const SparseMatrix& d,
                                   index_t k, SvdUpdateWorkspace* ws = nullptr) {
  const index_t p = d.cols();
  if (p == 0) return svd;
  if (d.rows() != svd.U.rows())
    throw dimension_error("zha_simon_update: row count mismatch");
  const index_t k_in = svd.rank();

  const DenseMatrix dt_u = multiply_dense(d, svd.U, Side::left, true);  // p x k
  const DenseMatrix ut_d = dt_u.transpose();                            // k x p
  const DenseMatrix residual = to_dense(d) - svd.U * ut_d;

  // Rank measured against the scale of D itself: a residual that is pure
  // cancellation noise must count as zero or its basis directions would not
  // be orthogonal to U_k.
  Eigen::ColPivHouseholderQR<DenseMatrix> qr(residual);
  const double tol = 1e-12 * column_norms(d).maxCoeff();
  const Vector r_diag = qr.matrixQR().diagonal();
  index_t r = 0;
  while (r < r_diag.size() && std::abs(r_diag[r]) > tol) ++r;
  DenseMatrix u_hat(residual.rows(), r);
  DenseMatrix r_tri(r, p);
  if (r > 0) {
    u_hat = qr.householderQ() * DenseMatrix::Identity(residual.rows(), r);
    r_tri = qr.matrixR().topRows(r).triangularView<Eigen::Upper>();
  }

  DenseMatrix h = DenseMatrix::Zero(k_in + r, k_in + p);
  h.topLeftCorner(k_in, k_in) = svd.sigma.asDiagonal();
  h.topRightCorner(k_in, p) = ut_d;
  if (r > 0)
    h.bottomRightCorner(r, p) = r_tri * qr.colsPermutation().transpose();

  Eigen::JacobiSVD<DenseMatrix> hsvd(h, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const index_t kk = std::min(k, std::min(k_in + r, k_in + p));
  const DenseMatrix f = hsvd.matrixU().leftCols(kk);
  const DenseMatrix g = hsvd.matrixV().leftCols(kk);

  PartialSVD out;
  out.U = svd.U * f.topRows(k_in);
  if (r > 0) out.U += u_hat * f.bottomRows(r);
  out.sigma = hsvd.singularValues().head(kk);
  out.V.resize(svd.V.rows() + p, kk);
  out.V.topRows(svd.V.rows()) = svd.V * g.topRows(k_in);
  out.V.bottomRows(p) = g.bottomRows(p);
  normalize_signs(out.U, out.V);

  if (ws) {
    ws->U_hat_p = std::move(u_hat);
    ws->R = std::move(r_tri);
    ws->H_D = std::move(h);
    ws->Theta = out.sigma;
    ws->F = f;
    ws->G = g;
  }
  return out;
}

/// Variant replacing the thin QR of the residual by a rank-l factorization
/// X_l S_l Y_l^T computed with the partial-SVD routine.
inline PartialSVD low_rank_update(const PartialSVD& svd, const SparseMatrix& d,
                                  index_t k, index_t l, int factor_iters = 60,
                                  std::uint64_t seed = 0x10A7ULL,
                                  SvdUpdateWorkspace* ws = nullptr) {
  const index_t p = d.cols();
  if (p == 0) return svd;
  if (d.rows() != svd.U.rows())
    throw dimension_error("low_rank_update: row count mismatch");
  if (l < 1 || l > p)
    throw config_error("low_rank_update: l must be in [1, ncols(D)]");
  const index_t k_in = svd.rank();

  const DenseMatrix dt_u = multiply_dense(d, svd.U, Side::left, true);
  const DenseMatrix ut_d = dt_u.transpose();
  const DenseMatrix residual = to_dense(d) - svd.U * ut_d;

  // directions at the cancellation noise floor of D are not real residual
  // content; keeping them would break orthogonality against U_k
  const double tol = 1e-12 * column_norms(d).maxCoeff();
  PartialSVD res_svd;
  index_t r_l = 0;
  if (residual.colwise().norm().maxCoeff() > tol) {
    const index_t l_eff = std::min(l, std::min(residual.rows(), residual.cols()));
    const DenseMatrix start = detail::gaussian_matrix(residual.rows(), l_eff, seed);
    res_svd =
        detail::subspace_iterate_impl(detail::DenseOp{residual}, start, factor_iters, false);
    while (r_l < res_svd.rank() && res_svd.sigma[r_l] > tol) ++r_l;
  }
  res_svd = truncate(res_svd, r_l);

  DenseMatrix h = DenseMatrix::Zero(k_in + r_l, k_in + p);
  h.topLeftCorner(k_in, k_in) = svd.sigma.asDiagonal();
  h.topRightCorner(k_in, p) = ut_d;
  if (r_l > 0)
    h.bottomRightCorner(r_l, p) = res_svd.sigma.asDiagonal() * res_svd.V.transpose();

  Eigen::JacobiSVD<DenseMatrix> hsvd(h, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const index_t kk = std::min(k, std::min(k_in + r_l, k_in + p));
  const DenseMatrix f = hsvd.matrixU().leftCols(kk);
  const DenseMatrix g = hsvd.matrixV().leftCols(kk);

  PartialSVD out;
  out.U = svd.U * f.topRows(k_in);
  if (r_l > 0) out.U += res_svd.U * f.bottomRows(r_l);
  out.sigma = hsvd.singularValues().head(kk);
  out.V.resize(svd.V.rows() + p, kk);
  out.V.topRows(svd.V.rows()) = svd.V * g.topRows(k_in);
  out.V.bottomRows(p) = g.bottomRows(p);
  normalize_signs(out.U, out.V);

  if (ws) {
    ws->U_hat_p = res_svd.U;
    ws->R = res_svd.sigma.asDiagonal() * res_svd.V.transpose();
    ws->H_D = std::move(h);
    ws->Theta = out.sigma;
    ws->F = f;
    ws->G = g;
  }
  return out;
}

}  // namespace coarsekit
