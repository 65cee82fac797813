#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "coarsekit/errors.hpp"

namespace coarsekit {

using index_t = std::int64_t;
using DenseMatrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct Triplet {
  index_t row = 0;
  index_t col = 0;
  double value = 0.0;
};

/// Immutable sparse matrix storing both a column-wise (CSC) and a row-wise
/// (CSR) adjacency of the same nonzero set. Indices are sorted within each
/// column/row and explicit zeros are never stored. The matching loop of the
/// coarsening algorithm needs fast access to both views.
class SparseMatrix {
 public:
  SparseMatrix() = default;

  static SparseMatrix from_triplets(index_t nrows, index_t ncols,
                                    std::vector<Triplet> entries) {
    if (nrows < 0 || ncols < 0) throw dimension_error("negative matrix dimension");
    for (const auto& t : entries) {
      if (t.row < 0 || t.row >= nrows || t.col < 0 || t.col >= ncols)
        throw dimension_error("triplet index out of range");
    }
    // stable: duplicates keep insertion order, so their sum order is defined
    std::stable_sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
      return a.col != b.col ? a.col < b.col : a.row < b.row;
    });
    SparseMatrix m;
    m.nrows_ = nrows;
    m.ncols_ = ncols;
    m.col_ptr_.assign(static_cast<std::size_t>(ncols) + 1, 0);
    m.col_rows_.reserve(entries.size());
    m.col_vals_.reserve(entries.size());
    std::size_t i = 0;
    while (i < entries.size()) {
      // duplicates are summed; entries summing to zero are dropped
      double v = entries[i].value;
      std::size_t j = i + 1;
      while (j < entries.size() && entries[j].col == entries[i].col &&
             entries[j].row == entries[i].row) {
        v += entries[j].value;
        ++j;
      }
      if (v != 0.0) {
        m.col_rows_.push_back(entries[i].row);
        m.col_vals_.push_back(v);
        ++m.col_ptr_[static_cast<std::size_t>(entries[i].col) + 1];
      }
      i = j;
    }
    std::partial_sum(m.col_ptr_.begin(), m.col_ptr_.end(), m.col_ptr_.begin());
    m.build_row_view();
    return m;
  }

  /// Build from ready CSC arrays. Row indices must be strictly increasing
  /// within each column and values nonzero.
  static SparseMatrix from_csc(index_t nrows, index_t ncols,
                               std::vector<index_t> col_ptr,
                               std::vector<index_t> rows,
                               std::vector<double> vals) {
    SparseMatrix m;
    m.nrows_ = nrows;
    m.ncols_ = ncols;
    m.col_ptr_ = std::move(col_ptr);
    m.col_rows_ = std::move(rows);
    m.col_vals_ = std::move(vals);
    if (m.col_ptr_.size() != static_cast<std::size_t>(ncols) + 1 ||
        m.col_rows_.size() != m.col_vals_.size() ||
        m.col_ptr_.back() != static_cast<index_t>(m.col_rows_.size()))
      throw dimension_error("inconsistent CSC arrays");
    for (index_t j = 0; j < ncols; ++j) {
      for (index_t p = m.col_ptr_[static_cast<std::size_t>(j)];
           p < m.col_ptr_[static_cast<std::size_t>(j) + 1]; ++p) {
        const index_t r = m.col_rows_[static_cast<std::size_t>(p)];
        if (r < 0 || r >= nrows) throw dimension_error("row index out of range");
        if (p > m.col_ptr_[static_cast<std::size_t>(j)] &&
            r <= m.col_rows_[static_cast<std::size_t>(p) - 1])
          throw dimension_error("row indices not strictly increasing within column");
        if (m.col_vals_[static_cast<std::size_t>(p)] == 0.0)
          throw dimension_error("explicit zero value in CSC arrays");
      }
    }
    m.build_row_view();
    return m;
  }

  index_t rows() const { return nrows_; }
  index_t cols() const { return ncols_; }
  index_t nnz() const { return static_cast<index_t>(col_vals_.size()); }

  index_t col_nnz(index_t j) const {
    return col_ptr_[static_cast<std::size_t>(j) + 1] - col_ptr_[static_cast<std::size_t>(j)];
  }
  index_t row_nnz(index_t i) const {
    return row_ptr_[static_cast<std::size_t>(i) + 1] - row_ptr_[static_cast<std::size_t>(i)];
  }

  /// Row indices / values of column j, sorted by row.
  std::span<const index_t> col_indices(index_t j) const {
    return {col_rows_.data() + col_ptr_[static_cast<std::size_t>(j)],
            static_cast<std::size_t>(col_nnz(j))};
  }
  std::span<const double> col_values(index_t j) const {
    return {col_vals_.data() + col_ptr_[static_cast<std::size_t>(j)],
            static_cast<std::size_t>(col_nnz(j))};
  }

  /// Column indices / values of row i, sorted by column.
  std::span<const index_t> row_indices(index_t i) const {
    return {row_cols_.data() + row_ptr_[static_cast<std::size_t>(i)],
            static_cast<std::size_t>(row_nnz(i))};
  }
  std::span<const double> row_values(index_t i) const {
    return {row_vals_.data() + row_ptr_[static_cast<std::size_t>(i)],
            static_cast<std::size_t>(row_nnz(i))};
  }

  bool operator==(const SparseMatrix& other) const {
    return nrows_ == other.nrows_ && ncols_ == other.ncols_ &&
           col_ptr_ == other.col_ptr_ && col_rows_ == other.col_rows_ &&
           col_vals_ == other.col_vals_;
  }

  friend SparseMatrix transpose(const SparseMatrix& a);

 private:
  void build_row_view() {
    row_ptr_.assign(static_cast<std::size_t>(nrows_) + 1, 0);
    row_cols_.resize(col_rows_.size());
    row_vals_.resize(col_vals_.size());
    for (const index_t r : col_rows_) ++row_ptr_[static_cast<std::size_t>(r) + 1];
    std::partial_sum(row_ptr_.begin(), row_ptr_.end(), row_ptr_.begin());
    std::vector<index_t> cursor(row_ptr_.begin(), row_ptr_.end() - 1);
    for (index_t j = 0; j < ncols_; ++j) {
      for (index_t p = col_ptr_[static_cast<std::size_t>(j)];
           p < col_ptr_[static_cast<std::size_t>(j) + 1]; ++p) {
        const index_t r = col_rows_[static_cast<std::size_t>(p)];
        const index_t q = cursor[static_cast<std::size_t>(r)]++;
        row_cols_[static_cast<std::size_t>(q)] = j;
        row_vals_[static_cast<std::size_t>(q)] = col_vals_[static_cast<std::size_t>(p)];
      }
    }
  }

  index_t nrows_ = 0;
  index_t ncols_ = 0;
  std::vector<index_t> col_ptr_, col_rows_;
  std::vector<double> col_vals_;
  std::vector<index_t> row_ptr_, row_cols_;
  std::vector<double> row_vals_;
};

/// Since both adjacencies are stored, transposing just swaps the views.
/// transpose(transpose(A)) == A bit-exactly.
inline SparseMatrix transpose(const SparseMatrix& a) {
  SparseMatrix t;
  t.nrows_ = a.ncols_;
  t.ncols_ = a.nrows_;
  t.col_ptr_ = a.row_ptr_;
  t.col_rows_ = a.row_cols_;
  t.col_vals_ = a.row_vals_;
  t.row_ptr_ = a.col_ptr_;
  t.row_cols_ = a.col_rows_;
  t.row_vals_ = a.col_vals_;
  return t;
}

inline Vector column_norms(const SparseMatrix& a) {
  Vector norms = Vector::Zero(a.cols());
  for (index_t j = 0; j < a.cols(); ++j) {
    double s = 0.0;
    for (const double v : a.col_values(j)) s += v * v;
    norms[j] = std::sqrt(s);
  }
  return norms;
}

inline Vector column_squared_norms(const SparseMatrix& a) {
  Vector norms = Vector::Zero(a.cols());
  for (index_t j = 0; j < a.cols(); ++j) {
    double s = 0.0;
    for (const double v : a.col_values(j)) s += v * v;
    norms[j] = s;
  }
  return norms;
}

inline double frobenius_norm(const SparseMatrix& a) {
  double s = 0.0;
  for (index_t j = 0; j < a.cols(); ++j)
    for (const double v : a.col_values(j)) s += v * v;
  return std::sqrt(s);
}

enum class Side { left, right };

/// Sparse-dense product. Side::left computes op(A)*X, Side::right computes
/// X*op(A), with op(A) = A or A^T. Cost O(nnz(A) * cols-or-rows of X);
/// summation order per output column is fixed.
inline DenseMatrix multiply_dense(const SparseMatrix& a, const DenseMatrix& x,
                                  Side side = Side::left, bool transpose_a = false) {
  const index_t m = a.rows(), n = a.cols();
  const index_t op_rows = transpose_a ? n : m;
  const index_t op_cols = transpose_a ? m : n;
  if (side == Side::left) {
    if (x.rows() != op_cols)
      throw dimension_error("multiply_dense: op(A) has " + std::to_string(op_cols) +
                            " columns but X has " + std::to_string(x.rows()) + " rows");
    DenseMatrix r = DenseMatrix::Zero(op_rows, x.cols());
    if (!transpose_a) {
      // r(:,c) = sum_j A(:,j) * x(j,c)
      for (index_t c = 0; c < x.cols(); ++c)
        for (index_t j = 0; j < n; ++j) {
          const double xv = x(j, c);
          if (xv == 0.0) continue;
          auto idx = a.col_indices(j);
          auto val = a.col_values(j);
          for (std::size_t p = 0; p < idx.size(); ++p) r(idx[p], c) += val[p] * xv;
        }
    } else {
      // r(j,c) = <A(:,j), x(:,c)>
      for (index_t c = 0; c < x.cols(); ++c)
        for (index_t j = 0; j < n; ++j) {
          auto idx = a.col_indices(j);
          auto val = a.col_values(j);
          double s = 0.0;
          for (std::size_t p = 0; p < idx.size(); ++p) s += val[p] * x(idx[p], c);
          r(j, c) = s;
        }
    }
    return r;
  }
  // Side::right: X * op(A)
  if (x.cols() != op_rows)
    throw dimension_error("multiply_dense: X has " + std::to_string(x.cols()) +
                          " columns but op(A) has " + std::to_string(op_rows) + " rows");
  DenseMatrix r = DenseMatrix::Zero(x.rows(), op_cols);
  if (!transpose_a) {
    // r(:,j) = X * A(:,j)
    for (index_t j = 0; j < n; ++j) {
      auto idx = a.col_indices(j);
      auto val = a.col_values(j);
      for (std::size_t p = 0; p < idx.size(); ++p) r.col(j) += val[p] * x.col(idx[p]);
    }
  } else {
    // r = X * A^T, i.e. r(:,i) accumulates A(i,j) * X(:,j)
    for (index_t j = 0; j < n; ++j) {
      auto idx = a.col_indices(j);
      auto val = a.col_values(j);
      for (std::size_t p = 0; p < idx.size(); ++p) r.col(idx[p]) += val[p] * x.col(j);
    }
  }
  return r;
}

/// y = op(A) * x for a single vector.
inline Vector multiply_vector(const SparseMatrix& a, const Vector& x,
                              bool transpose_a = false) {
  DenseMatrix xm = x;
  return multiply_dense(a, xm, Side::left, transpose_a).col(0);
}

inline DenseMatrix to_dense(const SparseMatrix& a) {
  DenseMatrix d = DenseMatrix::Zero(a.rows(), a.cols());
  for (index_t j = 0; j < a.cols(); ++j) {
    auto idx = a.col_indices(j);
    auto val = a.col_values(j);
    for (std::size_t p = 0; p < idx.size(); ++p) d(idx[p], j) = val[p];
  }
  return d;
}

inline SparseMatrix from_dense(const DenseMatrix& d, double drop_tol = 0.0) {
  std::vector<Triplet> trips;
  for (index_t j = 0; j < d.cols(); ++j)
    for (index_t i = 0; i < d.rows(); ++i)
      if (std::abs(d(i, j)) > drop_tol) trips.push_back({i, j, d(i, j)});
  return SparseMatrix::from_triplets(d.rows(), d.cols(), std::move(trips));
}

namespace detail {

inline void append_scaled_column(const SparseMatrix& a, index_t j, double scale,
                                 std::vector<index_t>& col_ptr,
                                 std::vector<index_t>& rows,
                                 std::vector<double>& vals) {
  auto idx = a.col_indices(j);
  auto val = a.col_values(j);
  for (std::size_t p = 0; p < idx.size(); ++p) {
    rows.push_back(idx[p]);
    vals.push_back(val[p] * scale);
  }
  col_ptr.push_back(static_cast<index_t>(rows.size()));
}

}  // namespace detail

/// Verbatim copies of the requested columns, in the given order.
inline SparseMatrix select_columns(const SparseMatrix& a, const std::vector<index_t>& indices) {
  std::vector<index_t> col_ptr{0};
  std::vector<index_t> rows;
  std::vector<double> vals;
  for (const index_t j : indices) {
    if (j < 0 || j >= a.cols()) throw dimension_error("select_columns: index out of range");
    detail::append_scaled_column(a, j, 1.0, col_ptr, rows, vals);
  }
  return SparseMatrix::from_csc(a.rows(), static_cast<index_t>(indices.size()),
                                std::move(col_ptr), std::move(rows), std::move(vals));
}

struct WeightedEdge {
  index_t u = 0;
  index_t v = 0;
  double weight = 1.0;
};

struct WeightedEdgeList {
  index_t vertex_count = 0;
  std::vector<WeightedEdge> edges;

  void validate() const {
    std::vector<std::pair<index_t, index_t>> seen;
    seen.reserve(edges.size());
    for (const auto& e : edges) {
      if (e.u == e.v) throw config_error("self-loop rejected: vertex " + std::to_string(e.u));
      if (e.u < 0 || e.v < 0 || e.u >= vertex_count || e.v >= vertex_count)
        throw dimension_error("edge endpoint out of range");
      if (e.weight <= 0.0) throw config_error("nonpositive edge weight");
      seen.emplace_back(std::min(e.u, e.v), std::max(e.u, e.v));
    }
    std::sort(seen.begin(), seen.end());
    if (std::adjacent_find(seen.begin(), seen.end()) != seen.end())
      throw config_error("duplicate undirected edge");
  }
};

/// Vertex-edge incidence matrix: one row per edge with +sqrt(w) at the
/// smaller endpoint and -sqrt(w) at the larger one. B^T B is the weighted
/// graph Laplacian regardless of the sign convention.
inline SparseMatrix incidence_matrix(const WeightedEdgeList& g) {
  g.validate();
  std::vector<Triplet> trips;
  trips.reserve(2 * g.edges.size());
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    const auto& edge = g.edges[e];
    const double s = std::sqrt(edge.weight);
    const index_t lo = std::min(edge.u, edge.v);
    const index_t hi = std::max(edge.u, edge.v);
    trips.push_back({static_cast<index_t>(e), lo, s});
    trips.push_back({static_cast<index_t>(e), hi, -s});
  }
  return SparseMatrix::from_triplets(static_cast<index_t>(g.edges.size()),
                                     g.vertex_count, std::move(trips));
}

/// K = B^T B, stored fully. Works for any sparse B; rows of B contribute
/// rank-one outer products accumulated in a fixed order, so K is
/// bitwise symmetric.
inline SparseMatrix laplacian(const SparseMatrix& b) {
  std::vector<Triplet> trips;
  for (index_t e = 0; e < b.rows(); ++e) {
    auto idx = b.row_indices(e);
    auto val = b.row_values(e);
    for (std::size_t p = 0; p < idx.size(); ++p)
      for (std::size_t q = 0; q < idx.size(); ++q)
        trips.push_back({idx[p], idx[q], val[p] * val[q]});
  }
  return SparseMatrix::from_triplets(b.cols(), b.cols(), std::move(trips));
}

}  // namespace coarsekit
