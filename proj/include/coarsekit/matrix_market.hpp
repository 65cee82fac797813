#pragma once

#include <cctype>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "coarsekit/errors.hpp"
#include "coarsekit/sparse_matrix.hpp"

namespace coarsekit {

namespace detail {

inline std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

inline io_error parse_error(const std::string& path, std::size_t line_no,
                            const std::string& what) {
  return io_error(path + ":" + std::to_string(line_no) + ": " + what);
}

inline index_t parse_index(const char*& p, const std::string& path, std::size_t line_no) {
  char* end = nullptr;
  errno = 0;
  const long long v = std::strtoll(p, &end, 10);
  if (end == p) throw parse_error(path, line_no, "expected integer");
  if (errno == ERANGE) throw parse_error(path, line_no, "integer overflow in index");
  p = end;
  return static_cast<index_t>(v);
}

inline double parse_value(const char*& p, const std::string& path, std::size_t line_no) {
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(p, &end);
  if (end == p) throw parse_error(path, line_no, "expected numeric value");
  p = end;
  return v;
}

struct MmHeader {
  bool coordinate = true;
  bool symmetric = false;
};

inline MmHeader read_mm_header(std::istream& in, const std::string& path,
                               std::size_t& line_no) {
  std::string banner;
  if (!std::getline(in, banner)) throw parse_error(path, 1, "empty file");
  if (!banner.empty() && banner.back() == '\r') banner.pop_back();
  line_no = 1;
  std::istringstream bs(banner);
  std::string magic, object, format, field, symmetry;
  bs >> magic >> object >> format >> field >> symmetry;
  if (lower(magic) != "%%matrixmarket")
    throw parse_error(path, 1, "not a MatrixMarket file");
  if (lower(object) != "matrix")
    throw parse_error(path, 1, "unsupported object '" + object + "'");
  MmHeader h;
  const std::string fmt = lower(format);
  if (fmt == "coordinate") h.coordinate = true;
  else if (fmt == "array") h.coordinate = false;
  else throw parse_error(path, 1, "unsupported format '" + format + "'");
  const std::string fld = lower(field);
  if (fld != "real" && fld != "integer")
    throw parse_error(path, 1, "unsupported field '" + field + "' (real-valued expected)");
  const std::string sym = lower(symmetry);
  if (sym == "general") h.symmetric = false;
  else if (sym == "symmetric") h.symmetric = true;
  else throw parse_error(path, 1, "unsupported symmetry '" + symmetry + "'");
  return h;
}

inline bool next_content_line(std::istream& in, std::string& line, std::size_t& line_no) {
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::size_t i = 0;
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i == line.size() || line[i] == '%') continue;
    return true;
  }
  return false;
}

}  // namespace detail

/// MatrixMarket coordinate reader. Indices are 1-based on disk, 0-based in
/// memory. Symmetric files are expanded to full storage; duplicates are
/// summed.
inline SparseMatrix load_matrix_market(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open '" + path + "'");
  std::size_t line_no = 0;
  const auto header = detail::read_mm_header(in, path, line_no);
  if (!header.coordinate)
    throw detail::parse_error(path, 1, "coordinate format expected for sparse load");

  std::string line;
  if (!detail::next_content_line(in, line, line_no))
    throw detail::parse_error(path, line_no, "missing size line");
  const char* p = line.c_str();
  const index_t nrows = detail::parse_index(p, path, line_no);
  const index_t ncols = detail::parse_index(p, path, line_no);
  const index_t nnz = detail::parse_index(p, path, line_no);
  if (nrows < 0 || ncols < 0 || nnz < 0)
    throw detail::parse_error(path, line_no, "negative size");

  std::vector<Triplet> trips;
  trips.reserve(static_cast<std::size_t>(header.symmetric ? 2 * nnz : nnz));
  for (index_t k = 0; k < nnz; ++k) {
    if (!detail::next_content_line(in, line, line_no))
      throw detail::parse_error(path, line_no, "unexpected end of file: expected " +
                                                   std::to_string(nnz) + " entries");
    p = line.c_str();
    const index_t i = detail::parse_index(p, path, line_no);
    const index_t j = detail::parse_index(p, path, line_no);
    const double v = detail::parse_value(p, path, line_no);
    if (i < 1 || i > nrows || j < 1 || j > ncols)
      throw detail::parse_error(path, line_no, "entry index out of range");
    trips.push_back({i - 1, j - 1, v});
    if (header.symmetric && i != j) trips.push_back({j - 1, i - 1, v});
  }
  return SparseMatrix::from_triplets(nrows, ncols, std::move(trips));
}

/// Writer: general coordinate format, entries sorted by (column, row),
/// values with round-trip precision.
inline void save_matrix_market(const SparseMatrix& a, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot write '" + path + "'");
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << a.rows() << " " << a.cols() << " " << a.nnz() << "\n";
  char buf[64];
  for (index_t j = 0; j < a.cols(); ++j) {
    auto idx = a.col_indices(j);
    auto val = a.col_values(j);
    for (std::size_t p = 0; p < idx.size(); ++p) {
      std::snprintf(buf, sizeof(buf), "%.17g", val[p]);
      out << (idx[p] + 1) << " " << (j + 1) << " " << buf << "\n";
    }
  }
  if (!out) throw io_error("write failure on '" + path + "'");
}

inline DenseMatrix load_dense_matrix_market(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open '" + path + "'");
  std::size_t line_no = 0;
  const auto header = detail::read_mm_header(in, path, line_no);
  if (header.coordinate)
    throw detail::parse_error(path, 1, "array format expected for dense load");
  std::string line;
  if (!detail::next_content_line(in, line, line_no))
    throw detail::parse_error(path, line_no, "missing size line");
  const char* p = line.c_str();
  const index_t nrows = detail::parse_index(p, path, line_no);
  const index_t ncols = detail::parse_index(p, path, line_no);
  DenseMatrix m(nrows, ncols);
  for (index_t j = 0; j < ncols; ++j)
    for (index_t i = 0; i < nrows; ++i) {
      if (!detail::next_content_line(in, line, line_no))
        throw detail::parse_error(path, line_no, "unexpected end of dense array");
      p = line.c_str();
      double v = detail::parse_value(p, path, line_no);
      if (header.symmetric)
        throw detail::parse_error(path, 1, "symmetric dense arrays not supported");
      m(i, j) = v;
    }
  return m;
}

inline void save_dense_matrix_market(const DenseMatrix& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot write '" + path + "'");
  out << "%%MatrixMarket matrix array real general\n";
  out << m.rows() << " " << m.cols() << "\n";
  char buf[64];
  for (index_t j = 0; j < m.cols(); ++j)
    for (index_t i = 0; i < m.rows(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.17g", m(i, j));
      out << buf << "\n";
    }
  if (!out) throw io_error("write failure on '" + path + "'");
}

inline Vector load_vector_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open '" + path + "'");
  std::vector<double> vals;
  std::string line;
  std::size_t line_no = 0;
  while (detail::next_content_line(in, line, line_no)) {
    const char* p = line.c_str();
    vals.push_back(detail::parse_value(p, path, line_no));
  }
  Vector v(static_cast<index_t>(vals.size()));
  for (std::size_t i = 0; i < vals.size(); ++i) v[static_cast<index_t>(i)] = vals[i];
  return v;
}

inline void save_vector_text(const Vector& v, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot write '" + path + "'");
  char buf[64];
  for (index_t i = 0; i < v.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", v[i]);
    out << buf << "\n";
  }
}

/// Edge list file: header line "n m" then m lines "u v w" with 0-based
/// vertex ids.
inline WeightedEdgeList load_edge_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open '" + path + "'");
  std::string line;
  std::size_t line_no = 0;
  if (!detail::next_content_line(in, line, line_no))
    throw detail::parse_error(path, line_no, "missing header line 'n m'");
  const char* p = line.c_str();
  WeightedEdgeList g;
  g.vertex_count = detail::parse_index(p, path, line_no);
  const index_t m = detail::parse_index(p, path, line_no);
  g.edges.reserve(static_cast<std::size_t>(m));
  for (index_t e = 0; e < m; ++e) {
    if (!detail::next_content_line(in, line, line_no))
      throw detail::parse_error(path, line_no, "unexpected end of edge list");
    p = line.c_str();
    WeightedEdge edge;
    edge.u = detail::parse_index(p, path, line_no);
    edge.v = detail::parse_index(p, path, line_no);
    edge.weight = detail::parse_value(p, path, line_no);
    g.edges.push_back(edge);
  }
  g.validate();
  return g;
}

inline void save_edge_list(const WeightedEdgeList& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot write '" + path + "'");
  out << g.vertex_count << " " << g.edges.size() << "\n";
  char buf[64];
  for (const auto& e : g.edges) {
    std::snprintf(buf, sizeof(buf), "%.17g", e.weight);
    out << e.u << " " << e.v << " " << buf << "\n";
  }
}

}  // namespace coarsekit
