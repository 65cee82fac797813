#pragma once

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "coarsekit/coarsekit.hpp"

namespace ckt = coarsekit;

// Random sparse matrix with entries uniform in [-1,1] at the given density.
// Every column is guaranteed at least one entry so norms stay positive.
inline ckt::SparseMatrix random_sparse(ckt::index_t m, ckt::index_t n, double density,
                                       std::uint64_t seed) {
  ckt::Rng rng(seed);
  std::vector<ckt::Triplet> trips;
  for (ckt::index_t j = 0; j < n; ++j) {
    bool hit = false;
    for (ckt::index_t i = 0; i < m; ++i) {
      if (rng.next_double() < density) {
        trips.push_back({i, j, 2.0 * rng.next_double() - 1.0});
        hit = true;
      }
    }
    if (!hit) trips.push_back({rng.next_index(m), j, 2.0 * rng.next_double() - 1.0});
  }
  return ckt::SparseMatrix::from_triplets(m, n, std::move(trips));
}

// Random sparse matrix with built-in redundancy: every base column gets a
// near-parallel partner (same pattern, slightly perturbed values), so column
// matching has real work to do. n must be even.
inline ckt::SparseMatrix redundant_sparse(ckt::index_t m, ckt::index_t n, double density,
                                          std::uint64_t seed, double noise = 0.03) {
  const ckt::index_t half = n / 2;
  auto base = random_sparse(m, half, density, seed);
  ckt::Rng rng(ckt::derive_seed(seed, 0x0DDULL));
  std::vector<ckt::Triplet> trips;
  for (ckt::index_t j = 0; j < half; ++j) {
    auto idx = base.col_indices(j);
    auto val = base.col_values(j);
    const double scale = 0.5 + rng.next_double();
    for (std::size_t p = 0; p < idx.size(); ++p) {
      trips.push_back({idx[p], 2 * j, val[p]});
      trips.push_back({idx[p], 2 * j + 1, scale * val[p] * (1.0 + noise * rng.next_gaussian())});
    }
  }
  return ckt::SparseMatrix::from_triplets(m, n, std::move(trips));
}

inline ckt::WeightedEdgeList random_graph(ckt::index_t n, double density,
                                          std::uint64_t seed) {
  ckt::Rng rng(seed);
  ckt::WeightedEdgeList g;
  g.vertex_count = n;
  for (ckt::index_t u = 0; u < n; ++u)
    for (ckt::index_t v = u + 1; v < n; ++v)
      if (rng.next_double() < density)
        g.edges.push_back({u, v, 0.1 + 1.9 * rng.next_double()});
  if (g.edges.empty()) g.edges.push_back({0, n > 1 ? 1 : 0, 1.0});
  return g;
}

inline ckt::DenseMatrix random_orthonormal(ckt::index_t m, ckt::index_t k,
                                           std::uint64_t seed) {
  ckt::Rng rng(seed);
  ckt::DenseMatrix g(m, k);
  for (ckt::index_t j = 0; j < k; ++j)
    for (ckt::index_t i = 0; i < m; ++i) g(i, j) = rng.next_gaussian();
  return ckt::orthonormalize_columns(g).q;
}

inline ckt::Vector random_unit_vector(ckt::index_t m, std::uint64_t seed) {
  ckt::Rng rng(seed);
  ckt::Vector x(m);
  double norm = 0.0;
  while (norm == 0.0) {
    for (ckt::index_t i = 0; i < m; ++i) x[i] = rng.next_gaussian();
    norm = x.norm();
  }
  return x / norm;
}

struct OracleMatching {
  std::vector<ckt::index_t> kept;
  std::vector<ckt::index_t> partner;
  std::vector<double> cos2;
  ckt::DenseMatrix coarse;
};

// Brute-force reference for the column matcher: works on the dense Gram
// matrix and replays the argmax/threshold/denser-column rules directly.
inline OracleMatching dense_matcher_oracle(const ckt::DenseMatrix& a, double eps,
                                           ckt::CoarsenMode mode,
                                           const std::vector<ckt::index_t>& order) {
  const ckt::index_t n = a.cols();
  const ckt::DenseMatrix gram = a.transpose() * a;
  const double threshold = 1.0 / (1.0 + eps * eps);
  std::vector<bool> matched(static_cast<std::size_t>(n), false);
  std::vector<ckt::index_t> nnz(static_cast<std::size_t>(n), 0);
  for (ckt::index_t j = 0; j < n; ++j)
    for (ckt::index_t i = 0; i < a.rows(); ++i)
      nnz[static_cast<std::size_t>(j)] += a(i, j) != 0.0;

  OracleMatching out;
  std::vector<ckt::Vector> cols;
  for (const ckt::index_t i : order) {
    if (matched[static_cast<std::size_t>(i)]) continue;
    matched[static_cast<std::size_t>(i)] = true;
    ckt::index_t best = -1;
    double best_val = 0.0;
    for (ckt::index_t k = 0; k < n; ++k) {
      if (k == i || matched[static_cast<std::size_t>(k)]) continue;
      const double v = gram(i, k);
      if (best < 0 || v > best_val || (v == best_val && k < best)) {
        best = k;
        best_val = v;
      }
    }
    ckt::index_t match_j = -1;
    double csq = 0.0;
    if (best >= 0 && best_val != 0.0 && gram(i, i) > 0.0 && gram(best, best) > 0.0) {
      csq = best_val * best_val / (gram(i, i) * gram(best, best));
      if (csq >= threshold) match_j = best;
    }
    if (match_j >= 0) {
      matched[static_cast<std::size_t>(match_j)] = true;
      const ckt::index_t keep =
          nnz[static_cast<std::size_t>(match_j)] > nnz[static_cast<std::size_t>(i)] ? match_j : i;
      const double scale = mode == ckt::CoarsenMode::scaled ? std::sqrt(1.0 + csq) : 1.0;
      cols.push_back(scale * a.col(keep));
      out.kept.push_back(keep);
      out.partner.push_back(keep == i ? match_j : i);
      out.cos2.push_back(csq);
    } else {
      cols.push_back(a.col(i));
      out.kept.push_back(i);
      out.partner.push_back(-1);
      out.cos2.push_back(0.0);
    }
  }
  out.coarse.resize(a.rows(), static_cast<ckt::index_t>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c)
    out.coarse.col(static_cast<ckt::index_t>(c)) = cols[c];
  return out;
}

inline std::vector<ckt::index_t> natural_order(ckt::index_t n) {
  std::vector<ckt::index_t> o(static_cast<std::size_t>(n));
  for (ckt::index_t i = 0; i < n; ++i) o[static_cast<std::size_t>(i)] = i;
  return o;
}

// Scratch directory unique to the test process.
inline std::filesystem::path test_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() /
             ("coarsekit_tests_" + std::to_string(::getpid())) / name;
  std::filesystem::create_directories(dir);
  return dir;
}

inline void write_text(const std::filesystem::path& p, const std::string& content) {
  std::ofstream out(p);
  out << content;
}

inline std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}
