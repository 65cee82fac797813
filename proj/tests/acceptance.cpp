// Acceptance suite: runs every gate criterion at its stated tolerance and
// prints one PASS/FAIL/SKIP line per criterion.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "support.hpp"

using namespace coarsekit;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  bool skipped = false;
  std::string detail;
};

struct FamilyMatrix {
  SparseMatrix a;
  double fro2 = 0.0;
};

// 50 random sparse matrices, m,n in [20,200], density 2-10%.
std::vector<FamilyMatrix> matrix_family() {
  std::vector<FamilyMatrix> family;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng dims(derive_seed(0xFA171ULL, seed));
    const index_t m = 20 + dims.next_index(181);
    const index_t n = 20 + dims.next_index(181);
    const double density = 0.02 + 0.08 * dims.next_double();
    FamilyMatrix fm{random_sparse(m, n, density, derive_seed(0xBEEF5ULL, seed)), 0.0};
    fm.fro2 = std::pow(frobenius_norm(fm.a), 2);
    family.push_back(std::move(fm));
  }
  return family;
}

const double kEpsilons[] = {0.1, 0.3, 0.5, 0.9};

Outcome criterion_rayleigh_bound(const std::vector<FamilyMatrix>& family) {
  Outcome out;
  int violations = 0;
  double worst_ratio = 0.0;
  std::uint64_t probe_tag = 0;
  for (std::size_t i = 0; i < family.size(); ++i) {
    for (const double eps : kEpsilons) {
      auto res = coarsen_level(family[i].a, eps, CoarsenMode::scaled, VisitOrder::random,
                               derive_seed(11, probe_tag));
      const auto dev =
          rayleigh_deviation(family[i].a, res.coarse, 100, derive_seed(13, probe_tag));
      ++probe_tag;
      const double bound = 3.0 * eps * family[i].fro2;
      worst_ratio = std::max(worst_ratio, dev.max / bound);
      if (dev.max > bound) ++violations;
    }
  }
  out.pass = violations == 0;
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "%d violations over 50x4x100 probes, worst dev/bound = %.3f", violations,
                worst_ratio);
  out.detail = buf;
  return out;
}

Outcome criterion_projection_bounds(const std::vector<FamilyMatrix>& family) {
  Outcome out;
  int violations = 0;
  double worst_fro = 0.0, worst_spec = 0.0;
  for (std::size_t i = 0; i < family.size(); ++i) {
    const DenseMatrix ad = to_dense(family[i].a);
    const auto exact = dense_svd(ad);
    for (const double eps : kEpsilons) {
      auto res = coarsen_level(family[i].a, eps, CoarsenMode::scaled, VisitOrder::random,
                               derive_seed(17, i * 7 + static_cast<int>(eps * 10)));
      const auto csvd = dense_svd(to_dense(res.coarse));
      for (const index_t k : {1, 5, 10}) {
        if (k > res.coarse.cols()) continue;
        const DenseMatrix hk = csvd.U.leftCols(k);
        const double err2 = std::pow(projection_error_frobenius(family[i].a, hk), 2);
        const double tail2 = exact.sigma.tail(exact.sigma.size() - k).squaredNorm();
        const double fro_bound = tail2 + 6.0 * k * eps * family[i].fro2;
        worst_fro = std::max(worst_fro, err2 / fro_bound);
        if (err2 > fro_bound) ++violations;

        const DenseMatrix residual = ad - hk * (hk.transpose() * ad);
        const double spec2 = std::pow(dense_svd(residual).sigma[0], 2);
        const double spec_bound =
            exact.sigma[k] * exact.sigma[k] + 6.0 * eps * family[i].fro2;
        worst_spec = std::max(worst_spec, spec2 / spec_bound);
        if (spec2 > spec_bound) ++violations;
      }
    }
  }
  out.pass = violations == 0;
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "%d violations, worst frobenius ratio = %.3f, worst spectral ratio = %.3f",
                violations, worst_fro, worst_spec);
  out.detail = buf;
  return out;
}

Outcome criterion_zha_simon() {
  Outcome out;
  double worst = 0.0;
  for (std::uint64_t t = 0; t < 20; ++t) {
    Rng rng(derive_seed(0x25AULL, t));
    const index_t m = 25 + rng.next_index(30);
    const index_t n = 15 + rng.next_index(20);
    const index_t k = 2 + rng.next_index(5);
    const index_t p = 1 + rng.next_index(8);

    DenseMatrix left(m, k), right(k, n);
    for (index_t j = 0; j < k; ++j)
      for (index_t i = 0; i < m; ++i) left(i, j) = rng.next_gaussian();
    for (index_t j = 0; j < n; ++j)
      for (index_t i = 0; i < k; ++i) right(i, j) = rng.next_gaussian();
    auto a = from_dense(left * right);  // rank(A) = k
    auto d = random_sparse(m, p, 0.4, derive_seed(0xD00DULL, t));

    const auto input = truncate(dense_svd(to_dense(a)), k);
    const auto updated = zha_simon_update(input, d, k);

    DenseMatrix ad(m, n + p);
    ad << to_dense(a), to_dense(d);
    const auto exact = truncate(dense_svd(ad), k);
    const DenseMatrix got = reconstruct(updated);
    const DenseMatrix want = reconstruct(exact);
    const double rel = (got - want).norm() / std::max(1e-300, want.norm());
    worst = std::max(worst, rel);
  }
  out.pass = worst <= 1e-8;
  char buf[120];
  std::snprintf(buf, sizeof(buf), "worst relative reconstruction gap = %.3e over 20 instances",
                worst);
  out.detail = buf;
  return out;
}

Outcome criterion_subspace_improvement() {
  Outcome out;
  int improved = 0;
  const int instances = 20;
  for (std::uint64_t t = 0; t < instances; ++t) {
    Rng rng(derive_seed(0x5B5ULL, t));
    const index_t m = 60 + rng.next_index(80);
    const index_t n = 40 + 2 * rng.next_index(30);
    // half the instances carry duplicated-column redundancy so the coarse
    // start is a genuine perturbation, not A itself
    auto a = t % 2 == 0 ? random_sparse(m, n, 0.08, derive_seed(0xACEULL, t))
                        : redundant_sparse(m, n, 0.08, derive_seed(0xACEULL, t));
    auto res = coarsen_level(a, 0.5, CoarsenMode::scaled, VisitOrder::random, t);
    const index_t k = 5;
    const DenseMatrix u0 = truncate(dense_svd(to_dense(res.coarse)), k).U;
    const double before = projection_error_frobenius(a, u0);
    const auto refined = subspace_iterate(u0, a, 2);
    const double after = projection_error_frobenius(a, refined.U);
    if (after <= before + 1e-10) ++improved;
  }
  out.pass = improved == instances;
  out.detail = std::to_string(improved) + "/" + std::to_string(instances) +
               " instances kept or reduced the projection error after 2 iterations";
  return out;
}

Outcome criterion_unbiasedness() {
  Outcome out;
  Rng rng(123);
  std::vector<Triplet> trips;
  for (index_t j = 0; j < 10; ++j)
    for (index_t i = 0; i < 10; ++i) trips.push_back({i, j, 0.5 + rng.next_double()});
  auto a = SparseMatrix::from_triplets(10, 10, std::move(trips));
  const DenseMatrix target = to_dense(a) * to_dense(a).transpose();

  DenseMatrix mean = DenseMatrix::Zero(10, 10);
  const int draws = 2000;
  for (int t = 0; t < draws; ++t) {
    SamplingConfig cfg;
    cfg.c = 10;
    cfg.seed = derive_seed(0xCAB0ULL, t);
    auto s = column_norm_sample(a, cfg);
    const DenseMatrix cd = to_dense(s.matrix);
    mean += cd * cd.transpose();
  }
  mean /= draws;
  const double rel =
      ((mean - target).cwiseAbs().array() / target.cwiseAbs().array()).maxCoeff();
  out.pass = rel < 0.05;
  char buf[120];
  std::snprintf(buf, sizeof(buf), "entrywise relative gap of E[CC^T] = %.4f (tolerance 0.05)",
                rel);
  out.detail = buf;
  return out;
}

Outcome criterion_halving_and_determinism(const std::vector<FamilyMatrix>& family) {
  Outcome out;
  int floor_violations = 0;
  int determinism_failures = 0;
  for (std::size_t i = 0; i < family.size(); ++i) {
    CoarsenConfig cfg;
    cfg.epsilon_schedule = {0.5, 0.9};
    cfg.seed = derive_seed(0xDE7ULL, i);
    auto h1 = coarsen_multilevel(family[i].a, cfg);
    index_t prev = family[i].a.cols();
    for (const auto& level : h1.levels) {
      if (level.coarse.cols() < (prev + 1) / 2) ++floor_violations;
      prev = level.coarse.cols();
    }
    auto h2 = coarsen_multilevel(family[i].a, cfg);
    if (h1.levels.size() != h2.levels.size()) {
      ++determinism_failures;
      continue;
    }
    for (std::size_t l = 0; l < h1.levels.size(); ++l) {
      const std::string m1 = matching_to_json(h1.levels[l]).dump();
      const std::string m2 = matching_to_json(h2.levels[l]).dump();
      if (m1 != m2 || !(h1.levels[l].coarse == h2.levels[l].coarse)) ++determinism_failures;
    }
  }
  out.pass = floor_violations == 0 && determinism_failures == 0;
  out.detail = std::to_string(floor_violations) + " halving-floor violations, " +
               std::to_string(determinism_failures) + " determinism failures over 50 matrices";
  return out;
}

fs::path find_dataset(const std::string& name) {
  std::vector<fs::path> roots;
  if (const char* env = std::getenv("COARSEKIT_DATA_DIR")) roots.emplace_back(env);
  roots.emplace_back("data");
  roots.emplace_back("../data");
  roots.emplace_back("../../data");
  for (const auto& root : roots)
    if (fs::exists(root / name)) return root / name;
  return {};
}

Outcome criterion_paper_tables() {
  Outcome out;
  const fs::path fa = find_dataset("FA.mtx");
  const fs::path time_mtx = find_dataset("time.mtx");
  if (fa.empty() && time_mtx.empty()) {
    out.skipped = true;
    out.detail =
        "datasets not found (set COARSEKIT_DATA_DIR or place FA.mtx/time.mtx under ./data); "
        "network fetch is unavailable in this environment";
    return out;
  }
  std::string detail;
  bool pass = true;

  if (!fa.empty()) {
    auto a = load_matrix_market(fa.string());
    CoarsenConfig cfg;
    cfg.epsilon_schedule = {0.3, 0.5, 0.7};
    cfg.seed = 7;
    auto h = coarsen_multilevel(a, cfg);
    const auto c = h.final_coarse();
    const index_t k = 30;
    const auto sig_c = partial_svd_converged(c, k, 1e-9, 600).svd.sigma;
    const auto ref = partial_svd_converged(a, k, 1e-9, 600).svd.sigma;
    const double err2 = mean_sv_error(sig_c, ref, k);
    const bool ok = err2 >= 0.131 * 0.7 && err2 <= 0.131 * 1.3;
    pass &= ok;
    char buf[120];
    std::snprintf(buf, sizeof(buf), "FA error2 = %.4f (target 0.131 +/- 30%%, c = %lld) %s; ",
                  err2, static_cast<long long>(c.cols()), ok ? "ok" : "OUT OF RANGE");
    detail += buf;
  } else {
    detail += "FA.mtx not found, skipped; ";
  }

  if (!time_mtx.empty()) {
    auto a = load_matrix_market(time_mtx.string());
    CoarsenConfig cfg;
    cfg.epsilon_schedule = {0.9, 0.9};
    cfg.seed = 3;
    auto sel = cssp_select(a, cfg);
    CsspErrorOptions opt;
    opt.compute_nnz_error = false;
    const double coarse_err = cssp_errors(a, sel.C, opt).frobenius;
    const bool ok_coarse = coarse_err >= 411.71 * 0.98 && coarse_err <= 411.71 * 1.02;

    LeverageSampleOptions lev;
    lev.c = 107;
    lev.k = 25;
    lev.seed = 3;
    auto s = leverage_sample(a, lev);
    const double lev_err = cssp_errors(a, s.matrix, opt).frobenius;
    const bool ok_lev = lev_err >= 412.77 * 0.98 && lev_err <= 412.77 * 1.02;

    pass &= ok_coarse && ok_lev;
    char buf[200];
    std::snprintf(buf, sizeof(buf),
                  "TIME coarsen = %.2f (target 411.71 +/- 2%%, c = %lld) %s, "
                  "leverage = %.2f (target 412.77 +/- 2%%) %s",
                  coarse_err, static_cast<long long>(sel.C.cols()),
                  ok_coarse ? "ok" : "OUT OF RANGE", lev_err, ok_lev ? "ok" : "OUT OF RANGE");
    detail += buf;
  } else {
    detail += "time.mtx not found, skipped";
  }
  out.pass = pass;
  out.detail = detail;
  return out;
}

Outcome criterion_sparsifier() {
  Outcome out;
  int violations = 0;
  double worst = 0.0;
  const double eps = 0.5;
  for (std::uint64_t g = 0; g < 20; ++g) {
    Rng rng(derive_seed(0x6AFULL, g));
    const index_t n = 15 + rng.next_index(46);
    const double density = 0.15 + 0.45 * rng.next_double();
    auto graph = random_graph(n, density, derive_seed(0x97AULL, g));
    auto b = incidence_matrix(graph);
    const double fro2 = std::pow(frobenius_norm(b), 2);
    CoarsenConfig cfg;
    cfg.epsilon_schedule = {eps};
    cfg.seed = derive_seed(0xB0BULL, g);
    auto rc = coarsen_rows(b, cfg);
    const double bound = 3.0 * eps * fro2;
    for (int t = 0; t < 100; ++t) {
      const Vector x = random_unit_vector(b.cols(), derive_seed(g * 100 + 7, t));
      const double qk = multiply_vector(b, x).squaredNorm();
      const double qkt = multiply_vector(rc.coarse_rows, x).squaredNorm();
      const double dev = std::abs(qk - qkt);
      worst = std::max(worst, dev / bound);
      if (dev > bound) ++violations;
    }
  }
  out.pass = violations == 0;
  char buf[140];
  std::snprintf(buf, sizeof(buf),
                "%d violations over 20 graphs x 100 probes, worst dev/bound = %.3f", violations,
                worst);
  out.detail = buf;
  return out;
}

int report(int id, const std::string& name, const Outcome& out, double seconds,
           double budget = 0.0) {
  const bool in_budget = budget <= 0.0 || seconds < budget;
  const char* verdict = out.skipped ? "SKIP" : (out.pass && in_budget ? "PASS" : "FAIL");
  std::string detail = out.detail;
  if (!in_budget)
    detail += ", exceeded runtime budget of " + std::to_string(budget) + " s";
  std::printf("[%d] %-30s %s  (%s) [%.1f s]\n", id, name.c_str(), verdict, detail.c_str(),
              seconds);
  return out.skipped || (out.pass && in_budget) ? 0 : 1;
}

}  // namespace

int main() {
  using clock = std::chrono::steady_clock;
  const auto timed = [](auto&& fn) {
    const auto start = clock::now();
    Outcome out = fn();
    const double secs = std::chrono::duration<double>(clock::now() - start).count();
    return std::pair<Outcome, double>(out, secs);
  };

  const auto family = matrix_family();
  int failures = 0;

  auto [o1, t1] = timed([&] { return criterion_rayleigh_bound(family); });
  failures += report(1, "Rayleigh bound suite", o1, t1, 60.0);

  auto [o2, t2] = timed([&] { return criterion_projection_bounds(family); });
  failures += report(2, "Projection bound suite", o2, t2, 120.0);

  auto [o3, t3] = timed([] { return criterion_zha_simon(); });
  failures += report(3, "Zha-Simon exactness", o3, t3);

  auto [o4, t4] = timed([] { return criterion_subspace_improvement(); });
  failures += report(4, "Subspace-iteration improvement", o4, t4);

  auto [o5, t5] = timed([] { return criterion_unbiasedness(); });
  failures += report(5, "Sampling unbiasedness", o5, t5);

  auto [o6, t6] = timed([&] { return criterion_halving_and_determinism(family); });
  failures += report(6, "Halving floor & determinism", o6, t6);

  auto [o7, t7] = timed([] { return criterion_paper_tables(); });
  failures += report(7, "Paper-table spot reproduction", o7, t7);

  auto [o8, t8] = timed([] { return criterion_sparsifier(); });
  failures += report(8, "Sparsifier property", o8, t8);

  if (failures) {
    std::printf("%d criterion(s) failed\n", failures);
    return 1;
  }
  std::printf("all acceptance criteria passed (skips noted above)\n");
  return 0;
}
