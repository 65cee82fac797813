// Batch front end: pipelines over MatrixMarket inputs producing coarse
// matrices, factor files, and metric reports.

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "coarsekit/coarsekit.hpp"

namespace fs = std::filesystem;
using namespace coarsekit;

namespace {

struct CommonOpts {
  std::string input;
  std::string out_dir;
  std::uint64_t seed = 0;
};

fs::path prepare_out_dir(const std::string& requested) {
  std::string dir = requested;
  if (dir.empty()) {
    if (const char* env = std::getenv("COARSEKIT_OUT_DIR")) dir = env;
  }
  if (dir.empty()) dir = "ckrun";
  fs::path p(dir);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw io_error("cannot create output directory '" + dir + "': " + ec.message());
  return p;
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::vector<double> resolve_epsilons(std::vector<double> epsilons, int levels) {
  if (epsilons.empty()) throw config_error("at least one --epsilon is required");
  if (levels <= 0) levels = static_cast<int>(epsilons.size());
  if (static_cast<int>(epsilons.size()) == 1 && levels > 1)
    epsilons.assign(static_cast<std::size_t>(levels), epsilons[0]);
  if (static_cast<int>(epsilons.size()) != levels)
    throw config_error("--levels disagrees with the number of --epsilon values");
  return epsilons;
}

CoarsenMode parse_mode(const std::string& mode) {
  if (mode == "scaled") return CoarsenMode::scaled;
  if (mode == "unscaled") return CoarsenMode::unscaled;
  throw config_error("unknown mode '" + mode + "'");
}

VisitOrder parse_order(const std::string& order) {
  if (order == "random") return VisitOrder::random;
  if (order == "natural") return VisitOrder::natural;
  throw config_error("unknown visit order '" + order + "'");
}

struct RefineSpec {
  enum class Kind { none, subspace, zha_simon, lowrank } kind = Kind::none;
  index_t l = 0;
};

RefineSpec parse_refine(const std::string& refine) {
  RefineSpec spec;
  if (refine == "none") return spec;
  if (refine == "subspace") {
    spec.kind = RefineSpec::Kind::subspace;
    return spec;
  }
  if (refine == "zha-simon") {
    spec.kind = RefineSpec::Kind::zha_simon;
    return spec;
  }
  if (refine.rfind("lowrank:", 0) == 0) {
    spec.kind = RefineSpec::Kind::lowrank;
    try {
      spec.l = std::stoll(refine.substr(8));
    } catch (const std::exception&) {
      throw config_error("bad rank in '" + refine + "'");
    }
    if (spec.l < 1) throw config_error("lowrank rank must be >= 1");
    return spec;
  }
  throw config_error("unknown refine stage '" + refine + "'");
}

std::optional<Vector> reference_spectrum(const SparseMatrix& a, index_t k,
                                         const std::string& mode, index_t dense_cap,
                                         std::string& note) {
  const index_t mind = std::min(a.rows(), a.cols());
  if (mode == "none") {
    note = "reference spectrum unavailable";
    return std::nullopt;
  }
  if (mode == "dense" || (mode == "auto" && mind <= dense_cap)) {
    if (mind > dense_cap)
      throw config_error("dense reference requested for min dimension " +
                         std::to_string(mind) + " above cap " + std::to_string(dense_cap));
    return Vector(dense_svd(to_dense(a), dense_cap).sigma.head(k));
  }
  // the iterative route used when the dense oracle is out of reach
  auto conv = partial_svd_converged(a, k, 1e-9, 1000);
  if (!conv.converged) note = "reference spectrum not fully converged";
  return conv.svd.sigma;
}

void write_report(const MetricsReport& report, const fs::path& dir) {
  write_json_file(metrics_to_json(report), (dir / "report.json").string());
  std::ofstream csv(dir / "report.csv");
  csv << metrics_csv_header() << metrics_csv_row(report);
}

std::vector<index_t> complement_indices(index_t n, const std::vector<index_t>& taken) {
  std::vector<bool> in(static_cast<std::size_t>(n), false);
  for (const index_t t : taken) in[static_cast<std::size_t>(t)] = true;
  std::vector<index_t> out;
  for (index_t j = 0; j < n; ++j)
    if (!in[static_cast<std::size_t>(j)]) out.push_back(j);
  return out;
}

// ---------------------------------------------------------------- coarsen

struct CoarsenCmd {
  CommonOpts common;
  std::vector<double> epsilons;
  int levels = 0;
  std::string mode = "scaled";
  std::string order = "random";
  bool early_exit = false;

  int run() const {
    const fs::path dir = prepare_out_dir(common.out_dir);
    const auto schedule = resolve_epsilons(epsilons, levels);
    json spec = {{"command", "coarsen"}, {"input", common.input},
                 {"epsilon", schedule},  {"levels", schedule.size()},
                 {"mode", mode},         {"order", order},
                 {"early_exit", early_exit}, {"seed", common.seed}};
    write_json_file(spec, (dir / "runspec.json").string());

    SparseMatrix a = load_matrix_market(common.input);
    CoarsenConfig cfg;
    cfg.epsilon_schedule = schedule;
    cfg.mode = parse_mode(mode);
    cfg.visit_order = parse_order(order);
    cfg.seed = common.seed;
    cfg.early_exit = early_exit;

    auto h = coarsen_multilevel(a, cfg);
    for (const auto& level : h.levels) {
      const std::string stem = "level_" + std::to_string(level.level);
      write_json_file(matching_to_json(level), (dir / (stem + ".map.json")).string());
      save_matrix_market(level.coarse, (dir / (stem + ".mtx")).string());
    }
    save_matrix_market(h.final_coarse(), (dir / "final.mtx").string());
    for (const auto& note : h.notes) std::cerr << "note: " << note << "\n";
    std::cout << "coarsened " << a.cols() << " -> " << h.final_coarse().cols()
              << " columns over " << h.levels.size() << " level(s)\n";
    return 0;
  }
};

// -------------------------------------------------------------------- svd

struct SvdCmd {
  CommonOpts common;
  std::string method = "coarsen";
  index_t k = 10;
  index_t c = 0;
  std::vector<double> epsilons;
  int levels = 0;
  int iters = 2;
  std::string refine = "none";
  std::string reference = "auto";
  index_t dense_cap = 4000;
  std::string mode = "scaled";
  std::string order = "random";

  int run() const {
    const fs::path dir = prepare_out_dir(common.out_dir);
    json spec = {{"command", "svd"},   {"input", common.input}, {"method", method},
                 {"k", k},             {"c", c},                {"epsilon", epsilons},
                 {"levels", levels},   {"iters", iters},        {"refine", refine},
                 {"reference", reference}, {"dense_cap", dense_cap},
                 {"mode", mode},       {"order", order},        {"seed", common.seed}};
    write_json_file(spec, (dir / "runspec.json").string());
    const RefineSpec refine_spec = parse_refine(refine);

    Stopwatch watch;
    SparseMatrix a = load_matrix_market(common.input);

    SparseMatrix a_s;
    std::vector<index_t> selected;
    index_t levels_used = 0;
    std::vector<double> schedule;
    if (method == "coarsen" || method == "rand+coarsen" || method == "rand-coarsen") {
      schedule = resolve_epsilons(epsilons, levels);
      CoarsenConfig cfg;
      cfg.epsilon_schedule = schedule;
      cfg.mode = parse_mode(mode);
      cfg.visit_order = parse_order(order);
      cfg.seed = common.seed;
      if (method == "coarsen") {
        auto h = coarsen_multilevel(a, cfg);
        for (const auto& level : h.levels)
          write_json_file(matching_to_json(level),
                          (dir / ("level_" + std::to_string(level.level) + ".map.json")).string());
        a_s = h.final_coarse();
        selected = h.selected_original_indices();
        levels_used = static_cast<index_t>(h.levels.size());
      } else {
        auto rc = rand_plus_coarsen(a, cfg, common.seed);
        write_json_file(selection_to_json(rc.sampled, "uniform-half", common.seed),
                        (dir / "half_sample.map.json").string());
        for (const auto& level : rc.hierarchy.levels)
          write_json_file(matching_to_json(level),
                          (dir / ("level_" + std::to_string(level.level) + ".map.json")).string());
        a_s = rc.hierarchy.final_coarse();
        selected = rc.selected_original_indices();
        levels_used = static_cast<index_t>(rc.hierarchy.levels.size());
      }
    } else if (method == "colnorm") {
      if (c < 1) throw config_error("--c is required for colnorm sampling");
      SamplingConfig scfg;
      scfg.c = c;
      scfg.seed = common.seed;
      auto s = column_norm_sample(a, scfg);
      a_s = s.matrix;
      selected = s.indices;
      write_json_file(selection_to_json(selected, "colnorm", common.seed),
                      (dir / "selection.map.json").string());
    } else if (method == "uniform") {
      if (c < 1) throw config_error("--c is required for uniform sampling");
      auto s = uniform_sample(a, c, common.seed);
      a_s = s.matrix;
      selected = s.indices;
      write_json_file(selection_to_json(selected, "uniform", common.seed),
                      (dir / "selection.map.json").string());
    } else if (method == "leverage") {
      if (c < 1) throw config_error("--c is required for leverage sampling");
      LeverageSampleOptions opt;
      opt.c = c;
      opt.k = k;
      opt.seed = common.seed;
      opt.scaled_sketch = true;
      auto s = leverage_sample(a, opt);
      a_s = s.matrix;
      selected = s.indices;
      write_json_file(selection_to_json(selected, "leverage", common.seed),
                      (dir / "selection.map.json").string());
    } else {
      throw config_error("unknown method '" + method + "'");
    }

    if (k < 1 || k > std::min(a_s.rows(), a_s.cols()))
      throw config_error("k = " + std::to_string(k) + " out of range for the reduced matrix (" +
                         std::to_string(a_s.rows()) + "x" + std::to_string(a_s.cols()) + ")");

    const auto rank_k_svd = [&](const SparseMatrix& m) {
      if (k < 1 || k > std::min(m.rows(), m.cols()))
        throw config_error("k = " + std::to_string(k) + " out of range for a " +
                           std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                           " matrix");
      if (std::min(m.rows(), m.cols()) <= dense_cap)
        return truncate(dense_svd(to_dense(m), dense_cap), k);
      return partial_svd(m, k, 100, derive_seed(common.seed, 3));
    };
    const PartialSVD base = rank_k_svd(a_s);

    PartialSVD final_svd = base;
    switch (refine_spec.kind) {
      case RefineSpec::Kind::none:
        break;
      case RefineSpec::Kind::subspace:
        final_svd = subspace_iterate(base.U, a, iters);
        break;
      case RefineSpec::Kind::zha_simon:
      case RefineSpec::Kind::lowrank: {
        // The update runs on the unscaled column subset J_s, appending the
        // complement, so the updated factors target [A(:,J_s), D], a column
        // permutation of A. Starting it from the scaled coarse matrix would
        // count every absorbed column's energy twice.
        std::vector<index_t> subset = selected;
        std::sort(subset.begin(), subset.end());
        subset.erase(std::unique(subset.begin(), subset.end()), subset.end());
        const auto dropped = complement_indices(a.cols(), subset);
        const SparseMatrix d = select_columns(a, dropped);
        const PartialSVD base_subset = rank_k_svd(select_columns(a, subset));
        if (refine_spec.kind == RefineSpec::Kind::zha_simon)
          final_svd = zha_simon_update(base_subset, d, k);
        else
          final_svd = low_rank_update(base_subset, d, k, std::min(refine_spec.l, d.cols()));
        // rows of V come back in [subset, dropped] order; restore A's column order
        if (final_svd.V.rows() == a.cols()) {
          DenseMatrix v(a.cols(), final_svd.V.cols());
          index_t row = 0;
          for (const index_t j : subset) v.row(j) = final_svd.V.row(row++);
          for (const index_t j : dropped) v.row(j) = final_svd.V.row(row++);
          final_svd.V = std::move(v);
        }
        break;
      }
    }

    MetricsReport report;
    report.method = method;
    report.k = k;
    report.c = static_cast<index_t>(a_s.cols());
    if (levels_used > 0) report.levels = levels_used;
    report.epsilons = schedule;
    report.seed = common.seed;
    report.error1_frobenius = projection_error_frobenius(a, final_svd.U);
    std::string note;
    if (auto ref = reference_spectrum(a, k, reference, dense_cap, note)) {
      index_t kk = std::min<index_t>(std::min<index_t>(k, final_svd.rank()), ref->size());
      // the relative error is undefined on the zero part of a deficient spectrum
      index_t k_pos = 0;
      while (k_pos < kk && (*ref)[k_pos] > 1e-12 * (*ref)[0]) ++k_pos;
      if (k_pos > 0) {
        report.error2_mean_sv = mean_sv_error(final_svd.sigma, *ref, k_pos);
        if (k_pos < k) {
          if (!note.empty()) note += "; ";
          note += "error2 over top " + std::to_string(k_pos) + " (reference rank deficient)";
        }
      } else {
        if (!note.empty()) note += "; ";
        note += "error2 unavailable: reference spectrum numerically zero";
      }
    }
    report.note = note;
    report.wall_time_s = watch.seconds();

    save_matrix_market(a_s, (dir / "A_s.mtx").string());
    save_dense_matrix_market(final_svd.U, (dir / "U.mtx").string());
    save_dense_matrix_market(final_svd.V, (dir / "V.mtx").string());
    save_vector_text(final_svd.sigma, (dir / "sigma.txt").string());
    write_report(report, dir);
    std::cout << "error1_frobenius = " << *report.error1_frobenius;
    if (report.error2_mean_sv) std::cout << ", error2_mean_sv = " << *report.error2_mean_sv;
    std::cout << "\n";
    return 0;
  }
};

// ------------------------------------------------------------------- cssp

struct CsspCmd {
  CommonOpts common;
  std::string method = "coarsen";
  index_t k = 0;
  index_t c = 0;
  std::vector<double> epsilons;
  int levels = 0;
  std::string order = "random";
  index_t dense_cap = 4000;
  std::optional<index_t> projector_rank;
  bool integer_data = false;
  bool no_nnz_error = false;

  int run() const {
    const fs::path dir = prepare_out_dir(common.out_dir);
    json spec = {{"command", "cssp"}, {"input", common.input}, {"method", method},
                 {"k", k},            {"c", c},                {"epsilon", epsilons},
                 {"levels", levels},  {"order", order},        {"seed", common.seed},
                 {"integer_data", integer_data}};
    if (projector_rank) spec["projector_rank"] = *projector_rank;
    write_json_file(spec, (dir / "runspec.json").string());

    Stopwatch watch;
    SparseMatrix a = load_matrix_market(common.input);

    std::vector<index_t> indices;
    SparseMatrix c_mat;
    index_t levels_used = 0;
    std::vector<double> schedule;
    if (method == "coarsen") {
      schedule = resolve_epsilons(epsilons, levels);
      CoarsenConfig cfg;
      cfg.epsilon_schedule = schedule;
      cfg.visit_order = parse_order(order);
      cfg.seed = common.seed;
      auto sel = cssp_select(a, cfg);
      for (const auto& level : sel.hierarchy.levels)
        write_json_file(matching_to_json(level),
                        (dir / ("level_" + std::to_string(level.level) + ".map.json")).string());
      indices = sel.indices;
      c_mat = sel.C;
      levels_used = static_cast<index_t>(sel.hierarchy.levels.size());
    } else if (method == "leverage") {
      if (c < 1 || k < 1) throw config_error("--c and --k are required for leverage CSSP");
      LeverageSampleOptions opt;
      opt.c = c;
      opt.k = k;
      opt.seed = common.seed;
      auto s = leverage_sample(a, opt);
      indices = s.indices;
      c_mat = s.matrix;
    } else {
      throw config_error("unknown method '" + method + "'");
    }
    write_json_file(selection_to_json(indices, method, common.seed),
                    (dir / "selected.json").string());
    save_matrix_market(c_mat, (dir / "C.mtx").string());

    CsspErrorOptions opt;
    opt.dense_cap = dense_cap;
    opt.integer_data = integer_data;
    opt.projector_rank = projector_rank;
    std::string note;
    opt.compute_nnz_error = !no_nnz_error;
    if (opt.compute_nnz_error &&
        static_cast<double>(a.rows()) * static_cast<double>(a.cols()) > 5e7) {
      opt.compute_nnz_error = false;
      note = "nnz error skipped: dense projection too large";
    }
    const auto errors = cssp_errors(a, c_mat, opt);

    MetricsReport report;
    report.method = method;
    report.c = static_cast<index_t>(c_mat.cols());
    if (k > 0) report.k = k;
    if (levels_used > 0) report.levels = levels_used;
    report.epsilons = schedule;
    report.seed = common.seed;
    report.cssp_frob_error = errors.frobenius;
    report.cssp_nnz_error = errors.nnz_ratio_error;
    report.note = note;
    report.wall_time_s = watch.seconds();
    write_report(report, dir);
    std::cout << "selected " << c_mat.cols() << " columns, cssp_frob_error = "
              << errors.frobenius << "\n";
    return 0;
  }
};

// --------------------------------------------------------------- sparsify

struct SparsifyCmd {
  CommonOpts common;
  std::string method = "coarsen";
  std::vector<double> epsilons;
  int levels = 0;
  index_t c = 0;
  index_t k = 10;
  index_t r = 0;
  std::string order = "random";
  index_t dense_cap = 4000;

  int run() const {
    const fs::path dir = prepare_out_dir(common.out_dir);
    json spec = {{"command", "sparsify"}, {"input", common.input}, {"method", method},
                 {"epsilon", epsilons},   {"levels", levels},      {"c", c},
                 {"k", k},                {"r", r},                {"order", order},
                 {"seed", common.seed}};
    write_json_file(spec, (dir / "runspec.json").string());

    Stopwatch watch;
    const WeightedEdgeList g = load_edge_list(common.input);
    const SparseMatrix b = incidence_matrix(g);

    SparseMatrix b_tilde;
    index_t levels_used = 0;
    std::vector<double> schedule;
    if (method == "coarsen") {
      schedule = resolve_epsilons(epsilons, levels);
      CoarsenConfig cfg;
      cfg.epsilon_schedule = schedule;
      cfg.visit_order = parse_order(order);
      cfg.seed = common.seed;
      auto rc = coarsen_rows(b, cfg);
      for (const auto& level : rc.hierarchy.levels)
        write_json_file(matching_to_json(level),
                        (dir / ("level_" + std::to_string(level.level) + ".map.json")).string());
      b_tilde = rc.coarse_rows;
      levels_used = static_cast<index_t>(rc.hierarchy.levels.size());
    } else if (method == "leverage") {
      if (c < 1) throw config_error("--c (rows to sample) is required for leverage");
      LeverageSampleOptions opt;
      opt.c = c;
      opt.k = std::min(k, std::min(b.rows(), b.cols()));
      opt.axis = Axis::rows;
      opt.seed = common.seed;
      opt.scaled_sketch = true;
      auto s = leverage_sample(b, opt);
      write_json_file(selection_to_json(s.indices, "leverage-rows", common.seed),
                      (dir / "selection.map.json").string());
      b_tilde = s.matrix;
    } else {
      throw config_error("unknown method '" + method + "'");
    }

    const SparseMatrix lap = laplacian(b);
    const SparseMatrix lap_tilde = laplacian(b_tilde);
    index_t r_eff = r > 0 ? r : std::min(b_tilde.rows(), lap.cols());
    r_eff = std::min(r_eff, dense_cap);
    SparsifierErrorOptions serr_opt;
    serr_opt.dense_cap = dense_cap;
    const auto err = sparsifier_error(lap, lap_tilde, r_eff, serr_opt);

    save_matrix_market(b_tilde, (dir / "B_tilde.mtx").string());
    save_matrix_market(lap_tilde, (dir / "K_tilde.mtx").string());

    MetricsReport report;
    report.method = method;
    report.c = b_tilde.rows();
    report.k = r_eff;
    if (levels_used > 0) report.levels = levels_used;
    report.epsilons = schedule;
    report.seed = common.seed;
    report.sparsifier_sv_error = err.sv_error;
    report.nnz_ratio = err.nnz_ratio;
    report.wall_time_s = watch.seconds();
    write_report(report, dir);
    std::cout << "rows " << b.rows() << " -> " << b_tilde.rows()
              << ", sparsifier_sv_error = " << err.sv_error
              << ", nnz_ratio = " << err.nnz_ratio << "\n";
    return 0;
  }
};

// ----------------------------------------------------------- verify-bounds

struct VerifyCmd {
  CommonOpts common;
  double epsilon = 0.3;
  std::vector<index_t> ks;
  int probes = 100;
  index_t dense_cap = 4000;

  int run() const {
    const fs::path dir = prepare_out_dir(common.out_dir);
    std::vector<index_t> k_list = ks.empty() ? std::vector<index_t>{1, 5, 10} : ks;
    json spec = {{"command", "verify-bounds"}, {"input", common.input},
                 {"epsilon", epsilon},         {"k", k_list},
                 {"probes", probes},           {"seed", common.seed}};
    write_json_file(spec, (dir / "runspec.json").string());

    SparseMatrix a = load_matrix_market(common.input);
    const double fro2 = std::pow(frobenius_norm(a), 2);
    auto res = coarsen_level(a, epsilon, CoarsenMode::scaled, VisitOrder::random, common.seed);

    bool ok = true;
    const auto dev = rayleigh_deviation(a, res.coarse, probes, derive_seed(common.seed, 1));
    const double rq_bound = 3.0 * epsilon * fro2;
    const double rq_margin = rq_bound - dev.max;
    ok &= rq_margin >= 0.0;
    std::cout << "rayleigh-bound: max_dev = " << dev.max << ", bound = " << rq_bound
              << ", margin = " << rq_margin << (rq_margin >= 0 ? "  PASS" : "  FAIL")
              << "\n";

    MetricsReport report;
    report.method = "verify-bounds";
    report.epsilons = {epsilon};
    report.seed = common.seed;
    report.rayleigh_max_dev = dev.max;

    if (std::min(a.rows(), a.cols()) <= dense_cap) {
      const auto exact = dense_svd(to_dense(a), dense_cap);
      const auto csvd = dense_svd(to_dense(res.coarse), dense_cap);
      double worst_spectral = 0.0;
      for (const index_t k : k_list) {
        if (k > res.coarse.cols() || k >= exact.sigma.size()) continue;
        const DenseMatrix hk = csvd.U.leftCols(k);
        const double err2 = std::pow(projection_error_frobenius(a, hk), 2);
        const double tail2 = exact.sigma.tail(exact.sigma.size() - k).squaredNorm();
        const double fro_margin = tail2 + 6.0 * k * epsilon * fro2 - err2;
        ok &= fro_margin >= 0.0;

        const DenseMatrix residual = to_dense(a) - hk * (hk.transpose() * to_dense(a));
        const double spec2 = std::pow(spectral_norm_dense(residual, dense_cap), 2);
        const double spec_bound = exact.sigma[k] * exact.sigma[k] + 6.0 * epsilon * fro2;
        const double spec_margin = spec_bound - spec2;
        ok &= spec_margin >= 0.0;
        worst_spectral = std::max(worst_spectral, spec2);

        std::cout << "projection-bound k=" << k << ": frobenius margin = " << fro_margin
                  << (fro_margin >= 0 ? "  PASS" : "  FAIL")
                  << ", spectral margin = " << spec_margin
                  << (spec_margin >= 0 ? "  PASS" : "  FAIL") << "\n";
      }
      report.spectral_error = worst_spectral;
    } else {
      std::cout << "projection-bound: skipped (matrix above the dense-oracle cap)\n";
      report.note = "projection-bound checks skipped above the dense cap";
    }
    write_report(report, dir);
    if (!ok) throw numerical_error("a proved bound failed; see margins above");
    return 0;
  }
};

struct MergeCmd {
  std::vector<std::string> paths;
  std::string out_file;

  int run() const {
    const std::string csv = merge_reports(paths);
    if (out_file.empty()) {
      std::cout << csv;
    } else {
      std::ofstream out(out_file);
      if (!out) throw io_error("cannot write '" + out_file + "'");
      out << csv;
    }
    return 0;
  }
};

void add_common(CLI::App* cmd, CommonOpts& common, bool needs_input = true) {
  auto* in = cmd->add_option("input,--input", common.input, "input file");
  if (needs_input) in->required();
  cmd->add_option("--out", common.out_dir,
                  "output directory (default: $COARSEKIT_OUT_DIR or ./ckrun)");
  cmd->add_option("--seed", common.seed, "random seed");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sparse matrix approximation by multilevel column-matching coarsening"};
  app.require_subcommand(1);

  CoarsenCmd coarsen_cmd;
  auto* coarsen_app = app.add_subcommand("coarsen", "multilevel coarsening of a sparse matrix");
  add_common(coarsen_app, coarsen_cmd.common);
  coarsen_app->add_option("--epsilon", coarsen_cmd.epsilons, "angle threshold(s), one per level");
  coarsen_app->add_option("--levels", coarsen_cmd.levels, "level count");
  coarsen_app->add_option("--mode", coarsen_cmd.mode, "scaled|unscaled");
  coarsen_app->add_option("--order", coarsen_cmd.order, "random|natural");
  coarsen_app->add_flag("--early-exit", coarsen_cmd.early_exit,
                        "match the first candidate clearing the threshold");

  SvdCmd svd_cmd;
  auto* svd_app = app.add_subcommand("svd", "partial SVD via a reduced matrix, with refinement");
  add_common(svd_app, svd_cmd.common);
  svd_app->add_option("--method", svd_cmd.method, "coarsen|colnorm|uniform|leverage|rand+coarsen");
  svd_app->add_option("--k", svd_cmd.k, "target rank")->required();
  svd_app->add_option("--c", svd_cmd.c, "sample count (sampling methods)");
  svd_app->add_option("--epsilon", svd_cmd.epsilons, "angle threshold(s)");
  svd_app->add_option("--levels", svd_cmd.levels, "level count");
  svd_app->add_option("--iters", svd_cmd.iters, "refinement iterations");
  svd_app->add_option("--refine", svd_cmd.refine, "none|subspace|zha-simon|lowrank:<l>");
  svd_app->add_option("--reference", svd_cmd.reference, "auto|dense|iterative|none");
  svd_app->add_option("--dense-cap", svd_cmd.dense_cap, "dense-oracle size cap");
  svd_app->add_option("--mode", svd_cmd.mode, "scaled|unscaled");
  svd_app->add_option("--order", svd_cmd.order, "random|natural");

  CsspCmd cssp_cmd;
  auto* cssp_app = app.add_subcommand("cssp", "column subset selection");
  add_common(cssp_app, cssp_cmd.common);
  cssp_app->add_option("--method", cssp_cmd.method, "coarsen|leverage");
  cssp_app->add_option("--k", cssp_cmd.k, "rank for leverage scores / reporting");
  cssp_app->add_option("--c", cssp_cmd.c, "columns to select (leverage)");
  cssp_app->add_option("--epsilon", cssp_cmd.epsilons, "angle threshold(s)");
  cssp_app->add_option("--levels", cssp_cmd.levels, "level count");
  cssp_app->add_option("--order", cssp_cmd.order, "random|natural");
  cssp_app->add_option("--dense-cap", cssp_cmd.dense_cap, "dense-oracle size cap");
  index_t projector_rank_flag = 0;
  cssp_app->add_option("--projector-rank", projector_rank_flag,
                       "project onto the top-r basis of C instead of its full span");
  cssp_app->add_flag("--integer-data", cssp_cmd.integer_data,
                     "count integer mismatches for the nnz error");
  cssp_app->add_flag("--no-nnz-error", cssp_cmd.no_nnz_error, "skip the nnz mismatch metric");

  SparsifyCmd sparsify_cmd;
  auto* sparsify_app =
      app.add_subcommand("sparsify", "spectral graph sparsification from an edge list");
  add_common(sparsify_app, sparsify_cmd.common);
  sparsify_app->add_option("--method", sparsify_cmd.method, "coarsen|leverage");
  sparsify_app->add_option("--epsilon", sparsify_cmd.epsilons, "angle threshold(s)");
  sparsify_app->add_option("--levels", sparsify_cmd.levels, "level count");
  sparsify_app->add_option("--c", sparsify_cmd.c, "rows to sample (leverage)");
  sparsify_app->add_option("--k", sparsify_cmd.k, "rank for leverage scores");
  sparsify_app->add_option("--r", sparsify_cmd.r, "singular values compared in the error");
  sparsify_app->add_option("--order", sparsify_cmd.order, "random|natural");
  sparsify_app->add_option("--dense-cap", sparsify_cmd.dense_cap, "dense-oracle size cap");

  VerifyCmd verify_cmd;
  auto* verify_app =
      app.add_subcommand("verify-bounds", "check the Rayleigh and projection bounds");
  add_common(verify_app, verify_cmd.common);
  verify_app->add_option("--epsilon", verify_cmd.epsilon, "angle threshold");
  verify_app->add_option("--k", verify_cmd.ks, "ranks for the projection bounds");
  verify_app->add_option("--probes", verify_cmd.probes, "random unit probes");
  verify_app->add_option("--dense-cap", verify_cmd.dense_cap, "dense-oracle size cap");

  MergeCmd merge_cmd;
  auto* merge_app = app.add_subcommand("merge-reports", "merge report JSONs into one CSV");
  merge_app->add_option("paths", merge_cmd.paths, "report.json paths")->required();
  merge_app->add_option("--out", merge_cmd.out_file, "output CSV file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 3;
  }

  try {
    if (coarsen_app->parsed()) return coarsen_cmd.run();
    if (svd_app->parsed()) return svd_cmd.run();
    if (cssp_app->parsed()) {
      if (projector_rank_flag > 0) cssp_cmd.projector_rank = projector_rank_flag;
      return cssp_cmd.run();
    }
    if (sparsify_app->parsed()) return sparsify_cmd.run();
    if (verify_app->parsed()) return verify_cmd.run();
    if (merge_app->parsed()) return merge_cmd.run();
  } catch (const io_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const config_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const dimension_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const numerical_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
