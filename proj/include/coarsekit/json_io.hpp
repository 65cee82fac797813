#pragma once

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "coarsekit/coarsen.hpp"
#include "coarsekit/errors.hpp"
#include "coarsekit/metrics.hpp"

namespace coarsekit {

using json = nlohmann::json;

/// Map file for one matching level:
/// {level, epsilon, kept: [...], partner: [...|null], cos2theta: [...|null]}.
inline json matching_to_json(const MatchingResult& m) {
  json j;
  j["level"] = m.level;
  j["epsilon"] = m.epsilon;
  j["kept"] = m.kept;
  json partners = json::array();
  json cos2 = json::array();
  for (std::size_t l = 0; l < m.partner.size(); ++l) {
    if (m.partner[l] >= 0) {
      partners.push_back(m.partner[l]);
      cos2.push_back(m.cos2_theta[l]);
    } else {
      partners.push_back(nullptr);
      cos2.push_back(nullptr);
    }
  }
  j["partner"] = std::move(partners);
  j["cos2theta"] = std::move(cos2);
  if (!m.warnings.empty()) j["warnings"] = m.warnings;
  return j;
}

inline MatchingResult matching_from_json(const json& j) {
  MatchingResult m;
  m.level = j.at("level").get<int>();
  m.epsilon = j.at("epsilon").get<double>();
  m.kept = j.at("kept").get<std::vector<index_t>>();
  for (const auto& p : j.at("partner"))
    m.partner.push_back(p.is_null() ? -1 : p.get<index_t>());
  for (const auto& c : j.at("cos2theta"))
    m.cos2_theta.push_back(c.is_null() ? std::numeric_limits<double>::quiet_NaN()
                                       : c.get<double>());
  if (j.contains("warnings")) m.warnings = j.at("warnings").get<std::vector<std::string>>();
  return m;
}

/// Sampled index lists reuse the map schema with the partner fields absent.
inline json selection_to_json(const std::vector<index_t>& indices,
                              const std::string& method, std::uint64_t seed) {
  json j;
  j["kept"] = indices;
  j["method"] = method;
  j["seed"] = seed;
  return j;
}

inline json metrics_to_json(const MetricsReport& r) {
  json metrics = json::object();
  const auto put = [&metrics](const char* name, const std::optional<double>& v) {
    if (v) metrics[name] = *v;
  };
  put("error1_frobenius", r.error1_frobenius);
  put("error2_mean_sv", r.error2_mean_sv);
  put("spectral_error", r.spectral_error);
  put("rayleigh_max_dev", r.rayleigh_max_dev);
  put("cssp_frob_error", r.cssp_frob_error);
  put("cssp_nnz_error", r.cssp_nnz_error);
  put("sparsifier_sv_error", r.sparsifier_sv_error);
  put("nnz_ratio", r.nnz_ratio);

  json meta = json::object();
  meta["method"] = r.method;
  if (r.c) meta["c"] = *r.c;
  if (r.k) meta["k"] = *r.k;
  if (r.levels) meta["levels"] = *r.levels;
  meta["epsilons"] = r.epsilons;
  meta["seed"] = r.seed;
  if (!r.note.empty()) meta["note"] = r.note;

  json j;
  j["metrics"] = std::move(metrics);
  j["meta"] = std::move(meta);
  j["timing"] = {{"wall_time_s", r.wall_time_s}};
  return j;
}

inline MetricsReport metrics_from_json(const json& j) {
  if (!j.contains("metrics") || !j.contains("meta"))
    throw io_error("metrics report: missing 'metrics' or 'meta' key");
  MetricsReport r;
  const json& metrics = j.at("metrics");
  const auto get = [&metrics](const char* name) -> std::optional<double> {
    if (metrics.contains(name)) return metrics.at(name).get<double>();
    return std::nullopt;
  };
  r.error1_frobenius = get("error1_frobenius");
  r.error2_mean_sv = get("error2_mean_sv");
  r.spectral_error = get("spectral_error");
  r.rayleigh_max_dev = get("rayleigh_max_dev");
  r.cssp_frob_error = get("cssp_frob_error");
  r.cssp_nnz_error = get("cssp_nnz_error");
  r.sparsifier_sv_error = get("sparsifier_sv_error");
  r.nnz_ratio = get("nnz_ratio");
  const json& meta = j.at("meta");
  r.method = meta.value("method", "");
  if (meta.contains("c")) r.c = meta.at("c").get<index_t>();
  if (meta.contains("k")) r.k = meta.at("k").get<index_t>();
  if (meta.contains("levels")) r.levels = meta.at("levels").get<index_t>();
  r.epsilons = meta.value("epsilons", std::vector<double>{});
  r.seed = meta.value("seed", std::uint64_t{0});
  r.note = meta.value("note", "");
  if (j.contains("timing")) r.wall_time_s = j.at("timing").value("wall_time_s", 0.0);
  return r;
}

inline const std::vector<std::string>& metrics_csv_columns() {
  static const std::vector<std::string> cols = {
      "method",           "c",
      "k",                "levels",
      "epsilons",         "seed",
      "error1_frobenius", "error2_mean_sv",
      "spectral_error",   "rayleigh_max_dev",
      "cssp_frob_error",  "cssp_nnz_error",
      "sparsifier_sv_error", "nnz_ratio",
      "note",             "wall_time_s"};
  return cols;
}

inline std::string metrics_csv_header() {
  std::string out;
  for (const auto& c : metrics_csv_columns()) {
    if (!out.empty()) out += ",";
    out += c;
  }
  return out + "\n";
}

inline std::string metrics_csv_row(const MetricsReport& r) {
  const auto num = [](double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return std::string(buf);
  };
  const auto opt = [&num](const std::optional<double>& v) {
    return v ? num(*v) : std::string();
  };
  std::string eps;
  for (std::size_t i = 0; i < r.epsilons.size(); ++i) {
    if (i) eps += ";";
    eps += num(r.epsilons[i]);
  }
  std::string note = r.note;
  for (auto& ch : note)
    if (ch == ',' || ch == '\n') ch = ';';
  std::ostringstream row;
  row << r.method << "," << (r.c ? std::to_string(*r.c) : "") << ","
      << (r.k ? std::to_string(*r.k) : "") << ","
      << (r.levels ? std::to_string(*r.levels) : "") << "," << eps << "," << r.seed
      << "," << opt(r.error1_frobenius) << "," << opt(r.error2_mean_sv) << ","
      << opt(r.spectral_error) << "," << opt(r.rayleigh_max_dev) << ","
      << opt(r.cssp_frob_error) << "," << opt(r.cssp_nnz_error) << ","
      << opt(r.sparsifier_sv_error) << "," << opt(r.nnz_ratio) << "," << note << ","
      << num(r.wall_time_s) << "\n";
  return row.str();
}

/// One CSV row per report, stable column order.
inline std::string merge_reports(const std::vector<std::string>& paths) {
  if (paths.empty()) throw config_error("merge_reports: no report paths given");
  std::string out = metrics_csv_header();
  for (const auto& path : paths) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open report '" + path + "'");
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw io_error("report '" + path + "': " + e.what());
    }
    out += metrics_csv_row(metrics_from_json(j));
  }
  return out;
}

inline void write_json_file(const json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot write '" + path + "'");
  out << j.dump(2) << "\n";
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw io_error(std::string(path) + ": " + e.what());
  }
  return j;
}

}  // namespace coarsekit
