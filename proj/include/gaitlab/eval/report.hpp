#pragma once

// CSV and JSON report emission. The CSV holds one row of scalars per run;
// the JSON adds every curve.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "gaitlab/error.hpp"
#include "gaitlab/eval/experiment.hpp"

namespace gaitlab {

inline const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols{"method", "setup", "cl",  "ce",  "cv",  "repetitions",
                                             "seed",   "dbi",   "di",  "sc",  "fdr", "ccr",
                                             "eer",    "auc",   "map", "dct_ms", "td"};
  return cols;
}

// Round-trippable text: %.17g, "inf"/"-inf", and an empty cell for NaN.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline double parse_double(const std::string& s) {
  if (s.empty()) return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') throw InvalidArgument("bad number '" + s + "' in report");
  return v;
}

inline std::string csv_header() {
  std::string out;
  for (const auto& c : csv_columns()) out += (out.empty() ? "" : ",") + c;
  return out;
}

inline std::string csv_row(const EvaluationReport& r) {
  std::vector<std::string> cells{r.method,
                                 to_string(r.setup.kind),
                                 std::to_string(r.setup.cl),
                                 std::to_string(r.setup.ce),
                                 to_string(r.setup.cv),
                                 std::to_string(r.setup.repetitions),
                                 std::to_string(r.setup.seed),
                                 format_double(r.separability.dbi),
                                 format_double(r.separability.di),
                                 format_double(r.separability.sc),
                                 format_double(r.separability.fdr),
                                 format_double(r.ccr),
                                 format_double(r.eer),
                                 format_double(r.auc),
                                 format_double(r.map),
                                 format_double(r.dct_ms),
                                 format_double(r.td)};
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) out += (i ? "," : "") + cells[i];
  return out;
}

inline std::string to_csv(const std::vector<EvaluationReport>& reports) {
  std::string out = csv_header() + "\n";
  for (const auto& r : reports) out += csv_row(r) + "\n";
  return out;
}

// Scalar fields of each row; curves and per-run data are not in the CSV.
inline std::vector<EvaluationReport> parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != csv_header()) throw InvalidArgument("report CSV header does not match");
  std::vector<EvaluationReport> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::size_t start = 0;
    for (;;) {
      auto comma = line.find(',', start);
      cells.push_back(line.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (cells.size() != csv_columns().size()) throw InvalidArgument("report row has the wrong number of cells");
    EvaluationReport r;
    r.method = cells[0];
    r.setup.method = cells[0];
    r.setup.kind = setup_kind_from_string(cells[1]);
    r.setup.cl = std::stoul(cells[2]);
    r.setup.ce = std::stoul(cells[3]);
    r.setup.cv = cv_mode_from_string(cells[4]);
    r.setup.repetitions = std::stoul(cells[5]);
    r.setup.seed = std::stoull(cells[6]);
    r.separability = {parse_double(cells[7]), parse_double(cells[8]), parse_double(cells[9]), parse_double(cells[10])};
    r.ccr = parse_double(cells[11]);
    r.eer = parse_double(cells[12]);
    r.auc = parse_double(cells[13]);
    r.map = parse_double(cells[14]);
    r.dct_ms = parse_double(cells[15]);
    r.td = parse_double(cells[16]);
    out.push_back(std::move(r));
  }
  return out;
}

namespace detail {

// JSON has no inf/NaN; they become the strings used in the CSV.
inline nlohmann::json number(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v).empty() ? nlohmann::json(nullptr) : nlohmann::json(format_double(v));
}

inline nlohmann::json curve(const Curve& c) {
  auto out = nlohmann::json::array();
  for (const auto& [x, y] : c) out.push_back({number(x), number(y)});
  return out;
}

inline nlohmann::json scalars(const Separability& s, double ccr, double eer, double auc, double map, double dct,
                              double td) {
  return {{"dbi", number(s.dbi)}, {"di", number(s.di)},   {"sc", number(s.sc)},   {"fdr", number(s.fdr)},
          {"ccr", number(ccr)},   {"eer", number(eer)},   {"auc", number(auc)},   {"map", number(map)},
          {"dct_ms", number(dct)}, {"td", number(td)}};
}

}  // namespace detail

inline nlohmann::json to_json(const EvaluationReport& r) {
  nlohmann::json j;
  j["method"] = r.method;
  j["distance"] = r.distance;
  j["setup"] = {{"kind", to_string(r.setup.kind)}, {"cl", r.setup.cl},
                {"ce", r.setup.ce},                {"ratio", r.setup.ratio},
                {"repetitions", r.setup.repetitions}, {"seed", r.setup.seed},
                {"cv", to_string(r.setup.cv)},     {"folds", r.setup.folds}};
  j["average"] = detail::scalars(r.separability, r.ccr, r.eer, r.auc, r.map, r.dct_ms, r.td);
  auto cmc_curve = [](const std::vector<double>& cmc) {
    Curve c;
    for (std::size_t k = 0; k < cmc.size(); ++k) c.emplace_back(static_cast<double>(k + 1), cmc[k]);
    return detail::curve(c);
  };
  j["average"]["cmc"] = cmc_curve(r.cmc);
  j["runs"] = nlohmann::json::array();
  for (const auto& run : r.runs) {
    auto rj = detail::scalars(run.separability, run.ccr, run.eer, run.auc, run.map, run.dct_ms, run.td);
    rj["seed"] = run.seed;
    rj["learning_samples"] = run.learning_samples;
    rj["evaluation_samples"] = run.evaluation_samples;
    rj["cmc"] = cmc_curve(run.cmc);
    Curve far, frr;
    for (std::size_t k = 0; k < run.far_frr.thresholds.size(); ++k) {
      far.emplace_back(run.far_frr.thresholds[k], run.far_frr.far[k]);
      frr.emplace_back(run.far_frr.thresholds[k], run.far_frr.frr[k]);
    }
    rj["far"] = detail::curve(far);
    rj["frr"] = detail::curve(frr);
    rj["roc"] = detail::curve(run.roc.points);
    rj["rcl_pcn"] = detail::curve(run.rcl_pcn.points);
    j["runs"].push_back(std::move(rj));
  }
  return j;
}

inline nlohmann::json to_json(const std::vector<EvaluationReport>& reports) {
  auto out = nlohmann::json::array();
  for (const auto& r : reports) out.push_back(to_json(r));
  return out;
}

}  // namespace gaitlab
