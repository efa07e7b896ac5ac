#ifndef RISKINV_CALIBRATE_HPP
#define RISKINV_CALIBRATE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "riskinv/errors.hpp"
#include "riskinv/format.hpp"
#include "riskinv/models.hpp"
#include "riskinv/solver.hpp"

namespace riskinv {

/// One survey respondent: total assets (initial wealth proxy), maximum profit
/// (success return proxy), yearly business expenses (investment proxy) and a
/// 1-3 agreement score with "last year was financially successful".
struct SurveyRecord {
  double asset_value = 0.0;
  double y_max = 0.0;
  double bm_expenses = 0.0;
  int success_likert = 1;
};

inline constexpr const char* kSurveyHeader = "asset_value,y_max,bm_expenses,success_likert";

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace detail

/// Parses survey CSV text. The header must be exactly kSurveyHeader; data rows
/// are numbered from 1 in error messages.
inline std::vector<SurveyRecord> parse_records(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty input: no header row");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  if (line != kSurveyHeader)
    throw ParseError("bad header '" + line + "', expected '" + kSurveyHeader + "'");

  std::vector<SurveyRecord> out;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    auto cols = detail::split_csv_line(line);
    auto fail = [&](const std::string& why) {
      throw ParseError("row " + std::to_string(row) + ": " + why, row);
    };
    if (cols.size() != 4) fail("expected 4 fields, got " + std::to_string(cols.size()));
    SurveyRecord r;
    auto num_field = [&](std::size_t i, const char* name) {
      auto v = parse_double(cols[i]);
      if (!v || !std::isfinite(*v)) fail(std::string("missing or non-numeric ") + name);
      return *v;
    };
    r.asset_value = num_field(0, "asset_value");
    r.y_max = num_field(1, "y_max");
    r.bm_expenses = num_field(2, "bm_expenses");
    auto lik = parse_int(cols[3]);
    if (!lik) fail("missing or non-integer success_likert");
    if (*lik < 1 || *lik > 3) fail("success_likert must be 1, 2 or 3, got " + std::to_string(*lik));
    r.success_likert = static_cast<int>(*lik);
    if (r.asset_value < 0.0) fail("asset_value must be >= 0");
    if (r.bm_expenses < 0.0) fail("bm_expenses must be >= 0");
    out.push_back(r);
  }
  if (out.empty()) throw ParseError("empty input: header but no data rows");
  return out;
}

inline std::vector<SurveyRecord> load_records(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  return parse_records(in);
}

inline void write_records(std::ostream& out, const std::vector<SurveyRecord>& records) {
  out << kSurveyHeader << '\n';
  for (const auto& r : records)
    out << format_double(r.asset_value) << ',' << format_double(r.y_max) << ','
        << format_double(r.bm_expenses) << ',' << r.success_likert << '\n';
}

struct IncomeGroup {
  std::size_t index = 0;  // 1-based, poorest first
  double mean_B = 0.0;
  double mean_mu = 0.0;
  double p_hat = 0.0;
  std::size_t n = 0;
  std::size_t successes = 0;
};

/// Sorts records by asset value (stable, so ties keep input order) and cuts
/// them into G near-equal groups; the first (size % G) groups get one extra
/// record. A record counts as a success when its likert score is at least
/// success_threshold.
inline std::vector<IncomeGroup> bin_groups(const std::vector<SurveyRecord>& records, std::size_t G,
                                           int success_threshold = 3) {
  detail::require(G >= 1, "bin_groups: need at least one group");
  detail::require(!records.empty(), "bin_groups: no records");
  detail::require(G <= records.size(), "bin_groups: group count " + std::to_string(G) +
                                           " exceeds record count " + std::to_string(records.size()));
  std::vector<std::size_t> order(records.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return records[a].asset_value < records[b].asset_value;
  });

  const std::size_t base = records.size() / G;
  const std::size_t extra = records.size() % G;
  std::vector<IncomeGroup> groups;
  groups.reserve(G);
  std::size_t pos = 0;
  for (std::size_t g = 0; g < G; ++g) {
    IncomeGroup grp;
    grp.index = g + 1;
    grp.n = base + (g < extra ? 1 : 0);
    double sum_b = 0.0, sum_mu = 0.0;
    for (std::size_t k = 0; k < grp.n; ++k) {
      const auto& r = records[order[pos++]];
      sum_b += r.asset_value;
      sum_mu += r.bm_expenses;
      if (r.success_likert >= success_threshold) ++grp.successes;
    }
    grp.mean_B = sum_b / static_cast<double>(grp.n);
    grp.mean_mu = sum_mu / static_cast<double>(grp.n);
    grp.p_hat = static_cast<double>(grp.successes) / static_cast<double>(grp.n);
    groups.push_back(grp);
  }
  return groups;
}

/// Linear probability-investment link p = gamma * mu, anchored so that the
/// largest group-mean expense buys p_bar.
struct CalibrationCore {
  double gamma = 0.0;
  double mu_max = 0.0;
  double p_bar = 0.0;

  // Cost per unit of probability.
  double alpha() const { return 1.0 / gamma; }
};

inline CalibrationCore fit_gamma(const std::vector<IncomeGroup>& groups, double p_bar) {
  detail::require(p_bar > 0.0 && p_bar < 1.0, "fit_gamma: need 0 < p_bar < 1");
  double mu_max = 0.0;
  for (const auto& g : groups) mu_max = std::max(mu_max, g.mean_mu);
  if (!(mu_max > 0.0)) throw ArgumentError("fit_gamma: degenerate fit, every group has zero expenses");
  return {p_bar / mu_max, mu_max, p_bar};
}

struct CurvePoint {
  std::size_t group = 0;
  double mean_B = 0.0;
  double optimal_p = 0.0;
  bool clipped = false;  // CRRA consumption bound cut the range below p_bar, or no feasible p
};

struct CalibrationCurve {
  double sigma = 0.0;
  std::vector<CurvePoint> points;
};

struct CalibrationResult {
  double gamma = 0.0;
  double H = 0.0;
  double L = 0.0;
  double p_bar = 0.0;
  std::vector<CalibrationCurve> curves;
};

struct CurveSettings {
  double H = 62000.0;
  double L = 0.0;
  double p_bar = 0.88;
  SolverOptions solver;
};

/// For every sigma and group, the CRRA-optimal p of a probability model with
/// B = group mean assets and alpha = 1 / gamma.
inline CalibrationResult predict_curves(const CalibrationCore& core, const std::vector<IncomeGroup>& groups,
                                        const std::vector<double>& sigmas,
                                        const CurveSettings& settings = {}) {
  CalibrationResult res{core.gamma, settings.H, settings.L, settings.p_bar, {}};
  for (double sigma : sigmas) {
    const RiskPreference pref = RiskPreference::crra(sigma);
    CalibrationCurve curve{sigma, {}};
    for (const auto& g : groups) {
      const ProbabilityModel m{g.mean_B, settings.H, settings.L, core.alpha(), settings.p_bar};
      CurvePoint pt{g.index, g.mean_B, 0.0, false};
      try {
        const SolveReport rep = solve_probability(m, pref, settings.solver);
        pt.optimal_p = rep.argmax;
        pt.clipped = rep.feasible_max < settings.p_bar;
      } catch (const InfeasibleError&) {
        pt.optimal_p = 0.0;
        pt.clipped = true;
      }
      curve.points.push_back(pt);
    }
    res.curves.push_back(std::move(curve));
  }
  return res;
}

/// Synthetic stand-in for the microfinance survey: groups.size() asset bands
/// of per_group respondents each, with assets and expenses increasing across
/// bands and exactly successes[g] respondents of band g answering 3.
struct SyntheticSurveySpec {
  std::size_t per_group = 18;
  std::vector<std::size_t> successes;  // one entry per group
  double asset_lo = 500.0;             // band centre of the poorest group
  double asset_hi = 40000.0;           // band centre of the richest group
  double expense_lo = 800.0;
  double expense_hi = 4400.0;
  double y_max = 62000.0;
  std::uint64_t seed = 1;
};

inline std::vector<SurveyRecord> make_synthetic_survey(const SyntheticSurveySpec& spec) {
  const std::size_t G = spec.successes.size();
  detail::require(G >= 1 && spec.per_group >= 1, "synthetic survey needs groups and respondents");
  std::mt19937_64 rng(spec.seed);
  auto unit = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  std::vector<SurveyRecord> out;
  for (std::size_t g = 0; g < G; ++g) {
    detail::require(spec.successes[g] <= spec.per_group, "successes exceed group size");
    const double t = G == 1 ? 0.0 : static_cast<double>(g) / static_cast<double>(G - 1);
    const double centre = spec.asset_lo * std::pow(spec.asset_hi / spec.asset_lo, t);
    // Half-width below half the ratio step keeps bands disjoint after sorting.
    const double step = G == 1 ? 2.0 : std::pow(spec.asset_hi / spec.asset_lo, 1.0 / static_cast<double>(G - 1));
    const double width = 0.4 * (step - 1.0) / step;
    const double expense = spec.expense_lo + (spec.expense_hi - spec.expense_lo) * t;
    for (std::size_t k = 0; k < spec.per_group; ++k) {
      // Symmetric offsets so the band mean is exactly the centre.
      const double offset = spec.per_group == 1
                                ? 0.0
                                : width * (2.0 * static_cast<double>(k) / static_cast<double>(spec.per_group - 1) - 1.0);
      SurveyRecord r;
      r.asset_value = centre * (1.0 + offset);
      r.y_max = spec.y_max * (0.5 + unit());
      r.bm_expenses = expense;
      r.success_likert = k < spec.successes[g] ? 3 : (unit() < 0.5 ? 1 : 2);
      out.push_back(r);
    }
  }
  // Scramble the row order; binning must recover the bands.
  std::shuffle(out.begin(), out.end(), rng);
  return out;
}

}  // namespace riskinv

#endif  // RISKINV_CALIBRATE_HPP
