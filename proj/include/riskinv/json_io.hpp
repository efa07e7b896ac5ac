#ifndef RISKINV_JSON_IO_HPP
#define RISKINV_JSON_IO_HPP

#include <string>
#include <vector>

#include <json.hpp>

#include "riskinv/calibrate.hpp"
#include "riskinv/errors.hpp"
#include "riskinv/expsim.hpp"
#include "riskinv/solver.hpp"
#include "riskinv/utility.hpp"

namespace riskinv {

using json = nlohmann::json;

inline json to_json(const RiskPreference& pref) {
  if (pref.is_cara()) return {{"family", "cara"}, {"lambda", pref.coefficient()}};
  if (pref.is_crra()) return {{"family", "crra"}, {"sigma", pref.coefficient()}};
  return {{"family", "linear"}};
}

inline RiskPreference preference_from_json(const json& j) {
  const std::string fam = j.at("family").get<std::string>();
  if (fam == "cara") return RiskPreference::cara(j.at("lambda").get<double>());
  if (fam == "crra") return RiskPreference::crra(j.at("sigma").get<double>());
  if (fam == "linear") return RiskPreference::linear();
  throw ArgumentError("unknown preference family '" + fam + "'");
}

inline json to_json(const SolveReport& r) {
  return {{"argmax", r.argmax},
          {"max_eu", r.max_eu},
          {"shape", std::string(to_string(r.shape))},
          {"feasible_max", r.feasible_max},
          {"diagnostics",
           {{"grid_size", r.diagnostics.grid_size},
            {"refinement_iterations", r.diagnostics.refinement_iterations},
            {"residual_tolerance", r.diagnostics.residual_tolerance}}}};
}

inline Shape shape_from_string(const std::string& s) {
  for (Shape sh : {Shape::U_SHAPED, Shape::MONOTONE_UP, Shape::MONOTONE_DOWN, Shape::CONCAVE, Shape::IRREGULAR})
    if (to_string(sh) == s) return sh;
  throw ArgumentError("unknown shape '" + s + "'");
}

inline SolveReport solve_report_from_json(const json& j) {
  SolveReport r;
  r.argmax = j.at("argmax").get<double>();
  r.max_eu = j.at("max_eu").get<double>();
  r.shape = shape_from_string(j.at("shape").get<std::string>());
  r.feasible_max = j.at("feasible_max").get<double>();
  const auto& d = j.at("diagnostics");
  r.diagnostics.grid_size = d.at("grid_size").get<std::size_t>();
  r.diagnostics.refinement_iterations = d.at("refinement_iterations").get<std::size_t>();
  r.diagnostics.residual_tolerance = d.at("residual_tolerance").get<double>();
  return r;
}

inline json to_json(const ThresholdReport& r) {
  return {{"threshold", r.threshold}, {"bracket", {r.lo, r.hi}}, {"side_low", r.side_low},
          {"side_high", r.side_high}, {"iterations", r.iterations}};
}

inline ThresholdReport threshold_report_from_json(const json& j) {
  ThresholdReport r;
  r.threshold = j.at("threshold").get<double>();
  r.lo = j.at("bracket").at(0).get<double>();
  r.hi = j.at("bracket").at(1).get<double>();
  r.side_low = j.at("side_low").get<double>();
  r.side_high = j.at("side_high").get<double>();
  r.iterations = j.at("iterations").get<std::size_t>();
  return r;
}

inline json to_json(const GameSummary& s) {
  json shares = json::object();
  for (const auto& [k, v] : s.invested_shares) shares[format_double(k)] = v;
  return {{"game", s.game}, {"n", s.n}, {"invested_shares", shares}, {"mean_invested", s.mean_invested},
          {"variance_invested", s.variance_invested}, {"corner_mass", s.corner_mass}};
}

inline json to_json(const DispersionReport& d) {
  json diff = json::object();
  for (const auto& [k, v] : d.share_difference) diff[format_double(k)] = v;
  return {{"variance_probability", d.variance_probability},
          {"variance_reward", d.variance_reward},
          {"levene_w", d.levene_w},
          {"corner_mass_probability", d.corner_mass_probability},
          {"corner_mass_reward", d.corner_mass_reward},
          {"corner_mass_difference", d.corner_mass_probability - d.corner_mass_reward},
          {"share_difference", diff}};
}

inline json to_json(const StepBranchReport& r) {
  json finals = json::object();
  for (const auto& [k, v] : r.final_units_shares) finals[std::to_string(k)] = v;
  return {{"n", r.n},
          {"pick_count_shares", std::vector<double>(r.pick_count_shares.begin(), r.pick_count_shares.end())},
          {"node_probability_share", r.node_probability_share},
          {"probability_share", r.probability_share},
          {"myopic_matches_argmax", r.myopic_matches_argmax},
          {"final_units_shares", finals}};
}

/// Population document:
///   {"n": 10000, "seed": 7,
///    "sampler": {"family": "cara_log_uniform", "lo": 1e-4, "hi": 5e-2}
///             | {"family": "crra_grid", "sigmas": [0.5, 1, 2]},
///    "wealth": {"family": "none"} | {"family": "constant", "value": w}
///            | {"family": "uniform", "lo": a, "hi": b}}
inline AgentPopulation population_from_json(const json& j) {
  AgentPopulation pop;
  pop.n = j.at("n").get<std::size_t>();
  pop.seed = j.value("seed", std::uint64_t{1});
  const auto& s = j.at("sampler");
  const std::string fam = s.at("family").get<std::string>();
  if (fam == "cara_log_uniform") {
    pop.preferences = CaraLogUniform{s.at("lo").get<double>(), s.at("hi").get<double>()};
  } else if (fam == "crra_grid") {
    pop.preferences = CrraGrid{s.at("sigmas").get<std::vector<double>>()};
  } else {
    throw ArgumentError("unknown sampler family '" + fam + "'");
  }
  if (j.contains("wealth")) {
    const auto& w = j.at("wealth");
    const std::string wf = w.at("family").get<std::string>();
    if (wf == "none") {
      pop.wealth = {};
    } else if (wf == "constant") {
      pop.wealth = {WealthSampler::Kind::Constant, w.at("value").get<double>(), 0.0};
    } else if (wf == "uniform") {
      pop.wealth = {WealthSampler::Kind::Uniform, w.at("lo").get<double>(), w.at("hi").get<double>()};
    } else {
      throw ArgumentError("unknown wealth family '" + wf + "'");
    }
  }
  pop.validate();
  return pop;
}

inline json to_json(const AgentPopulation& pop) {
  json sampler;
  if (auto* c = std::get_if<CaraLogUniform>(&pop.preferences))
    sampler = {{"family", "cara_log_uniform"}, {"lo", c->lo}, {"hi", c->hi}};
  else
    sampler = {{"family", "crra_grid"}, {"sigmas", std::get<CrraGrid>(pop.preferences).sigmas}};
  json wealth;
  switch (pop.wealth.kind) {
    case WealthSampler::Kind::None: wealth = {{"family", "none"}}; break;
    case WealthSampler::Kind::Constant: wealth = {{"family", "constant"}, {"value", pop.wealth.a}}; break;
    case WealthSampler::Kind::Uniform:
      wealth = {{"family", "uniform"}, {"lo", pop.wealth.a}, {"hi", pop.wealth.b}};
      break;
  }
  return {{"n", pop.n}, {"seed", pop.seed}, {"sampler", sampler}, {"wealth", wealth}};
}

inline json to_json(const CalibrationResult& r) {
  json curves = json::array();
  for (const auto& c : r.curves) {
    json pts = json::array();
    for (const auto& p : c.points)
      pts.push_back({{"group", p.group}, {"mean_B", p.mean_B}, {"optimal_p", p.optimal_p}, {"clipped", p.clipped}});
    curves.push_back({{"sigma", c.sigma}, {"points", pts}});
  }
  return {{"gamma", r.gamma}, {"H", r.H}, {"L", r.L}, {"p_bar", r.p_bar}, {"curves", curves}};
}

}  // namespace riskinv

#endif  // RISKINV_JSON_IO_HPP
