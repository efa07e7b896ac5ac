#ifndef RISKINV_TOOLS_CLI_HPP
#define RISKINV_TOOLS_CLI_HPP

// Command-line front end. run_cli() is the whole program; main() only forwards
// argv so tests can drive commands in-process.

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "riskinv/calibrate.hpp"
#include "riskinv/credit.hpp"
#include "riskinv/expsim.hpp"
#include "riskinv/format.hpp"
#include "riskinv/json_io.hpp"
#include "riskinv/models.hpp"
#include "riskinv/solver.hpp"
#include "riskinv/utility.hpp"

namespace riskinv::cli {

namespace fs = std::filesystem;

struct RunConfig {
  std::string command;
  std::string target;  // prob | reward | credit | lambda | wealth

  std::optional<double> lambda;
  std::optional<double> crra;
  bool linear = false;

  double B = 0.0;
  double H = 2.0;
  double L = 0.0;
  double alpha = 1.0;
  double pbar = 0.8;

  // reward model
  double B_reward = 150.0;
  double p = 0.5;
  std::string affine = "0,3";
  std::string power;
  double cmax = 150.0;

  std::size_t grid = 2001;
  bool curve = false;
  bool plot = false;
  std::size_t curve_points = 201;

  // sweep
  std::string param;
  double from = 0.0;
  double to = 1.0;
  std::size_t steps = 11;

  // thresholds
  bool credit = false;
  double k = 1.0;
  double wealth_lo = 0.0;
  double wealth_tol = 1e-4;
  double lambda_rel_tol = 1e-9;

  // calibrate
  std::string input;
  bool synthetic = false;
  std::size_t groups = 30;
  std::string sigmas = "0.5,1,2,3,4";
  int success_threshold = 3;
  double cal_H = 62000.0;
  double cal_L = 0.0;
  double cal_pbar = 0.88;

  // simulate
  std::string config_path;
  std::string game = "all";
  std::size_t n = 10000;
  std::string lambda_log_uniform = "1e-4,5e-2";
  std::string crra_grid;
  std::optional<double> wealth;
  std::string wealth_uniform;
  std::uint64_t seed = 1;

  std::string out = ".";
  std::string format = "json";
};

inline std::vector<double> parse_list(const std::string& s, const std::string& flag) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    auto v = parse_double(tok);
    if (!v) throw ArgumentError("bad number '" + tok + "' in " + flag);
    out.push_back(*v);
  }
  if (out.empty()) throw ArgumentError(flag + " needs a comma-separated list");
  return out;
}

inline RiskPreference preference(const RunConfig& c) {
  const int given = (c.lambda ? 1 : 0) + (c.crra ? 1 : 0) + (c.linear ? 1 : 0);
  if (given != 1) throw ArgumentError("give exactly one of --lambda, --crra, --linear");
  if (c.lambda) return RiskPreference::cara(*c.lambda);
  if (c.crra) return RiskPreference::crra(*c.crra);
  return RiskPreference::linear();
}

inline ProbabilityModel probability_model(const RunConfig& c) {
  ProbabilityModel m{c.B, c.H, c.L, c.alpha, c.pbar};
  m.validate();
  return m;
}

inline CreditModel credit_model(const RunConfig& c) {
  CreditModel m{c.B, c.H, c.L, c.alpha, c.pbar};
  m.validate();
  return m;
}

inline RewardModel reward_model(const RunConfig& c) {
  RewardModel m;
  m.B = c.B_reward;
  m.L = c.L;
  m.p = c.p;
  if (!c.power.empty()) {
    auto v = parse_list(c.power, "--power");
    if (v.size() != 3) throw ArgumentError("--power expects h0,m,theta");
    m.reward = RewardFunction::power(v[0], v[1], v[2], c.cmax);
  } else {
    auto v = parse_list(c.affine, "--affine");
    if (v.size() != 2) throw ArgumentError("--affine expects h0,m");
    m.reward = RewardFunction::affine(v[0], v[1], c.cmax);
  }
  m.validate();
  return m;
}

inline json config_json(const RunConfig& c) {
  json j = {{"command", c.command}, {"target", c.target}, {"out", c.out}, {"format", c.format}};
  if (c.command == "solve" || c.command == "sweep" || c.command == "threshold") {
    j["preference"] = c.lambda ? json{{"lambda", *c.lambda}}
                      : c.crra ? json{{"crra", *c.crra}}
                               : (c.linear ? json{{"linear", true}} : json(nullptr));
    if (c.target == "reward") {
      j["model"] = {{"B", c.B_reward}, {"L", c.L}, {"p", c.p}, {"cmax", c.cmax},
                    {"reward", c.power.empty() ? json{{"affine", c.affine}} : json{{"power", c.power}}}};
    } else {
      j["model"] = {{"B", c.B}, {"H", c.H}, {"L", c.L}, {"alpha", c.alpha}, {"pbar", c.pbar}};
    }
    j["grid"] = c.grid;
  }
  if (c.command == "solve") j["curve_points"] = c.curve_points;
  if (c.command == "sweep")
    j["sweep"] = {{"param", c.param}, {"from", c.from}, {"to", c.to}, {"steps", c.steps}};
  if (c.command == "threshold")
    j["threshold"] = {{"credit", c.credit}, {"k", c.k}, {"wealth_lo", c.wealth_lo},
                      {"wealth_tol", c.wealth_tol}, {"lambda_rel_tol", c.lambda_rel_tol}};
  if (c.command == "calibrate")
    j["calibrate"] = {{"input", c.synthetic ? "synthetic" : c.input}, {"groups", c.groups},
                      {"sigmas", c.sigmas}, {"success_threshold", c.success_threshold},
                      {"H", c.cal_H}, {"L", c.cal_L}, {"pbar", c.cal_pbar}, {"seed", c.seed},
                      {"grid", c.grid}};
  return j;
}

inline void write_file(const fs::path& path, const std::string& body) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ArgumentError("cannot write '" + path.string() + "'");
  f << body;
}

inline fs::path out_dir(const RunConfig& c) {
  fs::path d(c.out);
  std::error_code ec;
  fs::create_directories(d, ec);
  if (ec) throw ArgumentError("cannot create output directory '" + c.out + "'");
  return d;
}

inline std::string report_csv(const SolveReport& r) {
  std::ostringstream s;
  s << "argmax,max_eu,shape,feasible_max,grid_size,refinement_iterations,residual_tolerance\n"
    << format_double(r.argmax) << ',' << format_double(r.max_eu) << ',' << to_string(r.shape) << ','
    << format_double(r.feasible_max) << ',' << r.diagnostics.grid_size << ','
    << r.diagnostics.refinement_iterations << ',' << format_double(r.diagnostics.residual_tolerance) << '\n';
  return s.str();
}

inline std::string threshold_csv(const ThresholdReport& r) {
  std::ostringstream s;
  s << "threshold,lo,hi,side_low,side_high,iterations\n"
    << format_double(r.threshold) << ',' << format_double(r.lo) << ',' << format_double(r.hi) << ','
    << format_double(r.side_low) << ',' << format_double(r.side_high) << ',' << r.iterations << '\n';
  return s.str();
}

struct Evaluator {
  SolveReport report;
  double x_max = 0.0;
  std::string x_name;
  std::function<double(double)> eu;
};

inline Evaluator evaluate(const RunConfig& c) {
  SolverOptions opts;
  opts.grid_size = c.grid;
  const RiskPreference pref = preference(c);
  if (c.target == "prob") {
    const ProbabilityModel m = probability_model(c);
    SolveReport r = solve_probability(m, pref, opts);
    return {r, r.feasible_max, "p", [m, pref](double p) { return prob_eu(m, pref, p); }};
  }
  if (c.target == "reward") {
    const RewardModel m = reward_model(c);
    SolveReport r = solve_reward(m, pref, opts);
    return {r, r.feasible_max, "c", [m, pref](double x) { return reward_eu(m, pref, x); }};
  }
  if (c.target == "credit") {
    const CreditModel m = credit_model(c);
    SolveReport r = solve_credit(m, pref, opts);
    return {r, r.feasible_max, "p", [m, pref](double p) { return credit_eu(m, pref, p); }};
  }
  throw ArgumentError("unknown model '" + c.target + "' (expected prob, reward or credit)");
}

inline int cmd_solve(const RunConfig& c, std::ostream& out) {
  Evaluator ev = evaluate(c);
  const fs::path dir = out_dir(c);
  json doc = {{"config", config_json(c)}, {"report", to_json(ev.report)}};
  if (c.format == "csv")
    write_file(dir / "report.csv", report_csv(ev.report));
  else
    write_file(dir / "report.json", doc.dump(2) + "\n");
  if (c.curve || c.plot) {
    const std::size_t n = std::max<std::size_t>(c.curve_points, 2);
    std::ostringstream s;
    s << ev.x_name << ",eu\n";
    for (std::size_t i = 0; i < n; ++i) {
      const double x = i + 1 == n ? ev.x_max : ev.x_max * static_cast<double>(i) / static_cast<double>(n - 1);
      s << format_double(x) << ',' << format_double(ev.eu(x)) << '\n';
    }
    write_file(dir / "curve.csv", s.str());
  }
  if (c.plot) {
    std::ostringstream g;
    g << "# gnuplot script; run from the output directory: gnuplot curve.gp\n"
      << "set datafile separator ','\n"
      << "set terminal pngcairo size 800,500\n"
      << "set output 'curve.png'\n"
      << "set xlabel '" << ev.x_name << "'\n"
      << "set ylabel 'expected utility'\n"
      << "set arrow from " << format_double(ev.report.argmax) << ", graph 0 to "
      << format_double(ev.report.argmax) << ", graph 1 nohead dashtype 2\n"
      << "plot 'curve.csv' using 1:2 skip 1 with lines title '" << c.target << "'\n";
    write_file(dir / "curve.gp", g.str());
  }
  out << doc.dump(2) << '\n';
  return 0;
}

inline void set_param(RunConfig& c, const std::string& name, double v) {
  if (name == "lambda") c.lambda = v, c.crra.reset(), c.linear = false;
  else if (name == "sigma") c.crra = v, c.lambda.reset(), c.linear = false;
  else if (name == "B") (c.target == "reward" ? c.B_reward : c.B) = v;
  else if (name == "H") c.H = v;
  else if (name == "L") c.L = v;
  else if (name == "alpha") c.alpha = v;
  else if (name == "pbar") c.pbar = v;
  else if (name == "p") c.p = v;
  else if (name == "cmax") c.cmax = v;
  else throw ArgumentError("cannot sweep '" + name + "' (lambda, sigma, B, H, L, alpha, pbar, p, cmax)");
}

inline int cmd_sweep(const RunConfig& c, std::ostream& out) {
  if (c.steps < 2) throw ArgumentError("--steps must be >= 2");
  RunConfig probe = c;
  set_param(probe, c.param, c.from);  // reject unknown names before computing
  const fs::path dir = out_dir(c);
  std::ostringstream csv;
  csv << c.param << ",argmax,max_eu,shape\n";
  json rows = json::array();
  for (std::size_t i = 0; i < c.steps; ++i) {
    const double v = i + 1 == c.steps ? c.to
                                      : c.from + (c.to - c.from) * static_cast<double>(i) / static_cast<double>(c.steps - 1);
    RunConfig run = c;
    set_param(run, c.param, v);
    const SolveReport r = evaluate(run).report;
    csv << format_double(v) << ',' << format_double(r.argmax) << ',' << format_double(r.max_eu) << ','
        << to_string(r.shape) << '\n';
    rows.push_back({{"value", v}, {"report", to_json(r)}});
  }
  json doc = {{"config", config_json(c)}, {"rows", rows}};
  if (c.format == "csv")
    write_file(dir / "sweep.csv", csv.str());
  else
    write_file(dir / "sweep.json", doc.dump(2) + "\n");
  out << csv.str();
  return 0;
}

inline int cmd_threshold(const RunConfig& c, std::ostream& out) {
  ThresholdReport rep;
  if (c.target == "lambda") {
    LambdaThresholdOptions o;
    o.rel_tol = c.lambda_rel_tol;
    rep = c.credit ? credit_lambda_threshold(credit_model(c), o) : lambda_threshold(probability_model(c), o);
  } else if (c.target == "wealth") {
    WealthThresholdOptions o;
    o.abs_tol = c.wealth_tol;
    o.B_lo = c.wealth_lo;
    o.solver.grid_size = c.grid;
    if (c.credit) {
      rep = credit_wealth_threshold(credit_model(c), InverseWealthAversion{c.k}, o);
    } else {
      rep = wealth_threshold(probability_model(c), preference(c), o);
    }
  } else {
    throw ArgumentError("unknown threshold '" + c.target + "' (expected lambda or wealth)");
  }
  const fs::path dir = out_dir(c);
  json doc = {{"config", config_json(c)}, {"report", to_json(rep)}};
  if (c.format == "csv")
    write_file(dir / "threshold.csv", threshold_csv(rep));
  else
    write_file(dir / "threshold.json", doc.dump(2) + "\n");
  out << doc.dump(2) << '\n';
  return 0;
}

/// Default synthetic survey: 30 bands of 18 with success counts rising from
/// 4 to 16.
inline SyntheticSurveySpec default_synthetic_survey(std::size_t groups, std::uint64_t seed) {
  SyntheticSurveySpec spec;
  spec.seed = seed;
  for (std::size_t g = 0; g < groups; ++g)
    spec.successes.push_back(groups == 1 ? 4 : 4 + (12 * g + (groups - 1) / 2) / (groups - 1));
  return spec;
}

inline int cmd_calibrate(const RunConfig& c, std::ostream& out) {
  const auto sigmas = parse_list(c.sigmas, "--sigmas");
  for (double s : sigmas)
    if (!(s > 0.0)) throw ArgumentError("--sigmas values must be > 0");
  if (c.synthetic == !c.input.empty()) throw ArgumentError("give exactly one of --input or --synthetic");
  const fs::path dir = out_dir(c);
  std::vector<SurveyRecord> records;
  if (c.synthetic) {
    records = make_synthetic_survey(default_synthetic_survey(c.groups, c.seed));
    std::ostringstream s;
    write_records(s, records);
    write_file(dir / "survey_synthetic.csv", s.str());
  } else {
    records = load_records(c.input);
  }
  const auto groups = bin_groups(records, c.groups, c.success_threshold);
  const CalibrationCore core = fit_gamma(groups, c.cal_pbar);
  CurveSettings settings;
  settings.H = c.cal_H;
  settings.L = c.cal_L;
  settings.p_bar = c.cal_pbar;
  settings.solver.grid_size = c.grid;
  const CalibrationResult res = predict_curves(core, groups, sigmas, settings);

  std::ostringstream g;
  g << "group,n,mean_B,mean_mu,p_hat\n";
  for (const auto& gr : groups)
    g << gr.index << ',' << gr.n << ',' << format_double(gr.mean_B) << ',' << format_double(gr.mean_mu) << ','
      << format_double(gr.p_hat) << '\n';
  write_file(dir / "groups.csv", g.str());

  std::ostringstream cv;
  cv << "sigma,group,mean_B,optimal_p,clipped_flag\n";
  for (const auto& curve : res.curves)
    for (const auto& pt : curve.points)
      cv << format_double(curve.sigma) << ',' << pt.group << ',' << format_double(pt.mean_B) << ','
         << format_double(pt.optimal_p) << ',' << (pt.clipped ? 1 : 0) << '\n';
  write_file(dir / "curves.csv", cv.str());

  json doc = {{"config", config_json(c)}, {"records", records.size()}, {"mu_max", core.mu_max}, {"result", to_json(res)}};
  write_file(dir / "calibration.json", doc.dump(2) + "\n");
  out << "gamma=" << format_double(core.gamma) << " groups=" << groups.size() << " records=" << records.size() << '\n';
  return 0;
}

inline std::vector<GameSpec> games_for(const std::string& name) {
  if (name == "prob" || name == "probability") return {ProbabilityGame{}};
  if (name == "reward") return {RewardGame{}};
  if (name == "step") return {StepGame{}};
  if (name == "all") return {ProbabilityGame{}, RewardGame{}, StepGame{}};
  throw ArgumentError("unknown game '" + name + "' (prob, reward, step, all)");
}

inline AgentPopulation population(const RunConfig& c) {
  if (!c.config_path.empty()) {
    std::ifstream f(c.config_path);
    if (!f) throw ArgumentError("cannot open population config '" + c.config_path + "'");
    json j;
    try {
      j = json::parse(f);
    } catch (const json::exception& e) {
      throw ParseError(std::string("population config: ") + e.what());
    }
    return population_from_json(j);
  }
  AgentPopulation pop;
  pop.n = c.n;
  pop.seed = c.seed;
  if (!c.crra_grid.empty()) {
    pop.preferences = CrraGrid{parse_list(c.crra_grid, "--crra-grid")};
  } else {
    auto b = parse_list(c.lambda_log_uniform, "--lambda-log-uniform");
    if (b.size() != 2) throw ArgumentError("--lambda-log-uniform expects lo,hi");
    pop.preferences = CaraLogUniform{b[0], b[1]};
  }
  if (c.wealth) {
    pop.wealth = {WealthSampler::Kind::Constant, *c.wealth, 0.0};
  } else if (!c.wealth_uniform.empty()) {
    auto w = parse_list(c.wealth_uniform, "--wealth-uniform");
    if (w.size() != 2) throw ArgumentError("--wealth-uniform expects lo,hi");
    pop.wealth = {WealthSampler::Kind::Uniform, w[0], w[1]};
  }
  pop.validate();
  return pop;
}

inline constexpr const char* kStepFinalModel =
    "final stage: choose n in 1..5 units; unit n uses the probability and reward of the chosen path's node after n-1 steps";

inline int cmd_simulate(const RunConfig& c, std::ostream& out) {
  const AgentPopulation pop = population(c);
  const auto games = games_for(c.game);
  const fs::path dir = out_dir(c);
  const SimulationResult sim = simulate(games, pop);

  std::ostringstream csv;
  csv << "agent_id,game,option,invested,eu\n";
  for (const auto& r : sim.records)
    csv << r.agent_id << ',' << r.game << ',' << r.option << ',' << format_double(r.invested) << ','
        << format_double(r.eu) << '\n';
  write_file(dir / "choices.csv", csv.str());

  json summary;
  summary["config"] = {{"population", to_json(pop)}, {"game", c.game}};
  summary["metadata"] = {{"tie_rule", "larger investment; step-game indifference picks P"},
                         {"step_final_stage_model", kStepFinalModel}};
  std::size_t averse = 0;
  for (const auto& a : sim.agents) averse += a.risk_averse ? 1 : 0;
  summary["risk_averse_share"] = sim.agents.empty() ? 0.0 : static_cast<double>(averse) / static_cast<double>(sim.agents.size());
  json per_game = json::object();
  for (const char* g : {"probability", "reward", "step", "step_final"}) {
    auto rs = records_for(sim.records, g);
    if (!rs.empty()) per_game[g] = to_json(summarize(rs));
  }
  summary["games"] = per_game;
  auto prob = records_for(sim.records, "probability");
  auto rew = records_for(sim.records, "reward");
  if (!prob.empty() && !rew.empty() && prob.size() >= 2) {
    summary["dispersion"] = to_json(dispersion_compare(prob, rew));
    std::vector<ChoiceRecord> pa, ra;
    for (const auto& r : prob)
      if (sim.agents[r.agent_id].risk_averse) pa.push_back(r);
    for (const auto& r : rew)
      if (sim.agents[r.agent_id].risk_averse) ra.push_back(r);
    if (pa.size() >= 2) summary["dispersion_risk_averse"] = to_json(dispersion_compare(pa, ra));
  }
  if (!sim.step_choices.empty()) summary["step_branches"] = to_json(step_branch_shares(sim.step_choices));
  write_file(dir / "summary.json", summary.dump(2) + "\n");
  out << summary.dump(2) << '\n';
  return 0;
}

inline void error_line(std::ostream& err, const std::string& kind, const std::string& message) {
  err << json{{"error", kind}, {"message", message}}.dump() << '\n';
}

inline void add_preference_flags(CLI::App* app, RunConfig& c) {
  app->add_option("--lambda", c.lambda, "CARA absolute risk aversion");
  app->add_option("--crra", c.crra, "CRRA relative risk aversion sigma");
  app->add_flag("--linear", c.linear, "risk-neutral agent");
}

inline void add_probability_flags(CLI::App* app, RunConfig& c) {
  app->add_option("--B", c.B, "initial wealth")->capture_default_str();
  app->add_option("--H", c.H, "success return")->capture_default_str();
  app->add_option("--L", c.L, "failure return")->capture_default_str();
  app->add_option("--alpha", c.alpha, "cost per unit of probability")->capture_default_str();
  app->add_option("--pbar", c.pbar, "maximum success probability")->capture_default_str();
}

inline void add_reward_flags(CLI::App* app, RunConfig& c) {
  app->add_option("--B", c.B_reward, "initial wealth")->capture_default_str();
  app->add_option("--L", c.L, "failure return")->capture_default_str();
  app->add_option("--p", c.p, "success probability")->capture_default_str();
  app->add_option("--affine", c.affine, "H(c) = h0 + m c, given as h0,m")->capture_default_str();
  app->add_option("--power", c.power, "H(c) = h0 + m c^theta, given as h0,m,theta");
  app->add_option("--cmax", c.cmax, "maximum investment")->capture_default_str();
}

inline void add_output_flags(CLI::App* app, RunConfig& c) {
  app->add_option("--out", c.out, "output directory")->capture_default_str();
  app->add_option("--format", c.format, "report format")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
}

inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig c;
  CLI::App app{"Investment under risk: corner solutions, thresholds, calibration and game simulation"};
  app.name("riskinv");
  app.require_subcommand(1);

  auto* solve = app.add_subcommand("solve", "optimal investment for one model");
  solve->require_subcommand(1);
  for (const char* model : {"prob", "reward", "credit"}) {
    auto* sub = solve->add_subcommand(model, std::string("solve the ") + model + " model");
    add_preference_flags(sub, c);
    if (std::string(model) == "reward")
      add_reward_flags(sub, c);
    else
      add_probability_flags(sub, c);
    sub->add_option("--grid", c.grid, "search grid size")->capture_default_str();
    sub->add_flag("--curve", c.curve, "also write curve.csv");
    sub->add_flag("--plot", c.plot, "also write curve.csv and a gnuplot script");
    sub->add_option("--curve-points", c.curve_points, "samples in curve.csv")->capture_default_str();
    add_output_flags(sub, c);
  }

  auto* sweep = app.add_subcommand("sweep", "solve a model over a range of one parameter");
  sweep->require_subcommand(1);
  for (const char* model : {"prob", "reward", "credit"}) {
    auto* sub = sweep->add_subcommand(model, std::string("sweep the ") + model + " model");
    add_preference_flags(sub, c);
    if (std::string(model) == "reward")
      add_reward_flags(sub, c);
    else
      add_probability_flags(sub, c);
    sub->add_option("--param", c.param, "parameter to vary")->required();
    sub->add_option("--from", c.from)->required();
    sub->add_option("--to", c.to)->required();
    sub->add_option("--steps", c.steps)->capture_default_str();
    sub->add_option("--grid", c.grid, "search grid size")->capture_default_str();
    add_output_flags(sub, c);
  }

  auto* threshold = app.add_subcommand("threshold", "risk-aversion or wealth threshold");
  threshold->require_subcommand(1);
  auto* th_lambda = threshold->add_subcommand("lambda", "CARA risk-aversion threshold");
  add_probability_flags(th_lambda, c);
  th_lambda->add_flag("--credit", c.credit, "use the loan-financed model");
  th_lambda->add_option("--rel-tol", c.lambda_rel_tol)->capture_default_str();
  add_output_flags(th_lambda, c);
  auto* th_wealth = threshold->add_subcommand("wealth", "initial-wealth threshold");
  add_probability_flags(th_wealth, c);
  add_preference_flags(th_wealth, c);
  th_wealth->add_flag("--credit", c.credit, "use the loan-financed model with lambda(B) = k / B");
  th_wealth->add_option("--k", c.k, "scale of lambda(B) = k / B")->capture_default_str();
  th_wealth->add_option("--wealth-lo", c.wealth_lo, "lower end of the wealth bracket")->capture_default_str();
  th_wealth->add_option("--tol", c.wealth_tol, "absolute tolerance in B")->capture_default_str();
  th_wealth->add_option("--grid", c.grid, "search grid size")->capture_default_str();
  add_output_flags(th_wealth, c);

  auto* cal = app.add_subcommand("calibrate", "bin survey data and predict optimal-investment curves");
  cal->add_option("--input", c.input, "survey CSV");
  cal->add_flag("--synthetic", c.synthetic, "use the built-in synthetic survey");
  cal->add_option("--groups", c.groups)->capture_default_str();
  cal->add_option("--sigmas", c.sigmas)->capture_default_str();
  cal->add_option("--success-threshold", c.success_threshold, "likert score counted as success")->capture_default_str();
  cal->add_option("--H", c.cal_H)->capture_default_str();
  cal->add_option("--L", c.cal_L)->capture_default_str();
  cal->add_option("--pbar", c.cal_pbar)->capture_default_str();
  cal->add_option("--seed", c.seed)->capture_default_str();
  cal->add_option("--grid", c.grid)->capture_default_str();
  cal->add_option("--out", c.out)->capture_default_str();

  auto* sim = app.add_subcommand("simulate", "synthetic agents playing the investment games");
  sim->add_option("--config", c.config_path, "population JSON (overrides sampler flags)");
  sim->add_option("--game", c.game)->capture_default_str();
  sim->add_option("--n", c.n)->capture_default_str();
  sim->add_option("--lambda-log-uniform", c.lambda_log_uniform, "lo,hi")->capture_default_str();
  sim->add_option("--crra-grid", c.crra_grid, "comma-separated sigmas");
  sim->add_option("--wealth", c.wealth, "constant outside wealth");
  sim->add_option("--wealth-uniform", c.wealth_uniform, "lo,hi");
  sim->add_option("--seed", c.seed)->capture_default_str();
  sim->add_option("--out", c.out)->capture_default_str();

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    error_line(err, "usage", e.what());
    return 2;
  }

  try {
    for (auto* sub : app.get_subcommands()) {
      c.command = sub->get_name();
      auto nested = sub->get_subcommands();
      if (!nested.empty()) c.target = nested.front()->get_name();
    }
    if (c.command == "solve") return cmd_solve(c, out);
    if (c.command == "sweep") return cmd_sweep(c, out);
    if (c.command == "threshold") return cmd_threshold(c, out);
    if (c.command == "calibrate") return cmd_calibrate(c, out);
    if (c.command == "simulate") return cmd_simulate(c, out);
    error_line(err, "usage", "unknown command");
    return 2;
  } catch (const Error& e) {
    error_line(err, e.kind(), e.what());
  } catch (const json::exception& e) {
    error_line(err, "parse", e.what());
  } catch (const std::exception& e) {
    error_line(err, "internal", e.what());
  }
  return 1;
}

}  // namespace riskinv::cli

#endif  // RISKINV_TOOLS_CLI_HPP
