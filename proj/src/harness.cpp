#include "spuct/harness.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "spuct/parallel.hpp"
#include "spuct/stats.hpp"

namespace spuct {

namespace {

// Seed streams derived from the master seed.
constexpr std::uint64_t kTreeStream = 1;
constexpr std::uint64_t kRunStream = 2;
constexpr std::uint64_t kEpisodeStream = 3;

bool is_grid_env(const std::string& name) {
  return name == "frozenlake4" || name == "frozenlake8" || name == "taxi";
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep)) out.push_back(item);
  if (!text.empty() && text.back() == sep) out.emplace_back();
  return out;
}

double parse_real(const std::string& text, const char* what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) throw std::invalid_argument(std::string("cannot parse ") + what + " '" + text + "'");
  return v;
}

}  // namespace

// ---------------------------------------------------------------------------
// Algorithms

AlgorithmSpec algorithm_preset(const std::string& name, double p, double C) {
  AlgorithmSpec spec;
  spec.C = C;
  if (name == "uct") {
    spec.name = name;
    spec.p = 1.0;
    spec.bonus = BonusKind::Logarithmic;
  } else if (name == "power_uct") {
    spec.name = name;
    spec.p = p;
    spec.bonus = BonusKind::Logarithmic;
  } else if (name == "fixed_depth_mcts" || name == "fdmcts") {
    spec.name = "fixed_depth_mcts";
    spec.p = 1.0;
    spec.bonus = BonusKind::FixedPolynomial;
  } else if (name == "stochastic_power_uct" || name == "spuct") {
    spec.name = "stochastic_power_uct";
    spec.p = p;
    spec.bonus = BonusKind::FixedPolynomial;
  } else {
    throw std::invalid_argument("unknown algorithm '" + name + "'");
  }
  return spec;
}

std::string algorithm_name(double p, BonusKind bonus) {
  if (bonus == BonusKind::Logarithmic) return p == 1.0 ? "uct" : "power_uct";
  return "stochastic_power_uct";
}

AlgorithmSpec parse_algorithm(const std::string& text, double default_p, std::optional<double> default_C,
                              BonusKind default_bonus, const std::string& env) {
  const std::vector<std::string> parts = split(text, ':');
  if (parts.empty() || parts.size() > 4 || parts[0].empty()) throw std::invalid_argument("bad algorithm entry '" + text + "'");
  const double p = parts.size() > 1 && !parts[1].empty() ? parse_real(parts[1], "p") : default_p;
  AlgorithmSpec spec = algorithm_preset(parts[0], p, 1.0);
  if (spec.name == "stochastic_power_uct") {
    spec.bonus = parts.size() > 3 && !parts[3].empty() ? parse_bonus_kind(parts[3]) : default_bonus;
  } else if (parts.size() > 3 && !parts[3].empty()) {
    throw std::invalid_argument("bonus kind is fixed for '" + parts[0] + "'");
  }
  if (parts.size() > 2 && !parts[2].empty()) {
    spec.C = parse_real(parts[2], "C");
  } else if (default_C) {
    spec.C = *default_C;
  } else {
    spec.C = tuned_exploration_constant(env, spec.name, spec.p).value_or(1.0);
    if (spec.bonus == BonusKind::AdaptivePolynomial && env == "synthetic") spec.C = 0.01;
  }
  if (!(spec.C > 0.0) || !std::isfinite(spec.C)) throw std::invalid_argument("C must be positive in '" + text + "'");
  if (!(spec.p >= 1.0) || !std::isfinite(spec.p)) throw std::invalid_argument("p must be >= 1 in '" + text + "'");
  return spec;
}

std::string algorithm_label(const AlgorithmSpec& spec) {
  if (spec.name == "uct" || spec.name == "fixed_depth_mcts") return spec.name;
  std::string label = spec.name + ":" + format_double(spec.p);
  if (spec.bonus == BonusKind::AdaptivePolynomial) label += ":adaptive";
  return label;
}

ScheduleInfeasible::ScheduleInfeasible(const std::string& algorithm, Infeasibility report)
    : std::runtime_error(algorithm + ": adaptive schedule infeasible at depth index " + std::to_string(report.depth) +
                         " (" + report.condition + ": " + format_double(report.lhs) + " vs " + format_double(report.rhs) + ")"),
      report_(std::move(report)) {}

AlgorithmConfig make_algorithm_config(const AlgorithmSpec& spec, int horizon, double gamma, int rollout_cap,
                                      TrajectoryMode mode) {
  AlgorithmConfig cfg;
  cfg.p = spec.p;
  cfg.horizon = horizon;
  cfg.gamma = gamma;
  cfg.rollout_depth_cap = rollout_cap;
  cfg.mode = mode;
  switch (spec.bonus) {
    case BonusKind::FixedPolynomial:
      cfg.schedule = make_fixed_schedule(spec.C, horizon);
      break;
    case BonusKind::Logarithmic:
      cfg.schedule = make_log_schedule(spec.C, horizon);
      break;
    case BonusKind::AdaptivePolynomial: {
      DeriveResult r = derive_schedule(horizon, spec.beta_H, spec.p, spec.C);
      if (auto* bad = std::get_if<Infeasibility>(&r)) throw ScheduleInfeasible(algorithm_label(spec), *bad);
      cfg.schedule = std::get<BonusSchedule>(std::move(r));
      break;
    }
  }
  validate_config(cfg);
  return cfg;
}

std::optional<double> tuned_exploration_constant(const std::string& env, const std::string& algorithm, double p) {
  struct Entry {
    const char* env;
    const char* algorithm;
    double p;  // 0 matches any p
    double C;
  };
  static constexpr Entry kTable[] = {
      {"frozenlake4", "uct", 0, 1.25},
      {"frozenlake4", "stochastic_power_uct", 1.0, 1.5},
      {"frozenlake4", "stochastic_power_uct", 2.0, 1.0},
      {"frozenlake4", "stochastic_power_uct", 2.2, 1.0},
      {"frozenlake8", "uct", 0, 1.5},
      {"frozenlake8", "stochastic_power_uct", 1.0, 1.0},
      {"frozenlake8", "stochastic_power_uct", 2.0, 0.75},
      {"frozenlake8", "stochastic_power_uct", 2.2, 0.75},
      {"taxi", "uct", 0, 1.5},
      {"taxi", "stochastic_power_uct", 1.0, 1.5},
      {"taxi", "stochastic_power_uct", 2.0, 1.5},
      {"taxi", "stochastic_power_uct", 2.2, 1.0},
      {"synthetic", "uct", 0, 0.25},
      {"synthetic", "fixed_depth_mcts", 0, 0.1},
      {"synthetic", "stochastic_power_uct", 0, 0.25},
      {"synthetic", "power_uct", 0, 0.5},
  };
  for (const Entry& e : kTable) {
    if (env == e.env && algorithm == e.algorithm && (e.p == 0 || e.p == p)) return e.C;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Configuration

void validate_experiment(const ExperimentConfig& cfg) {
  if (cfg.algorithms.empty()) throw std::invalid_argument("experiment: no algorithms");
  if (cfg.budgets.empty()) throw std::invalid_argument("experiment: no simulation budgets");
  if (cfg.budgets.front() == 0) throw std::invalid_argument("experiment: simulation budgets must be >= 1");
  for (std::size_t i = 1; i < cfg.budgets.size(); ++i) {
    if (cfg.budgets[i] <= cfg.budgets[i - 1]) throw std::invalid_argument("experiment: budgets must be strictly increasing");
  }
  if (cfg.trials < 1) throw std::invalid_argument("experiment: trials must be >= 1");
  if (cfg.runs_per_tree < 1) throw std::invalid_argument("experiment: runs_per_tree must be >= 1");
  if (cfg.eval_runs < 1) throw std::invalid_argument("experiment: eval_runs must be >= 1");
  if (cfg.workers < 1) throw std::invalid_argument("experiment: workers must be >= 1");
  if (cfg.env.name != "synthetic" && !is_grid_env(cfg.env.name)) throw std::invalid_argument("experiment: unknown environment '" + cfg.env.name + "'");
  if (cfg.horizon && *cfg.horizon < 1) throw std::invalid_argument("experiment: horizon must be >= 1");
  if (cfg.rollout_cap && *cfg.rollout_cap < 0) throw std::invalid_argument("experiment: rollout_cap must be >= 0");
}

std::unique_ptr<GenerativeModel> make_grid_env(const EnvSpec& env) {
  const bool taxi = env.name == "taxi";
  if (!is_grid_env(env.name)) throw std::invalid_argument("not a grid environment: '" + env.name + "'");
  const double gamma = env.gamma.value_or(0.99);
  const int cap = env.step_cap.value_or(taxi ? 500 : 200);
  GridLayout layout = !env.layout_file.empty() ? load_layout(env.layout_file)
                      : taxi                   ? taxi_layout()
                      : env.name == "frozenlake4" ? frozenlake4_layout()
                                                  : frozenlake8_layout();
  if (taxi) return std::make_unique<Taxi>(std::move(layout), gamma, cap);
  return std::make_unique<FrozenLake>(std::move(layout), gamma, cap);
}

int effective_horizon(const ExperimentConfig& cfg) {
  if (cfg.horizon) return *cfg.horizon;
  return cfg.env.name == "synthetic" ? cfg.env.tree.depth : 100;
}

int effective_rollout_cap(const ExperimentConfig& cfg) {
  if (cfg.rollout_cap) return *cfg.rollout_cap;
  return cfg.env.name == "synthetic" ? cfg.env.tree.depth : 100;
}

// ---------------------------------------------------------------------------
// Results

std::string summary_csv(const std::vector<SummaryRow>& rows) {
  std::ostringstream out;
  out << "env,algorithm,p,C,n_simulations,metric,count,mean,half_width,p_vs_best\n";
  for (const SummaryRow& r : rows) {
    out << r.env << ',' << r.algorithm << ',' << format_double(r.p) << ',' << format_double(r.C) << ',' << r.n_simulations
        << ',' << r.metric << ',' << r.count << ',' << format_double(r.mean) << ',' << format_double(r.half_width) << ','
        << (r.p_vs_best ? format_double(*r.p_vs_best) : "") << '\n';
  }
  return out.str();
}

namespace {

struct PreparedAlgorithm {
  AlgorithmSpec spec;
  AlgorithmConfig config;
};

std::vector<PreparedAlgorithm> prepare(const ExperimentConfig& cfg, double gamma, ExperimentResult& result) {
  std::vector<PreparedAlgorithm> out;
  for (const AlgorithmSpec& spec : cfg.algorithms) {
    try {
      out.push_back({spec, make_algorithm_config(spec, effective_horizon(cfg), gamma, effective_rollout_cap(cfg), cfg.mode)});
    } catch (const ScheduleInfeasible& e) {
      result.skipped.push_back(e.what());
    }
  }
  return out;
}

/// Records sharing (algorithm, p, C, n, metric) in first-seen order.
std::vector<std::vector<const ExperimentRecord*>> group_cells(const std::vector<ExperimentRecord>& records,
                                                              const std::string& metric) {
  std::vector<std::vector<const ExperimentRecord*>> cells;
  for (const ExperimentRecord& r : records) {
    if (r.metric != metric) continue;
    auto same = [&](const std::vector<const ExperimentRecord*>& c) {
      const ExperimentRecord& f = *c.front();
      return f.algorithm == r.algorithm && f.p == r.p && f.C == r.C && f.n_simulations == r.n_simulations;
    };
    auto it = std::find_if(cells.begin(), cells.end(), same);
    if (it == cells.end()) {
      cells.push_back({&r});
    } else {
      it->push_back(&r);
    }
  }
  return cells;
}

SummaryRow summary_of(const std::vector<const ExperimentRecord*>& cell, SampleSummary& stats) {
  std::vector<double> xs;
  for (const ExperimentRecord* r : cell) xs.push_back(r->value);
  stats = summarize(xs);
  const ExperimentRecord& f = *cell.front();
  SummaryRow row;
  row.env = f.env;
  row.algorithm = f.algorithm;
  row.p = f.p;
  row.C = f.C;
  row.n_simulations = f.n_simulations;
  row.metric = f.metric;
  row.count = stats.count;
  row.mean = stats.mean;
  return row;
}

}  // namespace

ExperimentResult run_synthetic_convergence(const ExperimentConfig& cfg) {
  validate_experiment(cfg);
  if (cfg.env.name != "synthetic") throw std::invalid_argument("synthetic convergence needs the synthetic environment");
  ExperimentResult result;
  const std::vector<PreparedAlgorithm> algs = prepare(cfg, 1.0, result);

  const std::size_t trees = static_cast<std::size_t>((cfg.trials + cfg.runs_per_tree - 1) / cfg.runs_per_tree);
  std::vector<std::unique_ptr<SyntheticTree>> models;
  std::vector<double> exact;
  for (std::size_t t = 0; t < trees; ++t) {
    SyntheticTreeSpec spec = cfg.env.tree;
    spec.seed = derive_seed(cfg.master_seed, kTreeStream, t);
    models.push_back(build_synthetic_tree(spec));
    exact.push_back(exact_root_value(*models.back(), 1.0, effective_horizon(cfg), effective_rollout_cap(cfg)));
  }

  const std::size_t n_algs = algs.size();
  auto work = [&](std::size_t item) {
    const std::size_t trial = item / n_algs;
    const PreparedAlgorithm& alg = algs[item % n_algs];
    const std::size_t tree = trial / static_cast<std::size_t>(cfg.runs_per_tree);
    const std::uint64_t seed = derive_seed(cfg.master_seed, kRunStream, trial);
    const SyntheticTree& model = *models[tree];
    Rng rng(seed);
    Planner planner(model, model.initial_state(), alg.config);
    std::vector<ExperimentRecord> rows;
    for (std::uint64_t n : cfg.budgets) {
      planner.run(n - planner.trajectories(), rng);
      const double error = std::abs(planner.result().root_value - exact[tree]);
      rows.push_back({model.name(), alg.spec.name, alg.spec.p, alg.spec.C, n, seed, "root_abs_error", error});
    }
    return rows;
  };
  const auto per_item = run_indexed<std::vector<ExperimentRecord>>(static_cast<std::size_t>(cfg.trials) * n_algs, cfg.workers, work);
  for (const auto& rows : per_item) result.records.insert(result.records.end(), rows.begin(), rows.end());

  for (const auto& cell : group_cells(result.records, "root_abs_error")) {
    SampleSummary stats;
    SummaryRow row = summary_of(cell, stats);
    row.half_width = 2.0 * stats.stderr_mean();
    result.summary.push_back(row);
  }

  if (cfg.budgets.size() >= 3) {
    for (const PreparedAlgorithm& alg : algs) {
      std::vector<double> budgets;
      std::vector<double> errors;
      for (const SummaryRow& row : result.summary) {
        if (row.algorithm == alg.spec.name && row.p == alg.spec.p && row.C == alg.spec.C) {
          budgets.push_back(static_cast<double>(row.n_simulations));
          errors.push_back(row.mean);
        }
      }
      if (std::any_of(errors.begin(), errors.end(), [](double e) { return !(e > 0.0); })) continue;
      const double slope = fit_polynomial_rate(budgets, errors);
      const std::string env = models.front()->name();
      result.records.push_back({env, alg.spec.name, alg.spec.p, alg.spec.C, 0, cfg.master_seed, "slope", slope});
      SummaryRow row{env, alg.spec.name, alg.spec.p, alg.spec.C, 0, "slope", budgets.size(), slope, 0.0, std::nullopt};
      result.summary.push_back(row);
    }
  }
  return result;
}

double evaluate_episode(const GenerativeModel& model, const AlgorithmConfig& cfg, std::uint64_t simulations,
                        std::uint64_t seed) {
  if (simulations < 1) throw std::invalid_argument("evaluate_episode: need at least one simulation per step");
  Rng env_rng(seed);
  Rng plan_rng(derive_seed(seed, 1, 0));
  State s = model.initial_state();
  double ret = 0.0;
  double discount = 1.0;
  for (int step = 0; step < model.step_cap(); ++step) {
    if (model.is_terminal(s)) break;
    const PlanResult plan_result = plan(model, s, cfg, simulations, plan_rng);
    const StepResult r = model.sample(s, plan_result.best_action, env_rng);
    ret += discount * r.reward;
    discount *= model.discount();
    if (r.terminal) break;
    s = r.next;
  }
  return ret;
}

ExperimentResult run_control_evaluation(const ExperimentConfig& cfg) {
  validate_experiment(cfg);
  if (!is_grid_env(cfg.env.name)) throw std::invalid_argument("control evaluation needs frozenlake4, frozenlake8 or taxi");
  ExperimentResult result;
  const std::unique_ptr<GenerativeModel> model = make_grid_env(cfg.env);
  const std::vector<PreparedAlgorithm> algs = prepare(cfg, model->discount(), result);

  const std::size_t n_algs = algs.size();
  const std::size_t n_budgets = cfg.budgets.size();
  const std::size_t runs = static_cast<std::size_t>(cfg.eval_runs);
  // Item order: algorithm, budget, run.
  auto work = [&](std::size_t item) {
    const std::size_t run = item % runs;
    const std::size_t budget = (item / runs) % n_budgets;
    const PreparedAlgorithm& alg = algs[item / (runs * n_budgets)];
    const std::uint64_t seed = derive_seed(cfg.master_seed, kEpisodeStream, run);
    const double ret = evaluate_episode(*model, alg.config, cfg.budgets[budget], seed);
    return ExperimentRecord{model->name(), alg.spec.name, alg.spec.p, alg.spec.C, cfg.budgets[budget], seed, "discounted_return", ret};
  };
  result.records = run_indexed<ExperimentRecord>(n_algs * n_budgets * runs, cfg.workers, work);

  std::vector<SampleSummary> stats;
  for (const auto& cell : group_cells(result.records, "discounted_return")) {
    SampleSummary s;
    SummaryRow row = summary_of(cell, s);
    row.half_width = 2.0 * s.stddev();
    result.summary.push_back(row);
    stats.push_back(s);
  }
  for (std::uint64_t n : cfg.budgets) {
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < result.summary.size(); ++i) {
      if (result.summary[i].n_simulations != n) continue;
      if (!best || result.summary[i].mean > result.summary[*best].mean) best = i;
    }
    if (!best) continue;
    const SampleSummary& b = stats[*best];
    for (std::size_t i = 0; i < result.summary.size(); ++i) {
      if (result.summary[i].n_simulations != n || stats[i].count < 2 || b.count < 2) continue;
      result.summary[i].p_vs_best =
          welch_t_test(stats[i].mean, stats[i].variance, stats[i].count, b.mean, b.variance, b.count);
    }
  }
  return result;
}

GridSearchResult grid_search_C(const ExperimentConfig& cfg, const std::vector<double>& candidates) {
  if (candidates.empty()) throw std::invalid_argument("grid search: no candidate C values");
  const bool synthetic = cfg.env.name == "synthetic";
  GridSearchResult out;
  struct Best {
    AlgorithmSpec spec;
    double C;
    double mean;
    std::string env;
  };
  std::vector<std::pair<std::string, Best>> best;  // insertion order
  for (double C : candidates) {
    ExperimentConfig run = cfg;
    for (AlgorithmSpec& a : run.algorithms) a.C = C;
    ExperimentResult r = synthetic ? run_synthetic_convergence(run) : run_control_evaluation(run);
    out.result.records.insert(out.result.records.end(), r.records.begin(), r.records.end());
    out.result.summary.insert(out.result.summary.end(), r.summary.begin(), r.summary.end());
    for (std::string& s : r.skipped) {
      if (std::find(out.result.skipped.begin(), out.result.skipped.end(), s) == out.result.skipped.end()) out.result.skipped.push_back(s);
    }
    for (const SummaryRow& row : r.summary) {
      if (row.n_simulations != cfg.budgets.back() || row.metric == "slope") continue;
      const auto spec_it = std::find_if(run.algorithms.begin(), run.algorithms.end(), [&](const AlgorithmSpec& a) {
        return a.name == row.algorithm && a.p == row.p;
      });
      const std::string label = algorithm_label(*spec_it);
      auto it = std::find_if(best.begin(), best.end(), [&](const auto& e) { return e.first == label; });
      const bool better = it == best.end() || (synthetic ? row.mean < it->second.mean : row.mean > it->second.mean);
      if (it == best.end()) {
        best.push_back({label, {*spec_it, C, row.mean, row.env}});
      } else if (better) {
        it->second = {*spec_it, C, row.mean, row.env};
      }
    }
  }
  for (const auto& [label, b] : best) {
    out.best_C[label] = b.C;
    out.result.records.push_back({b.env, b.spec.name + "/best", b.spec.p, b.C, cfg.budgets.back(), cfg.master_seed,
                                  synthetic ? "root_abs_error" : "discounted_return", b.mean});
  }
  return out;
}

}  // namespace spuct
