#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "spuct/envs.hpp"
#include "spuct/mcts.hpp"
#include "spuct/records.hpp"
#include "spuct/schedule.hpp"

namespace spuct {

// ---------------------------------------------------------------------------
// Algorithms

/// Named planner variant. Names: "uct" (p = 1, log bonus), "power_uct"
/// (p, log bonus), "fixed_depth_mcts" (p = 1, fixed polynomial bonus),
/// "stochastic_power_uct" (p, fixed or adaptive polynomial bonus).
struct AlgorithmSpec {
  std::string name = "stochastic_power_uct";
  double p = 2.0;
  BonusKind bonus = BonusKind::FixedPolynomial;
  double C = 1.0;
  double beta_H = 120.0;  // adaptive schedules only
};

/// Builds a spec from a preset name, filling p and the bonus kind.
AlgorithmSpec algorithm_preset(const std::string& name, double p, double C);
/// Canonical name for a (p, bonus) combination.
std::string algorithm_name(double p, BonusKind bonus);
/// Parses "name[:p[:C[:bonus]]]". Missing fields fall back to the defaults;
/// a missing C falls back to default_C, then to the tuned constant for `env`,
/// then to 1. Fixed-p presets ignore the p field.
AlgorithmSpec parse_algorithm(const std::string& text, double default_p, std::optional<double> default_C,
                              BonusKind default_bonus, const std::string& env);
/// Key for per-algorithm maps: name plus p for the power-mean variants.
std::string algorithm_label(const AlgorithmSpec& spec);

class ScheduleInfeasible : public std::runtime_error {
 public:
  ScheduleInfeasible(const std::string& algorithm, Infeasibility report);
  const Infeasibility& report() const { return report_; }

 private:
  Infeasibility report_;
};

/// Throws ScheduleInfeasible when an adaptive schedule cannot be derived.
AlgorithmConfig make_algorithm_config(const AlgorithmSpec& spec, int horizon, double gamma, int rollout_cap,
                                      TrajectoryMode mode = TrajectoryMode::TruncateAtLeaf);

/// Exploration constants selected by grid search in the reference
/// experiments; nullopt when no tuned value is known.
std::optional<double> tuned_exploration_constant(const std::string& env, const std::string& algorithm, double p);

// ---------------------------------------------------------------------------
// Experiment configuration

enum class ExperimentKind { SyntheticConvergence, ControlEvaluation, ConcentrationProbe, GridSearch };

struct EnvSpec {
  std::string name = "synthetic";  // synthetic | frozenlake4 | frozenlake8 | taxi
  SyntheticTreeSpec tree{4, 2, 0.5, 0.2, 0};
  std::string layout_file;  // optional override for grid environments
  std::optional<double> gamma;
  std::optional<int> step_cap;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::SyntheticConvergence;
  EnvSpec env;
  std::vector<AlgorithmSpec> algorithms;
  std::vector<std::uint64_t> budgets;
  std::uint64_t master_seed = 0;
  int trials = 25;         // synthetic: tree seed x run seed pairs
  int runs_per_tree = 5;   // synthetic: consecutive trials share a tree
  int eval_runs = 100;     // control: evaluation episodes per (algorithm, budget)
  std::optional<int> horizon;      // default: tree depth, or 100 for grid worlds
  std::optional<int> rollout_cap;  // default: tree depth, or 100 for grid worlds
  TrajectoryMode mode = TrajectoryMode::TruncateAtLeaf;
  int workers = 1;
  std::string output;
  std::vector<double> C_grid{0.25, 0.5, 0.75, 1.0, 1.25, 1.5};
};

/// Throws std::invalid_argument on: no algorithms, empty or non-increasing
/// budgets, zero budget, trials < 1, unknown environment.
void validate_experiment(const ExperimentConfig& cfg);

/// Grid environment by name (frozenlake4 | frozenlake8 | taxi).
std::unique_ptr<GenerativeModel> make_grid_env(const EnvSpec& env);

int effective_horizon(const ExperimentConfig& cfg);
int effective_rollout_cap(const ExperimentConfig& cfg);

// ---------------------------------------------------------------------------
// Results

/// Aggregate over trials for one (algorithm, budget) cell.
struct SummaryRow {
  std::string env;
  std::string algorithm;
  double p = 1.0;
  double C = 0.0;
  std::uint64_t n_simulations = 0;
  std::string metric;
  std::uint64_t count = 0;
  double mean = 0.0;
  double half_width = 0.0;  // 2 * stderr (convergence) or 2 * stddev (control)
  /// Welch p-value against the best mean at the same budget (control only).
  std::optional<double> p_vs_best;
};

struct ExperimentResult {
  std::vector<ExperimentRecord> records;
  std::vector<SummaryRow> summary;
  std::vector<std::string> skipped;  // "algorithm: reason"
};

std::string summary_csv(const std::vector<SummaryRow>& rows);

/// Per (tree seed, run seed, algorithm, budget): |V_n(s0) - exact root value|.
/// Appends one slope row per algorithm when every mean error is positive.
ExperimentResult run_synthetic_convergence(const ExperimentConfig& cfg);

/// Per (algorithm, budget, evaluation run): discounted return of an episode
/// that re-plans from scratch at every real step.
ExperimentResult run_control_evaluation(const ExperimentConfig& cfg);

/// One evaluation episode; exposed for tests and the benchmark.
double evaluate_episode(const GenerativeModel& model, const AlgorithmConfig& cfg, std::uint64_t simulations,
                        std::uint64_t seed);

struct GridSearchResult {
  ExperimentResult result;
  std::map<std::string, double> best_C;  // keyed by algorithm_label
};

/// Repeats the experiment for each candidate C and picks, per algorithm, the
/// lowest mean error (synthetic) or highest mean return (control) at the
/// largest budget. Ties go to the earlier candidate.
GridSearchResult grid_search_C(const ExperimentConfig& cfg, const std::vector<double>& candidates);

// ---------------------------------------------------------------------------
// Concentration probes

enum class ArmKind { Bernoulli, Constant };

struct ArmSpec {
  ArmKind kind = ArmKind::Bernoulli;
  double mean = 0.5;
};

struct BanditProbeConfig {
  std::vector<ArmSpec> arms;
  double p = 2.0;
  BonusSchedule schedule = make_fixed_schedule(1.0, 1);
  std::vector<std::uint64_t> budgets;
  std::vector<double> eps_grid;
  int replications = 10000;
  std::uint64_t seed = 0;
  int workers = 1;
};

/// Lemma-style Q estimator: Q_n = mean(X_1..n) + gamma * sum_m (N_m / n) V_m,hat
/// where X_i ~ Bernoulli(reward_mean), successors S_i ~ probs and the child
/// estimator V_m,hat is the mean of N_m Bernoulli(child_values[m]) draws.
struct LemmaProbeConfig {
  double reward_mean = 0.5;
  ArmKind reward_kind = ArmKind::Bernoulli;
  std::vector<double> probs;
  std::vector<double> child_values;
  ArmKind child_kind = ArmKind::Bernoulli;
  double gamma = 0.99;
  std::vector<std::uint64_t> budgets;
  std::vector<double> eps_grid;
  int replications = 10000;
  std::uint64_t seed = 0;
  int workers = 1;
};

struct ProbeResult {
  std::vector<ExperimentRecord> records;
  /// frequency[e][b] = P(|estimate - target| > eps_grid[e]) at budgets[b].
  std::vector<std::vector<double>> frequency;
  /// Mean absolute deviation per budget.
  std::vector<double> mean_abs_error;
  /// Slope of log(mean_abs_error) against log(n); nullopt if not fittable.
  std::optional<double> rate;
};

/// Runs the optimistic bandit strategy (each arm once, then argmax of
/// mean + bonus at depth 0) and probes the power-mean estimate against the
/// best arm mean. Throws std::invalid_argument for fewer than 2 arms or a
/// non-unique best mean.
ProbeResult run_bandit_probe(const BanditProbeConfig& cfg);
ProbeResult run_lemma_probe(const LemmaProbeConfig& cfg);

// ---------------------------------------------------------------------------
// Flat key = value configuration

/// Parses "key = value" lines; '#' starts a comment. Throws
/// std::invalid_argument on malformed lines.
std::map<std::string, std::string> parse_config_text(const std::string& text);

/// Builds a configuration from flat settings (keys mirror the CLI flags).
/// Throws std::invalid_argument on unknown keys or unparsable values.
ExperimentConfig experiment_from_settings(ExperimentKind kind, const std::map<std::string, std::string>& settings);

/// Probe settings: probe = bandit | lemma, arms, eps, replications, ...
BanditProbeConfig bandit_probe_from_settings(const std::map<std::string, std::string>& settings);
LemmaProbeConfig lemma_probe_from_settings(const std::map<std::string, std::string>& settings);

/// Schedule as config lines: kind, C, horizon, p and one
/// "depth_i = alpha beta b" line per index for adaptive schedules.
std::string schedule_to_config(const BonusSchedule& s);
BonusSchedule schedule_from_config(const std::map<std::string, std::string>& settings);

}  // namespace spuct
