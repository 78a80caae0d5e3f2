#include <gtest/gtest.h>

#include <cmath>

#include "spuct/harness.hpp"

using namespace spuct;

namespace {

ExperimentConfig synthetic_config(std::vector<std::uint64_t> budgets) {
  ExperimentConfig cfg;
  cfg.env.tree = {3, 2, 0.5, 0.2, 0};
  cfg.algorithms = {algorithm_preset("stochastic_power_uct", 2.0, 0.25), algorithm_preset("uct", 1.0, 0.25)};
  cfg.budgets = std::move(budgets);
  cfg.trials = 6;
  cfg.runs_per_tree = 3;
  return cfg;
}

ExperimentConfig control_config() {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::ControlEvaluation;
  cfg.env.name = "frozenlake4";
  cfg.algorithms = {algorithm_preset("stochastic_power_uct", 2.0, 1.0), algorithm_preset("uct", 1.0, 1.25)};
  cfg.budgets = {8, 32};
  cfg.eval_runs = 6;
  cfg.horizon = 20;
  cfg.rollout_cap = 20;
  return cfg;
}

}  // namespace

TEST(Algorithms, Presets) {
  EXPECT_EQ(algorithm_preset("uct", 3.0, 1.0).p, 1.0);
  EXPECT_EQ(algorithm_preset("uct", 3.0, 1.0).bonus, BonusKind::Logarithmic);
  EXPECT_EQ(algorithm_preset("power_uct", 3.0, 1.0).p, 3.0);
  EXPECT_EQ(algorithm_preset("fdmcts", 3.0, 1.0).name, "fixed_depth_mcts");
  EXPECT_EQ(algorithm_preset("fdmcts", 3.0, 1.0).p, 1.0);
  EXPECT_EQ(algorithm_preset("spuct", 3.0, 1.0).name, "stochastic_power_uct");
  EXPECT_THROW(algorithm_preset("alphazero", 1.0, 1.0), std::invalid_argument);
  EXPECT_EQ(algorithm_name(1.0, BonusKind::Logarithmic), "uct");
  EXPECT_EQ(algorithm_name(2.0, BonusKind::Logarithmic), "power_uct");
  EXPECT_EQ(algorithm_name(2.0, BonusKind::FixedPolynomial), "stochastic_power_uct");
}

TEST(Algorithms, ParseEntries) {
  const AlgorithmSpec a = parse_algorithm("stochastic_power_uct:4:0.3:adaptive", 2.0, std::nullopt, BonusKind::FixedPolynomial, "taxi");
  EXPECT_EQ(a.p, 4.0);
  EXPECT_EQ(a.C, 0.3);
  EXPECT_EQ(a.bonus, BonusKind::AdaptivePolynomial);
  EXPECT_EQ(algorithm_label(a), "stochastic_power_uct:4:adaptive");

  const AlgorithmSpec tuned = parse_algorithm("spuct", 2.0, std::nullopt, BonusKind::FixedPolynomial, "frozenlake8");
  EXPECT_EQ(tuned.C, 0.75);
  EXPECT_EQ(algorithm_label(tuned), "stochastic_power_uct:2");
  EXPECT_EQ(parse_algorithm("uct", 2.0, std::nullopt, BonusKind::FixedPolynomial, "taxi").C, 1.5);
  EXPECT_EQ(parse_algorithm("uct", 2.0, 0.7, BonusKind::FixedPolynomial, "taxi").C, 0.7);
  EXPECT_EQ(parse_algorithm("uct", 2.0, std::nullopt, BonusKind::FixedPolynomial, "nowhere").C, 1.0);
  EXPECT_EQ(parse_algorithm("spuct", 2.0, std::nullopt, BonusKind::AdaptivePolynomial, "synthetic").C, 0.01);
  EXPECT_EQ(algorithm_label(parse_algorithm("uct:5", 2.0, 1.0, BonusKind::FixedPolynomial, "taxi")), "uct");

  EXPECT_THROW(parse_algorithm("", 2.0, 1.0, BonusKind::FixedPolynomial, "taxi"), std::invalid_argument);
  EXPECT_THROW(parse_algorithm("spuct:x", 2.0, 1.0, BonusKind::FixedPolynomial, "taxi"), std::invalid_argument);
  EXPECT_THROW(parse_algorithm("spuct:0.5", 2.0, 1.0, BonusKind::FixedPolynomial, "taxi"), std::invalid_argument);
  EXPECT_THROW(parse_algorithm("spuct:2:-1", 2.0, 1.0, BonusKind::FixedPolynomial, "taxi"), std::invalid_argument);
  EXPECT_THROW(parse_algorithm("uct:1:1:adaptive", 2.0, 1.0, BonusKind::FixedPolynomial, "taxi"), std::invalid_argument);
  EXPECT_THROW(parse_algorithm("spuct:2:1:fixed:extra", 2.0, 1.0, BonusKind::FixedPolynomial, "taxi"), std::invalid_argument);
}

TEST(Algorithms, TunedConstants) {
  EXPECT_EQ(tuned_exploration_constant("frozenlake4", "uct", 1.0), 1.25);
  EXPECT_EQ(tuned_exploration_constant("frozenlake4", "stochastic_power_uct", 1.0), 1.5);
  EXPECT_EQ(tuned_exploration_constant("taxi", "stochastic_power_uct", 2.2), 1.0);
  EXPECT_EQ(tuned_exploration_constant("synthetic", "stochastic_power_uct", 7.0), 0.25);
  EXPECT_FALSE(tuned_exploration_constant("taxi", "stochastic_power_uct", 3.0).has_value());
}

TEST(Algorithms, AdaptiveScheduleInfeasibility) {
  AlgorithmSpec spec = algorithm_preset("spuct", 2.0, 1.0);
  spec.bonus = BonusKind::AdaptivePolynomial;
  EXPECT_NO_THROW(make_algorithm_config(spec, 2, 1.0, 2));
  try {
    make_algorithm_config(spec, 5, 1.0, 5);
    FAIL() << "expected ScheduleInfeasible";
  } catch (const ScheduleInfeasible& e) {
    EXPECT_GE(e.report().depth, 0);
    EXPECT_FALSE(e.report().condition.empty());
  }
}

TEST(Config, ParseText) {
  const auto s = parse_config_text("# comment\n env = taxi  \nsims=1,2 # trailing\n\n");
  EXPECT_EQ(s.at("env"), "taxi");
  EXPECT_EQ(s.at("sims"), "1,2");
  EXPECT_EQ(s.size(), 2u);
  EXPECT_THROW(parse_config_text("no equals sign"), std::invalid_argument);
  EXPECT_THROW(parse_config_text("= value"), std::invalid_argument);
}

TEST(Config, ExperimentFromSettings) {
  const ExperimentConfig cfg = experiment_from_settings(
      ExperimentKind::ControlEvaluation,
      {{"env", "taxi"}, {"sims", "16,64"}, {"algorithms", "uct,spuct:2.2"}, {"eval_runs", "3"}, {"mode", "full"}, {"seed", "9"}});
  EXPECT_EQ(cfg.env.name, "taxi");
  EXPECT_EQ(cfg.budgets, (std::vector<std::uint64_t>{16, 64}));
  ASSERT_EQ(cfg.algorithms.size(), 2u);
  EXPECT_EQ(cfg.algorithms[0].C, 1.5);
  EXPECT_EQ(cfg.algorithms[1].p, 2.2);
  EXPECT_EQ(cfg.algorithms[1].C, 1.0);
  EXPECT_EQ(cfg.mode, TrajectoryMode::FullHorizon);
  EXPECT_EQ(cfg.master_seed, 9u);
  EXPECT_EQ(effective_horizon(cfg), 100);
  EXPECT_EQ(effective_rollout_cap(cfg), 100);

  const ExperimentConfig syn = experiment_from_settings(ExperimentKind::SyntheticConvergence, {{"sims", "4"}, {"depth", "3"}});
  EXPECT_EQ(syn.algorithms.front().name, "stochastic_power_uct");
  EXPECT_EQ(syn.algorithms.front().p, 2.0);
  EXPECT_EQ(effective_horizon(syn), 3);

  EXPECT_THROW(experiment_from_settings(ExperimentKind::SyntheticConvergence, {}), std::invalid_argument);
  EXPECT_THROW(experiment_from_settings(ExperimentKind::SyntheticConvergence, {{"sims", "4"}, {"colour", "red"}}), std::invalid_argument);
  EXPECT_THROW(experiment_from_settings(ExperimentKind::SyntheticConvergence, {{"sims", "4,2"}}), std::invalid_argument);
  EXPECT_THROW(experiment_from_settings(ExperimentKind::SyntheticConvergence, {{"sims", "0"}}), std::invalid_argument);
  EXPECT_THROW(experiment_from_settings(ExperimentKind::SyntheticConvergence, {{"sims", "4"}, {"trials", "abc"}}), std::invalid_argument);
  EXPECT_THROW(experiment_from_settings(ExperimentKind::SyntheticConvergence, {{"sims", "4"}, {"mode", "deep"}}), std::invalid_argument);
  EXPECT_THROW(experiment_from_settings(ExperimentKind::ControlEvaluation, {{"sims", "4"}, {"env", "chess"}}), std::invalid_argument);
}

TEST(Synthetic, NoiselessTwoLeafTreeConverges) {
  ExperimentConfig cfg = synthetic_config({1024, 2048});
  cfg.env.tree = {2, 1, 0.0, 0.0, 0};
  const ExperimentResult r = run_synthetic_convergence(cfg);
  for (const ExperimentRecord& rec : r.records) {
    if (rec.metric == "root_abs_error" && rec.algorithm == "stochastic_power_uct") EXPECT_LT(rec.value, 0.05) << rec.n_simulations;
  }
}

TEST(Synthetic, RecordsAndSummary) {
  const ExperimentConfig cfg = synthetic_config({16, 64, 256});
  const ExperimentResult r = run_synthetic_convergence(cfg);
  std::size_t errors = 0, slopes = 0;
  for (const ExperimentRecord& rec : r.records) {
    EXPECT_EQ(rec.env, "synthetic_k3_d2");
    if (rec.metric == "root_abs_error") {
      ++errors;
      EXPECT_GE(rec.value, 0.0);
    } else if (rec.metric == "slope") {
      ++slopes;
    }
  }
  EXPECT_EQ(errors, 2u * 3u * 6u);
  EXPECT_EQ(slopes, 2u);

  for (const SummaryRow& row : r.summary) {
    if (row.metric != "root_abs_error") continue;
    std::vector<double> xs;
    for (const ExperimentRecord& rec : r.records) {
      if (rec.metric == row.metric && rec.algorithm == row.algorithm && rec.n_simulations == row.n_simulations) xs.push_back(rec.value);
    }
    ASSERT_EQ(xs.size(), row.count);
    double mean = 0.0;
    for (double x : xs) mean += x / static_cast<double>(xs.size());
    EXPECT_NEAR(row.mean, mean, 1e-12);
    EXPECT_GT(row.half_width, 0.0);
  }
}

TEST(Synthetic, SeedsControlTheOutput) {
  ExperimentConfig cfg = synthetic_config({8, 32});
  const std::string a = to_csv(run_synthetic_convergence(cfg).records);
  EXPECT_EQ(a, to_csv(run_synthetic_convergence(cfg).records));
  cfg.master_seed = 1;
  EXPECT_NE(a, to_csv(run_synthetic_convergence(cfg).records));
}

TEST(Synthetic, WorkerCountDoesNotChangeOutput) {
  ExperimentConfig cfg = synthetic_config({8, 32, 128});
  const std::string serial = to_csv(run_synthetic_convergence(cfg).records);
  cfg.workers = 3;
  EXPECT_EQ(to_csv(run_synthetic_convergence(cfg).records), serial);
}

TEST(Synthetic, InfeasibleAdaptiveAlgorithmIsSkipped) {
  ExperimentConfig cfg = synthetic_config({8});
  cfg.env.tree = {2, 5, 0.5, 0.2, 0};
  AlgorithmSpec adaptive = algorithm_preset("spuct", 2.0, 0.01);
  adaptive.bonus = BonusKind::AdaptivePolynomial;
  cfg.algorithms.push_back(adaptive);
  const ExperimentResult r = run_synthetic_convergence(cfg);
  ASSERT_EQ(r.skipped.size(), 1u);
  for (const ExperimentRecord& rec : r.records) EXPECT_NE(rec.algorithm, "stochastic_power_uct:2:adaptive");
  EXPECT_FALSE(r.records.empty());
}

TEST(Control, ReturnsAreFiniteAndBounded) {
  const ExperimentConfig cfg = control_config();
  const ExperimentResult r = run_control_evaluation(cfg);
  EXPECT_EQ(r.records.size(), 2u * 2u * 6u);
  for (const ExperimentRecord& rec : r.records) {
    EXPECT_EQ(rec.metric, "discounted_return");
    EXPECT_GE(rec.value, 0.0);
    EXPECT_LE(rec.value, 1.0);
  }
  ASSERT_EQ(r.summary.size(), 4u);
  for (const SummaryRow& row : r.summary) {
    ASSERT_TRUE(row.p_vs_best.has_value());
    EXPECT_GE(*row.p_vs_best, 0.0);
    EXPECT_LE(*row.p_vs_best, 1.0);
  }
  ExperimentConfig parallel = cfg;
  parallel.workers = 2;
  EXPECT_EQ(to_csv(run_control_evaluation(parallel).records), to_csv(r.records));
}

TEST(Control, MinimalBudgetEpisode) {
  const auto taxi = build_taxi();
  const AlgorithmConfig alg = make_algorithm_config(algorithm_preset("uct", 1.0, 1.5), 10, taxi->discount(), 10);
  const double ret = evaluate_episode(*taxi, alg, taxi->action_count(0), 3);
  EXPECT_TRUE(std::isfinite(ret));
  EXPECT_GE(ret, 0.0);
  EXPECT_EQ(ret, evaluate_episode(*taxi, alg, taxi->action_count(0), 3));
}

TEST(GridSearch, PicksACandidatePerAlgorithm) {
  ExperimentConfig cfg = synthetic_config({16, 64});
  const GridSearchResult single = grid_search_C(cfg, {0.4});
  ASSERT_EQ(single.best_C.size(), 2u);
  for (const auto& [label, C] : single.best_C) EXPECT_EQ(C, 0.4) << label;

  const GridSearchResult g = grid_search_C(cfg, {0.1, 0.5, 1.0});
  std::size_t winners = 0;
  for (const ExperimentRecord& rec : g.result.records) {
    if (rec.algorithm.size() > 5 && rec.algorithm.substr(rec.algorithm.size() - 5) == "/best") {
      ++winners;
      const std::string name = rec.algorithm.substr(0, rec.algorithm.size() - 5);
      EXPECT_EQ(rec.C, g.best_C.at(algorithm_label(algorithm_preset(name, rec.p, rec.C))));
    }
  }
  EXPECT_EQ(winners, 2u);
  EXPECT_THROW(grid_search_C(cfg, {}), std::invalid_argument);
}

TEST(Probes, BanditValidation) {
  BanditProbeConfig cfg;
  cfg.arms = {{ArmKind::Bernoulli, 0.9}};
  cfg.budgets = {10, 20, 40};
  cfg.eps_grid = {0.1};
  cfg.replications = 10;
  EXPECT_THROW(run_bandit_probe(cfg), std::invalid_argument);
  cfg.arms = {{ArmKind::Bernoulli, 0.9}, {ArmKind::Bernoulli, 0.9}};
  EXPECT_THROW(run_bandit_probe(cfg), std::invalid_argument);
  cfg.arms = {{ArmKind::Bernoulli, 0.9}, {ArmKind::Bernoulli, 1.5}};
  EXPECT_THROW(run_bandit_probe(cfg), std::invalid_argument);
  cfg.arms = {{ArmKind::Bernoulli, 0.9}, {ArmKind::Bernoulli, 0.6}};
  cfg.budgets = {1, 20};
  EXPECT_THROW(run_bandit_probe(cfg), std::invalid_argument);
}

TEST(Probes, BanditFrequenciesShrink) {
  BanditProbeConfig cfg;
  cfg.arms = {{ArmKind::Bernoulli, 0.9}, {ArmKind::Bernoulli, 0.6}};
  cfg.budgets = {50, 200, 800};
  cfg.eps_grid = {0.05, 0.1};
  cfg.replications = 400;
  const ProbeResult r = run_bandit_probe(cfg);
  ASSERT_EQ(r.frequency.size(), 2u);
  EXPECT_GT(r.frequency[0][0], r.frequency[0][2]);
  EXPECT_GE(r.frequency[0][1], r.frequency[1][1]);
  EXPECT_GT(r.mean_abs_error[0], r.mean_abs_error[2]);
  ASSERT_TRUE(r.rate.has_value());
  EXPECT_LT(*r.rate, 0.0);
  cfg.workers = 3;
  EXPECT_EQ(run_bandit_probe(cfg).records, r.records);
}

TEST(Probes, ConstantArmsHaveNoDeviationAtLargeP) {
  BanditProbeConfig cfg;
  cfg.arms = {{ArmKind::Constant, 1.0}, {ArmKind::Constant, 0.0}};
  cfg.p = 1.0;
  cfg.budgets = {2, 4};
  cfg.eps_grid = {10.0};
  cfg.replications = 3;
  const ProbeResult r = run_bandit_probe(cfg);
  EXPECT_EQ(r.frequency[0][0], 0.0);
  EXPECT_FALSE(r.rate.has_value());
}

TEST(Probes, LemmaConstantCaseIsExact) {
  LemmaProbeConfig cfg;
  cfg.reward_mean = 0.4;
  cfg.reward_kind = ArmKind::Constant;
  cfg.probs = {1.0};
  cfg.child_values = {0.7};
  cfg.child_kind = ArmKind::Constant;
  cfg.gamma = 0.0;
  cfg.budgets = {1, 10, 100};
  cfg.eps_grid = {1e-12};
  cfg.replications = 5;
  const ProbeResult r = run_lemma_probe(cfg);
  for (double f : r.frequency[0]) EXPECT_EQ(f, 0.0);
  for (double e : r.mean_abs_error) EXPECT_EQ(e, 0.0);
}

TEST(Probes, LemmaValidation) {
  LemmaProbeConfig cfg;
  cfg.probs = {0.5, 0.4};
  cfg.child_values = {0.1, 0.2};
  cfg.budgets = {10};
  cfg.eps_grid = {0.1};
  cfg.replications = 2;
  EXPECT_THROW(run_lemma_probe(cfg), std::invalid_argument);
  cfg.probs = {0.5, 0.5};
  cfg.child_values = {0.1};
  EXPECT_THROW(run_lemma_probe(cfg), std::invalid_argument);
  cfg.child_values = {0.1, 0.2};
  cfg.gamma = 1.5;
  EXPECT_THROW(run_lemma_probe(cfg), std::invalid_argument);
}

TEST(Probes, SettingsDefaults) {
  const BanditProbeConfig b = bandit_probe_from_settings({{"sims", "10,20"}, {"arms", "0.8,constant:0.3"}});
  ASSERT_EQ(b.arms.size(), 2u);
  EXPECT_EQ(b.arms[1].kind, ArmKind::Constant);
  EXPECT_EQ(b.arms[1].mean, 0.3);
  EXPECT_EQ(b.eps_grid, (std::vector<double>{0.05, 0.1}));
  const LemmaProbeConfig l = lemma_probe_from_settings({{"sims", "10"}});
  EXPECT_EQ(l.probs, (std::vector<double>{0.5, 0.3, 0.2}));
  EXPECT_EQ(l.child_values, (std::vector<double>{0.2, 0.5, 0.8}));
  EXPECT_THROW(bandit_probe_from_settings({{"sims", "10"}, {"bogus", "1"}}), std::invalid_argument);
  EXPECT_THROW(bandit_probe_from_settings({{"sims", "10"}, {"bonus", "adaptive"}, {"beta_H", "1"}}), ScheduleInfeasible);
}

TEST(ScheduleConfig, RoundTrip) {
  const BonusSchedule s = std::get<BonusSchedule>(derive_schedule(2, 120.0, 2.0, 0.5));
  const BonusSchedule back = schedule_from_config(parse_config_text(schedule_to_config(s)));
  EXPECT_EQ(back.kind, s.kind);
  EXPECT_EQ(back.C, s.C);
  EXPECT_EQ(back.horizon, s.horizon);
  ASSERT_EQ(back.constants.size(), s.constants.size());
  for (std::size_t i = 0; i < s.constants.size(); ++i) {
    EXPECT_EQ(back.constants[i].alpha, s.constants[i].alpha);
    EXPECT_EQ(back.constants[i].beta, s.constants[i].beta);
    EXPECT_EQ(back.constants[i].b, s.constants[i].b);
  }
  const BonusSchedule fixed = schedule_from_config(parse_config_text(schedule_to_config(make_fixed_schedule(2.0, 3))));
  EXPECT_EQ(fixed.kind, BonusKind::FixedPolynomial);
  EXPECT_EQ(fixed.horizon, 3);
  EXPECT_THROW(schedule_from_config({{"bonus", "fixed"}}), std::invalid_argument);
}
