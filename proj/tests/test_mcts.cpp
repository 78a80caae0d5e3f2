#include <gtest/gtest.h>

#include <cmath>

#include "spuct/harness.hpp"
#include "spuct/mcts.hpp"
#include "support/invariants.hpp"
#include "support/reference_planner.hpp"
#include "support/toy_models.hpp"

using namespace spuct;

namespace {

AlgorithmConfig fixed_config(double p, double C, int horizon, double gamma = 1.0, int cap = 100) {
  AlgorithmConfig cfg;
  cfg.p = p;
  cfg.schedule = make_fixed_schedule(C, horizon);
  cfg.horizon = horizon;
  cfg.gamma = gamma;
  cfg.rollout_depth_cap = cap;
  return cfg;
}

VNode two_action_node(double q0, std::uint64_t t0, double q1, std::uint64_t t1) {
  VNode v;
  v.expanded = true;
  v.actions.resize(2);
  v.actions[0].q = {q0, t0};
  v.actions[1].q = {q1, t1};
  v.visit_count = t0 + t1;
  return v;
}

}  // namespace

TEST(SelectAction, UnvisitedActionsComeFirstInIndexOrder) {
  const AlgorithmConfig cfg = fixed_config(1.0, 1.0, 1);
  EXPECT_EQ(select_action(two_action_node(0.0, 0, 0.0, 0), cfg, false), 0u);
  EXPECT_EQ(select_action(two_action_node(0.9, 3, 0.0, 0), cfg, false), 1u);
}

TEST(SelectAction, BonusAndGreedy) {
  const AlgorithmConfig cfg = fixed_config(1.0, 1.0, 1);
  const VNode v = two_action_node(0.5, 4, 0.4, 1);
  EXPECT_EQ(select_action(v, cfg, false), 1u);
  EXPECT_EQ(select_action(v, cfg, true), 0u);
}

TEST(SelectAction, TiesGoToLowestIndex) {
  const AlgorithmConfig cfg = fixed_config(1.0, 1.0, 1);
  EXPECT_EQ(select_action(two_action_node(0.3, 2, 0.3, 2), cfg, false), 0u);
  EXPECT_EQ(select_action(two_action_node(0.3, 2, 0.3, 2), cfg, true), 0u);
}

TEST(SelectAction, RequiresExpandedNode) {
  VNode v;
  EXPECT_THROW(select_action(v, fixed_config(1.0, 1.0, 1), false), std::logic_error);
}

TEST(BackupValue, WeightedMeanAndPowerMean) {
  const VNode v = two_action_node(0.2, 1, 0.8, 3);
  EXPECT_NEAR(backup_value(v, fixed_config(1.0, 1.0, 1), {0.0, 1.0}), 0.65, 1e-15);
  EXPECT_NEAR(backup_value(v, fixed_config(2.0, 1.0, 1), {0.0, 1.0}), std::sqrt((0.04 + 3 * 0.64) / 4.0), 1e-15);
  // Shifted bounds: the power mean is taken over Q - lo.
  const VNode w = two_action_node(2.2, 1, 2.8, 3);
  EXPECT_NEAR(backup_value(w, fixed_config(2.0, 1.0, 1), {2.0, 3.0}), 2.0 + std::sqrt((0.04 + 3 * 0.64) / 4.0), 1e-14);
  // Values below lo are floored.
  const VNode z = two_action_node(-1.0, 1, 0.5, 1);
  EXPECT_NEAR(backup_value(z, fixed_config(2.0, 1.0, 1), {0.0, 1.0}), std::sqrt(0.125), 1e-15);
}

TEST(Rollout, DiscountedChainReturn) {
  const toy::Chain chain(2, 1.0);
  Rng rng(0);
  EXPECT_NEAR(rollout(chain, 0, 0, fixed_config(1.0, 1.0, 1, 0.99, 100), rng), 0.9801, 1e-15);
  EXPECT_EQ(rollout(chain, 0, 0, fixed_config(1.0, 1.0, 1, 0.99, 2), rng), 0.0);
  EXPECT_EQ(rollout(chain, 3, 0, fixed_config(1.0, 1.0, 1, 0.99, 100), rng), 0.0);
}

TEST(Planner, DeterministicBandit) {
  const toy::Bandit bandit({0.2, 0.9, 0.5});
  Rng rng(1);
  const PlanResult r = plan(bandit, fixed_config(1.0, 0.5, 1), 300, rng);
  EXPECT_EQ(r.best_action, 1u);
  ASSERT_EQ(r.diagnostics.q.size(), 3u);
  EXPECT_NEAR(r.diagnostics.q[0], 0.2, 1e-12);
  EXPECT_NEAR(r.diagnostics.q[1], 0.9, 1e-12);
  EXPECT_NEAR(r.diagnostics.q[2], 0.5, 1e-12);
  std::uint64_t total = 0;
  for (std::uint64_t c : r.diagnostics.counts) total += c;
  EXPECT_EQ(total, 300u);
  EXPECT_GT(r.diagnostics.counts[1], r.diagnostics.counts[0]);
}

TEST(Planner, PowerMeanApproachesMaxFasterThanMean) {
  const toy::Bandit bandit({0.2, 0.9, 0.5});
  Rng a(1), b(1);
  const double mean_value = plan(bandit, fixed_config(1.0, 0.5, 1), 300, a).root_value;
  const double power_value = plan(bandit, fixed_config(8.0, 0.5, 1), 300, b).root_value;
  EXPECT_LT(mean_value, power_value);
  EXPECT_LE(power_value, 0.9);
}

TEST(Planner, ChainValueWithTruncation) {
  const toy::Chain chain(2, 1.0);
  Rng rng(0);
  const PlanResult r = plan(chain, fixed_config(1.0, 1.0, 1, 0.99), 1, rng);
  EXPECT_NEAR(r.root_value, 0.9801, 1e-15);
  Rng rng2(0);
  const PlanResult deep = plan(chain, fixed_config(3.0, 1.0, 3, 0.99), 10, rng2);
  EXPECT_NEAR(deep.root_value, 0.9801, 1e-14);
}

TEST(Planner, ShiftInvariance) {
  const SyntheticTree tree({5, 1, 0.5, 0.2, 7});
  const toy::Shifted shifted(tree, 3.0);
  for (double p : {1.0, 2.0, 4.0}) {
    Rng a(5), b(5);
    const PlanResult base = plan(tree, fixed_config(p, 0.5, 1), 500, a);
    const PlanResult moved = plan(shifted, fixed_config(p, 0.5, 1), 500, b);
    EXPECT_EQ(base.best_action, moved.best_action) << "p=" << p;
    EXPECT_EQ(base.diagnostics.counts, moved.diagnostics.counts) << "p=" << p;
    EXPECT_NEAR(moved.root_value - base.root_value, 3.0, 1e-9) << "p=" << p;
  }
}

TEST(Planner, TreeInvariantsHold) {
  std::vector<std::unique_ptr<GenerativeModel>> models;
  models.push_back(build_synthetic_tree({3, 3, 0.5, 0.2, 2}));
  models.push_back(build_frozenlake(FrozenLakeSize::k4x4));
  models.push_back(build_taxi());
  for (const auto& m : models) {
    for (double p : {1.0, 2.0, 4.0}) {
      for (TrajectoryMode mode : {TrajectoryMode::TruncateAtLeaf, TrajectoryMode::FullHorizon}) {
        AlgorithmConfig cfg = fixed_config(p, 0.5, 4, m->discount(), 20);
        cfg.mode = mode;
        Planner planner(*m, m->initial_state(), cfg);
        invariants::Replay replay;
        Rng rng(9);
        planner.run(400, rng, &replay);
        invariants::Report report;
        invariants::check(planner.tree(), cfg, m->value_bounds(), replay, report);
        EXPECT_EQ(report.count_violations, 0u) << m->name() << " p=" << p;
        EXPECT_LT(report.worst_replay_error, 1e-9) << m->name();
        EXPECT_LT(report.worst_backup_error, 1e-9) << m->name();
        EXPECT_GT(report.nodes_checked, 1u);
        EXPECT_EQ(planner.tree().root().visit_count, 400u);
      }
    }
  }
}

TEST(Planner, IncrementalRunsMatchSingleRun) {
  const auto lake = build_frozenlake(FrozenLakeSize::k4x4);
  const AlgorithmConfig cfg = fixed_config(2.0, 1.0, 10, 0.99, 50);
  Planner split(*lake, 0, cfg);
  Planner whole(*lake, 0, cfg);
  Rng a(3), b(3);
  split.run(100, a);
  split.run(200, a);
  whole.run(300, b);
  EXPECT_EQ(split.trajectories(), 300u);
  EXPECT_EQ(split.result().diagnostics.q, whole.result().diagnostics.q);
  EXPECT_EQ(split.result().root_value, whole.result().root_value);
  EXPECT_EQ(split.tree().dump(), whole.tree().dump());
}

TEST(Planner, SameSeedSameResult) {
  const auto taxi = build_taxi();
  const AlgorithmConfig cfg = fixed_config(2.0, 1.0, 20, 0.99, 50);
  Rng a(12), b(12), c(13);
  const PlanResult x = plan(*taxi, cfg, 200, a);
  const PlanResult y = plan(*taxi, cfg, 200, b);
  const PlanResult z = plan(*taxi, cfg, 200, c);
  EXPECT_EQ(x.diagnostics.q, y.diagnostics.q);
  EXPECT_EQ(x.diagnostics.tree_size, y.diagnostics.tree_size);
  EXPECT_NE(x.diagnostics.q, z.diagnostics.q);
}

TEST(Planner, MatchesReferenceFixedDepthMcts) {
  const auto lake = build_frozenlake(FrozenLakeSize::k4x4);
  const AlgorithmConfig cfg = fixed_config(1.0, 0.5, 3, 0.99, 10);
  reference::FixedDepthMcts ref(*lake, 0.5, 3, 0.99, 10);
  Planner planner(*lake, 0, cfg);
  Rng a(21), b(21);
  for (int i = 0; i < 500; ++i) {
    ref.iterate(a);
    planner.run(1, b);
    ASSERT_EQ(planner.result().root_value, ref.root_updates().back().root_value) << "iteration " << i;
  }
  EXPECT_EQ(planner.result().best_action, ref.greedy());
  EXPECT_EQ(planner.result().diagnostics.q, ref.root().q);
}

TEST(Planner, FindsBestActionOnTwoLeafTrees) {
  int hits = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const SyntheticTree tree({2, 1, 0.5, 0.2, seed});
    const Action best = tree.leaf_mean(1) > tree.leaf_mean(2) ? 0 : 1;
    Rng rng(seed + 1000);
    if (plan(tree, make_algorithm_config(algorithm_preset("stochastic_power_uct", 2.0, 0.25), 1, 1.0, 1), 64, rng).best_action == best) ++hits;
  }
  EXPECT_GE(hits, 95);
}

TEST(Planner, RejectsBadInput) {
  const toy::Bandit bandit({0.1, 0.2});
  Rng rng(0);
  EXPECT_THROW(plan(bandit, fixed_config(1.0, 1.0, 1), 0, rng), std::invalid_argument);
  EXPECT_THROW(validate_config(fixed_config(0.5, 1.0, 1)), std::invalid_argument);
  EXPECT_THROW(validate_config(fixed_config(1.0, 1.0, 0)), std::invalid_argument);
  EXPECT_THROW(validate_config(fixed_config(1.0, 1.0, 1, 1.5)), std::invalid_argument);
  EXPECT_THROW(validate_config(fixed_config(1.0, 1.0, 1, 1.0, -1)), std::invalid_argument);
  AlgorithmConfig mismatched = fixed_config(1.0, 1.0, 2);
  mismatched.schedule.horizon = 3;
  EXPECT_THROW(validate_config(mismatched), std::invalid_argument);
}

TEST(SearchTree, DumpListsNodes) {
  const toy::Bandit bandit({0.25, 0.75});
  Planner planner(bandit, 0, fixed_config(1.0, 1.0, 1));
  Rng rng(0);
  planner.run(2, rng);
  const std::string text = planner.tree().dump();
  EXPECT_NE(text.find("V key=0 depth=0 T=2 V=0.5"), std::string::npos) << text;
  EXPECT_NE(text.find(" Q a=1 T=1 Q=0.75"), std::string::npos) << text;
  EXPECT_NE(text.find("terminal"), std::string::npos) << text;
  EXPECT_EQ(planner.tree().dump(0).find("Q a="), std::string::npos);
}
