#pragma once

#include <cstdint>
#include <deque>
#include <string>
#include <vector>

#include "spuct/envs.hpp"
#include "spuct/estimators.hpp"
#include "spuct/schedule.hpp"

namespace spuct {

enum class TrajectoryMode {
  TruncateAtLeaf,  // stop at the first newly expanded node and evaluate it with a playout
  FullHorizon,     // keep selecting through new nodes until depth H
};

struct AlgorithmConfig {
  double p = 1.0;
  BonusSchedule schedule;
  int horizon = 1;
  double gamma = 1.0;
  int rollout_depth_cap = 100;
  TrajectoryMode mode = TrajectoryMode::TruncateAtLeaf;
  // Ties in every argmax go to the lowest action index.
};

/// Throws std::invalid_argument when p < 1, H < 1, gamma outside [0, 1],
/// rollout cap < 0 or the schedule horizon differs from H.
void validate_config(const AlgorithmConfig& cfg);

using NodeId = std::uint32_t;

struct ChildLink {
  std::uint64_t key = 0;
  NodeId node = 0;
  std::uint64_t visits = 0;
};

struct QNode {
  RunningMean q;  // q.count is the action's visit count
  std::vector<ChildLink> children;
};

struct VNode {
  State state = 0;
  int depth = 0;
  std::uint64_t visit_count = 0;
  double value = 0.0;
  std::vector<QNode> actions;
  bool expanded = false;
  bool terminal = false;
  RunningMean leaf_mean;  // playout average while the node is a leaf
};

/// Node arena. Node addresses are stable for the lifetime of the tree.
class SearchTree {
 public:
  explicit SearchTree(State root_state);

  VNode& node(NodeId id) { return nodes_[id]; }
  const VNode& node(NodeId id) const { return nodes_[id]; }
  VNode& root() { return nodes_.front(); }
  const VNode& root() const { return nodes_.front(); }
  std::size_t size() const { return nodes_.size(); }

  NodeId add_node(State s, int depth, bool terminal);

  /// Indented text: one line per VNode (key, depth, T, V) and QNode (a, T, Q).
  std::string dump(int max_depth = 1 << 30) const;

 private:
  void dump_node(std::string& out, NodeId id, std::uint64_t key, int max_depth) const;

  std::deque<VNode> nodes_;
};

/// Receives every Q-target folded into a QNode, in fold order.
class BackupObserver {
 public:
  virtual ~BackupObserver() = default;
  virtual void on_q_update(NodeId node, Action action, double target) = 0;
};

/// Argmax of Q + bonus (or of Q alone when greedy). Unvisited actions carry an
/// infinite bonus. Requires an expanded node.
Action select_action(const VNode& v, const AlgorithmConfig& cfg, bool greedy);

/// Node value from its children: the count-weighted mean for p = 1, otherwise
/// the power mean of Q values shifted by -value_lo (and floored at 0) then
/// shifted back. Requires visit_count > 0.
double backup_value(const VNode& v, const AlgorithmConfig& cfg, Bounds value_bounds);

/// Uniform-random playout from s until a terminal state or the rollout cap;
/// returns the discounted reward sum.
double rollout(const GenerativeModel& model, State s, int depth, const AlgorithmConfig& cfg, Rng& rng);

/// One root-to-leaf pass with backups on the way up.
void run_trajectory(SearchTree& tree, const GenerativeModel& model, const AlgorithmConfig& cfg, Rng& rng,
                    BackupObserver* observer = nullptr);

struct Diagnostics {
  std::vector<double> q;
  std::vector<std::uint64_t> counts;
  std::size_t tree_size = 0;
};

struct PlanResult {
  Action best_action = 0;
  double root_value = 0.0;
  Diagnostics diagnostics;
};

/// Incremental planner: the tree after run(a); run(b) equals the tree after
/// run(a + b) with the same rng, so a single pass can report several budgets.
class Planner {
 public:
  Planner(const GenerativeModel& model, State root, AlgorithmConfig cfg);

  void run(std::uint64_t trajectories, Rng& rng, BackupObserver* observer = nullptr);
  PlanResult result() const;

  const SearchTree& tree() const { return tree_; }
  const AlgorithmConfig& config() const { return cfg_; }
  std::uint64_t trajectories() const { return done_; }

 private:
  const GenerativeModel& model_;
  AlgorithmConfig cfg_;
  SearchTree tree_;
  std::uint64_t done_ = 0;
};

/// Runs n >= 1 trajectories from `root` and returns the greedy root action,
/// the root value estimate and per-action statistics.
PlanResult plan(const GenerativeModel& model, State root, const AlgorithmConfig& cfg, std::uint64_t n, Rng& rng);
PlanResult plan(const GenerativeModel& model, const AlgorithmConfig& cfg, std::uint64_t n, Rng& rng);

}  // namespace spuct
