#include "spuct/mcts.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace spuct {

void validate_config(const AlgorithmConfig& cfg) {
  if (!std::isfinite(cfg.p) || cfg.p < 1.0) throw std::invalid_argument("config: p must be finite and >= 1");
  if (cfg.horizon < 1) throw std::invalid_argument("config: horizon must be >= 1");
  if (!(cfg.gamma >= 0.0 && cfg.gamma <= 1.0)) throw std::invalid_argument("config: gamma must lie in [0, 1]");
  if (cfg.rollout_depth_cap < 0) throw std::invalid_argument("config: rollout_depth_cap must be >= 0");
  if (cfg.schedule.horizon != cfg.horizon) throw std::invalid_argument("config: schedule horizon differs from planning horizon");
  if (!(cfg.schedule.C > 0.0)) throw std::invalid_argument("config: exploration constant must be > 0");
}

// ---------------------------------------------------------------------------

SearchTree::SearchTree(State root_state) { add_node(root_state, 0, false); }

NodeId SearchTree::add_node(State s, int depth, bool terminal) {
  if (nodes_.size() >= std::numeric_limits<NodeId>::max()) throw std::length_error("SearchTree: node limit reached");
  VNode& v = nodes_.emplace_back();
  v.state = s;
  v.depth = depth;
  v.terminal = terminal;
  return static_cast<NodeId>(nodes_.size() - 1);
}

std::string SearchTree::dump(int max_depth) const {
  std::string out;
  dump_node(out, 0, root().state, max_depth);
  return out;
}

void SearchTree::dump_node(std::string& out, NodeId id, std::uint64_t key, int max_depth) const {
  const VNode& v = nodes_[id];
  const std::string indent(static_cast<std::size_t>(2 * v.depth), ' ');
  std::ostringstream line;
  line.precision(6);
  line << indent << "V key=" << key << " depth=" << v.depth << " T=" << v.visit_count
       << " V=" << (v.expanded && v.visit_count > 0 ? v.value : v.leaf_mean.mean) << (v.terminal ? " terminal" : "") << '\n';
  if (v.depth < max_depth) {
    for (std::size_t a = 0; a < v.actions.size(); ++a) {
      const QNode& q = v.actions[a];
      line << indent << " Q a=" << a << " T=" << q.q.count << " Q=" << q.q.mean << '\n';
      out += line.str();
      line.str("");
      for (const ChildLink& c : q.children) dump_node(out, c.node, c.key, max_depth);
    }
  }
  out += line.str();
}

// ---------------------------------------------------------------------------

Action select_action(const VNode& v, const AlgorithmConfig& cfg, bool greedy) {
  if (!v.expanded || v.actions.empty()) throw std::logic_error("select_action: node is not expanded");
  Action best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (Action a = 0; a < v.actions.size(); ++a) {
    const RunningMean& q = v.actions[a].q;
    double score = q.mean;
    if (!greedy) score += bonus(cfg.schedule, v.depth, v.visit_count, q.count);
    if (score > best_score) {
      best_score = score;
      best = a;
    }
  }
  return best;
}

double backup_value(const VNode& v, const AlgorithmConfig& cfg, Bounds value_bounds) {
  thread_local std::vector<double> values;
  thread_local std::vector<std::uint64_t> counts;
  values.clear();
  counts.clear();
  for (const QNode& q : v.actions) {
    values.push_back(q.q.mean);
    counts.push_back(q.q.count);
  }
  if (cfg.p == 1.0) return weighted_mean(values, counts);
  const double lo = value_bounds.lo;
  if (!std::isfinite(lo)) throw std::invalid_argument("backup_value: power-mean backup needs a finite lower value bound");
  for (double& x : values) x = std::max(x - lo, 0.0);
  return lo + power_mean(values, counts, cfg.p);
}

double rollout(const GenerativeModel& model, State s, int /*depth*/, const AlgorithmConfig& cfg, Rng& rng) {
  double ret = 0.0;
  double discount = 1.0;
  for (int step = 0; step < cfg.rollout_depth_cap; ++step) {
    const std::size_t actions = model.action_count(s);
    if (actions == 0 || model.is_terminal(s)) break;
    const Action a = std::uniform_int_distribution<std::size_t>(0, actions - 1)(rng);
    const StepResult r = model.sample(s, a, rng);
    ret += discount * r.reward;
    discount *= cfg.gamma;
    if (r.terminal) break;
    s = r.next;
  }
  return ret;
}

namespace {

class Trajectory {
 public:
  Trajectory(SearchTree& tree, const GenerativeModel& model, const AlgorithmConfig& cfg, Rng& rng,
             BackupObserver* observer)
      : tree_(tree), model_(model), cfg_(cfg), rng_(rng), observer_(observer), bounds_(model.value_bounds()) {}

  void expand(VNode& v) {
    v.actions.assign(model_.action_count(v.state), QNode{});
    v.expanded = true;
  }

  double simulate_v(NodeId id) {
    VNode& v = tree_.node(id);
    const Action a = select_action(v, cfg_, false);
    simulate_q(id, a);
    ++v.visit_count;
    v.value = backup_value(v, cfg_, bounds_);
    return v.value;
  }

 private:
  double evaluate_leaf(VNode& leaf) {
    leaf.leaf_mean = running_mean_update(leaf.leaf_mean, rollout(model_, leaf.state, leaf.depth, cfg_, rng_));
    return leaf.leaf_mean.mean;
  }

  void simulate_q(NodeId id, Action a) {
    VNode& v = tree_.node(id);
    const StepResult step = model_.sample(v.state, a, rng_);
    QNode& q = v.actions[a];

    const std::uint64_t key = model_.state_key(step.next);
    auto link = std::find_if(q.children.begin(), q.children.end(), [key](const ChildLink& c) { return c.key == key; });
    if (link == q.children.end()) {
      const NodeId child = tree_.add_node(step.next, v.depth + 1, step.terminal);
      q.children.push_back({key, child, 0});
      link = std::prev(q.children.end());
    }
    VNode& child = tree_.node(link->node);

    double child_value = 0.0;
    if (!step.terminal) {
      if (child.depth >= cfg_.horizon || model_.action_count(child.state) == 0) {
        child_value = evaluate_leaf(child);
      } else if (!child.expanded) {
        expand(child);
        child_value = cfg_.mode == TrajectoryMode::TruncateAtLeaf ? evaluate_leaf(child) : simulate_v(link->node);
      } else {
        child_value = simulate_v(link->node);
      }
    }

    const double target = step.reward + cfg_.gamma * child_value;
    q.q = running_mean_update(q.q, target);
    ++link->visits;
    if (observer_ != nullptr) observer_->on_q_update(id, a, target);
  }

  SearchTree& tree_;
  const GenerativeModel& model_;
  const AlgorithmConfig& cfg_;
  Rng& rng_;
  BackupObserver* observer_;
  Bounds bounds_;
};

}  // namespace

void run_trajectory(SearchTree& tree, const GenerativeModel& model, const AlgorithmConfig& cfg, Rng& rng,
                    BackupObserver* observer) {
  VNode& root = tree.root();
  if (root.terminal || model.is_terminal(root.state)) throw std::invalid_argument("run_trajectory: root state is terminal");
  Trajectory t(tree, model, cfg, rng, observer);
  if (!root.expanded) {
    t.expand(root);
    if (root.actions.empty()) throw std::invalid_argument("run_trajectory: root state has no actions");
  }
  t.simulate_v(0);
}

// ---------------------------------------------------------------------------

Planner::Planner(const GenerativeModel& model, State root, AlgorithmConfig cfg)
    : model_(model), cfg_(std::move(cfg)), tree_(root) {
  validate_config(cfg_);
}

void Planner::run(std::uint64_t trajectories, Rng& rng, BackupObserver* observer) {
  for (std::uint64_t i = 0; i < trajectories; ++i) run_trajectory(tree_, model_, cfg_, rng, observer);
  done_ += trajectories;
}

PlanResult Planner::result() const {
  const VNode& root = tree_.root();
  PlanResult r;
  r.best_action = select_action(root, cfg_, true);
  r.root_value = root.value;
  for (const QNode& q : root.actions) {
    r.diagnostics.q.push_back(q.q.mean);
    r.diagnostics.counts.push_back(q.q.count);
  }
  r.diagnostics.tree_size = tree_.size();
  return r;
}

PlanResult plan(const GenerativeModel& model, State root, const AlgorithmConfig& cfg, std::uint64_t n, Rng& rng) {
  if (n < 1) throw std::invalid_argument("plan: need at least one trajectory");
  Planner planner(model, root, cfg);
  planner.run(n, rng);
  return planner.result();
}

PlanResult plan(const GenerativeModel& model, const AlgorithmConfig& cfg, std::uint64_t n, Rng& rng) {
  return plan(model, model.initial_state(), cfg, n, rng);
}

}  // namespace spuct
