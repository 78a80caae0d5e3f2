#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "spuct/envs.hpp"

namespace spuct {

namespace {

std::size_t tree_size(int k, int d) {
  std::size_t total = 0;
  std::size_t level = 1;
  for (int i = 0; i <= d; ++i) {
    total += level;
    level *= static_cast<std::size_t>(k);
  }
  return total;
}

}  // namespace

SyntheticTree::SyntheticTree(const SyntheticTreeSpec& spec) : spec_(spec) {
  if (spec.branching < 2) throw std::invalid_argument("SyntheticTree: branching must be >= 2");
  if (spec.depth < 1) throw std::invalid_argument("SyntheticTree: depth must be >= 1");
  if (!(spec.sigma >= 0.0) || !std::isfinite(spec.sigma)) throw std::invalid_argument("SyntheticTree: sigma must be finite and >= 0");
  if (!(spec.slip >= 0.0 && spec.slip < 1.0)) throw std::invalid_argument("SyntheticTree: slip must lie in [0, 1)");

  const std::size_t k = static_cast<std::size_t>(spec.branching);
  const std::size_t n = tree_size(spec.branching, spec.depth);
  first_leaf_ = static_cast<State>(tree_size(spec.branching, spec.depth - 1));

  Rng gen(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  edge_values_.assign(n, 0.0);
  // Path sums, accumulated top-down in breadth-first order.
  std::vector<double> path(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) {
    edge_values_[i] = unit(gen);
    path[i] = path[(i - 1) / k] + edge_values_[i];
  }

  leaf_means_.assign(path.begin() + static_cast<std::ptrdiff_t>(first_leaf_), path.end());
  const auto [mn, mx] = std::minmax_element(leaf_means_.begin(), leaf_means_.end());
  const double lo = *mn;
  const double span = *mx - lo;
  for (double& m : leaf_means_) m = span > 0.0 ? (m - lo) / span : 0.0;
}

std::string SyntheticTree::name() const {
  return "synthetic_k" + std::to_string(spec_.branching) + "_d" + std::to_string(spec_.depth);
}

int SyntheticTree::node_depth(State s) const {
  const State k = static_cast<State>(spec_.branching);
  int depth = 0;
  while (s > 0) {
    s = (s - 1) / k;
    ++depth;
  }
  return depth;
}

State SyntheticTree::child(State s, Action a) const {
  return s * static_cast<State>(spec_.branching) + 1 + static_cast<State>(a);
}

double SyntheticTree::leaf_mean(State leaf) const {
  if (leaf < first_leaf_ || leaf >= node_count()) throw std::out_of_range("SyntheticTree::leaf_mean: not a leaf");
  return leaf_means_[leaf - first_leaf_];
}

std::vector<State> SyntheticTree::leaves() const {
  std::vector<State> out;
  for (State s = first_leaf_; s < node_count(); ++s) out.push_back(s);
  return out;
}

std::size_t SyntheticTree::action_count(State s) const {
  return is_terminal(s) ? 0 : static_cast<std::size_t>(spec_.branching);
}

Bounds SyntheticTree::reward_bounds() const {
  if (spec_.sigma > 0.0) return {-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  return {0.0, 1.0};
}

StepResult SyntheticTree::sample(State s, Action a, Rng& rng) const {
  const std::size_t k = static_cast<std::size_t>(spec_.branching);
  if (a >= k || is_terminal(s)) throw std::invalid_argument("SyntheticTree::sample: invalid state/action");
  Action actual = a;
  if (spec_.slip > 0.0) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    if (unit(rng) < spec_.slip) {
      // Uniform over the k - 1 unintended children.
      std::uniform_int_distribution<std::size_t> other(0, k - 2);
      const std::size_t j = other(rng);
      actual = j < a ? j : j + 1;
    }
  }
  const State next = child(s, actual);
  if (node_depth(next) < spec_.depth) return {next, 0.0, false};
  double reward = leaf_mean(next);
  if (spec_.sigma > 0.0) reward = std::normal_distribution<double>(reward, spec_.sigma)(rng);
  return {next, reward, true};
}

std::vector<Outcome> SyntheticTree::transitions(State s, Action a) const {
  const std::size_t k = static_cast<std::size_t>(spec_.branching);
  if (a >= k || is_terminal(s)) throw std::invalid_argument("SyntheticTree::transitions: invalid state/action");
  std::vector<Outcome> out;
  out.reserve(k);
  const bool leaf_level = node_depth(s) + 1 == spec_.depth;
  for (Action b = 0; b < k; ++b) {
    const double prob = b == a ? 1.0 - spec_.slip : spec_.slip / static_cast<double>(k - 1);
    if (prob == 0.0) continue;
    const State next = child(s, b);
    out.push_back({next, prob, leaf_level ? leaf_mean(next) : 0.0, leaf_level});
  }
  return out;
}

std::unique_ptr<SyntheticTree> build_synthetic_tree(const SyntheticTreeSpec& spec) {
  return std::make_unique<SyntheticTree>(spec);
}

}  // namespace spuct
