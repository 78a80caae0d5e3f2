#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace spuct {

using State = std::uint64_t;
using Action = std::size_t;
using Rng = std::mt19937_64;

struct StepResult {
  State next = 0;
  double reward = 0.0;
  bool terminal = false;
};

/// One enumerated transition with its expected reward.
struct Outcome {
  State next = 0;
  double probability = 0.0;
  double mean_reward = 0.0;
  bool terminal = false;
};

struct Bounds {
  double lo = 0.0;
  double hi = 0.0;
};

class UnsupportedOperation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Black-box stochastic MDP. Implementations are immutable after construction;
/// all randomness comes from the caller's rng, so one model can be shared by
/// concurrent trials.
class GenerativeModel {
 public:
  virtual ~GenerativeModel() = default;

  virtual std::string name() const = 0;
  virtual State initial_state() const = 0;
  virtual std::size_t action_count(State s) const = 0;
  virtual StepResult sample(State s, Action a, Rng& rng) const = 0;
  virtual bool is_terminal(State s) const = 0;
  virtual std::uint64_t state_key(State s) const { return s; }

  /// Range of any single sampled reward (may be infinite).
  virtual Bounds reward_bounds() const = 0;
  /// Range of expected discounted returns from any state. Planners use it to
  /// map value estimates onto a nonnegative scale before a power-mean backup.
  virtual Bounds value_bounds() const = 0;

  virtual double discount() const = 0;
  /// Episode truncation for real-environment evaluation.
  virtual int step_cap() const = 0;

  virtual bool enumerable() const { return false; }
  /// Outcome distribution of (s, a); probabilities sum to 1.
  virtual std::vector<Outcome> transitions(State /*s*/, Action /*a*/) const {
    throw UnsupportedOperation(name() + ": transition probabilities are not enumerable");
  }
};

// ---------------------------------------------------------------------------
// SyntheticTree

struct SyntheticTreeSpec {
  int branching = 2;
  int depth = 1;
  double sigma = 0.5;
  double slip = 0.2;
  std::uint64_t seed = 0;
};

/// Complete k-ary tree of depth d. Nodes are numbered breadth-first (root 0,
/// children of i are i*k+1 .. i*k+k). Each non-root node carries a uniform
/// [0,1] edge value; leaf means are root-to-leaf edge sums, min-max normalized
/// to [0,1]. Action a moves to child a with probability 1 - slip and to each
/// other child with probability slip / (k - 1). Entering a leaf ends the
/// episode with a Gaussian(leaf mean, sigma) reward; every other step pays 0.
/// The discount is 1.
class SyntheticTree final : public GenerativeModel {
 public:
  explicit SyntheticTree(const SyntheticTreeSpec& spec);

  std::string name() const override;
  State initial_state() const override { return 0; }
  std::size_t action_count(State s) const override;
  StepResult sample(State s, Action a, Rng& rng) const override;
  bool is_terminal(State s) const override { return node_depth(s) >= spec_.depth; }
  Bounds reward_bounds() const override;
  Bounds value_bounds() const override { return {0.0, 1.0}; }
  double discount() const override { return 1.0; }
  int step_cap() const override { return spec_.depth; }
  bool enumerable() const override { return true; }
  std::vector<Outcome> transitions(State s, Action a) const override;

  const SyntheticTreeSpec& spec() const { return spec_; }
  int node_depth(State s) const;
  State child(State s, Action a) const;
  /// Normalized mean of a leaf node.
  double leaf_mean(State leaf) const;
  std::size_t node_count() const { return edge_values_.size(); }
  std::vector<State> leaves() const;

 private:
  SyntheticTreeSpec spec_;
  std::vector<double> edge_values_;
  std::vector<double> leaf_means_;  // indexed by leaf - first_leaf_
  State first_leaf_ = 0;
};

// ---------------------------------------------------------------------------
// Grid worlds

/// Plain-text grid: one character per cell, rows top to bottom.
///   S start, G goal/target, H hole, W wall, P passenger, '.' ice/road ('F' is
///   accepted as ice for compatibility with Gym maps).
struct GridLayout {
  int width = 0;
  int height = 0;
  std::string cells;  // row-major, size width * height

  char at(int x, int y) const { return cells[static_cast<std::size_t>(y * width + x)]; }
};

GridLayout parse_layout(std::string_view text);
GridLayout load_layout(const std::filesystem::path& path);

/// Canonical layouts, identical to the files under layouts/.
const GridLayout& frozenlake4_layout();
const GridLayout& frozenlake8_layout();
const GridLayout& taxi_layout();

/// Movement actions (Gym FrozenLake order).
enum GridAction : Action { kLeft = 0, kDown = 1, kRight = 2, kUp = 3 };

class GridModel : public GenerativeModel {
 public:
  std::size_t action_count(State) const override { return 4; }
  StepResult sample(State s, Action a, Rng& rng) const override;
  double discount() const override { return gamma_; }
  int step_cap() const override { return step_cap_; }
  bool enumerable() const override { return true; }
  std::vector<Outcome> transitions(State s, Action a) const override;

  const GridLayout& layout() const { return layout_; }
  /// Probability of each relative move for intended action a; index = actual direction.
  const std::vector<double>& slip_row(Action a) const { return slip_[a]; }

 protected:
  GridModel(GridLayout layout, std::vector<std::vector<double>> slip, double gamma, int step_cap);

  /// Cell reached from `cell` when moving in `direction`; walls and borders block.
  int move(int cell, Action direction) const;
  /// Deterministic result of actually moving in `direction` from s.
  virtual StepResult resolve(State s, Action direction) const = 0;

  GridLayout layout_;
  std::vector<std::vector<double>> slip_;
  double gamma_;
  int step_cap_;
  int start_cell_ = 0;
};

/// Slippery FrozenLake: 1/3 intended direction, 1/3 each perpendicular.
/// Holes end the episode with reward 0, the goal with reward 1.
class FrozenLake final : public GridModel {
 public:
  explicit FrozenLake(GridLayout layout, double gamma = 0.99, int step_cap = 200);

  std::string name() const override;
  State initial_state() const override { return static_cast<State>(start_cell_); }
  bool is_terminal(State s) const override;
  Bounds reward_bounds() const override { return {0.0, 1.0}; }
  Bounds value_bounds() const override { return {0.0, 1.0}; }

 protected:
  StepResult resolve(State s, Action direction) const override;
};

/// Passenger collection on a walled grid. State = cell * 2^P + collected mask.
/// Entering a passenger cell collects it; entering the target ends the episode
/// with reward equal to the number of collected passengers. Moves go in the
/// intended direction with probability 1/2 and each other direction with 1/6.
class Taxi final : public GridModel {
 public:
  explicit Taxi(GridLayout layout, double gamma = 0.99, int step_cap = 500);

  std::string name() const override { return "taxi"; }
  State initial_state() const override { return encode(start_cell_, 0); }
  bool is_terminal(State s) const override;
  Bounds reward_bounds() const override { return {0.0, static_cast<double>(passengers_.size())}; }
  Bounds value_bounds() const override { return reward_bounds(); }

  std::size_t passenger_count() const { return passengers_.size(); }
  State encode(int cell, unsigned mask) const { return (static_cast<State>(cell) << passengers_.size()) | mask; }
  int cell_of(State s) const { return static_cast<int>(s >> passengers_.size()); }
  unsigned mask_of(State s) const { return static_cast<unsigned>(s & ((State{1} << passengers_.size()) - 1)); }

 protected:
  StepResult resolve(State s, Action direction) const override;

 private:
  std::vector<int> passengers_;  // cell indices, bit i <-> passengers_[i]
};

enum class FrozenLakeSize { k4x4, k8x8 };

std::unique_ptr<SyntheticTree> build_synthetic_tree(const SyntheticTreeSpec& spec);
std::unique_ptr<FrozenLake> build_frozenlake(FrozenLakeSize size, double gamma = 0.99, int step_cap = 200);
std::unique_ptr<Taxi> build_taxi(double gamma = 0.99, int step_cap = 500);

// ---------------------------------------------------------------------------
// Exact values

/// Expected discounted return of the uniform-random playout from s, truncated
/// after `rollout_cap` steps. Terminal states are worth 0.
double playout_value(const GenerativeModel& model, State s, double gamma, int rollout_cap);

/// Depth-limited optimal value by backward induction over the states
/// reachable from `root`: depth-`horizon` states take the playout value,
/// terminal states are worth 0. Throws UnsupportedOperation when the model's
/// dynamics are not enumerable.
double exact_root_value(const GenerativeModel& model, State root, double gamma, int horizon, int rollout_cap);
double exact_root_value(const GenerativeModel& model, double gamma, int horizon, int rollout_cap);

/// All states reachable from `root` (root first, breadth-first order).
std::vector<State> reachable_states(const GenerativeModel& model, State root);

}  // namespace spuct
