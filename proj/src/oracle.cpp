#include <algorithm>
#include <deque>
#include <limits>
#include <unordered_map>

#include "spuct/envs.hpp"

namespace spuct {

namespace {

struct Edge {
  std::size_t to;
  double probability;
  double reward;
  bool terminal;
};

/// Reachable state graph with per-(state, action) outcome lists.
struct StateGraph {
  std::vector<State> states;
  std::vector<bool> terminal;
  std::vector<std::vector<std::vector<Edge>>> edges;  // [state][action]
};

StateGraph enumerate(const GenerativeModel& model, State root) {
  if (!model.enumerable()) throw UnsupportedOperation(model.name() + ": exact values need enumerable dynamics");
  StateGraph g;
  std::unordered_map<State, std::size_t> index;
  auto intern = [&](State s) {
    auto [it, inserted] = index.emplace(s, g.states.size());
    if (inserted) {
      g.states.push_back(s);
      g.terminal.push_back(model.is_terminal(s));
      g.edges.emplace_back();
    }
    return it->second;
  };
  intern(root);
  for (std::size_t i = 0; i < g.states.size(); ++i) {
    if (g.terminal[i]) continue;
    const State s = g.states[i];
    const std::size_t actions = model.action_count(s);
    std::vector<std::vector<Edge>> per_action(actions);
    for (Action a = 0; a < actions; ++a) {
      for (const Outcome& o : model.transitions(s, a)) {
        const std::size_t j = intern(o.next);
        per_action[a].push_back({j, o.probability, o.mean_reward, o.terminal});
      }
    }
    g.edges[i] = std::move(per_action);
  }
  return g;
}

double backup(const std::vector<Edge>& edges, const std::vector<double>& next, double gamma) {
  double q = 0.0;
  for (const Edge& e : edges) q += e.probability * (e.reward + (e.terminal ? 0.0 : gamma * next[e.to]));
  return q;
}

std::vector<double> playout_values(const StateGraph& g, double gamma, int rollout_cap) {
  const std::size_t n = g.states.size();
  std::vector<double> cur(n, 0.0);
  std::vector<double> nxt(n, 0.0);
  for (int step = 0; step < rollout_cap; ++step) {
    for (std::size_t i = 0; i < n; ++i) {
      if (g.terminal[i] || g.edges[i].empty()) {
        nxt[i] = 0.0;
        continue;
      }
      double v = 0.0;
      for (const auto& edges : g.edges[i]) v += backup(edges, cur, gamma);
      nxt[i] = v / static_cast<double>(g.edges[i].size());
    }
    if (nxt == cur) break;
    std::swap(cur, nxt);
  }
  return cur;
}

}  // namespace

std::vector<State> reachable_states(const GenerativeModel& model, State root) {
  return enumerate(model, root).states;
}

double playout_value(const GenerativeModel& model, State s, double gamma, int rollout_cap) {
  const StateGraph g = enumerate(model, s);
  return playout_values(g, gamma, rollout_cap).front();
}

double exact_root_value(const GenerativeModel& model, State root, double gamma, int horizon, int rollout_cap) {
  if (horizon < 0) throw std::invalid_argument("exact_root_value: horizon must be >= 0");
  const StateGraph g = enumerate(model, root);
  std::vector<double> value = playout_values(g, gamma, rollout_cap);
  std::vector<double> next(value.size(), 0.0);
  for (int h = horizon - 1; h >= 0; --h) {
    for (std::size_t i = 0; i < g.states.size(); ++i) {
      if (g.terminal[i] || g.edges[i].empty()) {
        next[i] = 0.0;
        continue;
      }
      double best = -std::numeric_limits<double>::infinity();
      for (const auto& edges : g.edges[i]) best = std::max(best, backup(edges, value, gamma));
      next[i] = best;
    }
    if (next == value) break;  // fixed point: further depths change nothing
    std::swap(value, next);
  }
  return value.front();
}

double exact_root_value(const GenerativeModel& model, double gamma, int horizon, int rollout_cap) {
  return exact_root_value(model, model.initial_state(), gamma, horizon, rollout_cap);
}

}  // namespace spuct
