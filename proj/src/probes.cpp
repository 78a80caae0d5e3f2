#include <algorithm>
#include <cmath>
#include <numeric>

#include "spuct/estimators.hpp"
#include "spuct/harness.hpp"
#include "spuct/parallel.hpp"
#include "spuct/stats.hpp"

namespace spuct {

namespace {

void check_budgets(const std::vector<std::uint64_t>& budgets, std::uint64_t minimum) {
  if (budgets.empty()) throw std::invalid_argument("probe: no budgets");
  if (budgets.front() < minimum) throw std::invalid_argument("probe: smallest budget is below " + std::to_string(minimum));
  for (std::size_t i = 1; i < budgets.size(); ++i) {
    if (budgets[i] <= budgets[i - 1]) throw std::invalid_argument("probe: budgets must be strictly increasing");
  }
}

void check_common(const std::vector<double>& eps_grid, int replications, int workers) {
  if (eps_grid.empty()) throw std::invalid_argument("probe: empty eps grid");
  for (double e : eps_grid) {
    if (!(e > 0.0)) throw std::invalid_argument("probe: eps must be > 0");
  }
  if (replications < 1) throw std::invalid_argument("probe: replications must be >= 1");
  if (workers < 1) throw std::invalid_argument("probe: workers must be >= 1");
}

void check_arm(ArmKind kind, double mean) {
  if (kind == ArmKind::Bernoulli && !(mean >= 0.0 && mean <= 1.0)) throw std::invalid_argument("probe: Bernoulli mean outside [0, 1]");
  if (kind == ArmKind::Constant && !(mean >= 0.0 && std::isfinite(mean))) throw std::invalid_argument("probe: constant arm must be finite and >= 0");
}

double draw(ArmKind kind, double mean, Rng& rng) {
  if (kind == ArmKind::Constant) return mean;
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < mean ? 1.0 : 0.0;
}

/// Turns per-replication deviations [rep][budget] into frequencies and records.
ProbeResult aggregate(const std::vector<std::vector<double>>& deviations, const std::vector<std::uint64_t>& budgets,
                      const std::vector<double>& eps_grid, const std::string& env, const std::string& algorithm, double p,
                      double C, std::uint64_t seed) {
  ProbeResult out;
  const double reps = static_cast<double>(deviations.size());
  out.frequency.assign(eps_grid.size(), std::vector<double>(budgets.size(), 0.0));
  out.mean_abs_error.assign(budgets.size(), 0.0);
  for (std::size_t b = 0; b < budgets.size(); ++b) {
    double sum = 0.0;
    for (const auto& rep : deviations) sum += rep[b];
    out.mean_abs_error[b] = sum / reps;
    for (std::size_t e = 0; e < eps_grid.size(); ++e) {
      const auto over = std::count_if(deviations.begin(), deviations.end(), [&](const auto& rep) { return rep[b] > eps_grid[e]; });
      out.frequency[e][b] = static_cast<double>(over) / reps;
    }
  }
  for (std::size_t e = 0; e < eps_grid.size(); ++e) {
    const std::string name = algorithm + "/eps=" + format_double(eps_grid[e]);
    for (std::size_t b = 0; b < budgets.size(); ++b) {
      out.records.push_back({env, name, p, C, budgets[b], seed, "concentration_freq", out.frequency[e][b]});
    }
  }
  for (std::size_t b = 0; b < budgets.size(); ++b) {
    out.records.push_back({env, algorithm, p, C, budgets[b], seed, "root_abs_error", out.mean_abs_error[b]});
  }
  const bool positive = std::all_of(out.mean_abs_error.begin(), out.mean_abs_error.end(), [](double x) { return x > 0.0; });
  if (budgets.size() >= 3 && positive) {
    std::vector<double> ns(budgets.begin(), budgets.end());
    out.rate = fit_polynomial_rate(ns, out.mean_abs_error);
    out.records.push_back({env, algorithm, p, C, 0, seed, "slope", *out.rate});
  }
  return out;
}

}  // namespace

ProbeResult run_bandit_probe(const BanditProbeConfig& cfg) {
  const std::size_t K = cfg.arms.size();
  if (K < 2) throw std::invalid_argument("bandit probe: need at least 2 arms");
  for (const ArmSpec& a : cfg.arms) check_arm(a.kind, a.mean);
  const double best = std::max_element(cfg.arms.begin(), cfg.arms.end(), [](const ArmSpec& a, const ArmSpec& b) { return a.mean < b.mean; })->mean;
  if (std::count_if(cfg.arms.begin(), cfg.arms.end(), [&](const ArmSpec& a) { return a.mean == best; }) != 1) {
    throw std::invalid_argument("bandit probe: the best arm mean must be unique");
  }
  if (!(cfg.p >= 1.0)) throw std::invalid_argument("bandit probe: p must be >= 1");
  check_budgets(cfg.budgets, K);
  check_common(cfg.eps_grid, cfg.replications, cfg.workers);

  auto replicate = [&](std::size_t rep) {
    Rng rng(derive_seed(cfg.seed, 0, rep));
    std::vector<double> sums(K, 0.0);
    std::vector<std::uint64_t> counts(K, 0);
    std::vector<double> means(K, 0.0);
    std::vector<double> deviation;
    std::uint64_t t = 0;
    for (std::uint64_t budget : cfg.budgets) {
      for (; t < budget; ++t) {
        std::size_t arm = 0;
        if (t < K) {
          arm = t;
        } else {
          double best_score = -std::numeric_limits<double>::infinity();
          for (std::size_t a = 0; a < K; ++a) {
            const double score = means[a] + bonus(cfg.schedule, 0, t, counts[a]);
            if (score > best_score) {
              best_score = score;
              arm = a;
            }
          }
        }
        sums[arm] += draw(cfg.arms[arm].kind, cfg.arms[arm].mean, rng);
        ++counts[arm];
        means[arm] = sums[arm] / static_cast<double>(counts[arm]);
      }
      deviation.push_back(std::abs(power_mean(means, counts, cfg.p) - best));
    }
    return deviation;
  };
  const auto deviations = run_indexed<std::vector<double>>(static_cast<std::size_t>(cfg.replications), cfg.workers, replicate);
  return aggregate(deviations, cfg.budgets, cfg.eps_grid, "bandit", "bandit_probe", cfg.p, cfg.schedule.C, cfg.seed);
}

ProbeResult run_lemma_probe(const LemmaProbeConfig& cfg) {
  const std::size_t M = cfg.probs.size();
  if (M < 1 || cfg.child_values.size() != M) throw std::invalid_argument("lemma probe: probs and child_values must be non-empty and of equal size");
  for (double q : cfg.probs) {
    if (!(q >= 0.0)) throw std::invalid_argument("lemma probe: negative probability");
  }
  if (std::abs(std::accumulate(cfg.probs.begin(), cfg.probs.end(), 0.0) - 1.0) > 1e-9) throw std::invalid_argument("lemma probe: probabilities must sum to 1");
  if (!(cfg.gamma >= 0.0 && cfg.gamma <= 1.0)) throw std::invalid_argument("lemma probe: gamma must lie in [0, 1]");
  check_arm(cfg.reward_kind, cfg.reward_mean);
  for (double v : cfg.child_values) check_arm(cfg.child_kind, v);
  check_budgets(cfg.budgets, 1);
  check_common(cfg.eps_grid, cfg.replications, cfg.workers);

  double target = cfg.reward_mean;
  for (std::size_t m = 0; m < M; ++m) target += cfg.gamma * cfg.probs[m] * cfg.child_values[m];

  auto replicate = [&](std::size_t rep) {
    Rng rng(derive_seed(cfg.seed, 1, rep));
    std::discrete_distribution<std::size_t> successor(cfg.probs.begin(), cfg.probs.end());
    double reward_sum = 0.0;
    std::vector<double> child_sum(M, 0.0);
    std::vector<std::uint64_t> visits(M, 0);
    std::vector<double> deviation;
    std::uint64_t t = 0;
    for (std::uint64_t budget : cfg.budgets) {
      for (; t < budget; ++t) {
        reward_sum += draw(cfg.reward_kind, cfg.reward_mean, rng);
        const std::size_t m = successor(rng);
        child_sum[m] += draw(cfg.child_kind, cfg.child_values[m], rng);
        ++visits[m];
      }
      const double n = static_cast<double>(budget);
      double q = cfg.reward_kind == ArmKind::Constant ? cfg.reward_mean : reward_sum / n;
      for (std::size_t m = 0; m < M; ++m) {
        if (visits[m] == 0) continue;
        const double k = static_cast<double>(visits[m]);
        const double v = cfg.child_kind == ArmKind::Constant ? cfg.child_values[m] : child_sum[m] / k;
        q += cfg.gamma * (k / n) * v;
      }
      deviation.push_back(std::abs(q - target));
    }
    return deviation;
  };
  const auto deviations = run_indexed<std::vector<double>>(static_cast<std::size_t>(cfg.replications), cfg.workers, replicate);
  return aggregate(deviations, cfg.budgets, cfg.eps_grid, "lemma", "lemma_probe", 1.0, 0.0, cfg.seed);
}

}  // namespace spuct
