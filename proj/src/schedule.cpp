#include "spuct/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace spuct {

namespace {

constexpr double kCouplingTol = 1e-9;

bool positive_finite(double x) { return std::isfinite(x) && x > 0.0; }

}  // namespace

const char* to_string(BonusKind kind) {
  switch (kind) {
    case BonusKind::FixedPolynomial: return "fixed";
    case BonusKind::AdaptivePolynomial: return "adaptive";
    case BonusKind::Logarithmic: return "log";
  }
  return "?";
}

BonusKind parse_bonus_kind(const std::string& name) {
  if (name == "fixed") return BonusKind::FixedPolynomial;
  if (name == "adaptive") return BonusKind::AdaptivePolynomial;
  if (name == "log") return BonusKind::Logarithmic;
  throw std::invalid_argument("unknown bonus kind '" + name + "'");
}

BonusSchedule make_fixed_schedule(double C, int horizon) {
  if (!positive_finite(C) || horizon < 1) throw std::invalid_argument("make_fixed_schedule: need C > 0, horizon >= 1");
  return {BonusKind::FixedPolynomial, C, horizon, {}, 1.0};
}

BonusSchedule make_log_schedule(double C, int horizon) {
  if (!positive_finite(C) || horizon < 1) throw std::invalid_argument("make_log_schedule: need C > 0, horizon >= 1");
  return {BonusKind::Logarithmic, C, horizon, {}, 1.0};
}

DeriveResult derive_schedule(int horizon, double beta_H, double p, double C) {
  if (horizon < 1) throw std::invalid_argument("derive_schedule: horizon must be >= 1");
  if (!positive_finite(beta_H) || !positive_finite(C)) throw std::invalid_argument("derive_schedule: beta_H and C must be finite and > 0");
  if (!std::isfinite(p) || p < 1.0) throw std::invalid_argument("derive_schedule: p must be finite and >= 1");
  if (beta_H <= 4.0) return Infeasibility{horizon, "beta_H > 4", beta_H, 4.0};

  std::vector<DepthConstants> c(static_cast<std::size_t>(horizon) + 1);
  auto lower_for_p = [p](double alpha, double beta) {
    return p > 2.0 ? std::min(alpha, beta / p + 0.5) : alpha;
  };

  c[horizon].beta = beta_H;
  c[horizon].alpha = lower_for_p(beta_H / 2.0, beta_H);
  for (int i = horizon; i >= 0; --i) {
    DepthConstants& cur = c[i];
    if (p > 2.0) {
      const double gap = cur.alpha - cur.beta / p;
      if (!(gap > 0.0 && gap < 1.0)) return Infeasibility{i, "0 < alpha - beta/p < 1", gap, 0.0};
    }
    cur.b = (cur.alpha + 1.0) / 2.0;
    if (!(cur.b > 2.0)) return Infeasibility{i, "b > 2", cur.b, 2.0};
    if (i == 0) break;
    DepthConstants& next = c[i - 1];
    next.beta = cur.b - 1.0;
    next.alpha = lower_for_p((cur.b - 1.0) * (1.0 - cur.b / cur.alpha), next.beta);
  }
  return BonusSchedule{BonusKind::AdaptivePolynomial, C, horizon, std::move(c), p};
}

std::vector<Violation> validate_schedule(const BonusSchedule& s) {
  std::vector<Violation> out;
  if (!positive_finite(s.C)) out.push_back({0, "C > 0", s.C, 0.0});
  if (s.kind != BonusKind::AdaptivePolynomial) return out;

  if (s.constants.size() != static_cast<std::size_t>(s.horizon) + 1) {
    out.push_back({0, "constants.size() == H + 1", static_cast<double>(s.constants.size()), static_cast<double>(s.horizon) + 1});
    return out;
  }
  const double p = s.p_for_validation;
  for (int i = 0; i <= s.horizon; ++i) {
    const DepthConstants& k = s.constants[i];
    if (!(k.alpha > 0.0)) out.push_back({i, "alpha > 0", k.alpha, 0.0});
    if (!(k.beta > 0.0)) out.push_back({i, "beta > 0", k.beta, 0.0});
    if (!(k.b > 2.0)) out.push_back({i, "b > 2", k.b, 2.0});
    if (!(k.b < k.alpha)) out.push_back({i, "b < alpha", k.b, k.alpha});
    if (!(k.alpha <= k.beta / 2.0)) out.push_back({i, "alpha <= beta/2", k.alpha, k.beta / 2.0});
    if (p > 2.0) {
      const double gap = k.alpha - k.beta / p;
      if (!(gap > 0.0)) out.push_back({i, "alpha - beta/p > 0", gap, 0.0});
      if (!(gap < 1.0)) out.push_back({i, "alpha - beta/p < 1", gap, 1.0});
    }
    const double lhs = k.alpha * (1.0 - k.b / k.alpha);
    if (!(lhs <= k.b)) out.push_back({i, "alpha(1 - b/alpha) <= b", lhs, k.b});

    if (i < s.horizon) {
      const DepthConstants& up = s.constants[i + 1];
      const double beta_rhs = up.b - 1.0;
      if (!(std::abs(k.beta - beta_rhs) <= kCouplingTol)) out.push_back({i, "beta_i = b_{i+1} - 1", k.beta, beta_rhs});
      const double alpha_rhs = (up.b - 1.0) * (1.0 - up.b / up.alpha);
      // For p > 2 the construction may lower alpha below the coupling value.
      const bool ok = p > 2.0 ? k.alpha <= alpha_rhs + kCouplingTol : std::abs(k.alpha - alpha_rhs) <= kCouplingTol;
      if (!ok) out.push_back({i, "alpha_i = (b_{i+1} - 1)(1 - b_{i+1}/alpha_{i+1})", k.alpha, alpha_rhs});
    }
  }
  return out;
}

double bonus(const BonusSchedule& s, int depth, std::uint64_t parent_visits, std::uint64_t action_visits) {
  if (depth < 0 || depth >= s.horizon) throw std::invalid_argument("bonus: depth out of range");
  if (action_visits == 0) return std::numeric_limits<double>::infinity();
  const double n = static_cast<double>(parent_visits);
  const double t = static_cast<double>(action_visits);
  switch (s.kind) {
    case BonusKind::FixedPolynomial:
      return s.C * std::pow(n, 0.25) / std::sqrt(t);
    case BonusKind::AdaptivePolynomial: {
      if (s.constants.size() <= static_cast<std::size_t>(depth) + 1) throw std::invalid_argument("bonus: schedule has no constants for depth");
      const DepthConstants& k = s.constants[depth + 1];
      return s.C * std::pow(n, k.b / k.beta) / std::pow(t, k.alpha / k.beta);
    }
    case BonusKind::Logarithmic:
      return s.C * std::sqrt(std::log(std::max(n, 1.0)) / t);
  }
  return 0.0;
}

}  // namespace spuct
