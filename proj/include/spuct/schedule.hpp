#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace spuct {

enum class BonusKind {
  FixedPolynomial,     // C * n^(1/4) / t^(1/2)
  AdaptivePolynomial,  // C * n^(b/beta) / t^(alpha/beta), per-depth constants
  Logarithmic,         // C * sqrt(log n / t)  (UCB1 / UCT)
};

const char* to_string(BonusKind kind);
/// Accepts "fixed", "adaptive", "log".
BonusKind parse_bonus_kind(const std::string& name);

/// Exponent constants for one depth index.
struct DepthConstants {
  double alpha = 0.0;
  double beta = 0.0;
  double b = 0.0;
};

struct BonusSchedule {
  BonusKind kind = BonusKind::FixedPolynomial;
  double C = 1.0;
  int horizon = 1;
  /// Indexed 0..horizon; only populated for AdaptivePolynomial.
  std::vector<DepthConstants> constants;
  double p_for_validation = 1.0;
};

BonusSchedule make_fixed_schedule(double C, int horizon);
BonusSchedule make_log_schedule(double C, int horizon);

/// Reported when the recurrence cannot produce constants that satisfy every
/// condition down to depth index 0.
struct Infeasibility {
  int depth = 0;
  std::string condition;
  double lhs = 0.0;
  double rhs = 0.0;
};

using DeriveResult = std::variant<BonusSchedule, Infeasibility>;

/// Builds an adaptive schedule from the top down: alpha_H = beta_H / 2, then
/// for i = H-1..0 picks b_{i+1} = (alpha_{i+1} + 1) / 2 and sets
/// beta_i = b_{i+1} - 1, alpha_i = (b_{i+1} - 1)(1 - b_{i+1} / alpha_{i+1}).
/// For p > 2 every alpha_i is lowered to at most beta_i / p + 1/2. b_0 uses
/// the same rule. Throws std::invalid_argument for non-finite or nonpositive
/// inputs, H < 1 or p < 1.
DeriveResult derive_schedule(int horizon, double beta_H, double p, double C);

struct Violation {
  int depth = 0;
  std::string condition;
  double lhs = 0.0;
  double rhs = 0.0;
};

/// Checks every per-depth condition and the couplings between consecutive
/// depths. Empty for non-adaptive schedules with a positive C.
std::vector<Violation> validate_schedule(const BonusSchedule& s);

/// Exploration bonus at tree depth `depth` (constants of index depth + 1).
/// Returns +infinity when action_visits == 0.
double bonus(const BonusSchedule& s, int depth, std::uint64_t parent_visits, std::uint64_t action_visits);

}  // namespace spuct
