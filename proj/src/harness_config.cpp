#include <charconv>
#include <cmath>
#include <set>
#include <sstream>

#include "spuct/harness.hpp"

namespace spuct {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_list(const std::string& text, char sep = ',') {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <typename T>
T to_number(const std::string& key, const std::string& text) {
  T value{};
  const char* first = text.data();
  const char* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) throw std::invalid_argument("setting '" + key + "': cannot parse '" + text + "'");
  return value;
}

double to_real(const std::string& key, const std::string& text) {
  const double v = to_number<double>(key, text);
  if (!std::isfinite(v)) throw std::invalid_argument("setting '" + key + "' must be finite");
  return v;
}

int to_int(const std::string& key, const std::string& text) { return to_number<int>(key, text); }

template <typename T, typename Fn>
std::vector<T> to_list(const std::string& key, const std::string& text, Fn&& parse) {
  std::vector<T> out;
  for (const std::string& item : split_list(text)) out.push_back(parse(key, item));
  if (out.empty()) throw std::invalid_argument("setting '" + key + "' is empty");
  return out;
}

class Settings {
 public:
  Settings(const std::map<std::string, std::string>& values, std::set<std::string> allowed) : values_(values) {
    for (const auto& [key, value] : values) {
      if (!allowed.count(key)) throw std::invalid_argument("unknown setting '" + key + "'");
    }
  }
  const std::string* get(const std::string& key) const {
    auto it = values_.find(key);
    return it == values_.end() ? nullptr : &it->second;
  }

 private:
  const std::map<std::string, std::string>& values_;
};

ArmSpec parse_arm(const std::string& key, const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) return {ArmKind::Bernoulli, to_real(key, text)};
  const std::string kind = text.substr(0, colon);
  const double mean = to_real(key, text.substr(colon + 1));
  if (kind == "bernoulli") return {ArmKind::Bernoulli, mean};
  if (kind == "constant") return {ArmKind::Constant, mean};
  throw std::invalid_argument("setting '" + key + "': unknown arm kind '" + kind + "'");
}

ArmKind parse_arm_kind(const std::string& key, const std::string& text) {
  if (text == "bernoulli") return ArmKind::Bernoulli;
  if (text == "constant") return ArmKind::Constant;
  throw std::invalid_argument("setting '" + key + "': unknown distribution '" + text + "'");
}

std::uint64_t to_u64(const std::string& key, const std::string& text) { return to_number<std::uint64_t>(key, text); }

}  // namespace

std::map<std::string, std::string> parse_config_text(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("config line " + std::to_string(number) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw std::invalid_argument("config line " + std::to_string(number) + ": empty key");
    out[key] = value;
  }
  return out;
}

ExperimentConfig experiment_from_settings(ExperimentKind kind, const std::map<std::string, std::string>& values) {
  const Settings s(values, {"env", "seed", "trials", "runs_per_tree", "eval_runs", "sims", "algorithms", "p", "C", "bonus",
                            "beta_H", "horizon", "rollout_cap", "gamma", "step_cap", "branching", "depth", "sigma", "slip",
                            "layout", "workers", "out", "mode", "C_grid"});
  ExperimentConfig cfg;
  cfg.kind = kind;
  if (auto v = s.get("env")) cfg.env.name = *v;
  if (auto v = s.get("seed")) cfg.master_seed = to_u64("seed", *v);
  if (auto v = s.get("trials")) cfg.trials = to_int("trials", *v);
  if (auto v = s.get("runs_per_tree")) cfg.runs_per_tree = to_int("runs_per_tree", *v);
  if (auto v = s.get("eval_runs")) cfg.eval_runs = to_int("eval_runs", *v);
  if (auto v = s.get("sims")) cfg.budgets = to_list<std::uint64_t>("sims", *v, to_u64);
  if (auto v = s.get("horizon")) cfg.horizon = to_int("horizon", *v);
  if (auto v = s.get("rollout_cap")) cfg.rollout_cap = to_int("rollout_cap", *v);
  if (auto v = s.get("gamma")) cfg.env.gamma = to_real("gamma", *v);
  if (auto v = s.get("step_cap")) cfg.env.step_cap = to_int("step_cap", *v);
  if (auto v = s.get("branching")) cfg.env.tree.branching = to_int("branching", *v);
  if (auto v = s.get("depth")) cfg.env.tree.depth = to_int("depth", *v);
  if (auto v = s.get("sigma")) cfg.env.tree.sigma = to_real("sigma", *v);
  if (auto v = s.get("slip")) cfg.env.tree.slip = to_real("slip", *v);
  if (auto v = s.get("layout")) cfg.env.layout_file = *v;
  if (auto v = s.get("workers")) cfg.workers = to_int("workers", *v);
  if (auto v = s.get("out")) cfg.output = *v;
  if (auto v = s.get("C_grid")) cfg.C_grid = to_list<double>("C_grid", *v, to_real);
  if (auto v = s.get("mode")) {
    if (*v == "truncate") {
      cfg.mode = TrajectoryMode::TruncateAtLeaf;
    } else if (*v == "full") {
      cfg.mode = TrajectoryMode::FullHorizon;
    } else {
      throw std::invalid_argument("setting 'mode' must be truncate or full");
    }
  }

  const double p = s.get("p") ? to_real("p", *s.get("p")) : 2.0;
  std::optional<double> C;
  if (auto v = s.get("C")) C = to_real("C", *v);
  const BonusKind bonus_kind = s.get("bonus") ? parse_bonus_kind(*s.get("bonus")) : BonusKind::FixedPolynomial;
  const double beta_H = s.get("beta_H") ? to_real("beta_H", *s.get("beta_H")) : 120.0;
  const std::vector<std::string> names = s.get("algorithms") ? split_list(*s.get("algorithms")) : std::vector<std::string>{"stochastic_power_uct"};
  for (const std::string& name : names) {
    AlgorithmSpec spec = parse_algorithm(name, p, C, bonus_kind, cfg.env.name);
    spec.beta_H = beta_H;
    cfg.algorithms.push_back(spec);
  }
  if (cfg.budgets.empty()) throw std::invalid_argument("setting 'sims' is required");
  validate_experiment(cfg);
  return cfg;
}

namespace {

const std::set<std::string> kProbeKeys{"probe", "arms", "p", "C", "bonus", "beta_H", "sims", "eps", "replications", "seed",
                                       "workers", "out", "reward", "reward_kind", "probs", "values", "child_kind", "gamma"};

template <typename Cfg>
void common_probe(const Settings& s, Cfg& cfg) {
  if (auto v = s.get("sims")) cfg.budgets = to_list<std::uint64_t>("sims", *v, to_u64);
  cfg.eps_grid = s.get("eps") ? to_list<double>("eps", *s.get("eps"), to_real) : std::vector<double>{0.05, 0.1};
  if (auto v = s.get("replications")) cfg.replications = to_int("replications", *v);
  if (auto v = s.get("seed")) cfg.seed = to_u64("seed", *v);
  if (auto v = s.get("workers")) cfg.workers = to_int("workers", *v);
  if (cfg.budgets.empty()) throw std::invalid_argument("setting 'sims' is required");
}

}  // namespace

BanditProbeConfig bandit_probe_from_settings(const std::map<std::string, std::string>& values) {
  const Settings s(values, kProbeKeys);
  BanditProbeConfig cfg;
  common_probe(s, cfg);
  cfg.arms = s.get("arms") ? to_list<ArmSpec>("arms", *s.get("arms"), parse_arm)
                           : std::vector<ArmSpec>{{ArmKind::Bernoulli, 0.9}, {ArmKind::Bernoulli, 0.6}};
  if (auto v = s.get("p")) cfg.p = to_real("p", *v);
  const double C = s.get("C") ? to_real("C", *s.get("C")) : 1.0;
  const BonusKind kind = s.get("bonus") ? parse_bonus_kind(*s.get("bonus")) : BonusKind::FixedPolynomial;
  if (kind == BonusKind::FixedPolynomial) {
    cfg.schedule = make_fixed_schedule(C, 1);
  } else if (kind == BonusKind::Logarithmic) {
    cfg.schedule = make_log_schedule(C, 1);
  } else {
    const double beta_H = s.get("beta_H") ? to_real("beta_H", *s.get("beta_H")) : 120.0;
    DeriveResult r = derive_schedule(1, beta_H, cfg.p, C);
    if (auto* bad = std::get_if<Infeasibility>(&r)) throw ScheduleInfeasible("bandit_probe", *bad);
    cfg.schedule = std::get<BonusSchedule>(std::move(r));
  }
  return cfg;
}

LemmaProbeConfig lemma_probe_from_settings(const std::map<std::string, std::string>& values) {
  const Settings s(values, kProbeKeys);
  LemmaProbeConfig cfg;
  common_probe(s, cfg);
  if (auto v = s.get("reward")) cfg.reward_mean = to_real("reward", *v);
  if (auto v = s.get("reward_kind")) cfg.reward_kind = parse_arm_kind("reward_kind", *v);
  if (auto v = s.get("child_kind")) cfg.child_kind = parse_arm_kind("child_kind", *v);
  if (auto v = s.get("gamma")) cfg.gamma = to_real("gamma", *v);
  cfg.probs = s.get("probs") ? to_list<double>("probs", *s.get("probs"), to_real) : std::vector<double>{0.5, 0.3, 0.2};
  cfg.child_values = s.get("values") ? to_list<double>("values", *s.get("values"), to_real) : std::vector<double>{0.2, 0.5, 0.8};
  return cfg;
}

std::string schedule_to_config(const BonusSchedule& s) {
  std::ostringstream out;
  const char* kind = s.kind == BonusKind::FixedPolynomial ? "fixed" : s.kind == BonusKind::AdaptivePolynomial ? "adaptive" : "log";
  out << "bonus = " << kind << '\n';
  out << "C = " << format_double(s.C) << '\n';
  out << "horizon = " << s.horizon << '\n';
  out << "p = " << format_double(s.p_for_validation) << '\n';
  for (std::size_t i = 0; i < s.constants.size(); ++i) {
    const DepthConstants& c = s.constants[i];
    out << "depth_" << i << " = " << format_double(c.alpha) << ' ' << format_double(c.beta) << ' ' << format_double(c.b) << '\n';
  }
  return out.str();
}

BonusSchedule schedule_from_config(const std::map<std::string, std::string>& values) {
  BonusSchedule s;
  auto require = [&](const std::string& key) -> const std::string& {
    auto it = values.find(key);
    if (it == values.end()) throw std::invalid_argument("schedule: missing '" + key + "'");
    return it->second;
  };
  s.kind = parse_bonus_kind(require("bonus"));
  s.C = to_real("C", require("C"));
  s.horizon = to_int("horizon", require("horizon"));
  s.p_for_validation = to_real("p", require("p"));
  std::size_t expected = 0;
  for (const auto& [key, value] : values) {
    if (key.rfind("depth_", 0) == 0) {
      ++expected;
    } else if (key != "bonus" && key != "C" && key != "horizon" && key != "p") {
      throw std::invalid_argument("schedule: unknown key '" + key + "'");
    }
  }
  for (std::size_t i = 0; i < expected; ++i) {
    const std::string key = "depth_" + std::to_string(i);
    std::istringstream triple(require(key));
    std::string a, b, c, extra;
    if (!(triple >> a >> b >> c) || (triple >> extra)) throw std::invalid_argument("schedule: '" + key + "' needs three numbers");
    s.constants.push_back({to_real(key, a), to_real(key, b), to_real(key, c)});
  }
  if (s.kind == BonusKind::AdaptivePolynomial && s.constants.size() != static_cast<std::size_t>(s.horizon) + 1) {
    throw std::invalid_argument("schedule: adaptive schedules need depth_0 .. depth_H");
  }
  return s;
}

}  // namespace spuct
