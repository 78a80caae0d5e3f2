// Command-line front end for the experiment harness.
//
//   spuct synthetic --sims 128,256,512 --p 2 --out runs/synthetic.csv
//   spuct control --env frozenlake4 --algorithms uct,stochastic_power_uct:2 --sims 2048
//   spuct probe --probe bandit --arms 0.9,0.6 --sims 100,400,1600
//   spuct grid --env synthetic --sims 1024 --C_grid 0.1,0.25,0.5
//   spuct schedule --horizon 2 --beta_H 120 --p 2

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "spuct/harness.hpp"

namespace {

using Settings = std::map<std::string, std::string>;

constexpr int kInvalidConfig = 1;
constexpr int kInfeasible = 2;

struct Flags {
  std::string config;
  Settings values;
};

void add_flag(CLI::App* app, Flags& flags, const std::string& key, const std::string& help) {
  app->add_option_function<std::string>("--" + key, [&flags, key](const std::string& v) { flags.values[key] = v; }, help);
}

Settings merged(const Flags& flags) {
  Settings out;
  if (!flags.config.empty()) {
    std::ifstream in(flags.config);
    if (!in) throw std::invalid_argument("cannot open config file " + flags.config);
    std::ostringstream text;
    text << in.rdbuf();
    out = spuct::parse_config_text(text.str());
  }
  for (const auto& [k, v] : flags.values) out[k] = v;
  return out;
}

std::string take(Settings& s, const std::string& key, const std::string& fallback) {
  auto it = s.find(key);
  if (it == s.end()) return fallback;
  std::string v = it->second;
  s.erase(it);
  return v;
}

void write_output(const std::string& path, const std::vector<spuct::ExperimentRecord>& records,
                  const std::vector<spuct::SummaryRow>& summary) {
  if (path.empty() || path == "-") {
    spuct::write_csv(std::cout, records);
    if (!summary.empty()) std::cerr << spuct::summary_csv(summary);
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  spuct::write_csv(out, records);
  if (!summary.empty()) {
    std::ofstream sum(path + ".summary.csv");
    sum << spuct::summary_csv(summary);
  }
}

bool adaptive_requested(const spuct::ExperimentConfig& cfg) {
  for (const auto& a : cfg.algorithms) {
    if (a.bonus == spuct::BonusKind::AdaptivePolynomial) return true;
  }
  return false;
}

int finish(const spuct::ExperimentConfig& cfg, const spuct::ExperimentResult& result) {
  for (const std::string& reason : result.skipped) std::cerr << "skipped " << reason << '\n';
  write_output(cfg.output, result.records, result.summary);
  return !result.skipped.empty() && adaptive_requested(cfg) ? kInfeasible : 0;
}

int run_experiment(spuct::ExperimentKind kind, const Flags& flags) {
  const spuct::ExperimentConfig cfg = spuct::experiment_from_settings(kind, merged(flags));
  switch (kind) {
    case spuct::ExperimentKind::SyntheticConvergence:
      return finish(cfg, spuct::run_synthetic_convergence(cfg));
    case spuct::ExperimentKind::ControlEvaluation:
      return finish(cfg, spuct::run_control_evaluation(cfg));
    case spuct::ExperimentKind::GridSearch: {
      const spuct::GridSearchResult g = spuct::grid_search_C(cfg, cfg.C_grid);
      for (const auto& [label, C] : g.best_C) std::cerr << "best C for " << label << ": " << spuct::format_double(C) << '\n';
      return finish(cfg, g.result);
    }
    case spuct::ExperimentKind::ConcentrationProbe:
      break;
  }
  return kInvalidConfig;
}

int run_probe(const Flags& flags) {
  Settings s = merged(flags);
  const std::string kind = take(s, "probe", "bandit");
  const std::string out = take(s, "out", "");
  spuct::ProbeResult result;
  if (kind == "bandit") {
    result = spuct::run_bandit_probe(spuct::bandit_probe_from_settings(s));
  } else if (kind == "lemma") {
    result = spuct::run_lemma_probe(spuct::lemma_probe_from_settings(s));
  } else {
    throw std::invalid_argument("--probe must be bandit or lemma");
  }
  write_output(out, result.records, {});
  return 0;
}

int run_schedule(const Flags& flags) {
  Settings s = merged(flags);
  const int horizon = std::stoi(take(s, "horizon", "1"));
  const double beta_H = std::stod(take(s, "beta_H", "120"));
  const double p = std::stod(take(s, "p", "2"));
  const double C = std::stod(take(s, "C", "1"));
  if (!s.empty()) throw std::invalid_argument("unknown schedule setting '" + s.begin()->first + "'");
  const spuct::DeriveResult r = spuct::derive_schedule(horizon, beta_H, p, C);
  if (const auto* bad = std::get_if<spuct::Infeasibility>(&r)) {
    std::cerr << "infeasible at depth index " << bad->depth << ": " << bad->condition << " (" << spuct::format_double(bad->lhs)
              << " vs " << spuct::format_double(bad->rhs) << ")\n";
    return kInfeasible;
  }
  const auto& schedule = std::get<spuct::BonusSchedule>(r);
  std::cout << spuct::schedule_to_config(schedule);
  for (const spuct::Violation& v : spuct::validate_schedule(schedule)) {
    std::cerr << "violation at depth index " << v.depth << ": " << v.condition << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic-Power-UCT experiment harness"};
  app.require_subcommand(1);

  Flags synthetic, control, grid, probe, schedule;
  const std::vector<std::pair<std::string, std::string>> experiment_flags{
      {"seed", "master seed"},
      {"trials", "synthetic trials (tree seed x run seed)"},
      {"runs_per_tree", "consecutive trials sharing one tree"},
      {"eval_runs", "evaluation episodes per algorithm and budget"},
      {"sims", "comma-separated simulation budgets"},
      {"algorithms", "comma-separated name[:p[:C[:bonus]]] entries"},
      {"p", "power-mean exponent"},
      {"C", "exploration constant"},
      {"bonus", "fixed | adaptive | log"},
      {"beta_H", "top-level beta for adaptive schedules"},
      {"env", "synthetic | frozenlake4 | frozenlake8 | taxi"},
      {"branching", "synthetic tree branching factor"},
      {"depth", "synthetic tree depth"},
      {"sigma", "synthetic leaf reward noise"},
      {"slip", "synthetic slip probability"},
      {"layout", "grid layout file"},
      {"horizon", "planning horizon"},
      {"rollout_cap", "playout step cap"},
      {"gamma", "discount"},
      {"step_cap", "episode step cap"},
      {"mode", "truncate | full"},
      {"out", "output CSV path (- for stdout)"},
      {"workers", "worker threads"},
      {"C_grid", "comma-separated candidate C values"},
  };

  auto add_experiment = [&](const std::string& name, const std::string& help, Flags& flags) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", flags.config, "flat key = value file; flags override it");
    for (const auto& [key, text] : experiment_flags) add_flag(sub, flags, key, text);
    return sub;
  };
  CLI::App* synthetic_cmd = add_experiment("synthetic", "root value convergence on synthetic trees", synthetic);
  CLI::App* control_cmd = add_experiment("control", "episodic evaluation on grid worlds", control);
  CLI::App* grid_cmd = add_experiment("grid", "grid search over the exploration constant", grid);

  CLI::App* probe_cmd = app.add_subcommand("probe", "concentration probes");
  probe_cmd->add_option("--config", probe.config, "flat key = value file; flags override it");
  for (const auto& [key, text] : std::vector<std::pair<std::string, std::string>>{
           {"probe", "bandit | lemma"},
           {"arms", "bandit arms: [bernoulli:|constant:]mean,..."},
           {"p", "power-mean exponent"},
           {"C", "exploration constant"},
           {"bonus", "fixed | adaptive | log"},
           {"beta_H", "beta for adaptive bonuses"},
           {"sims", "comma-separated budgets"},
           {"eps", "comma-separated deviation thresholds"},
           {"replications", "replications per budget"},
           {"reward", "lemma probe reward mean"},
           {"reward_kind", "bernoulli | constant"},
           {"probs", "lemma probe successor probabilities"},
           {"values", "lemma probe child values"},
           {"child_kind", "bernoulli | constant"},
           {"gamma", "discount"},
           {"seed", "master seed"},
           {"out", "output CSV path"},
           {"workers", "worker threads"},
       }) {
    add_flag(probe_cmd, probe, key, text);
  }

  CLI::App* schedule_cmd = app.add_subcommand("schedule", "derive and validate an adaptive bonus schedule");
  schedule_cmd->add_option("--config", schedule.config, "flat key = value file; flags override it");
  for (const char* key : {"horizon", "beta_H", "p", "C"}) add_flag(schedule_cmd, schedule, key, key);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kInvalidConfig;
  }

  try {
    if (synthetic_cmd->parsed()) return run_experiment(spuct::ExperimentKind::SyntheticConvergence, synthetic);
    if (control_cmd->parsed()) return run_experiment(spuct::ExperimentKind::ControlEvaluation, control);
    if (grid_cmd->parsed()) return run_experiment(spuct::ExperimentKind::GridSearch, grid);
    if (probe_cmd->parsed()) return run_probe(probe);
    if (schedule_cmd->parsed()) return run_schedule(schedule);
  } catch (const spuct::ScheduleInfeasible& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInfeasible;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalidConfig;
  }
  return kInvalidConfig;
}
