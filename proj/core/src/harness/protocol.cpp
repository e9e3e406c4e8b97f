#include "cropsim/harness/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace cropsim::harness {

bool is_rl_agent(const std::string& name) { return name == "ddpg" || name == "td3"; }

void check_agent_name(const std::string& name) {
  if (std::find(kAgentNames.begin(), kAgentNames.end(), name) != kAgentNames.end()) return;
  std::string valid;
  for (const auto& a : kAgentNames) valid += (valid.empty() ? "" : ", ") + a;
  throw ConfigError("unknown agent '" + name + "' (valid agents: " + valid + ")");
}

Settings settings_from_config(const Config& cfg) {
  Settings s;
  s.env = episode_config_from_config(cfg);
  s.train = rl::train_config_from_config(cfg);
  s.schedule = schedule_params_from_config(cfg);
  s.reactive = reactive_params_from_config(cfg);
  cfg.require_all_used();
  rl::validate(s.train);
  validate(s.schedule, s.env.bounds, s.env.duration);
  validate(s.reactive, s.env.bounds);
  return s;
}

std::unique_ptr<Policy> make_baseline(const std::string& name, const Settings& s, std::uint64_t seed) {
  check_agent_name(name);
  if (name == "random") return std::make_unique<RandomPolicy>(s.env.bounds, seed);
  if (name == "standard") return std::make_unique<StandardPolicy>(s.schedule);
  if (name == "reactive") return std::make_unique<ReactivePolicy>(s.reactive);
  throw ConfigError("agent '" + name + "' is not a baseline");
}

long evaluation_points(const Settings& s) {
  return static_cast<long>(s.train.episodes) * s.env.duration / s.train.eval_period;
}

rl::LearningCurve baseline_curve(const std::string& agent, const Settings& s, std::uint64_t seed) {
  auto policy = make_baseline(agent, s, seed);
  EpisodeConfig eval_cfg = s.env;
  eval_cfg.mode = Mode::kDeterministic;
  eval_cfg.log_path.clear();
  const rl::EvalResult e = rl::evaluate(eval_cfg, *policy, s.train.eval_runs, seed);
  rl::LearningCurve curve;
  const long points = evaluation_points(s);
  curve.reserve(static_cast<std::size_t>(points));
  for (long k = 1; k <= points; ++k) curve.push_back({k * s.train.eval_period, e.mean, e.std});
  return curve;
}

rl::LearningCurve aggregate_curves(const std::vector<rl::LearningCurve>& curves) {
  if (curves.empty()) throw std::invalid_argument("no curves to aggregate");
  const std::size_t n = curves.front().size();
  for (const auto& c : curves) {
    if (c.size() != n) throw std::invalid_argument("curves differ in length");
  }
  rl::LearningCurve out(n);
  const double m = static_cast<double>(curves.size());
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    for (const auto& c : curves) {
      if (c[i].step != curves.front()[i].step) throw std::invalid_argument("curves differ in evaluation steps");
      sum += c[i].mean_return;
    }
    const double mean = sum / m;
    double ss = 0.0;
    for (const auto& c : curves) ss += (c[i].mean_return - mean) * (c[i].mean_return - mean);
    out[i] = {curves.front()[i].step, mean, std::sqrt(ss / m)};
  }
  return out;
}

AgentResult summarize(const std::string& agent, std::vector<SeedRun> runs) {
  AgentResult r;
  r.agent = agent;
  std::vector<rl::LearningCurve> curves;
  for (auto& run : runs) {
    run.max_avg_return = rl::max_average_return(run.curve);
    curves.push_back(run.curve);
  }
  r.runs = std::move(runs);
  r.aggregate = aggregate_curves(curves);
  const auto best = std::max_element(r.aggregate.begin(), r.aggregate.end(),
                                     [](const auto& a, const auto& b) { return a.mean_return < b.mean_return; });
  r.max_avg_return = best->mean_return;
  r.std = best->std_return;
  return r;
}

AgentResult run_agent(const std::string& agent, const Settings& s, std::uint64_t base_seed, int seeds,
                      const RunProgress& progress) {
  check_agent_name(agent);
  if (seeds < 1) throw ConfigError("seeds must be >= 1");
  std::vector<SeedRun> runs;
  for (int k = 0; k < seeds; ++k) {
    SeedRun run;
    run.seed = repetition_seed(base_seed, k);
    if (is_rl_agent(agent)) {
      rl::TrainProgress cb;
      if (progress) cb = [&](const rl::CurvePoint& p) { progress(agent, run.seed, p); };
      rl::TrainResult t = rl::train(s.env, rl::parse_algo(agent), s.train, run.seed, cb);
      run.curve = std::move(t.curve);
      run.actor = std::make_shared<const rl::Net>(std::move(t.nets.actor));
    } else {
      run.curve = baseline_curve(agent, s, run.seed);
      if (progress && !run.curve.empty()) progress(agent, run.seed, run.curve.back());
    }
    runs.push_back(std::move(run));
  }
  return summarize(agent, std::move(runs));
}

BenchmarkResult run_bench(const std::vector<std::string>& agents, const Settings& s, std::uint64_t base_seed,
                          int seeds, const RunProgress& progress) {
  if (agents.empty()) throw ConfigError("bench needs at least one agent");
  for (const auto& a : agents) check_agent_name(a);
  BenchmarkResult b;
  for (const auto& a : agents) b.agents.push_back(run_agent(a, s, base_seed, seeds, progress));
  std::stable_sort(b.agents.begin(), b.agents.end(),
                   [](const AgentResult& x, const AgentResult& y) { return x.max_avg_return > y.max_avg_return; });
  return b;
}

std::vector<SummaryRow> summary_rows(const BenchmarkResult& r) {
  std::vector<SummaryRow> rows;
  for (const auto& a : r.agents) rows.push_back({a.agent, a.max_avg_return, a.std});
  return rows;
}

void save_summary(const std::vector<SummaryRow>& rows, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write summary '" + path.string() + "'");
  out << "agent,max_avg_return,std\n" << std::setprecision(17);
  for (const auto& r : rows) out << r.agent << ',' << r.max_avg_return << ',' << r.std << '\n';
}

std::vector<SummaryRow> load_summary(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open summary '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line) || line != "agent,max_avg_return,std") {
    throw std::runtime_error(path.string() + ": expected header agent,max_avg_return,std");
  }
  std::vector<SummaryRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream s(line);
    SummaryRow r;
    std::string a, b;
    if (!std::getline(s, r.agent, ',') || !std::getline(s, a, ',') || !std::getline(s, b)) {
      throw std::runtime_error(path.string() + ": malformed row '" + line + "'");
    }
    r.max_avg_return = std::stod(a);
    r.std = std::stod(b);
    rows.push_back(r);
  }
  return rows;
}

std::filesystem::path curve_path(const std::filesystem::path& dir, const std::string& agent, std::uint64_t seed) {
  return dir / (agent + "_seed" + std::to_string(seed) + "_curve.csv");
}

std::filesystem::path aggregate_path(const std::filesystem::path& dir, const std::string& agent) {
  return dir / (agent + "_aggregate.csv");
}

std::filesystem::path actor_path(const std::filesystem::path& dir, const std::string& agent, std::uint64_t seed) {
  return dir / (agent + "_seed" + std::to_string(seed) + "_actor.txt");
}

void save_agent_result(const AgentResult& r, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& run : r.runs) {
    rl::save_curve(run.curve, curve_path(dir, r.agent, run.seed));
    if (run.actor) rl::save_mlp(*run.actor, actor_path(dir, r.agent, run.seed));
  }
  rl::save_curve(r.aggregate, aggregate_path(dir, r.agent));
}

}  // namespace cropsim::harness
