#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "cropsim/agents.hpp"
#include "cropsim/config.hpp"
#include "cropsim/environment.hpp"
#include "cropsim/rl/training.hpp"

namespace cropsim::harness {

inline const std::vector<std::string> kAgentNames = {"random", "standard", "reactive", "ddpg", "td3"};
inline const std::vector<std::string> kBaselineNames = {"random", "standard", "reactive"};

bool is_rl_agent(const std::string& name);
/// Throws ConfigError naming the valid agents.
void check_agent_name(const std::string& name);

/// Everything a sub-command needs, read from one flat config.
struct Settings {
  EpisodeConfig env;
  rl::TrainConfig train;
  SchedulePolicyParams schedule;
  ReactivePolicyParams reactive;
};

/// Reads every section, validates it, and rejects keys no section recognizes.
Settings settings_from_config(const Config& cfg);

std::unique_ptr<Policy> make_baseline(const std::string& name, const Settings& s, std::uint64_t seed);

/// Seed of repetition `k` (0-based) under `base`.
inline std::uint64_t repetition_seed(std::uint64_t base, int k) { return base + static_cast<std::uint64_t>(k); }

/// Number of evaluation points in a full training run.
long evaluation_points(const Settings& s);

struct SeedRun {
  std::uint64_t seed = 0;
  rl::LearningCurve curve;
  double max_avg_return = 0.0;
  std::shared_ptr<const rl::Net> actor;  // null for baselines
};

struct AgentResult {
  std::string agent;
  std::vector<SeedRun> runs;
  rl::LearningCurve aggregate;  // mean and population std across seeds at each step
  double max_avg_return = 0.0;  // peak of the aggregate mean
  double std = 0.0;             // across-seed std at that peak
};

struct BenchmarkResult {
  std::vector<AgentResult> agents;  // best first
};

/// A stationary policy's evaluation depends only on the evaluation seeds, so it is
/// computed once and repeated at every evaluation step.
rl::LearningCurve baseline_curve(const std::string& agent, const Settings& s, std::uint64_t seed);

/// Throws std::invalid_argument if the curves do not share the same steps.
rl::LearningCurve aggregate_curves(const std::vector<rl::LearningCurve>& curves);

AgentResult summarize(const std::string& agent, std::vector<SeedRun> runs);

using RunProgress = std::function<void(const std::string& agent, std::uint64_t seed, const rl::CurvePoint&)>;

/// Baselines via baseline_curve, RL agents via rl::train, over `seeds` repetitions.
AgentResult run_agent(const std::string& agent, const Settings& s, std::uint64_t base_seed, int seeds,
                      const RunProgress& progress = {});

BenchmarkResult run_bench(const std::vector<std::string>& agents, const Settings& s, std::uint64_t base_seed,
                          int seeds, const RunProgress& progress = {});

struct SummaryRow {
  std::string agent;
  double max_avg_return = 0.0;
  double std = 0.0;
};

/// Columns agent,max_avg_return,std in the order given.
void save_summary(const std::vector<SummaryRow>& rows, const std::filesystem::path& path);
std::vector<SummaryRow> load_summary(const std::filesystem::path& path);
std::vector<SummaryRow> summary_rows(const BenchmarkResult& r);

/// File names used by the train and bench commands.
std::filesystem::path curve_path(const std::filesystem::path& dir, const std::string& agent, std::uint64_t seed);
std::filesystem::path aggregate_path(const std::filesystem::path& dir, const std::string& agent);
std::filesystem::path actor_path(const std::filesystem::path& dir, const std::string& agent, std::uint64_t seed);

/// Writes per-seed curves, the aggregate curve and (for RL agents) actor weights.
void save_agent_result(const AgentResult& r, const std::filesystem::path& dir);

}  // namespace cropsim::harness
