#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "cropsim/agents.hpp"
#include "cropsim/environment.hpp"
#include "cropsim/rl/actor_critic.hpp"

namespace cropsim::rl {

struct CurvePoint {
  long step = 0;
  double mean_return = 0.0;
  double std_return = 0.0;
};

using LearningCurve = std::vector<CurvePoint>;

struct EvalResult {
  double mean = 0.0;
  double std = 0.0;  // population
  std::vector<double> returns;
};

/// Seed of evaluation run `k` under `seed`.
std::uint64_t eval_seed(std::uint64_t seed, int k);
/// Seed of training episode `episode` under `seed`.
std::uint64_t episode_seed(std::uint64_t seed, int episode);

EvalResult summarize_returns(std::vector<double> returns);

/// Runs `runs` full episodes of `env_cfg` with seeds eval_seed(seed, k).
EvalResult evaluate(const EpisodeConfig& env_cfg, Policy& policy, int runs, std::uint64_t seed);

/// Greedy actor evaluation. The runs advance in lockstep so that each day is one batched forward pass.
EvalResult evaluate_actor(const Net& actor, const ObsScales& scales, const EpisodeConfig& env_cfg, int runs,
                          std::uint64_t seed);

/// Greedy actor behind the Policy interface.
class ActorPolicy final : public Policy {
 public:
  ActorPolicy(Net actor, ObsScales scales, ActionBounds bounds, std::string name = "actor")
      : actor_(std::move(actor)), scales_(scales), bounds_(bounds), name_(std::move(name)) {}
  std::string name() const override { return name_; }
  Action act(const PolicyInput& in) override;

 private:
  Net actor_;
  ObsScales scales_;
  ActionBounds bounds_;
  std::string name_;
  Rng unused_;
};

struct TrainResult {
  LearningCurve curve;
  Networks nets;
  long total_steps = 0;
  long updates = 0;
  std::size_t buffer_size = 0;
};

using TrainProgress = std::function<void(const CurvePoint&)>;

/// Trains on `env_cfg` (episode seeds from episode_seed) and evaluates every eval_period
/// steps on the deterministic-mode version of the same config.
TrainResult train(const EpisodeConfig& env_cfg, Algo algo, const TrainConfig& cfg, std::uint64_t seed,
                  const TrainProgress& progress = {});

/// Largest mean_return on the curve; throws on an empty curve.
double max_average_return(const LearningCurve& curve);

void save_curve(const LearningCurve& curve, const std::filesystem::path& path);
LearningCurve load_curve(const std::filesystem::path& path);

}  // namespace cropsim::rl
