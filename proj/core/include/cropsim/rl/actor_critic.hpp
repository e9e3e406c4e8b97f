#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "cropsim/config.hpp"
#include "cropsim/environment.hpp"
#include "cropsim/random.hpp"
#include "cropsim/rl/mlp.hpp"
#include "cropsim/rl/replay_buffer.hpp"

namespace cropsim::rl {

using Net = Mlp<Real>;

enum class Algo { kDdpg, kTd3 };

std::string to_string(Algo algo);
/// Accepts "ddpg" or "td3".
Algo parse_algo(const std::string& text);

/// Per-feature divisors applied to observations before they reach a network.
using ObsScales = std::array<double, kObservationSize>;

ObsScales default_obs_scales();

struct TrainConfig {
  double gamma = 0.99;
  double tau = 0.005;
  double actor_lr = 3e-4;
  double critic_lr = 3e-4;
  int batch_size = 256;
  int warmup_steps = 1000;
  double expl_noise = 0.1;    // fraction of each action's range
  double policy_noise = 0.2;  // target smoothing, normalized action units
  double noise_clip = 0.5;
  int policy_delay = 2;
  int episodes = 200;
  int eval_period = 7;  // environment steps between evaluations
  int eval_runs = 10;
  int seeds = 5;
  int buffer_capacity = 100000;
  std::vector<int> hidden = {128, 128};
  double reward_scale = 0.01;  // applied to rewards stored for learning
  double preact_penalty = 0.003;  // weight of mean squared pre-tanh actor output in the actor loss
  ObsScales obs_scales = default_obs_scales();
};

void validate(const TrainConfig& cfg);

/// Keys: gamma, tau, actor_lr, critic_lr, batch_size, warmup_steps, expl_noise, policy_noise,
/// noise_clip, policy_delay, episodes, eval_period, eval_runs, seeds, buffer_capacity,
/// hidden ("128,128"), reward_scale, preact_penalty, obs_scale_<feature>.
TrainConfig train_config_from_config(const Config& cfg, TrainConfig base = {});

std::array<Real, kObservationSize> normalize_obs(const Observation& obs, const ObsScales& scales);
Observation denormalize_obs(const std::array<Real, kObservationSize>& x, const ObsScales& scales);
/// Exact double-precision forms of the maps above.
Observation normalize_obs_exact(const Observation& obs, const ObsScales& scales);
Observation denormalize_obs_exact(const Observation& x, const ObsScales& scales);

/// [-1, 1] -> [0, max], clamped.
Action to_env_action(Real u_fert, Real u_irrig, const ActionBounds& bounds);
/// [0, max] -> [-1, 1].
std::array<Real, kActionSize> to_unit_action(const Action& a, const ActionBounds& bounds);

/// Online and target networks with their optimizers. DDPG uses one critic, TD3 two.
struct Networks {
  Algo algo = Algo::kDdpg;
  Net actor, actor_target;
  std::vector<Net> critics, critic_targets;
  Adam<Real> actor_opt;
  std::vector<Adam<Real>> critic_opts;
};

Networks make_networks(Algo algo, const TrainConfig& cfg, Rng& rng);

/// Greedy when `explore` is false; otherwise Gaussian noise scaled by each action's range.
Action act(const Net& actor, const Observation& obs, const ObsScales& scales, const ActionBounds& bounds,
           bool explore, double expl_noise, Rng& rng);

struct UpdateStats {
  double critic_loss = 0.0;
  double actor_objective = 0.0;  // mean Q(s, mu(s)); NaN when the actor was not updated
  bool actor_updated = false;
};

/// Regression targets r + gamma * (1 - done) * Q'(s', mu'(s')).
MatrixR ddpg_targets(const Networks& nets, const Batch& batch, double gamma);
/// Twin-critic targets with the given smoothing noise (2 x B, already clipped to +-noise_clip).
MatrixR td3_targets(const Networks& nets, const Batch& batch, double gamma, const MatrixR& noise);

UpdateStats ddpg_update(Networks& nets, const Batch& batch, const TrainConfig& cfg);
UpdateStats td3_update(Networks& nets, const Batch& batch, const TrainConfig& cfg, long step_index, Rng& rng);

}  // namespace cropsim::rl
