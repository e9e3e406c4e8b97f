#include "cropsim/rl/actor_critic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace cropsim::rl {

std::string to_string(Algo algo) { return algo == Algo::kDdpg ? "ddpg" : "td3"; }

Algo parse_algo(const std::string& text) {
  if (text == "ddpg") return Algo::kDdpg;
  if (text == "td3") return Algo::kTd3;
  throw ConfigError("unknown algorithm '" + text + "' (expected ddpg or td3)");
}

ObsScales default_obs_scales() {
  // t_mean, precip, ref_et, solar, vapor, e_a, wb_cum, rcn, lai, n_up, dn, n_strs, t_strs, w_strs
  return {40.0, 50.0, 10.0, 30.0, 30.0, 10.0, 500.0, 100.0, 3.0, 10.0, 5.0, 1.0, 1.0, 1.0};
}

void validate(const TrainConfig& c) {
  std::vector<std::string> bad;
  auto need = [&](bool ok, const char* what) {
    if (!ok) bad.emplace_back(what);
  };
  need(c.gamma >= 0.0 && c.gamma < 1.0, "gamma must be in [0, 1)");
  need(c.tau > 0.0 && c.tau <= 1.0, "tau must be in (0, 1]");
  need(c.actor_lr > 0.0 && std::isfinite(c.actor_lr), "actor_lr must be > 0");
  need(c.critic_lr > 0.0 && std::isfinite(c.critic_lr), "critic_lr must be > 0");
  need(c.batch_size >= 1, "batch_size must be >= 1");
  need(c.warmup_steps >= 0, "warmup_steps must be >= 0");
  need(c.expl_noise >= 0.0 && std::isfinite(c.expl_noise), "expl_noise must be >= 0");
  need(c.policy_noise >= 0.0 && std::isfinite(c.policy_noise), "policy_noise must be >= 0");
  need(c.noise_clip >= 0.0 && std::isfinite(c.noise_clip), "noise_clip must be >= 0");
  need(c.policy_delay >= 1, "policy_delay must be >= 1");
  need(c.episodes >= 1, "episodes must be >= 1");
  need(c.eval_period >= 1, "eval_period must be >= 1");
  need(c.eval_runs >= 1, "eval_runs must be >= 1");
  need(c.seeds >= 1, "seeds must be >= 1");
  need(c.buffer_capacity >= c.batch_size, "buffer_capacity must be >= batch_size");
  need(!c.hidden.empty() && std::all_of(c.hidden.begin(), c.hidden.end(), [](int h) { return h >= 1; }),
       "hidden must list at least one layer size >= 1");
  need(c.reward_scale > 0.0 && std::isfinite(c.reward_scale), "reward_scale must be > 0");
  need(c.preact_penalty >= 0.0 && std::isfinite(c.preact_penalty), "preact_penalty must be >= 0");
  for (std::size_t i = 0; i < kObservationSize; ++i) {
    if (!(c.obs_scales[i] > 0.0) || !std::isfinite(c.obs_scales[i])) {
      bad.push_back(std::string("obs_scale_") + kObservationNames[i] + " must be > 0");
    }
  }
  if (!bad.empty()) {
    std::ostringstream msg;
    msg << "invalid training config:";
    for (const auto& b : bad) msg << "\n  " << b;
    throw ConfigError(msg.str());
  }
}

TrainConfig train_config_from_config(const Config& cfg, TrainConfig c) {
  auto get_int = [&](const char* key, int fallback) { return static_cast<int>(cfg.get_int(key, fallback)); };
  c.gamma = cfg.get("gamma", c.gamma);
  c.tau = cfg.get("tau", c.tau);
  c.actor_lr = cfg.get("actor_lr", c.actor_lr);
  c.critic_lr = cfg.get("critic_lr", c.critic_lr);
  c.batch_size = get_int("batch_size", c.batch_size);
  c.warmup_steps = get_int("warmup_steps", c.warmup_steps);
  c.expl_noise = cfg.get("expl_noise", c.expl_noise);
  c.policy_noise = cfg.get("policy_noise", c.policy_noise);
  c.noise_clip = cfg.get("noise_clip", c.noise_clip);
  c.policy_delay = get_int("policy_delay", c.policy_delay);
  c.episodes = get_int("episodes", c.episodes);
  c.eval_period = get_int("eval_period", c.eval_period);
  c.eval_runs = get_int("eval_runs", c.eval_runs);
  c.seeds = get_int("seeds", c.seeds);
  c.buffer_capacity = get_int("buffer_capacity", c.buffer_capacity);
  c.reward_scale = cfg.get("reward_scale", c.reward_scale);
  c.preact_penalty = cfg.get("preact_penalty", c.preact_penalty);
  if (cfg.contains("hidden")) {
    c.hidden.clear();
    std::stringstream in(cfg.get_string("hidden", ""));
    std::string item;
    while (std::getline(in, item, ',')) {
      Config one;
      one.set("hidden", item);
      c.hidden.push_back(static_cast<int>(one.get_int("hidden", 0)));
    }
  }
  for (std::size_t i = 0; i < kObservationSize; ++i) {
    c.obs_scales[i] = cfg.get(std::string("obs_scale_") + kObservationNames[i], c.obs_scales[i]);
  }
  return c;
}

std::array<Real, kObservationSize> normalize_obs(const Observation& obs, const ObsScales& scales) {
  std::array<Real, kObservationSize> x{};
  for (std::size_t i = 0; i < kObservationSize; ++i) x[i] = static_cast<Real>(obs[i] / scales[i]);
  return x;
}

Observation denormalize_obs(const std::array<Real, kObservationSize>& x, const ObsScales& scales) {
  Observation obs{};
  for (std::size_t i = 0; i < kObservationSize; ++i) obs[i] = static_cast<double>(x[i]) * scales[i];
  return obs;
}

Observation normalize_obs_exact(const Observation& obs, const ObsScales& scales) {
  Observation x{};
  for (std::size_t i = 0; i < kObservationSize; ++i) x[i] = obs[i] / scales[i];
  return x;
}

Observation denormalize_obs_exact(const Observation& x, const ObsScales& scales) {
  Observation obs{};
  for (std::size_t i = 0; i < kObservationSize; ++i) obs[i] = x[i] * scales[i];
  return obs;
}

Action to_env_action(Real u_fert, Real u_irrig, const ActionBounds& b) {
  auto map = [](Real u, double hi) {
    const double v = (static_cast<double>(u) + 1.0) * 0.5 * hi;
    return std::isnan(v) ? 0.0 : std::clamp(v, 0.0, hi);
  };
  return {map(u_fert, b.fert_max), map(u_irrig, b.irrig_max)};
}

std::array<Real, kActionSize> to_unit_action(const Action& a, const ActionBounds& b) {
  auto map = [](double v, double hi) {
    return static_cast<Real>(std::clamp(hi > 0.0 ? 2.0 * v / hi - 1.0 : -1.0, -1.0, 1.0));
  };
  return {map(a.fert, b.fert_max), map(a.irrig, b.irrig_max)};
}

Networks make_networks(Algo algo, const TrainConfig& cfg, Rng& rng) {
  std::vector<int> actor_sizes{static_cast<int>(kObservationSize)};
  std::vector<int> critic_sizes{static_cast<int>(kObservationSize) + kActionSize};
  for (int h : cfg.hidden) {
    actor_sizes.push_back(h);
    critic_sizes.push_back(h);
  }
  actor_sizes.push_back(kActionSize);
  critic_sizes.push_back(1);

  Networks n;
  n.algo = algo;
  n.actor = Net(actor_sizes, Net::Output::kTanh);
  n.actor.init_uniform(rng);
  n.actor_target = n.actor;
  n.actor_opt = Adam<Real>(n.actor, cfg.actor_lr);
  const int count = algo == Algo::kTd3 ? 2 : 1;
  for (int k = 0; k < count; ++k) {
    Net critic(critic_sizes, Net::Output::kLinear);
    critic.init_uniform(rng);
    n.critics.push_back(critic);
    n.critic_targets.push_back(critic);
    n.critic_opts.emplace_back(critic, cfg.critic_lr);
  }
  return n;
}

Action act(const Net& actor, const Observation& obs, const ObsScales& scales, const ActionBounds& bounds,
           bool explore, double expl_noise, Rng& rng) {
  const auto x = normalize_obs(obs, scales);
  MatrixR input(static_cast<Eigen::Index>(kObservationSize), 1);
  for (std::size_t i = 0; i < kObservationSize; ++i) input(static_cast<Eigen::Index>(i), 0) = x[i];
  const MatrixR u = actor.forward(input);
  Action a = to_env_action(u(0, 0), u(1, 0), bounds);
  if (explore) {
    std::normal_distribution<double> noise(0.0, 1.0);
    a.fert = std::clamp(a.fert + expl_noise * bounds.fert_max * noise(rng), 0.0, bounds.fert_max);
    a.irrig = std::clamp(a.irrig + expl_noise * bounds.irrig_max * noise(rng), 0.0, bounds.irrig_max);
  }
  return a;
}

namespace {

MatrixR stack(const MatrixR& states, const MatrixR& actions) {
  MatrixR x(states.rows() + actions.rows(), states.cols());
  x.topRows(states.rows()) = states;
  x.bottomRows(actions.rows()) = actions;
  return x;
}

/// One step on the mean-squared error between critic(s, a) and y; returns the loss.
double critic_step(Net& critic, Adam<Real>& opt, const MatrixR& sa, const MatrixR& y) {
  Net::Cache cache;
  const MatrixR q = critic.forward(sa, &cache);
  const MatrixR diff = q - y;
  const auto b = static_cast<Real>(sa.cols());
  const double loss = static_cast<double>(diff.squaredNorm()) / static_cast<double>(sa.cols());
  const MatrixR upstream = (Real(2) / b) * diff;
  opt.step(critic, critic.backward(cache, upstream));
  return loss;
}

/// One ascent step on mean critic(s, actor(s)) less the pre-squash penalty; returns the mean Q before the step.
double actor_step(Net& actor, Adam<Real>& opt, const Net& critic, const MatrixR& states, double penalty) {
  Net::Cache actor_cache, critic_cache;
  const MatrixR u = actor.forward(states, &actor_cache);
  const MatrixR q = critic.forward(stack(states, u), &critic_cache);
  const auto b = static_cast<Real>(states.cols());
  const MatrixR upstream = MatrixR::Constant(1, states.cols(), Real(-1) / b);
  const auto critic_grad = critic.backward(critic_cache, upstream);
  const MatrixR du = critic_grad.input.bottomRows(kActionSize);
  if (penalty > 0.0) {
    const MatrixR dz = (static_cast<Real>(2.0 * penalty) / b) * actor_cache.pre_output;
    opt.step(actor, actor.backward(actor_cache, du, &dz));
  } else {
    opt.step(actor, actor.backward(actor_cache, du));
  }
  return static_cast<double>(q.mean());
}

void soft_update(Networks& n, Real tau, bool actor_too) {
  for (std::size_t k = 0; k < n.critics.size(); ++k) n.critic_targets[k].soft_update_from(n.critics[k], tau);
  if (actor_too) n.actor_target.soft_update_from(n.actor, tau);
}

MatrixR bellman(const Batch& batch, double gamma, const MatrixR& q_next) {
  return batch.rewards + static_cast<Real>(gamma) * batch.not_done.cwiseProduct(q_next);
}

}  // namespace

MatrixR ddpg_targets(const Networks& n, const Batch& batch, double gamma) {
  const MatrixR next_u = n.actor_target.forward(batch.next_states);
  const MatrixR q_next = n.critic_targets.front().forward(stack(batch.next_states, next_u));
  return bellman(batch, gamma, q_next);
}

MatrixR td3_targets(const Networks& n, const Batch& batch, double gamma, const MatrixR& noise) {
  if (n.critic_targets.size() < 2) throw std::logic_error("td3_targets needs twin critics");
  const MatrixR next_u = (n.actor_target.forward(batch.next_states) + noise).cwiseMax(Real(-1)).cwiseMin(Real(1));
  const MatrixR sa = stack(batch.next_states, next_u);
  const MatrixR q_next = n.critic_targets[0].forward(sa).cwiseMin(n.critic_targets[1].forward(sa));
  return bellman(batch, gamma, q_next);
}

UpdateStats ddpg_update(Networks& n, const Batch& batch, const TrainConfig& cfg) {
  UpdateStats s;
  const MatrixR y = ddpg_targets(n, batch, cfg.gamma);
  s.critic_loss = critic_step(n.critics[0], n.critic_opts[0], stack(batch.states, batch.actions), y);
  s.actor_objective = actor_step(n.actor, n.actor_opt, n.critics[0], batch.states, cfg.preact_penalty);
  s.actor_updated = true;
  soft_update(n, static_cast<Real>(cfg.tau), true);
  return s;
}

UpdateStats td3_update(Networks& n, const Batch& batch, const TrainConfig& cfg, long step_index, Rng& rng) {
  UpdateStats s;
  std::normal_distribution<double> gauss(0.0, 1.0);
  MatrixR noise(kActionSize, batch.states.cols());
  for (Eigen::Index j = 0; j < noise.cols(); ++j) {
    for (Eigen::Index i = 0; i < noise.rows(); ++i) {
      noise(i, j) = static_cast<Real>(std::clamp(cfg.policy_noise * gauss(rng), -cfg.noise_clip, cfg.noise_clip));
    }
  }
  const MatrixR y = td3_targets(n, batch, cfg.gamma, noise);
  const MatrixR sa = stack(batch.states, batch.actions);
  for (std::size_t k = 0; k < n.critics.size(); ++k) {
    s.critic_loss += critic_step(n.critics[k], n.critic_opts[k], sa, y);
  }
  s.actor_objective = std::numeric_limits<double>::quiet_NaN();
  if (step_index % cfg.policy_delay == 0) {
    s.actor_objective = actor_step(n.actor, n.actor_opt, n.critics[0], batch.states, cfg.preact_penalty);
    s.actor_updated = true;
    soft_update(n, static_cast<Real>(cfg.tau), true);
  }
  return s;
}

}  // namespace cropsim::rl
