#include "cropsim/rl/training.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace cropsim::rl {

std::uint64_t eval_seed(std::uint64_t seed, int k) {
  return derive_seed(seed, kEvalStream, static_cast<std::uint64_t>(k));
}

std::uint64_t episode_seed(std::uint64_t seed, int episode) {
  return derive_seed(seed, kEpisodeStream, static_cast<std::uint64_t>(episode));
}

EvalResult summarize_returns(std::vector<double> returns) {
  if (returns.empty()) throw std::invalid_argument("cannot summarize zero returns");
  EvalResult r;
  const double n = static_cast<double>(returns.size());
  r.mean = std::accumulate(returns.begin(), returns.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : returns) ss += (x - r.mean) * (x - r.mean);
  r.std = std::sqrt(ss / n);
  r.returns = std::move(returns);
  return r;
}

EvalResult evaluate(const EpisodeConfig& env_cfg, Policy& policy, int runs, std::uint64_t seed) {
  if (runs < 1) throw std::invalid_argument("evaluate needs runs >= 1");
  Environment env(env_cfg);
  std::vector<double> returns;
  for (int k = 0; k < runs; ++k) {
    const std::uint64_t s = eval_seed(seed, k);
    policy.begin_episode(s);
    env.reset(s);
    double total = 0.0;
    while (!env.done()) total += env.step(policy.act(policy_input(env))).reward;
    returns.push_back(total);
  }
  return summarize_returns(std::move(returns));
}

EvalResult evaluate_actor(const Net& actor, const ObsScales& scales, const EpisodeConfig& env_cfg, int runs,
                          std::uint64_t seed) {
  if (runs < 1) throw std::invalid_argument("evaluate_actor needs runs >= 1");
  std::vector<Environment> envs(static_cast<std::size_t>(runs), Environment(env_cfg));
  std::vector<double> returns(envs.size(), 0.0);
  MatrixR input(static_cast<Eigen::Index>(kObservationSize), runs);
  for (int k = 0; k < runs; ++k) envs[static_cast<std::size_t>(k)].reset(eval_seed(seed, k));
  const auto& bounds = env_cfg.bounds;
  while (!envs.front().done()) {
    for (int k = 0; k < runs; ++k) {
      const auto x = normalize_obs(envs[static_cast<std::size_t>(k)].observation(), scales);
      for (std::size_t i = 0; i < kObservationSize; ++i) input(static_cast<Eigen::Index>(i), k) = x[i];
    }
    const MatrixR u = actor.forward(input);
    for (int k = 0; k < runs; ++k) {
      auto& env = envs[static_cast<std::size_t>(k)];
      returns[static_cast<std::size_t>(k)] += env.step(to_env_action(u(0, k), u(1, k), bounds)).reward;
    }
  }
  return summarize_returns(std::move(returns));
}

Action ActorPolicy::act(const PolicyInput& in) {
  return rl::act(actor_, in.obs, scales_, bounds_, false, 0.0, unused_);
}

TrainResult train(const EpisodeConfig& env_cfg, Algo algo, const TrainConfig& cfg, std::uint64_t seed,
                  const TrainProgress& progress) {
  validate(env_cfg);
  validate(cfg);
  Rng rng(derive_seed(seed, kPolicyStream));
  TrainResult out;
  out.nets = make_networks(algo, cfg, rng);
  ReplayBuffer buffer(static_cast<std::size_t>(cfg.buffer_capacity));

  EpisodeConfig eval_cfg = env_cfg;
  eval_cfg.mode = Mode::kDeterministic;
  eval_cfg.log_path.clear();
  EpisodeConfig train_cfg = env_cfg;
  train_cfg.log_path.clear();
  Environment env(train_cfg);

  const auto& bounds = env_cfg.bounds;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int ep = 0; ep < cfg.episodes; ++ep) {
    Observation obs = env.reset(episode_seed(seed, ep));
    while (!env.done()) {
      Action a;
      if (out.total_steps < cfg.warmup_steps) {
        a = {unit(rng) * bounds.fert_max, unit(rng) * bounds.irrig_max};
      } else {
        a = act(out.nets.actor, obs, cfg.obs_scales, bounds, true, cfg.expl_noise, rng);
      }
      const StepOutcome step = env.step(a);
      Transition t;
      t.state = normalize_obs(obs, cfg.obs_scales);
      t.action = to_unit_action(step.info.applied, bounds);
      t.reward = static_cast<Real>(step.reward * cfg.reward_scale);
      t.next_state = normalize_obs(step.obs, cfg.obs_scales);
      t.done = step.done;
      buffer.add(t);
      obs = step.obs;
      ++out.total_steps;

      if (out.total_steps >= cfg.warmup_steps && buffer.size() >= static_cast<std::size_t>(cfg.batch_size)) {
        const Batch batch = buffer.sample(static_cast<std::size_t>(cfg.batch_size), rng);
        if (algo == Algo::kDdpg) {
          ddpg_update(out.nets, batch, cfg);
        } else {
          td3_update(out.nets, batch, cfg, out.updates, rng);
        }
        ++out.updates;
      }

      if (out.total_steps % cfg.eval_period == 0) {
        const EvalResult e = evaluate_actor(out.nets.actor, cfg.obs_scales, eval_cfg, cfg.eval_runs, seed);
        out.curve.push_back({out.total_steps, e.mean, e.std});
        if (progress) progress(out.curve.back());
      }
    }
  }
  out.buffer_size = buffer.size();
  return out;
}

double max_average_return(const LearningCurve& curve) {
  if (curve.empty()) throw std::invalid_argument("empty learning curve");
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& p : curve) best = std::max(best, p.mean_return);
  return best;
}

void save_curve(const LearningCurve& curve, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write learning curve '" + path.string() + "'");
  out << "step,mean_return,std_return\n" << std::setprecision(17);
  for (const auto& p : curve) out << p.step << ',' << p.mean_return << ',' << p.std_return << '\n';
}

LearningCurve load_curve(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open learning curve '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line) || line != "step,mean_return,std_return") {
    throw std::runtime_error(path.string() + ": expected header step,mean_return,std_return");
  }
  LearningCurve curve;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::istringstream s(line);
    CurvePoint p;
    char c1 = 0, c2 = 0;
    if (!(s >> p.step >> c1 >> p.mean_return >> c2 >> p.std_return) || c1 != ',' || c2 != ',') {
      throw std::runtime_error(path.string() + ":" + std::to_string(row) + ": malformed row");
    }
    curve.push_back(p);
  }
  return curve;
}

}  // namespace cropsim::rl
