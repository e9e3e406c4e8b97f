#include <benchmark/benchmark.h>

#include "cropsim/agents.hpp"
#include "cropsim/environment.hpp"
#include "cropsim/harness/commands.hpp"
#include "cropsim/random.hpp"
#include "cropsim/rl/actor_critic.hpp"
#include "cropsim/rl/replay_buffer.hpp"

using namespace cropsim;

namespace {
const bool kAllocatorTuned = (harness::tune_allocator(), true);
}

static void BM_EnvironmentStep(benchmark::State& state) {
  EpisodeConfig cfg;
  cfg.mode = Mode::kDeterministic;
  Environment env(cfg);
  env.reset();
  const Action a{5.0, 3.0};
  for (auto _ : state) {
    if (env.done()) env.reset();
    benchmark::DoNotOptimize(env.step(a));
  }
}
BENCHMARK(BM_EnvironmentStep);

static void BM_StandardEpisode(benchmark::State& state) {
  EpisodeConfig cfg;
  cfg.mode = Mode::kDeterministic;
  Environment env(cfg);
  StandardPolicy policy;
  for (auto _ : state) {
    env.reset();
    double total = 0.0;
    while (!env.done()) total += env.step(policy.act(policy_input(env))).reward;
    benchmark::DoNotOptimize(total);
  }
}
BENCHMARK(BM_StandardEpisode)->Unit(benchmark::kMicrosecond);

static void BM_ActorForward(benchmark::State& state) {
  Rng rng(1);
  rl::TrainConfig cfg;
  const int hidden = static_cast<int>(state.range(0));
  cfg.hidden = {hidden, hidden};
  auto nets = rl::make_networks(rl::Algo::kTd3, cfg, rng);
  const rl::MatrixR x = rl::MatrixR::Random(kObservationSize, state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(nets.actor.forward(x));
  state.SetItemsProcessed(state.iterations() * state.range(1));
}
BENCHMARK(BM_ActorForward)->Args({128, 1})->Args({128, 256})->Args({256, 256});

static void BM_Update(benchmark::State& state) {
  Rng rng(2);
  rl::TrainConfig cfg;
  const int hidden = static_cast<int>(state.range(1));
  cfg.hidden = {hidden, hidden};
  const auto algo = state.range(0) == 0 ? rl::Algo::kDdpg : rl::Algo::kTd3;
  auto nets = rl::make_networks(algo, cfg, rng);
  rl::ReplayBuffer buffer(10000);
  std::uniform_real_distribution<float> u(-1.0f, 1.0f);
  for (int i = 0; i < 5000; ++i) {
    rl::Transition t;
    for (auto& v : t.state) v = u(rng);
    for (auto& v : t.next_state) v = u(rng);
    for (auto& v : t.action) v = u(rng);
    t.reward = u(rng);
    t.done = i % 120 == 119;
    buffer.add(t);
  }
  long step = 0;
  for (auto _ : state) {
    const auto batch = buffer.sample(static_cast<std::size_t>(cfg.batch_size), rng);
    if (algo == rl::Algo::kDdpg)
      benchmark::DoNotOptimize(rl::ddpg_update(nets, batch, cfg));
    else
      benchmark::DoNotOptimize(rl::td3_update(nets, batch, cfg, step++, rng));
  }
  state.SetLabel(rl::to_string(algo));
}
BENCHMARK(BM_Update)->Args({0, 128})->Args({1, 128})->Args({1, 256})->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
