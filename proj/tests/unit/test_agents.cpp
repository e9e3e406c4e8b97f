#include <gtest/gtest.h>

#include "cropsim/agents.hpp"

using namespace cropsim;

TEST(RandomPolicy, DegenerateBoundsGiveZeroAction) {
  Rng rng(1);
  EXPECT_EQ(random_policy(rng, {0.0, 0.0}), (Action{0.0, 0.0}));
}

TEST(RandomPolicy, MeanIsHalfTheBound) {
  Rng rng(2);
  const ActionBounds b{50.0, 50.0};
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const Action a = random_policy(rng, b);
    ASSERT_GE(a.fert, 0.0);
    ASSERT_LE(a.fert, 50.0);
    sum += a.fert;
  }
  EXPECT_NEAR(sum / n, 25.0, 0.25);
}

TEST(RandomPolicy, SameSeedSameSequence) {
  RandomPolicy a({60.0, 50.0}, 0), b({60.0, 50.0}, 0);
  a.begin_episode(9);
  b.begin_episode(9);
  for (int i = 0; i < 50; ++i) EXPECT_EQ(a.act({}), b.act({}));
}

TEST(StandardPolicy, DefaultScheduleHandValues) {
  const SchedulePolicyParams p;
  EXPECT_EQ(standard_policy(7, p), (Action{60.0, 25.0}));
  EXPECT_EQ(standard_policy(3, p), (Action{0.0, 0.0}));
  EXPECT_EQ(standard_policy(45, p), (Action{60.0, 0.0}));
  EXPECT_EQ(standard_policy(14, p), (Action{0.0, 25.0}));
  double fert = 0.0;
  for (int d = 0; d < 120; ++d) fert += standard_policy(d, p).fert;
  EXPECT_DOUBLE_EQ(fert, 160.0);
}

TEST(StandardPolicy, SeasonCostNearDesignTarget) {
  const SchedulePolicyParams p;
  const RewardParams rp;
  double cost = 0.0;
  for (int d = 0; d < 120; ++d) cost -= reward(0.0, standard_policy(d, p), rp);
  EXPECT_NEAR(cost, 460.0, 5.0);
}

TEST(ReactivePolicy, HandValues) {
  const ReactivePolicyParams p;
  PolicyInput in;
  in.sw_capacity = 100.0;
  in.n_pool = 40.0;
  in.sw = 60.0;
  EXPECT_EQ(reactive_policy(in, p), (Action{0.0, 0.0}));
  in.n_pool = 5.0;
  EXPECT_EQ(reactive_policy(in, p), (Action{50.0, 0.0}));
  in.sw = 5.0;
  EXPECT_EQ(reactive_policy(in, p), (Action{50.0, 50.0}));
  in.n_pool = 40.0;
  EXPECT_EQ(reactive_policy(in, p), (Action{0.0, 50.0}));
}

TEST(Baselines, ActionsNeverNeedClamping) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    EpisodeConfig c;
    c.seed = seed;
    std::vector<std::unique_ptr<Policy>> policies;
    policies.push_back(std::make_unique<RandomPolicy>(c.bounds, seed));
    policies.push_back(std::make_unique<StandardPolicy>());
    policies.push_back(std::make_unique<ReactivePolicy>());
    for (auto& policy : policies) {
      Environment env(c);
      policy->begin_episode(seed);
      env.reset();
      while (!env.done()) {
        const StepOutcome out = env.step(policy->act(policy_input(env)));
        ASSERT_FALSE(out.info.fert_clamped) << policy->name();
        ASSERT_FALSE(out.info.irrig_clamped) << policy->name();
      }
    }
  }
}

TEST(Baselines, PureFunctions) {
  const SchedulePolicyParams sp;
  const ReactivePolicyParams rp;
  PolicyInput in;
  in.sw_capacity = 100.0;
  in.n_pool = 12.0;
  in.sw = 14.0;
  for (int d = 0; d < 120; ++d) EXPECT_EQ(standard_policy(d, sp), standard_policy(d, sp));
  EXPECT_EQ(reactive_policy(in, rp), reactive_policy(in, rp));
}

TEST(PolicyInput, CarriesDiagnostics) {
  EpisodeConfig c;
  c.mode = Mode::kDeterministic;
  Environment env(c);
  env.reset();
  env.step({10.0, 5.0});
  const PolicyInput in = policy_input(env);
  EXPECT_EQ(in.day, 1);
  EXPECT_EQ(in.n_pool, env.soil().n_pool);
  EXPECT_EQ(in.sw, env.soil().sw);
  EXPECT_EQ(in.sw_capacity, c.soil.sw_capacity);
  EXPECT_EQ(in.obs, env.observation());
}

TEST(PolicyParams, ConfigParsingAndValidation) {
  Config c;
  c.set("standard_fert_schedule", "5:30, 50:20");
  c.set("standard_irrig_period", "10");
  c.set("reactive_n_dose", "40");
  const SchedulePolicyParams s = schedule_params_from_config(c);
  ASSERT_EQ(s.fert_schedule.size(), 2u);
  EXPECT_EQ(s.fert_schedule[1], (std::pair<int, double>{50, 20.0}));
  EXPECT_EQ(s.irrig_period, 10);
  EXPECT_DOUBLE_EQ(reactive_params_from_config(c).n_dose, 40.0);

  SchedulePolicyParams bad;
  bad.fert_schedule = {{5, 90.0}};
  EXPECT_THROW(validate(bad, ActionBounds{}, 120), ConfigError);
  ReactivePolicyParams bad_r;
  bad_r.sw_threshold_fraction = 2.0;
  EXPECT_THROW(validate(bad_r, ActionBounds{}), ConfigError);
  Config broken;
  broken.set("standard_fert_schedule", "7-60");
  EXPECT_THROW(schedule_params_from_config(broken), ConfigError);
}
