#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "anchors.hpp"
#include "cropsim/agents.hpp"
#include "cropsim/environment.hpp"

using namespace cropsim;

namespace {

EpisodeConfig deterministic(std::uint64_t seed = 1) {
  EpisodeConfig c;
  c.mode = Mode::kDeterministic;
  c.seed = seed;
  return c;
}

std::vector<Action> random_actions(std::uint64_t seed, int n) {
  Rng rng(seed);
  std::uniform_real_distribution<double> f(0.0, 60.0), i(0.0, 50.0);
  std::vector<Action> out;
  for (int k = 0; k < n; ++k) out.push_back({f(rng), i(rng)});
  return out;
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("cropsim_env_" + name);
}

double run_standard(const EpisodeConfig& cfg) {
  Environment env(cfg);
  StandardPolicy policy;
  env.reset();
  double total = 0.0;
  while (!env.done()) total += env.step(policy.act(policy_input(env))).reward;
  return total;
}

}  // namespace

TEST(Reward, HandValues) {
  const RewardParams rp;
  EXPECT_NEAR(reward(0.0, {1.0, 1.0}, rp), -2.59, 1e-12);
  EXPECT_EQ(reward(37.5, {0.0, 0.0}, rp), 37.5);
  EXPECT_NEAR(reward(100.0, {10.0, 5.0}, rp), 74.9, 1e-12);
}

TEST(ClampAction, ClampsAndFlags) {
  ActionBounds b;
  bool fc = false, ic = false;
  Action a = clamp_action({70.0, -3.0}, b, &fc, &ic);
  EXPECT_EQ(a, (Action{60.0, 0.0}));
  EXPECT_TRUE(fc);
  EXPECT_TRUE(ic);
  a = clamp_action({10.0, 20.0}, b, &fc, &ic);
  EXPECT_EQ(a, (Action{10.0, 20.0}));
  EXPECT_FALSE(fc);
  EXPECT_FALSE(ic);
  a = clamp_action({std::nan(""), 5.0}, b, &fc, &ic);
  EXPECT_EQ(a.fert, 0.0);
  EXPECT_TRUE(fc);
}

TEST(Observation, FieldOrderMatchesNames) {
  CropState c;
  c.e_a = 1;
  c.lai = 2;
  c.n_strs = 0.3;
  c.t_strs = 0.4;
  c.w_strs = 0.5;
  SoilState s;
  s.wb_cum = 6;
  s.rcn = 70;
  s.n_up = 8;
  s.dn = 9;
  const WeatherDay w{10, 11, 12, 13, 14};
  const Observation o = observe(c, s, w);
  const Observation expected = {10, 11, 12, 13, 14, 1, 6, 70, 2, 8, 9, 0.3, 0.4, 0.5};
  EXPECT_EQ(o, expected);
  std::set<std::string> names(kObservationNames.begin(), kObservationNames.end());
  EXPECT_EQ(names.size(), kObservationSize);
  EXPECT_STREQ(kObservationNames[obs_index::kLai], "lai");
  EXPECT_STREQ(kObservationNames[obs_index::kWStrs], "w_strs");
}

TEST(Environment, ResetIsDeterministicAndStartsBare) {
  Environment a(deterministic(5)), b(deterministic(5));
  const Observation oa = a.reset(), ob = b.reset();
  EXPECT_EQ(oa, ob);
  EXPECT_EQ(oa[obs_index::kLai], 0.0);
  for (std::size_t i : {obs_index::kNStrs, obs_index::kTStrs, obs_index::kWStrs}) {
    EXPECT_GE(oa[i], 0.0);
    EXPECT_LE(oa[i], 1.0);
  }
}

TEST(Environment, ShortWeatherFileIsAConfigError) {
  const auto path = temp_file("short.csv");
  weather::save_csv(weather::generate_season(30, ClimateProfile{}, 1), path);
  EpisodeConfig c = deterministic();
  c.weather_file = path;
  Environment env(c);
  EXPECT_THROW(env.reset(), ConfigError);
  std::filesystem::remove(path);
}

TEST(Environment, WeatherFileDrivesTheSeason) {
  const auto path = temp_file("full.csv");
  const auto season = weather::generate_season(130, ClimateProfile{}, 3);
  weather::save_csv(season, path);
  EpisodeConfig c = deterministic(99);
  c.weather_file = path;
  Environment env(c);
  env.reset();
  ASSERT_EQ(env.season_weather().size(), 120u);
  for (std::size_t d = 0; d < 120; ++d) EXPECT_NEAR(env.season_weather()[d].solar, season[d].solar, 1e-12);
  std::filesystem::remove(path);
}

TEST(Environment, HorizonEndsOnLastStepAndRefusesMore) {
  Environment env(deterministic());
  env.reset();
  for (int d = 1; d <= 120; ++d) {
    const StepOutcome out = env.step({});
    EXPECT_EQ(out.done, d == 120) << "day " << d;
  }
  EXPECT_THROW(env.step({}), EpisodeError);
}

TEST(Environment, StepBeforeResetFails) {
  Environment env(deterministic());
  EXPECT_THROW(env.step({}), EpisodeError);
}

TEST(Environment, SameSeedSameActionsBitwiseIdentical) {
  for (Mode mode : {Mode::kDeterministic, Mode::kStochastic}) {
    EpisodeConfig c = deterministic(17);
    c.mode = mode;
    Environment a(c), b(c);
    a.reset();
    b.reset();
    for (const Action& act : random_actions(4, 120)) {
      const StepOutcome x = a.step(act), y = b.step(act);
      ASSERT_EQ(x.obs, y.obs);
      ASSERT_EQ(x.reward, y.reward);
    }
  }
}

TEST(Environment, StochasticModePerturbsWeather) {
  EpisodeConfig det = deterministic(3);
  EpisodeConfig sto = det;
  sto.mode = Mode::kStochastic;
  Environment a(det), b(sto);
  a.reset();
  b.reset();
  EXPECT_NE(a.season_weather(), b.season_weather());
}

TEST(Environment, ZeroActionOnQuietDayGivesZeroReward) {
  Environment env(deterministic());
  env.reset();
  const StepOutcome out = env.step({});
  EXPECT_EQ(out.info.yld_delta, 0.0);
  EXPECT_EQ(out.reward, 0.0);
}

TEST(Environment, OutOfRangeActionIsClampedAndFlagged) {
  Environment env(deterministic());
  env.reset();
  const StepOutcome out = env.step({100.0, 10.0});
  EXPECT_TRUE(out.info.fert_clamped);
  EXPECT_FALSE(out.info.irrig_clamped);
  EXPECT_EQ(out.info.applied.fert, 60.0);
}

TEST(Environment, ReturnTelescopesToYieldMinusCosts) {
  Environment env(deterministic(8));
  env.reset();
  double total = 0.0, fert = 0.0, irrig = 0.0;
  for (const Action& a : random_actions(9, 120)) {
    const StepOutcome out = env.step(a);
    total += out.reward;
    fert += out.info.applied.fert;
    irrig += out.info.applied.irrig;
  }
  EXPECT_NEAR(total, env.crop().yld - 2.43 * fert - 0.16 * irrig, 1e-6);
}

TEST(Environment, StandardSeasonMaturesWithPositiveYield) {
  Environment env(deterministic(1));
  StandardPolicy policy;
  env.reset();
  while (!env.done()) env.step(policy.act(policy_input(env)));
  EXPECT_GT(env.crop().yld, 0.0);
  EXPECT_GE(env.crop().fr_phu, 0.9);
}

TEST(Environment, StandardReturnRegressionAnchor) {
  EXPECT_NEAR(run_standard(deterministic(1)), STANDARD_RETURN_SEED1, 1e-6);
}

TEST(EpisodeLog, WritesOneRowPerDayAndReadsBack) {
  const auto path = temp_file("log.csv");
  EpisodeConfig c = deterministic(2);
  c.log_path = path;
  Environment env(c);
  env.reset();
  for (const Action& a : random_actions(2, 120)) env.step(a);
  ASSERT_TRUE(std::filesystem::exists(path));

  std::ifstream in(path);
  std::string line;
  int data_rows = 0;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.rfind("# ", 0) == 0) continue;
    if (!header) {
      EXPECT_EQ(line, kLogColumns);
      header = true;
      continue;
    }
    ++data_rows;
  }
  EXPECT_EQ(data_rows, 120);

  const EpisodeLog back = load_log(path);
  ASSERT_EQ(back.days.size(), env.log().days.size());
  for (std::size_t i = 0; i < back.days.size(); ++i) {
    const DayRecord& x = back.days[i];
    const DayRecord& y = env.log().days[i];
    EXPECT_EQ(x.day, y.day);
    EXPECT_EQ(observe(x.crop, x.soil, x.weather), observe(y.crop, y.soil, y.weather));
    EXPECT_EQ(x.action, y.action);
    EXPECT_EQ(x.reward, y.reward);
    EXPECT_EQ(x.crop.yld, y.crop.yld);
  }
  EXPECT_EQ(back.metadata.get_string("mode", ""), "deterministic");
  std::filesystem::remove(path);
}

TEST(EpisodeLog, EmptyLogCannotBeSaved) {
  EXPECT_THROW(save_log(EpisodeLog{}, temp_file("empty.csv")), EpisodeError);
}

TEST(EpisodeConfig, RoundTripsThroughConfig) {
  EpisodeConfig c = deterministic(12);
  c.duration = 90;
  c.bounds.fert_max = 45.0;
  c.soil.cn2 = 81.5;
  c.climate.precip_prob = 0.2;
  Config text = to_config(c);
  const EpisodeConfig back = episode_config_from_config(text);
  EXPECT_TRUE(text.unused_keys().empty());
  EXPECT_EQ(to_config(back).entries(), text.entries());
}

TEST(EpisodeConfig, InvalidValuesAreReportedTogether) {
  EpisodeConfig c;
  c.duration = 0;
  c.bounds.fert_max = -1.0;
  try {
    validate(c);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("duration"), std::string::npos) << msg;
    EXPECT_NE(msg.find("fert_max"), std::string::npos) << msg;
  }
  EXPECT_THROW(parse_mode("sometimes"), ConfigError);
}
