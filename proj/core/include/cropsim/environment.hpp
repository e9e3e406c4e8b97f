#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cropsim/config.hpp"
#include "cropsim/dynamics.hpp"
#include "cropsim/weather.hpp"

namespace cropsim {

inline constexpr std::size_t kObservationSize = 14;

/// Fixed order: t_mean, precip, ref_et, solar, vapor, e_a, wb_cum, rcn, lai,
/// n_up, dn, n_strs, t_strs, w_strs.
using Observation = std::array<double, kObservationSize>;

namespace obs_index {
inline constexpr std::size_t kTMean = 0, kPrecip = 1, kRefEt = 2, kSolar = 3, kVapor = 4, kEa = 5, kWbCum = 6,
                             kRcn = 7, kLai = 8, kNUp = 9, kDn = 10, kNStrs = 11, kTStrs = 12, kWStrs = 13;
}

inline constexpr std::array<const char*, kObservationSize> kObservationNames = {
    "t_mean", "precip", "ref_et", "solar", "vapor", "e_a", "wb_cum",
    "rcn",    "lai",    "n_up",   "dn",    "n_strs", "t_strs", "w_strs"};

struct RewardParams {
  double alpha = 2.43;  // per kg/ha fertilizer
  double beta = 0.16;   // per mm irrigation
};

struct ActionBounds {
  double fert_max = 60.0;
  double irrig_max = 50.0;
};

enum class Mode { kStochastic, kDeterministic };

std::string to_string(Mode mode);
Mode parse_mode(const std::string& text);

struct EpisodeConfig {
  int duration = 120;
  Mode mode = Mode::kStochastic;
  std::uint64_t seed = 0;
  ClimateProfile climate;
  std::filesystem::path weather_file;  // overrides the synthetic climate when set
  double weather_noise = 0.1;          // relative perturbation in stochastic mode
  ActionBounds bounds;
  CropParams crop;
  SoilParams soil;
  RewardParams reward;
  std::filesystem::path log_path;      // episode log written on completion when set
};

/// Throws ConfigError listing every invalid field.
void validate(const EpisodeConfig& cfg);
EpisodeConfig episode_config_from_config(const Config& cfg, EpisodeConfig base = {});
/// Round-trips through episode_config_from_config.
Config to_config(const EpisodeConfig& cfg);

/// Diagnostics that accompany each step.
struct StepInfo {
  int day = 0;
  double yld = 0.0;
  double yld_delta = 0.0;
  double biomass = 0.0;
  double fr_phu = 0.0;
  double n_pool = 0.0;
  double sw = 0.0;
  double sw_capacity = 0.0;
  double runoff = 0.0;
  double overflow = 0.0;
  double n_strs = 0.0;
  double w_strs = 0.0;
  double t_strs = 0.0;
  Action applied;
  bool fert_clamped = false;
  bool irrig_clamped = false;
};

struct StepOutcome {
  Observation obs{};
  double reward = 0.0;
  bool done = false;
  StepInfo info;
};

struct DayRecord {
  int day = 0;
  WeatherDay weather;
  CropState crop;
  SoilState soil;
  Action action;
  double reward = 0.0;
};

struct EpisodeLog {
  Config metadata;
  std::vector<DayRecord> days;
};

/// Thrown when an episode is driven outside its lifecycle (e.g. stepping after done).
class EpisodeError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

double reward(double yld_delta, const Action& a, const RewardParams& rp);
Observation observe(const CropState& crop, const SoilState& soil, const WeatherDay& w);

/// Clamps to bounds; NaN components become 0. Flags report whether anything changed.
Action clamp_action(const Action& a, const ActionBounds& b, bool* fert_clamped = nullptr,
                    bool* irrig_clamped = nullptr);

inline constexpr const char* kLogColumns =
    "day,t_mean,precip,ref_et,solar,vapor,e_a,wb_cum,rcn,lai,n_up,dn,n_strs,t_strs,w_strs,fert,irrig,reward,yld";

void save_log(const EpisodeLog& log, const std::filesystem::path& path);
/// Reads back the columns written by save_log. States are reconstructed from the
/// observation columns only; fields without a column stay at their defaults.
EpisodeLog load_log(const std::filesystem::path& path);

/// One growing season as an episodic decision process.
///
/// The observation carries the weather of the day the next action applies to,
/// together with the crop and soil state at the start of that day. The terminal
/// observation repeats the last simulated day's weather.
class Environment {
 public:
  explicit Environment(EpisodeConfig cfg);

  Observation reset();
  /// Replaces the configured seed, then resets.
  Observation reset(std::uint64_t seed);
  StepOutcome step(const Action& a);

  const EpisodeConfig& config() const { return cfg_; }
  int day() const { return day_; }
  bool done() const { return done_; }
  bool started() const { return started_; }
  const CropState& crop() const { return crop_; }
  const SoilState& soil() const { return soil_; }
  const std::vector<WeatherDay>& season_weather() const { return weather_; }
  const EpisodeLog& log() const { return log_; }
  Observation observation() const;

 private:
  EpisodeConfig cfg_;
  dynamics::LeafCurve curve_;
  std::vector<WeatherDay> file_weather_;
  std::vector<WeatherDay> weather_;
  std::optional<std::uint64_t> weather_seed_;  // seed that produced weather_
  CropState crop_;
  SoilState soil_;
  EpisodeLog log_;
  int day_ = 0;
  bool done_ = false;
  bool started_ = false;
};

}  // namespace cropsim
