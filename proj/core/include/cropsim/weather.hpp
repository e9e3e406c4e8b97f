#pragma once

#include <filesystem>
#include <vector>

#include "cropsim/config.hpp"
#include "cropsim/random.hpp"

namespace cropsim {

/// One day of climatic inputs.
struct WeatherDay {
  double t_mean = 0.0;  // °C
  double precip = 0.0;  // mm
  double ref_et = 0.0;  // mm
  double solar = 0.0;   // MJ/m²
  double vapor = 0.0;   // hPa

  friend bool operator==(const WeatherDay&, const WeatherDay&) = default;
};

/// Parameters of the synthetic climate generator.
struct ClimateProfile {
  double mean_temp = 12.0;         // annual mean, °C
  double temp_amplitude = 13.0;    // °C
  double temp_noise = 2.5;         // half-width of uniform daily noise, °C
  int peak_doy = 200;              // warmest day of year
  double precip_prob = 0.15;
  double precip_mean = 7.0;        // wet-day mean, mm
  double solar_peak = 28.0;        // clear-sky MJ/m² at the solstice
  double clearness = 0.32;         // mean dry-day transmissivity
  double vapor_base = 12.0;        // hPa at 15 °C
  int start_doy = 105;             // day of year of season day 0
};

namespace weather {

inline constexpr double kMinTemp = -60.0;
inline constexpr double kMaxTemp = 60.0;
inline constexpr int kMaxDayIndex = 400;

/// Throws ConfigError on an invalid profile.
void validate(const ClimateProfile& profile);
/// Throws ConfigError naming the offending field.
void validate(const WeatherDay& day);

/// Sinusoidal temperature (without noise) on a season day.
double seasonal_temperature(int day_index, const ClimateProfile& profile);

/// Synthetic weather for one day; consumes draws from `rng`.
WeatherDay generate_weather(int day_index, const ClimateProfile& profile, Rng& rng);

/// Weather for days [0, days) where each day uses its own sub-stream of `seed`,
/// so day d does not depend on how many days were generated before it.
std::vector<WeatherDay> generate_season(int days, const ClimateProfile& profile, std::uint64_t seed);

/// Multiplicative noise in [1-scale, 1+scale] per field; t_mean gets additive ±scale·10 °C.
WeatherDay perturb(const WeatherDay& w, Rng& rng, double scale);

/// Reads `day,t_mean,precip,ref_et,solar,vapor`.
std::vector<WeatherDay> load_csv(const std::filesystem::path& path);
void save_csv(const std::vector<WeatherDay>& days, const std::filesystem::path& path);

/// Recognized keys carry the `climate_` prefix.
ClimateProfile profile_from_config(const Config& cfg, ClimateProfile base = {});

}  // namespace weather
}  // namespace cropsim
