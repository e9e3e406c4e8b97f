#include "cropsim/weather.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>
#include <string>

namespace cropsim::weather {
namespace {

// Hargreaves radiation form: 0.0135 (T + 17.8) Rs / lambda, lambda in MJ/kg.
constexpr double kLatentHeat = 2.45;

double saturation_vapor(double t) { return 6.108 * std::exp(17.27 * t / (t + 237.3)); }

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

}  // namespace

void validate(const ClimateProfile& p) {
  require(p.precip_prob >= 0.0 && p.precip_prob <= 1.0, "climate_precip_prob must lie in [0, 1]");
  require(p.temp_amplitude >= 0.0, "climate_temp_amplitude must be >= 0");
  require(p.temp_noise >= 0.0, "climate_temp_noise must be >= 0");
  require(p.precip_mean >= 0.0, "climate_precip_mean must be >= 0");
  require(p.solar_peak >= 0.0, "climate_solar_peak must be >= 0");
  require(p.clearness >= 0.075 && p.clearness <= 0.925, "climate_clearness must lie in [0.075, 0.925]");
  require(p.vapor_base >= 0.0, "climate_vapor_base must be >= 0");
  require(std::isfinite(p.mean_temp), "climate_mean_temp must be finite");
}

void validate(const WeatherDay& d) {
  require(std::isfinite(d.t_mean) && d.t_mean >= kMinTemp && d.t_mean <= kMaxTemp,
          "t_mean must be finite and within [-60, 60]");
  require(std::isfinite(d.precip) && d.precip >= 0.0, "precip must be >= 0");
  require(std::isfinite(d.ref_et) && d.ref_et >= 0.0, "ref_et must be >= 0");
  require(std::isfinite(d.solar) && d.solar >= 0.0, "solar must be >= 0");
  require(std::isfinite(d.vapor) && d.vapor >= 0.0, "vapor must be >= 0");
}

double seasonal_temperature(int day_index, const ClimateProfile& p) {
  const double phase = 2.0 * std::numbers::pi * (p.start_doy + day_index - p.peak_doy) / 365.0;
  return p.mean_temp + p.temp_amplitude * std::cos(phase);
}

WeatherDay generate_weather(int day_index, const ClimateProfile& p, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double u_temp = unit(rng);
  const double u_wet = unit(rng);
  const double u_amount = unit(rng);
  const double u_cloud = unit(rng);
  const double u_vapor = unit(rng);

  WeatherDay w;
  w.t_mean = seasonal_temperature(day_index, p) + p.temp_noise * (2.0 * u_temp - 1.0);
  w.t_mean = std::clamp(w.t_mean, kMinTemp, kMaxTemp);

  const bool wet = u_wet < p.precip_prob;
  // Inverse-CDF exponential; 1 - u lies in (0, 1].
  w.precip = wet ? -p.precip_mean * std::log(1.0 - u_amount) : 0.0;

  const double solstice = 2.0 * std::numbers::pi * (p.start_doy + day_index - 172) / 365.0;
  const double clear_sky = p.solar_peak * (0.75 + 0.25 * std::cos(solstice));
  const double transmissivity = wet ? 0.30 + 0.15 * u_cloud : p.clearness - 0.075 + 0.15 * u_cloud;
  w.solar = std::max(0.0, clear_sky * transmissivity);

  // Hargreaves form on clear-sky radiation; overcast days evaporate less.
  const double demand = 0.0135 * (w.t_mean + 17.8) * clear_sky / kLatentHeat;
  w.ref_et = std::max(0.0, wet ? 0.6 * demand : demand);

  const double humidity = wet ? 1.15 : 0.9 + 0.2 * u_vapor;
  w.vapor = std::max(0.0, p.vapor_base * humidity * saturation_vapor(w.t_mean) / saturation_vapor(15.0));
  return w;
}

std::vector<WeatherDay> generate_season(int days, const ClimateProfile& profile, std::uint64_t seed) {
  std::vector<WeatherDay> out;
  out.reserve(static_cast<std::size_t>(std::max(days, 0)));
  for (int d = 0; d < days; ++d) {
    Rng rng(derive_seed(seed, kWeatherStream, static_cast<std::uint64_t>(d)));
    out.push_back(generate_weather(d, profile, rng));
  }
  return out;
}

WeatherDay perturb(const WeatherDay& w, Rng& rng, double scale) {
  if (scale == 0.0) return w;
  std::uniform_real_distribution<double> factor(1.0 - scale, 1.0 + scale);
  std::uniform_real_distribution<double> shift(-scale * 10.0, scale * 10.0);
  WeatherDay out;
  out.t_mean = std::clamp(w.t_mean + shift(rng), kMinTemp, kMaxTemp);
  out.precip = std::max(0.0, w.precip * factor(rng));
  out.ref_et = std::max(0.0, w.ref_et * factor(rng));
  out.solar = std::max(0.0, w.solar * factor(rng));
  out.vapor = std::max(0.0, w.vapor * factor(rng));
  return out;
}

std::vector<WeatherDay> load_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open weather file '" + path.string() + "'");

  std::string line;
  if (!std::getline(in, line)) throw ConfigError(path.string() + ": empty weather file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "day,t_mean,precip,ref_et,solar,vapor") {
    throw ConfigError(path.string() + ": expected header 'day,t_mean,precip,ref_et,solar,vapor'");
  }

  std::vector<std::pair<long, WeatherDay>> rows;
  int row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::string where = path.string() + ": row " + std::to_string(row);

    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 6) throw ConfigError(where + ": expected 6 columns, got " + std::to_string(cells.size()));

    double values[6];
    for (int i = 0; i < 6; ++i) {
      try {
        std::size_t consumed = 0;
        values[i] = std::stod(cells[static_cast<std::size_t>(i)], &consumed);
        if (consumed != cells[static_cast<std::size_t>(i)].size()) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        throw ConfigError(where + ": malformed number '" + cells[static_cast<std::size_t>(i)] + "'");
      }
    }
    WeatherDay w{values[1], values[2], values[3], values[4], values[5]};
    try {
      validate(w);
    } catch (const ConfigError& e) {
      throw ConfigError(where + ": " + e.what());
    }
    rows.emplace_back(static_cast<long>(values[0]), w);
  }
  std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

  std::vector<WeatherDay> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r.second);
  return out;
}

void save_csv(const std::vector<WeatherDay>& days, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write weather file '" + path.string() + "'");
  out << "day,t_mean,precip,ref_et,solar,vapor\n" << std::setprecision(17);
  for (std::size_t d = 0; d < days.size(); ++d) {
    const auto& w = days[d];
    out << d << ',' << w.t_mean << ',' << w.precip << ',' << w.ref_et << ',' << w.solar << ',' << w.vapor << '\n';
  }
}

ClimateProfile profile_from_config(const Config& cfg, ClimateProfile p) {
  p.mean_temp = cfg.get("climate_mean_temp", p.mean_temp);
  p.temp_amplitude = cfg.get("climate_temp_amplitude", p.temp_amplitude);
  p.temp_noise = cfg.get("climate_temp_noise", p.temp_noise);
  p.peak_doy = static_cast<int>(cfg.get_int("climate_peak_doy", p.peak_doy));
  p.precip_prob = cfg.get("climate_precip_prob", p.precip_prob);
  p.precip_mean = cfg.get("climate_precip_mean", p.precip_mean);
  p.solar_peak = cfg.get("climate_solar_peak", p.solar_peak);
  p.clearness = cfg.get("climate_clearness", p.clearness);
  p.vapor_base = cfg.get("climate_vapor_base", p.vapor_base);
  p.start_doy = static_cast<int>(cfg.get_int("climate_start_doy", p.start_doy));
  validate(p);
  return p;
}

}  // namespace cropsim::weather
