#include "cropsim/environment.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace cropsim {
namespace {

std::string format_double(double v) {
  std::ostringstream out;
  out << std::setprecision(17) << v;
  return out.str();
}

}  // namespace

std::string to_string(Mode mode) { return mode == Mode::kDeterministic ? "deterministic" : "stochastic"; }

Mode parse_mode(const std::string& text) {
  if (text == "deterministic") return Mode::kDeterministic;
  if (text == "stochastic") return Mode::kStochastic;
  throw ConfigError("mode must be 'stochastic' or 'deterministic', got '" + text + "'");
}

void validate(const EpisodeConfig& cfg) {
  std::vector<std::string> problems;
  auto check = [&](auto&& fn) {
    try {
      fn();
    } catch (const ConfigError& e) {
      problems.emplace_back(e.what());
    }
  };
  if (cfg.duration < 1) problems.emplace_back("duration must be >= 1");
  if (cfg.weather_file.empty() && cfg.duration > weather::kMaxDayIndex) {
    problems.emplace_back("duration must be <= 400 with synthetic weather");
  }
  if (!(cfg.weather_noise >= 0.0 && cfg.weather_noise <= 0.5)) problems.emplace_back("weather_noise must lie in [0, 0.5]");
  if (!(cfg.bounds.fert_max >= 0.0)) problems.emplace_back("fert_max must be >= 0");
  if (!(cfg.bounds.irrig_max >= 0.0)) problems.emplace_back("irrig_max must be >= 0");
  if (!(cfg.reward.alpha >= 0.0)) problems.emplace_back("alpha must be >= 0");
  if (!(cfg.reward.beta >= 0.0)) problems.emplace_back("beta must be >= 0");
  check([&] { weather::validate(cfg.climate); });
  check([&] { dynamics::validate(cfg.crop); });
  check([&] { dynamics::validate(cfg.soil); });
  if (problems.empty()) return;
  std::string msg = "invalid episode config:";
  for (const auto& p : problems) msg += "\n  " + p;
  throw ConfigError(msg);
}

EpisodeConfig episode_config_from_config(const Config& cfg, EpisodeConfig e) {
  e.duration = static_cast<int>(cfg.get_int("duration", e.duration));
  e.mode = parse_mode(cfg.get_string("mode", to_string(e.mode)));
  e.seed = cfg.get_uint("seed", e.seed);
  e.weather_file = cfg.get_string("weather_file", e.weather_file.string());
  e.weather_noise = cfg.get("weather_noise", e.weather_noise);
  e.bounds.fert_max = cfg.get("fert_max", e.bounds.fert_max);
  e.bounds.irrig_max = cfg.get("irrig_max", e.bounds.irrig_max);
  e.reward.alpha = cfg.get("alpha", e.reward.alpha);
  e.reward.beta = cfg.get("beta", e.reward.beta);
  e.log_path = cfg.get_string("log_path", e.log_path.string());
  e.climate = weather::profile_from_config(cfg, e.climate);
  e.crop = dynamics::crop_params_from_config(cfg, e.crop);
  e.soil = dynamics::soil_params_from_config(cfg, e.soil);
  validate(e);
  return e;
}

Config to_config(const EpisodeConfig& e) {
  Config c;
  auto put = [&](const char* k, double v) { c.set(k, format_double(v)); };
  c.set("duration", std::to_string(e.duration));
  c.set("mode", to_string(e.mode));
  c.set("seed", std::to_string(e.seed));
  if (!e.weather_file.empty()) c.set("weather_file", e.weather_file.string());
  put("weather_noise", e.weather_noise);
  put("fert_max", e.bounds.fert_max);
  put("irrig_max", e.bounds.irrig_max);
  put("alpha", e.reward.alpha);
  put("beta", e.reward.beta);
  put("climate_mean_temp", e.climate.mean_temp);
  put("climate_temp_amplitude", e.climate.temp_amplitude);
  put("climate_temp_noise", e.climate.temp_noise);
  c.set("climate_peak_doy", std::to_string(e.climate.peak_doy));
  put("climate_precip_prob", e.climate.precip_prob);
  put("climate_precip_mean", e.climate.precip_mean);
  put("climate_solar_peak", e.climate.solar_peak);
  put("climate_clearness", e.climate.clearness);
  put("climate_vapor_base", e.climate.vapor_base);
  c.set("climate_start_doy", std::to_string(e.climate.start_doy));
  put("t_base", e.crop.t_base);
  put("t_opt", e.crop.t_opt);
  put("lai_max", e.crop.lai_max);
  put("fr_phu_sen", e.crop.fr_phu_sen);
  put("phu_total", e.crop.phu_total);
  put("rue", e.crop.rue);
  put("k_l", e.crop.k_l);
  put("hi_opt", e.crop.hi_opt);
  put("lai_curve_x1", e.crop.lai_curve_x1);
  put("lai_curve_y1", e.crop.lai_curve_y1);
  put("lai_curve_x2", e.crop.lai_curve_x2);
  put("lai_curve_y2", e.crop.lai_curve_y2);
  put("sw_capacity", e.soil.sw_capacity);
  put("sw_init", e.soil.sw_init);
  put("cn2", e.soil.cn2);
  put("n_init", e.soil.n_init);
  put("denit_rate", e.soil.denit_rate);
  put("denit_sw_threshold", e.soil.denit_sw_threshold);
  put("n_uptake_coeff", e.soil.n_uptake_coeff);
  return c;
}

double reward(double yld_delta, const Action& a, const RewardParams& rp) {
  return yld_delta - rp.alpha * a.fert - rp.beta * a.irrig;
}

Observation observe(const CropState& crop, const SoilState& soil, const WeatherDay& w) {
  return {w.t_mean, w.precip, w.ref_et, w.solar, w.vapor, crop.e_a,   soil.wb_cum,
          soil.rcn, crop.lai, soil.n_up, soil.dn, crop.n_strs, crop.t_strs, crop.w_strs};
}

Action clamp_action(const Action& a, const ActionBounds& b, bool* fert_clamped, bool* irrig_clamped) {
  auto clamp_one = [](double v, double hi, bool* flag) {
    const double out = std::isnan(v) ? 0.0 : std::clamp(v, 0.0, hi);
    if (flag) *flag = !(out == v);
    return out;
  };
  return {clamp_one(a.fert, b.fert_max, fert_clamped), clamp_one(a.irrig, b.irrig_max, irrig_clamped)};
}

void save_log(const EpisodeLog& log, const std::filesystem::path& path) {
  if (log.days.empty()) throw EpisodeError("cannot save an episode log with no steps");
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write episode log '" + path.string() + "'");
  for (const auto& [k, v] : log.metadata.entries()) out << "# " << k << " = " << v << '\n';
  out << kLogColumns << '\n' << std::setprecision(17);
  for (const auto& r : log.days) {
    const auto obs = observe(r.crop, r.soil, r.weather);
    out << r.day;
    for (double v : obs) out << ',' << v;
    out << ',' << r.action.fert << ',' << r.action.irrig << ',' << r.reward << ',' << r.crop.yld << '\n';
  }
  if (!out) throw ConfigError("failed writing episode log '" + path.string() + "'");
}

EpisodeLog load_log(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open episode log '" + path.string() + "'");
  EpisodeLog log;
  std::string line;
  bool header_seen = false;
  int row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!header_seen && line.rfind("# ", 0) == 0) {
      log.metadata.merge(Config::parse(line.substr(2), path.string()));
      continue;
    }
    if (!header_seen) {
      if (line != kLogColumns) throw ConfigError(path.string() + ": unexpected column header");
      header_seen = true;
      continue;
    }
    ++row;
    std::vector<double> v;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        v.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw ConfigError(path.string() + ": row " + std::to_string(row) + ": malformed number '" + cell + "'");
      }
    }
    if (v.size() != 19) throw ConfigError(path.string() + ": row " + std::to_string(row) + ": expected 19 columns");
    DayRecord r;
    r.day = static_cast<int>(v[0]);
    r.weather = {v[1], v[2], v[3], v[4], v[5]};
    r.crop.e_a = v[6];
    r.soil.wb_cum = v[7];
    r.soil.rcn = v[8];
    r.crop.lai = v[9];
    r.soil.n_up = v[10];
    r.soil.dn = v[11];
    r.crop.n_strs = v[12];
    r.crop.t_strs = v[13];
    r.crop.w_strs = v[14];
    r.action = {v[15], v[16]};
    r.reward = v[17];
    r.crop.yld = v[18];
    log.days.push_back(r);
  }
  if (!header_seen) throw ConfigError(path.string() + ": missing column header");
  return log;
}

Environment::Environment(EpisodeConfig cfg) : cfg_(std::move(cfg)) {
  validate(cfg_);
  curve_ = dynamics::fit_leaf_curve(cfg_.crop);
  if (!cfg_.weather_file.empty()) file_weather_ = weather::load_csv(cfg_.weather_file);
}

Observation Environment::reset(std::uint64_t seed) {
  cfg_.seed = seed;
  return reset();
}

Observation Environment::reset() {
  const auto n = static_cast<std::size_t>(cfg_.duration);
  if (!weather_seed_ || *weather_seed_ != cfg_.seed) {
    if (!cfg_.weather_file.empty()) {
      if (file_weather_.size() < n) {
        throw ConfigError("weather file '" + cfg_.weather_file.string() + "' has " +
                          std::to_string(file_weather_.size()) + " days, episode needs " + std::to_string(n));
      }
      weather_.assign(file_weather_.begin(), file_weather_.begin() + static_cast<std::ptrdiff_t>(n));
    } else {
      weather_ = weather::generate_season(cfg_.duration, cfg_.climate, cfg_.seed);
    }
    if (cfg_.mode == Mode::kStochastic && cfg_.weather_noise > 0.0) {
      Rng rng(derive_seed(cfg_.seed, kPerturbStream));
      for (auto& w : weather_) w = weather::perturb(w, rng, cfg_.weather_noise);
    }
    weather_seed_ = cfg_.seed;
  }

  crop_ = dynamics::initial_crop_state();
  soil_ = dynamics::initial_soil_state(cfg_.soil);
  day_ = 0;
  done_ = false;
  started_ = true;
  log_ = EpisodeLog{to_config(cfg_), {}};
  log_.days.reserve(n);
  return observation();
}

Observation Environment::observation() const {
  const std::size_t idx = std::min<std::size_t>(static_cast<std::size_t>(day_), weather_.size() - 1);
  return observe(crop_, soil_, weather_[idx]);
}

StepOutcome Environment::step(const Action& requested) {
  if (!started_) throw EpisodeError("step called before reset");
  if (done_) throw EpisodeError("step called on a finished episode; call reset first");

  StepOutcome out;
  auto& info = out.info;
  const Action a = clamp_action(requested, cfg_.bounds, &info.fert_clamped, &info.irrig_clamped);
  const WeatherDay& w = weather_[static_cast<std::size_t>(day_)];

  const StepResult r = dynamics::step_dynamics(crop_, soil_, w, a, cfg_.crop, cfg_.soil, curve_);
  crop_ = r.crop;
  soil_ = r.soil;
  out.reward = reward(r.fluxes.yld_delta, a, cfg_.reward);
  log_.days.push_back(DayRecord{day_, w, crop_, soil_, a, out.reward});

  ++day_;
  done_ = day_ >= cfg_.duration;
  out.done = done_;
  out.obs = observation();

  info.day = day_;
  info.yld = crop_.yld;
  info.yld_delta = r.fluxes.yld_delta;
  info.biomass = crop_.biomass;
  info.fr_phu = crop_.fr_phu;
  info.n_pool = soil_.n_pool;
  info.sw = soil_.sw;
  info.sw_capacity = cfg_.soil.sw_capacity;
  info.runoff = r.fluxes.runoff;
  info.overflow = r.fluxes.overflow;
  info.n_strs = crop_.n_strs;
  info.w_strs = crop_.w_strs;
  info.t_strs = crop_.t_strs;
  info.applied = a;

  if (done_ && !cfg_.log_path.empty()) save_log(log_, cfg_.log_path);
  return out;
}

}  // namespace cropsim
