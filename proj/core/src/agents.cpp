#include "cropsim/agents.hpp"

#include <sstream>

namespace cropsim {

PolicyInput policy_input(const Environment& env) {
  PolicyInput in;
  in.obs = env.observation();
  in.day = env.day();
  in.n_pool = env.soil().n_pool;
  in.sw = env.soil().sw;
  in.sw_capacity = env.config().soil.sw_capacity;
  return in;
}

Action random_policy(Rng& rng, const ActionBounds& b) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double u_fert = unit(rng);
  const double u_irrig = unit(rng);
  return {u_fert * b.fert_max, u_irrig * b.irrig_max};
}

Action standard_policy(int day, const SchedulePolicyParams& p) {
  Action a;
  for (const auto& [d, amount] : p.fert_schedule) {
    if (d == day) a.fert += amount;
  }
  if (p.irrig_period > 0 && day % p.irrig_period == 0) a.irrig = p.irrig_amount;
  return a;
}

Action reactive_policy(const PolicyInput& in, const ReactivePolicyParams& p) {
  Action a;
  if (in.n_pool < p.n_threshold) a.fert = p.n_dose;
  if (in.sw < p.sw_threshold_fraction * in.sw_capacity) a.irrig = p.irrig_dose;
  return a;
}

void validate(const SchedulePolicyParams& p, const ActionBounds& b, int duration) {
  for (const auto& [day, amount] : p.fert_schedule) {
    if (day < 0 || day >= duration) {
      throw ConfigError("standard_fert_schedule day " + std::to_string(day) + " outside the season");
    }
    if (amount < 0.0 || amount > b.fert_max) {
      throw ConfigError("standard_fert_schedule amount on day " + std::to_string(day) + " outside action bounds");
    }
  }
  if (p.irrig_period < 1) throw ConfigError("standard_irrig_period must be >= 1");
  if (p.irrig_amount < 0.0 || p.irrig_amount > b.irrig_max) {
    throw ConfigError("standard_irrig_amount outside action bounds");
  }
}

void validate(const ReactivePolicyParams& p, const ActionBounds& b) {
  if (p.n_threshold < 0.0) throw ConfigError("reactive_n_threshold must be >= 0");
  if (!(p.sw_threshold_fraction >= 0.0 && p.sw_threshold_fraction <= 1.0)) throw ConfigError("reactive_sw_fraction must lie in [0, 1]");
  if (p.n_dose < 0.0 || p.n_dose > b.fert_max) throw ConfigError("reactive_n_dose outside action bounds");
  if (p.irrig_dose < 0.0 || p.irrig_dose > b.irrig_max) throw ConfigError("reactive_irrig_dose outside action bounds");
}

SchedulePolicyParams schedule_params_from_config(const Config& cfg, SchedulePolicyParams p) {
  if (cfg.contains("standard_fert_schedule")) {
    p.fert_schedule.clear();
    std::stringstream ss(cfg.get_string("standard_fert_schedule", ""));
    std::string item;
    while (std::getline(ss, item, ',')) {
      const auto colon = item.find(':');
      if (colon == std::string::npos) {
        throw ConfigError("standard_fert_schedule entries must be 'day:amount', got '" + item + "'");
      }
      try {
        p.fert_schedule.emplace_back(std::stoi(item.substr(0, colon)), std::stod(item.substr(colon + 1)));
      } catch (const std::exception&) {
        throw ConfigError("standard_fert_schedule: cannot parse '" + item + "'");
      }
    }
  }
  p.irrig_period = static_cast<int>(cfg.get_int("standard_irrig_period", p.irrig_period));
  p.irrig_amount = cfg.get("standard_irrig_amount", p.irrig_amount);
  return p;
}

ReactivePolicyParams reactive_params_from_config(const Config& cfg, ReactivePolicyParams p) {
  p.n_threshold = cfg.get("reactive_n_threshold", p.n_threshold);
  p.n_dose = cfg.get("reactive_n_dose", p.n_dose);
  p.sw_threshold_fraction = cfg.get("reactive_sw_fraction", p.sw_threshold_fraction);
  p.irrig_dose = cfg.get("reactive_irrig_dose", p.irrig_dose);
  return p;
}

}  // namespace cropsim
