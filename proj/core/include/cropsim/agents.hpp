#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "cropsim/config.hpp"
#include "cropsim/environment.hpp"
#include "cropsim/random.hpp"

namespace cropsim {

/// What a policy may look at before choosing the day's action. Soil nitrogen and
/// water are not part of the observation; they come from the environment's
/// diagnostics channel.
struct PolicyInput {
  Observation obs{};
  int day = 0;
  double n_pool = 0.0;
  double sw = 0.0;
  double sw_capacity = 0.0;
};

PolicyInput policy_input(const Environment& env);

class Policy {
 public:
  virtual ~Policy() = default;
  virtual std::string name() const = 0;
  virtual Action act(const PolicyInput& in) = 0;
  /// Called before each episode; policies with internal randomness reseed here.
  virtual void begin_episode(std::uint64_t /*seed*/) {}
};

struct SchedulePolicyParams {
  std::vector<std::pair<int, double>> fert_schedule = {{7, 60.0}, {45, 60.0}, {80, 40.0}};  // (day, kg/ha)
  int irrig_period = 7;        // days
  double irrig_amount = 25.0;  // mm
};

struct ReactivePolicyParams {
  double n_threshold = 20.0;           // kg/ha
  double n_dose = 50.0;                // kg/ha
  double sw_threshold_fraction = 0.2;
  double irrig_dose = 50.0;            // mm
};

Action random_policy(Rng& rng, const ActionBounds& bounds);
Action standard_policy(int day, const SchedulePolicyParams& p);
Action reactive_policy(const PolicyInput& in, const ReactivePolicyParams& p);

void validate(const SchedulePolicyParams& p, const ActionBounds& bounds, int duration);
void validate(const ReactivePolicyParams& p, const ActionBounds& bounds);

/// Keys: standard_fert_schedule ("day:amount,..."), standard_irrig_period, standard_irrig_amount.
SchedulePolicyParams schedule_params_from_config(const Config& cfg, SchedulePolicyParams base = {});
/// Keys: reactive_n_threshold, reactive_n_dose, reactive_sw_fraction, reactive_irrig_dose.
ReactivePolicyParams reactive_params_from_config(const Config& cfg, ReactivePolicyParams base = {});

class RandomPolicy final : public Policy {
 public:
  RandomPolicy(ActionBounds bounds, std::uint64_t seed) : bounds_(bounds), rng_(seed) {}
  std::string name() const override { return "random"; }
  Action act(const PolicyInput&) override { return random_policy(rng_, bounds_); }
  void begin_episode(std::uint64_t seed) override { rng_.seed(derive_seed(seed, kPolicyStream)); }

 private:
  ActionBounds bounds_;
  Rng rng_;
};

class StandardPolicy final : public Policy {
 public:
  explicit StandardPolicy(SchedulePolicyParams p = {}) : params_(std::move(p)) {}
  std::string name() const override { return "standard"; }
  Action act(const PolicyInput& in) override { return standard_policy(in.day, params_); }

 private:
  SchedulePolicyParams params_;
};

class ReactivePolicy final : public Policy {
 public:
  explicit ReactivePolicy(ReactivePolicyParams p = {}) : params_(p) {}
  std::string name() const override { return "reactive"; }
  Action act(const PolicyInput& in) override { return reactive_policy(in, params_); }

 private:
  ReactivePolicyParams params_;
};

}  // namespace cropsim
