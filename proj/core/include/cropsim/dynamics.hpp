#pragma once

#include "cropsim/config.hpp"
#include "cropsim/weather.hpp"

namespace cropsim {

/// Daily management inputs.
struct Action {
  double fert = 0.0;   // kg/ha
  double irrig = 0.0;  // mm

  friend bool operator==(const Action&, const Action&) = default;
};

/// Corn parameters.
struct CropParams {
  double t_base = 8.0;
  double t_opt = 25.0;
  double lai_max = 3.0;
  double fr_phu_sen = 0.9;
  double phu_total = 1400.0;
  double rue = 39.0;
  double k_l = 0.65;
  double hi_opt = 0.5;
  // (fr_PHU, fr_LAImax) anchors of the leaf development curve.
  double lai_curve_x1 = 0.15;
  double lai_curve_y1 = 0.05;
  double lai_curve_x2 = 0.50;
  double lai_curve_y2 = 0.95;
};

struct SoilParams {
  double sw_capacity = 100.0;        // mm
  double sw_init = 30.0;             // mm
  double cn2 = 78.0;
  double n_init = 50.0;              // kg/ha
  double denit_rate = 0.02;          // 1/day
  double denit_sw_threshold = 0.9;   // fraction of capacity
  double n_uptake_coeff = 0.015;     // kg N per kg biomass
};

struct CropState {
  double hu_cum = 0.0;
  double fr_phu = 0.0;
  double lai = 0.0;
  double lai_peak = 0.0;  // largest LAI reached, anchors the senescence decline
  double biomass = 0.0;
  double e_a = 0.0;
  double n_strs = 0.0;
  double w_strs = 0.0;
  double t_strs = 0.0;
  double yld = 0.0;

  friend bool operator==(const CropState&, const CropState&) = default;
};

struct SoilState {
  double sw = 0.0;
  double rcn = 0.0;
  double dn = 0.0;
  double n_up = 0.0;
  double n_pool = 0.0;
  double wb_cum = 0.0;

  friend bool operator==(const SoilState&, const SoilState&) = default;
};

/// By-products of one day that are not part of the state.
struct DayFluxes {
  double heat_units = 0.0;
  double runoff = 0.0;
  double overflow = 0.0;
  double n_demand = 0.0;
  double delta_bio_potential = 0.0;
  double delta_bio = 0.0;
  double h_phosyn = 0.0;
  double yld_delta = 0.0;
};

struct StepResult {
  CropState crop;
  SoilState soil;
  DayFluxes fluxes;
};

namespace dynamics {

/// Logistic shape coefficients fitted through the two leaf-curve anchors.
struct LeafCurve {
  double l1 = 0.0;
  double l2 = 0.0;
};

/// Throws ConfigError on invalid parameters (including a singular leaf-curve fit).
void validate(const CropParams& p);
void validate(const SoilParams& p);

LeafCurve fit_leaf_curve(const CropParams& p);

double heat_units(double t_mean, const CropParams& p);
double fraction_phu(double hu_cum, const CropParams& p);
double fr_laimax(double fr_phu, const LeafCurve& curve);
double fr_laimax(double fr_phu, const CropParams& p);

/// Leaf increment: k_f (1 - exp(5 (lai_prev - lai_max))).
double lai_increment(double lai_prev, double k_f, double lai_max);

/// Leaf area after one day. Growth follows the logistic increment up to senescence,
/// afterwards LAI declines linearly in fr_PHU from `lai_peak` towards zero at maturity.
double lai_update(double lai_prev, double lai_peak, double fr_phu_prev, double fr_phu,
                  const CropParams& p, const LeafCurve& curve);
double lai_update(double lai_prev, double lai_peak, double fr_phu_prev, double fr_phu, const CropParams& p);

/// Beer's law: 0.5 H (1 - exp(-k LAI)).
double light_interception(double solar, double lai, const CropParams& p);
double potential_biomass_delta(double h_phosyn, const CropParams& p);

// Stress factors: 0 means no limitation, 1 means growth stops.
double temperature_stress(double t_mean, const CropParams& p);
double water_stress(double e_a, double e_ref);
double nitrogen_stress(double n_supplied, double n_demand);
/// Most limiting stress wins.
double actual_growth(double delta_bio_potential, double n_strs, double w_strs, double t_strs);

double harvest_index(double fr_phu, const CropParams& p);
double root_fraction(double fr_phu);
double yield_estimate(double bio, double fr_phu, double hi);

/// SCS curve-number runoff.
double surface_runoff(double water_in, double rcn);
double update_curve_number(double cn2, double sw, double sw_capacity);

/// Evapotranspiration with unlimited soil water.
double potential_et(double ref_et, double lai);
double actual_et(double ref_et, double lai, double sw, const SoilParams& sp);

struct WaterUpdate {
  double sw = 0.0;
  double overflow = 0.0;
};
WaterUpdate soil_water_update(double sw, double precip, double irrig, double q, double e_a, const SoilParams& sp);

struct NitrogenUpdate {
  double n_pool = 0.0;
  double n_up = 0.0;
  double dn = 0.0;
  double demand = 0.0;
};
NitrogenUpdate nitrogen_update(double n_pool, double fert, double delta_bio, double sw, const SoilParams& sp);

CropState initial_crop_state();
SoilState initial_soil_state(const SoilParams& sp);

/// One day of the crop/soil transition. Pure function of its inputs.
StepResult step_dynamics(const CropState& crop, const SoilState& soil, const WeatherDay& w, const Action& a,
                         const CropParams& cp, const SoilParams& sp, const LeafCurve& curve);
StepResult step_dynamics(const CropState& crop, const SoilState& soil, const WeatherDay& w, const Action& a,
                         const CropParams& cp, const SoilParams& sp);

CropParams crop_params_from_config(const Config& cfg, CropParams base = {});
SoilParams soil_params_from_config(const Config& cfg, SoilParams base = {});

}  // namespace dynamics
}  // namespace cropsim
