#include "cropsim/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace cropsim::dynamics {
namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

// Temperature-stress shape constant.
constexpr double kTempStressShape = 0.1054;
// Bare-soil evaporation share added to the canopy cover fraction.
constexpr double kSoilEvaporation = 0.1;

}  // namespace

void validate(const CropParams& p) {
  require(std::isfinite(p.t_base) && std::isfinite(p.t_opt) && p.t_opt > p.t_base, "t_opt must exceed t_base");
  require(p.lai_max > 0.0, "lai_max must be > 0");
  require(p.fr_phu_sen > 0.0 && p.fr_phu_sen <= 1.0, "fr_phu_sen must lie in (0, 1]");
  require(p.phu_total > 0.0, "phu_total must be > 0");
  require(p.rue > 0.0, "rue must be > 0");
  require(p.k_l > 0.0, "k_l must be > 0");
  require(p.hi_opt > 0.0 && p.hi_opt <= 1.0, "hi_opt must lie in (0, 1]");
  require(p.lai_curve_x1 > 0.0 && p.lai_curve_x2 > p.lai_curve_x1,
          "lai curve anchors must be strictly increasing in fr_phu");
  require(p.lai_curve_y1 > 0.0 && p.lai_curve_y2 > p.lai_curve_y1 && p.lai_curve_y2 < 1.0,
          "lai curve anchors must be strictly increasing in fr_laimax and below 1");
  fit_leaf_curve(p);
}

void validate(const SoilParams& p) {
  require(p.sw_capacity > 0.0, "sw_capacity must be > 0");
  require(p.sw_init >= 0.0 && p.sw_init <= p.sw_capacity, "sw_init must lie in [0, sw_capacity]");
  require(p.cn2 > 30.0 && p.cn2 <= 100.0, "cn2 must lie in (30, 100]");
  require(p.n_init >= 0.0, "n_init must be >= 0");
  require(p.denit_rate >= 0.0 && p.denit_rate <= 1.0, "denit_rate must lie in [0, 1]");
  require(p.denit_sw_threshold >= 0.0 && p.denit_sw_threshold <= 1.0, "denit_sw_threshold must lie in [0, 1]");
  require(p.n_uptake_coeff >= 0.0, "n_uptake_coeff must be >= 0");
}

LeafCurve fit_leaf_curve(const CropParams& p) {
  // fr / (fr + exp(l1 - l2 fr)) = y  <=>  ln(fr / y - fr) = l1 - l2 fr, linear in (l1, l2).
  const double x1 = p.lai_curve_x1, y1 = p.lai_curve_y1;
  const double x2 = p.lai_curve_x2, y2 = p.lai_curve_y2;
  const double g1 = x1 / y1 - x1;
  const double g2 = x2 / y2 - x2;
  if (!(g1 > 0.0 && g2 > 0.0) || x1 == x2) {
    throw ConfigError("lai curve anchors give a singular leaf-curve fit");
  }
  LeafCurve c;
  c.l2 = (std::log(g1) - std::log(g2)) / (x2 - x1);
  c.l1 = std::log(g1) + c.l2 * x1;
  if (!(c.l2 > 0.0) || !std::isfinite(c.l1)) {
    throw ConfigError("lai curve anchors give a non-increasing leaf curve");
  }
  return c;
}

double heat_units(double t_mean, const CropParams& p) { return std::max(0.0, t_mean - p.t_base); }

double fraction_phu(double hu_cum, const CropParams& p) { return hu_cum / p.phu_total; }

double fr_laimax(double fr_phu, const LeafCurve& c) {
  if (fr_phu <= 0.0) return 0.0;
  return fr_phu / (fr_phu + std::exp(c.l1 - c.l2 * fr_phu));
}

double fr_laimax(double fr_phu, const CropParams& p) { return fr_laimax(fr_phu, fit_leaf_curve(p)); }

double lai_increment(double lai_prev, double k_f, double lai_max) {
  return k_f * (1.0 - std::exp(5.0 * (lai_prev - lai_max)));
}

double lai_update(double lai_prev, double lai_peak, double fr_phu_prev, double fr_phu, const CropParams& p,
                  const LeafCurve& curve) {
  if (fr_phu <= p.fr_phu_sen) {
    const double k_f = p.lai_max * (fr_laimax(fr_phu, curve) - fr_laimax(fr_phu_prev, curve));
    const double next = lai_prev + lai_increment(lai_prev, k_f, p.lai_max);
    return std::clamp(next, 0.0, p.lai_max);
  }
  const double peak = std::max(lai_peak, lai_prev);
  const double declined = p.fr_phu_sen < 1.0 ? peak * (1.0 - fr_phu) / (1.0 - p.fr_phu_sen) : 0.0;
  return std::clamp(declined, 0.0, lai_prev);
}

double lai_update(double lai_prev, double lai_peak, double fr_phu_prev, double fr_phu, const CropParams& p) {
  return lai_update(lai_prev, lai_peak, fr_phu_prev, fr_phu, p, fit_leaf_curve(p));
}

double light_interception(double solar, double lai, const CropParams& p) {
  return 0.5 * solar * (1.0 - std::exp(-p.k_l * lai));
}

double potential_biomass_delta(double h_phosyn, const CropParams& p) { return p.rue * h_phosyn; }

double temperature_stress(double t_mean, const CropParams& p) {
  const double upper = 2.0 * p.t_opt - p.t_base;
  if (t_mean <= p.t_base || t_mean >= upper) return 1.0;
  const double dev = p.t_opt - t_mean;
  const double room = t_mean <= p.t_opt ? t_mean - p.t_base : upper - t_mean;
  return std::clamp(1.0 - std::exp(-kTempStressShape * dev * dev / (room * room)), 0.0, 1.0);
}

double water_stress(double e_a, double e_ref) {
  if (e_ref <= 0.0) return 0.0;
  return 1.0 - std::min(1.0, e_a / e_ref);
}

double nitrogen_stress(double n_supplied, double n_demand) {
  if (n_demand <= 0.0) return 0.0;
  return 1.0 - std::min(1.0, n_supplied / n_demand);
}

double actual_growth(double delta_bio_potential, double n_strs, double w_strs, double t_strs) {
  const double limiting = std::max({n_strs, w_strs, t_strs});
  return delta_bio_potential * (1.0 - limiting);
}

double harvest_index(double fr_phu, const CropParams& p) {
  const double scaled = 100.0 * fr_phu;
  return p.hi_opt * scaled / (scaled + std::exp(11.1 - 10.0 * fr_phu));
}

double root_fraction(double fr_phu) { return 0.4 - 0.2 * fr_phu; }

double yield_estimate(double bio, double fr_phu, double hi) {
  if (hi <= 1.0) return (1.0 - root_fraction(fr_phu)) * bio * hi;
  return bio * hi / (hi + 1.0);
}

double surface_runoff(double water_in, double rcn) {
  const double retention = 25.4 * (1000.0 / rcn - 10.0);
  const double abstraction = 0.2 * retention;
  if (water_in <= abstraction) return 0.0;
  const double excess = water_in - abstraction;
  return std::min(water_in, excess * excess / (water_in + 0.8 * retention));
}

double update_curve_number(double cn2, double sw, double sw_capacity) {
  const double dry = cn2 - 15.0;
  const double wet = std::min(99.0, cn2 + 10.0);
  const double frac = std::clamp(sw / sw_capacity, 0.0, 1.0);
  return std::max(dry + (wet - dry) * frac, 30.0 + 1e-9);
}

double potential_et(double ref_et, double lai) {
  const double cover = std::min(1.0, 1.0 - std::exp(-0.5 * lai) + kSoilEvaporation);
  return ref_et * cover;
}

double actual_et(double ref_et, double lai, double sw, const SoilParams& sp) {
  const double moisture = std::min(1.0, sw / (0.5 * sp.sw_capacity));
  const double e_a = potential_et(ref_et, lai) * moisture;
  return std::max(0.0, std::min({e_a, ref_et, sw}));
}

WaterUpdate soil_water_update(double sw, double precip, double irrig, double q, double e_a, const SoilParams& sp) {
  const double unbounded = sw + precip + irrig - q - e_a;
  WaterUpdate out;
  out.sw = std::clamp(unbounded, 0.0, sp.sw_capacity);
  out.overflow = unbounded - out.sw;
  return out;
}

NitrogenUpdate nitrogen_update(double n_pool, double fert, double delta_bio, double sw, const SoilParams& sp) {
  NitrogenUpdate out;
  const double available = n_pool + fert;
  out.demand = sp.n_uptake_coeff * delta_bio;
  out.n_up = std::min(out.demand, available);
  const double remaining = available - out.n_up;
  out.dn = sw > sp.denit_sw_threshold * sp.sw_capacity ? sp.denit_rate * remaining : 0.0;
  out.n_pool = remaining - out.dn;
  return out;
}

CropState initial_crop_state() { return CropState{}; }

SoilState initial_soil_state(const SoilParams& sp) {
  SoilState s;
  s.sw = sp.sw_init;
  s.rcn = update_curve_number(sp.cn2, sp.sw_init, sp.sw_capacity);
  s.n_pool = sp.n_init;
  return s;
}

StepResult step_dynamics(const CropState& crop, const SoilState& soil, const WeatherDay& w, const Action& a,
                         const CropParams& cp, const SoilParams& sp, const LeafCurve& curve) {
  StepResult r{crop, soil, {}};
  auto& c = r.crop;
  auto& s = r.soil;
  auto& f = r.fluxes;

  // Phenology.
  f.heat_units = heat_units(w.t_mean, cp);
  c.hu_cum = crop.hu_cum + f.heat_units;
  c.fr_phu = fraction_phu(c.hu_cum, cp);

  // Water: runoff on yesterday's curve number, ET limited by what infiltrated.
  const double water_in = w.precip + a.irrig;
  f.runoff = surface_runoff(water_in, soil.rcn);
  const double sw_available = soil.sw + water_in - f.runoff;
  const double e_demand = potential_et(w.ref_et, crop.lai);
  c.e_a = std::min(actual_et(w.ref_et, crop.lai, sw_available, sp), sw_available);
  const auto water = soil_water_update(soil.sw, w.precip, a.irrig, f.runoff, c.e_a, sp);
  s.sw = water.sw;
  f.overflow = water.overflow;
  s.rcn = update_curve_number(sp.cn2, s.sw, sp.sw_capacity);
  s.wb_cum = soil.wb_cum + water_in - f.runoff - c.e_a;

  // Potential growth on yesterday's canopy, which sets the nitrogen demand.
  f.h_phosyn = light_interception(w.solar, crop.lai, cp);
  f.delta_bio_potential = potential_biomass_delta(f.h_phosyn, cp);
  const auto nitrogen = nitrogen_update(soil.n_pool, a.fert, f.delta_bio_potential, s.sw, sp);
  s.n_pool = nitrogen.n_pool;
  s.n_up = nitrogen.n_up;
  s.dn = nitrogen.dn;
  f.n_demand = nitrogen.demand;

  c.n_strs = nitrogen_stress(nitrogen.n_up, nitrogen.demand);
  c.w_strs = water_stress(c.e_a, e_demand);
  c.t_strs = temperature_stress(w.t_mean, cp);

  c.lai = lai_update(crop.lai, crop.lai_peak, crop.fr_phu, c.fr_phu, cp, curve);
  c.lai_peak = std::max(crop.lai_peak, c.lai);

  f.delta_bio = actual_growth(f.delta_bio_potential, c.n_strs, c.w_strs, c.t_strs);
  c.biomass = crop.biomass + f.delta_bio;

  const double hi = harvest_index(c.fr_phu, cp);
  const double estimate = yield_estimate(c.biomass, c.fr_phu, hi);
  c.yld = std::max(crop.yld, estimate);
  f.yld_delta = c.yld - crop.yld;
  return r;
}

StepResult step_dynamics(const CropState& crop, const SoilState& soil, const WeatherDay& w, const Action& a,
                         const CropParams& cp, const SoilParams& sp) {
  return step_dynamics(crop, soil, w, a, cp, sp, fit_leaf_curve(cp));
}

CropParams crop_params_from_config(const Config& cfg, CropParams p) {
  p.t_base = cfg.get("t_base", p.t_base);
  p.t_opt = cfg.get("t_opt", p.t_opt);
  p.lai_max = cfg.get("lai_max", p.lai_max);
  p.fr_phu_sen = cfg.get("fr_phu_sen", p.fr_phu_sen);
  p.phu_total = cfg.get("phu_total", p.phu_total);
  p.rue = cfg.get("rue", p.rue);
  p.k_l = cfg.get("k_l", p.k_l);
  p.hi_opt = cfg.get("hi_opt", p.hi_opt);
  p.lai_curve_x1 = cfg.get("lai_curve_x1", p.lai_curve_x1);
  p.lai_curve_y1 = cfg.get("lai_curve_y1", p.lai_curve_y1);
  p.lai_curve_x2 = cfg.get("lai_curve_x2", p.lai_curve_x2);
  p.lai_curve_y2 = cfg.get("lai_curve_y2", p.lai_curve_y2);
  validate(p);
  return p;
}

SoilParams soil_params_from_config(const Config& cfg, SoilParams p) {
  p.sw_capacity = cfg.get("sw_capacity", p.sw_capacity);
  p.sw_init = cfg.get("sw_init", p.sw_init);
  p.cn2 = cfg.get("cn2", p.cn2);
  p.n_init = cfg.get("n_init", p.n_init);
  p.denit_rate = cfg.get("denit_rate", p.denit_rate);
  p.denit_sw_threshold = cfg.get("denit_sw_threshold", p.denit_sw_threshold);
  p.n_uptake_coeff = cfg.get("n_uptake_coeff", p.n_uptake_coeff);
  validate(p);
  return p;
}

}  // namespace cropsim::dynamics
