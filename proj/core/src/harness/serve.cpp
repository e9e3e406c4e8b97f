#include "cropsim/harness/serve.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>

#include "json.hpp"

namespace cropsim::harness {

using nlohmann::json;

namespace {

json error(const std::string& what) { return json{{"error", what}}; }

json obs_json(const Observation& obs) {
  json a = json::array();
  for (double x : obs) a.push_back(x);
  return a;
}

std::string config_value(const std::string& key, const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
  if (v.is_number_unsigned()) return std::to_string(v.get<std::uint64_t>());
  if (v.is_number_float()) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v.get<double>());
    return buf;
  }
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  throw ConfigError("config value for '" + key + "' must be a string, number or boolean");
}

json info_json(const StepInfo& i) {
  return json{{"day", i.day},
              {"yld", i.yld},
              {"yld_delta", i.yld_delta},
              {"biomass", i.biomass},
              {"fr_phu", i.fr_phu},
              {"n_pool", i.n_pool},
              {"sw", i.sw},
              {"sw_capacity", i.sw_capacity},
              {"runoff", i.runoff},
              {"overflow", i.overflow},
              {"n_strs", i.n_strs},
              {"w_strs", i.w_strs},
              {"t_strs", i.t_strs},
              {"fert_applied", i.applied.fert},
              {"irrig_applied", i.applied.irrig},
              {"fert_clamped", i.fert_clamped},
              {"irrig_clamped", i.irrig_clamped}};
}

double action_component(const json& v) {
  if (v.is_number()) return v.get<double>();
  if (v.is_null()) return std::nan("");
  throw EpisodeError("action components must be numbers");
}

}  // namespace

StdioSession::StdioSession(Config base) : base_(std::move(base)) {}
StdioSession::~StdioSession() = default;

std::string StdioSession::handle(const std::string& line) {
  json response;
  try {
    const json req = json::parse(line);
    if (!req.is_object()) throw json::type_error::create(302, "request must be a JSON object", nullptr);
    const auto cmd_it = req.find("cmd");
    if (cmd_it == req.end() || !cmd_it->is_string()) {
      response = error("request needs a string field 'cmd'");
    } else if (*cmd_it == "reset") {
      Config cfg = base_;
      if (const auto c = req.find("config"); c != req.end()) {
        if (!c->is_object()) throw ConfigError("'config' must be an object");
        for (const auto& [key, value] : c->items()) cfg.set(key, config_value(key, value));
      }
      EpisodeConfig e = episode_config_from_config(cfg);
      cfg.require_all_used();
      auto env = std::make_unique<Environment>(std::move(e));
      const Observation obs = env->reset();
      env_ = std::move(env);
      response = json{{"obs", obs_json(obs)}};
    } else if (*cmd_it == "step") {
      if (!env_) throw EpisodeError("step before reset");
      const auto a = req.find("action");
      if (a == req.end() || !a->is_array() || a->size() != 2) {
        throw EpisodeError("'action' must be an array [fert, irrig]");
      }
      const StepOutcome out = env_->step({action_component((*a)[0]), action_component((*a)[1])});
      response = json{{"obs", obs_json(out.obs)}, {"reward", out.reward}, {"done", out.done},
                      {"info", info_json(out.info)}};
    } else if (*cmd_it == "close") {
      env_.reset();
      closed_ = true;
      response = json{{"ok", true}};
    } else {
      response = error("unknown command '" + cmd_it->get<std::string>() + "'");
    }
  } catch (const json::exception& e) {
    response = error(std::string("malformed request: ") + e.what());
  } catch (const std::exception& e) {
    response = error(e.what());
  }
  return response.dump();
}

int serve_stdio(std::istream& in, std::ostream& out, const Config& base) {
  StdioSession session(base);
  std::string line;
  while (!session.closed() && std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out << session.handle(line) << '\n' << std::flush;
  }
  return 0;
}

}  // namespace cropsim::harness
