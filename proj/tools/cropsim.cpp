#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cropsim/harness/commands.hpp"
#include "cropsim/harness/protocol.hpp"

namespace {

struct CommonFlags {
  std::vector<std::string> config_files;
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed;
  std::optional<int> seeds;
  std::optional<int> episodes;
  std::optional<int> days;
  std::optional<std::string> mode;
  std::optional<std::string> weather_file;
};

void add_common(CLI::App* app, CommonFlags& f) {
  app->add_option("--config", f.config_files, "Config file(s) of 'key = value' lines")->check(CLI::ExistingFile);
  app->add_option("--set", f.sets, "Override one config entry, key=value (repeatable)");
  app->add_option("--seed", f.seed, "Episode seed; base seed for multi-seed commands");
  app->add_option("--seeds", f.seeds, "Number of seeds (repetitions)");
  app->add_option("--episodes", f.episodes, "Training episodes per seed");
  app->add_option("--days", f.days, "Season length in days");
  app->add_option("--mode", f.mode, "stochastic or deterministic");
  app->add_option("--weather-file", f.weather_file, "Weather CSV replacing the synthetic climate");
}

cropsim::Config build_config(const CommonFlags& f) {
  cropsim::Config cfg;
  for (const auto& path : f.config_files) cfg.merge(cropsim::Config::load(path));
  if (f.seed) cfg.set("seed", std::to_string(*f.seed));
  if (f.seeds) cfg.set("seeds", std::to_string(*f.seeds));
  if (f.episodes) cfg.set("episodes", std::to_string(*f.episodes));
  if (f.days) cfg.set("duration", std::to_string(*f.days));
  if (f.mode) cfg.set("mode", *f.mode);
  if (f.weather_file) cfg.set("weather_file", *f.weather_file);
  for (const auto& s : f.sets) cfg.set_assignment(s);
  return cfg;
}

std::vector<std::string> split_agents(const std::vector<std::string>& items) {
  std::vector<std::string> out;
  for (const auto& item : items) {
    std::stringstream in(item);
    std::string name;
    while (std::getline(in, name, ',')) {
      if (!name.empty()) out.push_back(name);
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Crop management simulator, baseline agents and actor-critic learners"};
  app.require_subcommand(1);

  CommonFlags run_flags, train_flags, bench_flags, serve_flags;
  cropsim::harness::RunOptions run_opts;
  std::string run_out, run_weights;
  auto* run = app.add_subcommand("run", "Run one episode and write its log");
  add_common(run, run_flags);
  run->add_option("--agent", run_opts.agent, "random | standard | reactive | ddpg | td3");
  run->add_option("--weights", run_weights, "Actor network file for ddpg / td3");
  run->add_option("--out", run_out, "Episode log path");

  std::string algo = "td3";
  std::string train_out = "results";
  auto* train = app.add_subcommand("train", "Train an actor-critic agent over several seeds");
  add_common(train, train_flags);
  train->add_option("--algo", algo, "ddpg | td3");
  train->add_option("--out", train_out, "Output directory");

  std::vector<std::string> bench_agents{"random,standard,reactive"};
  std::string bench_out = "results";
  auto* bench = app.add_subcommand("bench", "Compare agents over the multi-season protocol");
  add_common(bench, bench_flags);
  bench->add_option("--agent,--agents", bench_agents, "Agents to compare (comma separated or repeated)");
  bench->add_option("--out", bench_out, "Output directory");

  auto* serve = app.add_subcommand("serve", "Serve the environment as JSON lines on stdin/stdout");
  add_common(serve, serve_flags);

  CLI11_PARSE(app, argc, argv);

  try {
    cropsim::harness::tune_allocator();
    if (*run) {
      run_opts.out = run_out;
      run_opts.weights = run_weights;
      return cropsim::harness::cmd_run(build_config(run_flags), run_opts, std::cout);
    }
    if (*train) return cropsim::harness::cmd_train(build_config(train_flags), algo, train_out, std::cout);
    if (*bench) {
      return cropsim::harness::cmd_bench(build_config(bench_flags), split_agents(bench_agents), bench_out,
                                         std::cout);
    }
    if (*serve) return cropsim::harness::cmd_serve(build_config(serve_flags), std::cin, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
