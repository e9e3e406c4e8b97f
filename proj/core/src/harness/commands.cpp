#include "cropsim/harness/commands.hpp"

#include <chrono>
#include <iomanip>
#include <ostream>

#if defined(__GLIBC__)
#include <malloc.h>
#endif

#include "cropsim/harness/protocol.hpp"
#include "cropsim/harness/serve.hpp"
#include "cropsim/rl/training.hpp"

namespace cropsim::harness {

namespace {

std::uint64_t base_seed(const Settings& s) { return s.env.seed; }

void print_summary(const std::vector<SummaryRow>& rows, std::ostream& out) {
  out << std::left << std::setw(10) << "agent" << std::right << std::setw(16) << "max_avg_return" << std::setw(12)
      << "std" << '\n';
  out << std::fixed << std::setprecision(2);
  for (const auto& r : rows) {
    out << std::left << std::setw(10) << r.agent << std::right << std::setw(16) << r.max_avg_return << std::setw(12)
        << r.std << '\n';
  }
  out.unsetf(std::ios::floatfield);
}

RunProgress progress_printer(std::ostream& out) {
  auto last = std::make_shared<std::chrono::steady_clock::time_point>(std::chrono::steady_clock::now());
  return [&out, last](const std::string& agent, std::uint64_t seed, const rl::CurvePoint& p) {
    const auto now = std::chrono::steady_clock::now();
    if (now - *last < std::chrono::seconds(10)) return;
    *last = now;
    out << "  " << agent << " seed " << seed << " step " << p.step << " eval " << std::fixed
        << std::setprecision(1) << p.mean_return << '\n'
        << std::flush;
    out.unsetf(std::ios::floatfield);
  };
}

}  // namespace

void tune_allocator() {
#if defined(__GLIBC__)
  mallopt(M_MMAP_THRESHOLD, 64 << 20);
  mallopt(M_TRIM_THRESHOLD, 128 << 20);
#endif
}

int cmd_run(const Config& cfg, const RunOptions& opts, std::ostream& out) {
  check_agent_name(opts.agent);
  Settings s = settings_from_config(cfg);
  std::unique_ptr<Policy> policy;
  if (is_rl_agent(opts.agent)) {
    if (opts.weights.empty()) throw ConfigError("agent '" + opts.agent + "' needs --weights <actor file>");
    rl::Net actor = rl::load_mlp<rl::Real>(opts.weights);
    if (actor.input_size() != static_cast<int>(kObservationSize) || actor.output_size() != rl::kActionSize) {
      throw ConfigError("'" + opts.weights.string() + "' is not an actor network");
    }
    policy = std::make_unique<rl::ActorPolicy>(std::move(actor), s.train.obs_scales, s.env.bounds, opts.agent);
  } else {
    policy = make_baseline(opts.agent, s, s.env.seed);
  }
  s.env.log_path = opts.out.empty()
                       ? std::filesystem::path("run_" + opts.agent + "_seed" + std::to_string(s.env.seed) + ".csv")
                       : opts.out;
  if (s.env.log_path.has_parent_path()) std::filesystem::create_directories(s.env.log_path.parent_path());

  Environment env(s.env);
  policy->begin_episode(s.env.seed);
  env.reset();
  double total = 0.0;
  while (!env.done()) total += env.step(policy->act(policy_input(env))).reward;
  out << std::setprecision(17) << "agent " << opts.agent << " seed " << s.env.seed << " mode "
      << to_string(s.env.mode) << '\n'
      << "return " << total << '\n'
      << "yield " << env.crop().yld << '\n'
      << "log " << s.env.log_path.string() << '\n';
  return 0;
}

int cmd_train(const Config& cfg, const std::string& algo, const std::filesystem::path& dir, std::ostream& out) {
  rl::parse_algo(algo);
  const Settings s = settings_from_config(cfg);
  out << "training " << algo << ": " << s.train.seeds << " seeds x " << s.train.episodes << " episodes x "
      << s.env.duration << " days\n"
      << std::flush;
  const AgentResult r = run_agent(algo, s, base_seed(s), s.train.seeds, progress_printer(out));
  save_agent_result(r, dir);
  const std::vector<SummaryRow> rows{{r.agent, r.max_avg_return, r.std}};
  save_summary(rows, dir / (algo + "_summary.csv"));
  for (const auto& run : r.runs) {
    out << "  seed " << run.seed << " max_avg_return " << std::fixed << std::setprecision(2) << run.max_avg_return
        << '\n';
    out.unsetf(std::ios::floatfield);
  }
  print_summary(rows, out);
  return 0;
}

int cmd_bench(const Config& cfg, const std::vector<std::string>& agents, const std::filesystem::path& dir,
              std::ostream& out) {
  const Settings s = settings_from_config(cfg);
  for (const auto& a : agents) check_agent_name(a);
  const BenchmarkResult b = run_bench(agents, s, base_seed(s), s.train.seeds, progress_printer(out));
  for (const auto& a : b.agents) save_agent_result(a, dir);
  const auto rows = summary_rows(b);
  save_summary(rows, dir / "summary.csv");
  print_summary(rows, out);
  return 0;
}

int cmd_serve(const Config& cfg, std::istream& in, std::ostream& out) {
  const Settings s = settings_from_config(cfg);
  return serve_stdio(in, out, to_config(s.env));
}

}  // namespace cropsim::harness
