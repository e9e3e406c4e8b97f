#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "cropsim/config.hpp"

namespace cropsim::harness {

struct RunOptions {
  std::string agent = "standard";
  std::filesystem::path weights;  // actor file for ddpg / td3
  std::filesystem::path out;      // episode log; derived from agent and seed when empty
};

/// One episode; writes the log and prints the return.
int cmd_run(const Config& cfg, const RunOptions& opts, std::ostream& out);

/// Trains `algo` for every seed; writes per-seed curves, actors, the aggregate curve and a summary.
int cmd_train(const Config& cfg, const std::string& algo, const std::filesystem::path& dir, std::ostream& out);

/// Evaluates each agent over the multi-season protocol and writes summary.csv, best first.
int cmd_bench(const Config& cfg, const std::vector<std::string>& agents, const std::filesystem::path& dir,
              std::ostream& out);

int cmd_serve(const Config& cfg, std::istream& in, std::ostream& out);

/// Raises glibc's mmap threshold so large matrix temporaries are recycled instead of
/// being mapped and unmapped on every training update. No-op elsewhere.
void tune_allocator();

}  // namespace cropsim::harness
