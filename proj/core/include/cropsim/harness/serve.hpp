#pragma once

#include <iosfwd>
#include <memory>
#include <string>

#include "cropsim/config.hpp"
#include "cropsim/environment.hpp"

namespace cropsim::harness {

/// One JSON object per line in, one per line out.
///
///     {"cmd":"reset","config":{...}}  -> {"obs":[...]}
///     {"cmd":"step","action":[f,i]}   -> {"obs":[...],"reward":r,"done":b,"info":{...}}
///     {"cmd":"close"}                 -> {"ok":true}
///
/// Failures produce {"error":"..."} and leave the session usable. Reset config values
/// are merged over the base config; numbers are written so that they parse back exactly.
class StdioSession {
 public:
  explicit StdioSession(Config base = {});
  ~StdioSession();

  std::string handle(const std::string& line);
  bool closed() const { return closed_; }

 private:
  Config base_;
  std::unique_ptr<Environment> env_;
  bool closed_ = false;
};

/// Serves until close or end of input. Returns 0.
int serve_stdio(std::istream& in, std::ostream& out, const Config& base = {});

}  // namespace cropsim::harness
