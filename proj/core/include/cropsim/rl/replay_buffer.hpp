#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstddef>

#include "cropsim/environment.hpp"
#include "cropsim/random.hpp"

namespace cropsim::rl {

using Real = float;
using MatrixR = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;

inline constexpr int kActionSize = 2;

struct Transition {
  std::array<Real, kObservationSize> state{};
  std::array<Real, kActionSize> action{};  // normalized to [-1, 1]
  Real reward = 0;
  std::array<Real, kObservationSize> next_state{};
  bool done = false;
};

/// Column-major minibatch; one transition per column.
struct Batch {
  MatrixR states;       // 14 x B
  MatrixR actions;      // 2 x B
  MatrixR rewards;      // 1 x B
  MatrixR next_states;  // 14 x B
  MatrixR not_done;     // 1 x B, 0 for terminal transitions
  std::size_t size() const { return static_cast<std::size_t>(states.cols()); }
};

/// Fixed-capacity ring buffer; the oldest transition is overwritten when full.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity = 100000);

  void add(const Transition& t);
  std::size_t size() const { return size_; }
  std::size_t capacity() const { return capacity_; }
  Transition at(std::size_t i) const;

  /// Uniform sampling with replacement. Throws std::logic_error when size() < batch_size.
  Batch sample(std::size_t batch_size, Rng& rng) const;
  /// Index draws used by sample(); exposed for distribution tests.
  std::size_t sample_index(Rng& rng) const;

 private:
  std::size_t capacity_;
  std::size_t size_ = 0;
  std::size_t cursor_ = 0;
  MatrixR states_, actions_, rewards_, next_states_, not_done_;
};

}  // namespace cropsim::rl
