#include "cropsim/rl/replay_buffer.hpp"

#include <stdexcept>
#include <string>

namespace cropsim::rl {

ReplayBuffer::ReplayBuffer(std::size_t capacity)
    : capacity_(capacity),
      states_(kObservationSize, static_cast<Eigen::Index>(capacity)),
      actions_(kActionSize, static_cast<Eigen::Index>(capacity)),
      rewards_(1, static_cast<Eigen::Index>(capacity)),
      next_states_(kObservationSize, static_cast<Eigen::Index>(capacity)),
      not_done_(1, static_cast<Eigen::Index>(capacity)) {
  if (capacity == 0) throw std::invalid_argument("replay buffer capacity must be >= 1");
}

void ReplayBuffer::add(const Transition& t) {
  const auto c = static_cast<Eigen::Index>(cursor_);
  for (std::size_t i = 0; i < kObservationSize; ++i) {
    states_(static_cast<Eigen::Index>(i), c) = t.state[i];
    next_states_(static_cast<Eigen::Index>(i), c) = t.next_state[i];
  }
  for (int i = 0; i < kActionSize; ++i) actions_(i, c) = t.action[static_cast<std::size_t>(i)];
  rewards_(0, c) = t.reward;
  not_done_(0, c) = t.done ? Real(0) : Real(1);
  cursor_ = (cursor_ + 1) % capacity_;
  if (size_ < capacity_) ++size_;
}

Transition ReplayBuffer::at(std::size_t i) const {
  if (i >= size_) throw std::out_of_range("replay index " + std::to_string(i) + " >= size " + std::to_string(size_));
  const auto c = static_cast<Eigen::Index>(i);
  Transition t;
  for (std::size_t k = 0; k < kObservationSize; ++k) {
    t.state[k] = states_(static_cast<Eigen::Index>(k), c);
    t.next_state[k] = next_states_(static_cast<Eigen::Index>(k), c);
  }
  for (int k = 0; k < kActionSize; ++k) t.action[static_cast<std::size_t>(k)] = actions_(k, c);
  t.reward = rewards_(0, c);
  t.done = not_done_(0, c) == Real(0);
  return t;
}

std::size_t ReplayBuffer::sample_index(Rng& rng) const {
  return std::uniform_int_distribution<std::size_t>(0, size_ - 1)(rng);
}

Batch ReplayBuffer::sample(std::size_t batch_size, Rng& rng) const {
  if (batch_size == 0 || size_ < batch_size) {
    throw std::logic_error("cannot sample " + std::to_string(batch_size) + " transitions from a buffer of " +
                           std::to_string(size_));
  }
  const auto b = static_cast<Eigen::Index>(batch_size);
  Batch out{MatrixR(kObservationSize, b), MatrixR(kActionSize, b), MatrixR(1, b), MatrixR(kObservationSize, b),
            MatrixR(1, b)};
  for (Eigen::Index j = 0; j < b; ++j) {
    const auto i = static_cast<Eigen::Index>(sample_index(rng));
    out.states.col(j) = states_.col(i);
    out.actions.col(j) = actions_.col(i);
    out.rewards(0, j) = rewards_(0, i);
    out.next_states.col(j) = next_states_.col(i);
    out.not_done(0, j) = not_done_(0, i);
  }
  return out;
}

}  // namespace cropsim::rl
