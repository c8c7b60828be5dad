#include "core/replay.hpp"

#include <cmath>
#include <string>

#include "core/error.hpp"

namespace tddr {

ReplayBuffer::ReplayBuffer(std::size_t capacity, std::size_t state_dim, std::size_t action_dim)
    : storage_(capacity), state_dim_(state_dim), action_dim_(action_dim) {
  if (capacity == 0) throw ConfigError("replay buffer capacity must be positive");
}

void ReplayBuffer::push(Transition t) {
  if (t.state.size() != state_dim_ || t.next_state.size() != state_dim_ || t.action.size() != action_dim_) {
    throw UsageError("replay push: transition dims (" + std::to_string(t.state.size()) + ", " +
                     std::to_string(t.action.size()) + ", " + std::to_string(t.next_state.size()) +
                     ") do not match buffer (" + std::to_string(state_dim_) + ", " + std::to_string(action_dim_) +
                     ")");
  }
  if (!std::isfinite(t.reward)) throw UsageError("replay push: non-finite reward");
  storage_[cursor_] = std::move(t);
  cursor_ = (cursor_ + 1) % storage_.size();
  if (size_ < storage_.size()) ++size_;
}

const Transition& ReplayBuffer::at(std::size_t i) const {
  if (i >= size_) throw UsageError("replay at: index out of range");
  const std::size_t oldest = (size_ < storage_.size()) ? 0 : cursor_;
  return storage_[(oldest + i) % storage_.size()];
}

std::vector<std::size_t> ReplayBuffer::sample_indices(std::size_t n, Rng& rng) const {
  if (size_ == 0) throw PreconditionError("replay sample: buffer is empty");
  std::vector<std::size_t> idx(n);
  for (auto& i : idx) i = rng.index(size_);
  return idx;
}

std::vector<Transition> ReplayBuffer::sample(std::size_t n, Rng& rng) const {
  std::vector<Transition> out;
  out.reserve(n);
  for (std::size_t i : sample_indices(n, rng)) out.push_back(storage_[i]);
  return out;
}

Batch ReplayBuffer::sample_batch(std::size_t n, Rng& rng) const {
  const auto idx = sample_indices(n, rng);
  const auto rows = static_cast<Eigen::Index>(n);
  Batch b;
  b.states.resize(rows, static_cast<Eigen::Index>(state_dim_));
  b.actions.resize(rows, static_cast<Eigen::Index>(action_dim_));
  b.next_states.resize(rows, static_cast<Eigen::Index>(state_dim_));
  b.rewards.resize(n);
  b.dones.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const Transition& t = storage_[idx[k]];
    const auto r = static_cast<Eigen::Index>(k);
    for (std::size_t c = 0; c < state_dim_; ++c) {
      b.states(r, static_cast<Eigen::Index>(c)) = t.state[c];
      b.next_states(r, static_cast<Eigen::Index>(c)) = t.next_state[c];
    }
    for (std::size_t c = 0; c < action_dim_; ++c) b.actions(r, static_cast<Eigen::Index>(c)) = t.action[c];
    b.rewards[k] = t.reward;
    b.dones[k] = t.done ? 1.0 : 0.0;
  }
  return b;
}

}  // namespace tddr
