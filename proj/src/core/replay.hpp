#pragma once

#include <cstddef>
#include <vector>

#include "core/rng.hpp"
#include "core/tensor.hpp"

namespace tddr {

struct Transition {
  std::vector<double> state;
  std::vector<double> action;
  double reward = 0.0;
  std::vector<double> next_state;
  bool done = false;
};

// Column-stacked minibatch, one row per sampled transition.
struct Batch {
  nn::Matrix states;
  nn::Matrix actions;
  nn::Matrix next_states;
  std::vector<double> rewards;
  std::vector<double> dones;  // 1.0 where bootstrapping is cut

  std::size_t size() const { return rewards.size(); }
};

// Fixed-capacity FIFO ring with uniform sampling with replacement.
class ReplayBuffer {
 public:
  ReplayBuffer(std::size_t capacity, std::size_t state_dim, std::size_t action_dim);

  void push(Transition t);
  std::size_t size() const { return size_; }
  std::size_t capacity() const { return storage_.size(); }
  bool empty() const { return size_ == 0; }
  // i-th oldest stored transition.
  const Transition& at(std::size_t i) const;

  // Ring slots drawn for a batch of n; exposed for frequency tests.
  std::vector<std::size_t> sample_indices(std::size_t n, Rng& rng) const;
  std::vector<Transition> sample(std::size_t n, Rng& rng) const;
  Batch sample_batch(std::size_t n, Rng& rng) const;

 private:
  std::vector<Transition> storage_;
  std::size_t state_dim_;
  std::size_t action_dim_;
  std::size_t cursor_ = 0;
  std::size_t size_ = 0;
};

}  // namespace tddr
