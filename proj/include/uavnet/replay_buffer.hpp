#pragma once

#include <random>
#include <string>
#include <vector>

#include "uavnet/mdp.hpp"

namespace uavnet {

/// Fixed-capacity FIFO of transitions.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity = 10000);

  std::size_t capacity() const { return capacity_; }
  std::size_t size() const { return data_.size(); }
  bool full() const { return data_.size() == capacity_; }

  /// Overwrites the oldest record once full.
  void store(Transition t);
  /// Oldest-first view position i.
  const Transition& at(std::size_t i) const;
  /// Uniform sample with replacement.
  std::vector<const Transition*> sample(std::size_t count, std::mt19937_64& rng) const;

  /// JSON lines, oldest record first.
  void save(const std::string& path) const;
  static ReplayBuffer load(const std::string& path, std::size_t capacity);

 private:
  std::size_t capacity_;
  std::size_t cursor_ = 0;  // next slot to overwrite once full
  std::vector<Transition> data_;
};

}  // namespace uavnet
