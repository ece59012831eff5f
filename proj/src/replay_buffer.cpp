#include "uavnet/replay_buffer.hpp"

#include <fstream>
#include <stdexcept>

namespace uavnet {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ == 0) throw std::invalid_argument("replay buffer capacity must be positive");
  data_.reserve(capacity_);
}

void ReplayBuffer::store(Transition t) {
  if (data_.size() < capacity_) {
    data_.push_back(std::move(t));
    return;
  }
  data_[cursor_] = std::move(t);
  cursor_ = (cursor_ + 1) % capacity_;
}

const Transition& ReplayBuffer::at(std::size_t i) const {
  if (i >= data_.size()) throw std::out_of_range("replay index out of range");
  return data_[(cursor_ + i) % data_.size()];
}

std::vector<const Transition*> ReplayBuffer::sample(std::size_t count, std::mt19937_64& rng) const {
  if (data_.empty()) throw std::logic_error("sampling from an empty replay buffer");
  std::uniform_int_distribution<std::size_t> pick(0, data_.size() - 1);
  std::vector<const Transition*> out(count);
  for (auto& p : out) p = &data_[pick(rng)];
  return out;
}

void ReplayBuffer::save(const std::string& path) const {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  for (std::size_t i = 0; i < size(); ++i) f << to_json(at(i)).dump() << '\n';
}

ReplayBuffer ReplayBuffer::load(const std::string& path, std::size_t capacity) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read " + path);
  ReplayBuffer b(capacity);
  std::string line;
  while (std::getline(f, line))
    if (!line.empty()) b.store(transition_from_json(nlohmann::json::parse(line)));
  return b;
}

}  // namespace uavnet
