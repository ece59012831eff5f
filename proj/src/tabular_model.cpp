#include "uavnet/tabular_model.hpp"

#include <algorithm>

#include "uavnet/action_codec.hpp"

namespace uavnet {

namespace {

void enumerate_power(const std::vector<double>& levels, double budget, int blocks, std::vector<double>& cur,
                     std::vector<std::vector<double>>& out) {
  if (static_cast<int>(cur.size()) == blocks) {
    out.push_back(cur);
    return;
  }
  double used = 0.0;
  for (double p : cur) used += p;
  for (double l : levels) {
    if (used + l > budget + 1e-9) continue;
    cur.push_back(l);
    enumerate_power(levels, budget, blocks, cur, out);
    cur.pop_back();
  }
}

}  // namespace

TabularModel::TabularModel(Environment env, TabularModelOptions opt)
    : env_(std::make_unique<Environment>(std::move(env))), opt_(std::move(opt)) {
  space_ = std::make_unique<SimplifiedStateSpace>(*env_, opt_.positions);
  const auto& limits = env_->limits();
  for (double l : opt_.power_levels)
    if (l < 0.0 || l > limits.max_power_w + 1e-9) throw ConfigError("power level outside [0, rho_max]");
  std::vector<double> levels = opt_.power_levels;
  std::sort(levels.begin(), levels.end());
  std::vector<double> cur;
  enumerate_power(levels, limits.total_power_w, SimplifiedStateSpace::kBlocks, cur, power_);

  moves_ = opt_.horizontal_moves;
  if (moves_.empty())
    for (int m = 0; m < env_->moves().count(); ++m) moves_.push_back(m);

  const int ns = space_->size();
  const int nm = static_cast<int>(moves_.size());
  const int np = static_cast<int>(power_.size());
  mdp_.states = ns;
  mdp_.actions = nm * np;
  mdp_.row_of.resize(static_cast<std::size_t>(ns) * mdp_.actions);
  mdp_.reward.resize(mdp_.row_of.size());
  mdp_.rows.reserve(static_cast<std::size_t>(ns) * nm);
  for (int s = 0; s < ns; ++s) {
    const SystemState st = space_->state(s);
    const auto gains = env_->gains(st);
    for (int mi = 0; mi < nm; ++mi) {
      const int row = static_cast<int>(mdp_.rows.size());
      mdp_.rows.push_back(space_->transition_kernel(s, {moves_[mi], 0}));
      for (int pi = 0; pi < np; ++pi) {
        const std::size_t k = mdp_.at(s, mi * np + pi);
        mdp_.row_of[k] = row;
        UavAction a;
        a.flight = {moves_[mi], 0};
        a.power_w = power_[pi];
        a.channels = allocate_channels(a.power_w, st.occupancy, limits.max_channels, limits.total_channels);
        mdp_.reward[k] = opt_.reward_scale * reward(st, a, gains, limits, env_->channel());
      }
    }
  }
  mdp_.validate();
}

UavAction TabularModel::action(int state, int a) const {
  const int np = static_cast<int>(power_.size());
  if (a < 0 || a >= mdp_.actions) throw InvalidAction("tabular action out of range");
  const SystemState st = space_->state(state);
  UavAction out;
  out.flight = {moves_[a / np], 0};
  out.power_w = power_[a % np];
  const auto& limits = env_->limits();
  out.channels = allocate_channels(out.power_w, st.occupancy, limits.max_channels, limits.total_channels);
  return out;
}

UavAction TablePolicy::act(const SystemState& s) { return model_.action(model_.space().index(s), policy_[model_.space().index(s)]); }

}  // namespace uavnet
