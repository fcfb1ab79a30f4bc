#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "nkd/control.hpp"
#include "nkd/errors.hpp"
#include "nkd/landscape.hpp"
#include "nkd/prng.hpp"

namespace nkd {

/// How several simultaneous flips are judged. Only the union rule exists:
/// one accept/reject over the union of the flipped genes' decision sets.
enum class MultiMutationPolicy { union_of_sets };

inline constexpr std::string_view policy_name(MultiMutationPolicy) { return "union"; }

struct WalkConfig {
  int generations = 5000;
  int mutations_per_generation = 1;
  bool dynamic_control = false;
  int dynamic_d = 0;
  bool record_trajectory = false;
  int trajectory_interval = 50;
  MultiMutationPolicy policy = MultiMutationPolicy::union_of_sets;
};

struct WalkResult {
  double final_fitness = 0.0;
  long accepted_count = 0;
  std::vector<std::pair<int, double>> trajectory;
  Genome final_genome;
};

/// Streams one walk draws from. Each has its own path so that, e.g., a tie
/// coin never shifts the proposal sequence.
struct WalkStreams {
  RandomStream init;
  RandomStream proposal;
  RandomStream tie;
  RandomStream control;
  std::optional<GenerationControl> dynamic;  // reused across generations

  explicit WalkStreams(const SeedPath& run)
      : init(run.child(Purpose::init, 0)),
        proposal(run.child(Purpose::proposal, 0)),
        tie(run.child(Purpose::tie, 0)),
        control(run.child(Purpose::control, 0)) {}

  /// Stream handed to build_random for generation `g` under dynamic control.
  RandomStream generation(int g) const { return control.fork(Purpose::generation, static_cast<std::uint64_t>(g)); }
};

/// Population-of-one walk state with cached per-gene contributions.
class WalkState {
 public:
  WalkState(const NkLandscape& landscape, Genome genome) : genome_(std::move(genome)) {
    require(genome_.size() == landscape.n(), "genome length must equal n");
    const auto n = static_cast<std::size_t>(landscape.n());
    cache_.resize(n);
    for (int i = 0; i < landscape.n(); ++i) cache_[static_cast<std::size_t>(i)] = landscape.contribution(genome_, i);
    trial_ = cache_;
    trial_genome_ = genome_;
    mark_.assign(n, 0);
    refresh_fitness();
  }

  const Genome& genome() const noexcept { return genome_; }
  int generation() const noexcept { return generation_; }
  double fitness() const noexcept { return fitness_; }
  std::span<const double> contributions() const noexcept { return cache_; }
  int n() const noexcept { return genome_.size(); }

 private:
  template <typename Control>
  friend bool evaluate(WalkState&, std::span<const int>, const NkLandscape&, const Control&, RandomStream&);
  friend void commit(WalkState&, std::span<const int>, const NkLandscape&);
  friend void revert(WalkState&, std::span<const int>, const NkLandscape&);
  friend void advance_generation(WalkState&) noexcept;

  void refresh_fitness() {
    double sum = 0.0;
    for (double c : cache_) sum += c;
    fitness_ = sum / static_cast<double>(cache_.size());
  }

  Genome genome_;
  int generation_ = 0;
  double fitness_ = 0.0;
  std::vector<double> cache_;
  // Scratch kept equal to genome_/cache_ between steps.
  std::vector<double> trial_;
  Genome trial_genome_;
  std::vector<std::uint8_t> mark_;
  std::vector<int> scratch_set_;
};

inline std::vector<int> propose(const WalkState& state, const WalkConfig& config, RandomStream& stream) {
  const int n = state.n();
  require(config.mutations_per_generation >= 1 && config.mutations_per_generation <= n,
          "mutations_per_generation must be in [1, n]");
  if (config.mutations_per_generation == 1) return {static_cast<int>(stream.below(static_cast<std::uint64_t>(n)))};
  return stream.sample_distinct(n, config.mutations_per_generation);
}

namespace detail {

inline std::span<const int> span_of(std::span<const int> s) { return s; }
inline std::span<const int> span_of(const std::vector<int>& s) { return s; }

}  // namespace detail

/// Loads the mutant into the state's scratch buffers and judges it: accept
/// iff the decision-set sum rises, coin flip on an exact tie. Scratch stays
/// in the mutant state until commit() or revert().
template <typename Control>
bool evaluate(WalkState& state, std::span<const int> mutation, const NkLandscape& landscape, const Control& control,
              RandomStream& tie_stream) {
  require(!mutation.empty(), "mutation must be nonempty");
  for (int g : mutation) state.trial_genome_.flip(g);
  for (int g : mutation) {
    for (int j : landscape.flip_delta_set(g)) {
      state.trial_[static_cast<std::size_t>(j)] = landscape.contribution(state.trial_genome_, j);
    }
  }

  auto sums_over = [&](std::span<const int> genes) {
    double current = 0.0;
    double mutant = 0.0;
    for (int j : genes) {
      current += state.cache_[static_cast<std::size_t>(j)];
      mutant += state.trial_[static_cast<std::size_t>(j)];
    }
    return std::pair{current, mutant};
  };

  std::pair<double, double> sums;
  if (mutation.size() == 1) {
    const auto& set = control.decision_set(mutation[0]);
    sums = sums_over(detail::span_of(set));
  } else {
    auto& joint = state.scratch_set_;
    joint.clear();
    for (int g : mutation) {
      const auto& set = control.decision_set(g);
      for (int j : detail::span_of(set)) {
        if (!state.mark_[static_cast<std::size_t>(j)]) {
          state.mark_[static_cast<std::size_t>(j)] = 1;
          joint.push_back(j);
        }
      }
    }
    for (int j : joint) state.mark_[static_cast<std::size_t>(j)] = 0;
    std::sort(joint.begin(), joint.end());
    sums = sums_over(joint);
  }

  if (sums.second > sums.first) return true;
  if (sums.second < sums.first) return false;
  return tie_stream.coin();
}

inline void commit(WalkState& state, std::span<const int> mutation, const NkLandscape& landscape) {
  for (int g : mutation) {
    state.genome_.flip(g);
    for (int j : landscape.flip_delta_set(g)) {
      state.cache_[static_cast<std::size_t>(j)] = state.trial_[static_cast<std::size_t>(j)];
    }
  }
  state.refresh_fitness();
}

inline void revert(WalkState& state, std::span<const int> mutation, const NkLandscape& landscape) {
  for (int g : mutation) {
    state.trial_genome_.flip(g);
    for (int j : landscape.flip_delta_set(g)) {
      state.trial_[static_cast<std::size_t>(j)] = state.cache_[static_cast<std::size_t>(j)];
    }
  }
}

inline void advance_generation(WalkState& state) noexcept { ++state.generation_; }

/// Judge a mutation without changing the state (the tie coin, if needed,
/// is still drawn from `tie_stream`).
template <typename Control>
bool decide(WalkState& state, std::span<const int> mutation, const NkLandscape& landscape, const Control& control,
            RandomStream& tie_stream) {
  const bool accept = evaluate(state, mutation, landscape, control, tie_stream);
  revert(state, mutation, landscape);
  return accept;
}

/// One generation. Returns whether the proposal was accepted.
/// Under dynamic control the topology for this generation is drawn first
/// and `control` is not consulted.
inline bool step(WalkState& state, const NkLandscape& landscape, const ControlStructure& control,
                 const WalkConfig& config, WalkStreams& streams) {
  require(state.generation() < config.generations, "walk already finished");
  bool accept = false;
  if (config.dynamic_control) {
    if (!streams.dynamic) streams.dynamic.emplace(landscape.n(), config.dynamic_d, streams.generation(0));
    auto& current = *streams.dynamic;
    current.set_generation_stream(streams.generation(state.generation()));
    const auto mutation = propose(state, config, streams.proposal);
    accept = evaluate(state, mutation, landscape, current, streams.tie);
    accept ? commit(state, mutation, landscape) : revert(state, mutation, landscape);
  } else {
    const auto mutation = propose(state, config, streams.proposal);
    accept = evaluate(state, mutation, landscape, control, streams.tie);
    accept ? commit(state, mutation, landscape) : revert(state, mutation, landscape);
  }
  advance_generation(state);
  return accept;
}

inline void validate_walk(const NkLandscape& landscape, const ControlStructure& control, const WalkConfig& config) {
  require(config.generations >= 0, "generations must be >= 0");
  require(config.mutations_per_generation >= 1 && config.mutations_per_generation <= landscape.n(),
          "mutations_per_generation must be in [1, n]");
  require(config.trajectory_interval >= 1, "trajectory interval must be >= 1");
  if (config.dynamic_control) {
    require(config.dynamic_d >= 0 && config.dynamic_d <= landscape.n() - 1, "d must be in [0, n-1]");
  } else {
    require(control.n() == landscape.n(), "control structure size must equal n");
  }
}

/// Random start, then `generations` steps. `control` is ignored when
/// config.dynamic_control is set.
inline WalkResult run_walk(const NkLandscape& landscape, const ControlStructure& control, const WalkConfig& config,
                           const SeedPath& run_path) {
  validate_walk(landscape, control, config);
  WalkStreams streams(run_path);
  WalkState state(landscape, Genome::random(landscape.n(), streams.init));
  WalkResult result;
  if (config.record_trajectory) result.trajectory.emplace_back(0, state.fitness());
  while (state.generation() < config.generations) {
    if (step(state, landscape, control, config, streams)) ++result.accepted_count;
    if (config.record_trajectory &&
        (state.generation() % config.trajectory_interval == 0 || state.generation() == config.generations)) {
      result.trajectory.emplace_back(state.generation(), state.fitness());
    }
  }
  result.final_fitness = state.fitness();
  result.final_genome = state.genome();
  return result;
}

}  // namespace nkd
