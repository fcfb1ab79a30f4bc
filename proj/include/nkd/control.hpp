#pragma once

#include <algorithm>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nkd/errors.hpp"
#include "nkd/landscape.hpp"
#include "nkd/prng.hpp"

namespace nkd {

enum class ControlMode { global, random_d, block, subset, correlated };

inline const char* control_mode_name(ControlMode m) {
  switch (m) {
    case ControlMode::global: return "global";
    case ControlMode::random_d: return "random_d";
    case ControlMode::block: return "block";
    case ControlMode::subset: return "subset";
    case ControlMode::correlated: return "correlated";
  }
  return "?";
}

inline std::optional<ControlMode> parse_control_mode(std::string_view s) {
  for (auto m : {ControlMode::global, ControlMode::random_d, ControlMode::block, ControlMode::subset,
                 ControlMode::correlated}) {
    if (s == control_mode_name(m)) return m;
  }
  return std::nullopt;
}

/// Per-gene decision sets: who gets a say when a gene's mutation is judged.
/// `partners(i)` keeps the order partners were drawn in; `decision_set(i)`
/// is {i} plus partners, ascending.
class ControlStructure {
 public:
  ControlStructure(int n, ControlMode mode, int d, int d_count, std::vector<std::vector<int>> partners)
      : n_(n), mode_(mode), d_(d), d_count_(d_count), partners_(std::move(partners)) {
    require(n_ >= 1, "n must be >= 1");
    require(partners_.size() == static_cast<std::size_t>(n_), "need one partner list per gene");
    sets_.resize(partners_.size());
    for (int i = 0; i < n_; ++i) {
      auto& set = sets_[static_cast<std::size_t>(i)];
      set = partners_[static_cast<std::size_t>(i)];
      for (int j : set) require(j >= 0 && j < n_ && j != i, "control partner out of range or self");
      set.push_back(i);
      std::sort(set.begin(), set.end());
      require(std::adjacent_find(set.begin(), set.end()) == set.end(), "duplicate control partner");
    }
  }

  int n() const noexcept { return n_; }
  ControlMode mode() const noexcept { return mode_; }
  int d() const noexcept { return d_; }
  int d_count() const noexcept { return d_count_; }

  std::span<const int> decision_set(int gene) const noexcept { return sets_[static_cast<std::size_t>(gene)]; }
  std::span<const int> partners(int gene) const noexcept { return partners_[static_cast<std::size_t>(gene)]; }

  friend bool operator==(const ControlStructure&, const ControlStructure&) = default;

 private:
  int n_;
  ControlMode mode_;
  int d_;
  int d_count_;
  std::vector<std::vector<int>> partners_;
  std::vector<std::vector<int>> sets_;
};

/// Random partners for one gene. Each gene draws from its own fork of
/// `stream`, so one gene's set can be rebuilt without building the rest.
inline std::vector<int> random_partners(int n, int d, const RandomStream& stream, int gene) {
  auto s = stream.fork(Purpose::gene, static_cast<std::uint64_t>(gene));
  return s.sample_others(n, gene, d);
}

inline ControlStructure build_global(int n) {
  require(n >= 1, "n must be >= 1");
  std::vector<std::vector<int>> partners(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (j != i) partners[static_cast<std::size_t>(i)].push_back(j);
    }
  }
  return {n, ControlMode::global, n - 1, n, std::move(partners)};
}

inline ControlStructure build_random(int n, int d, const RandomStream& stream) {
  require(n >= 1, "n must be >= 1");
  require(d >= 0 && d <= n - 1, "d must be in [0, n-1]");
  std::vector<std::vector<int>> partners(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) partners[static_cast<std::size_t>(i)] = random_partners(n, d, stream, i);
  return {n, ControlMode::random_d, d, n, std::move(partners)};
}

/// Contiguous blocks of `block_size`; each gene decides with its whole block.
inline ControlStructure build_block(int n, int block_size) {
  require(n >= 1, "n must be >= 1");
  require(block_size >= 1, "block size must be >= 1");
  require(n % block_size == 0, "block size must divide n");
  std::vector<std::vector<int>> partners(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const int first = (i / block_size) * block_size;
    for (int j = first; j < first + block_size; ++j) {
      if (j != i) partners[static_cast<std::size_t>(i)].push_back(j);
    }
  }
  return {n, ControlMode::block, block_size - 1, n, std::move(partners)};
}

/// d_count genes get d random partners; the rest decide on their own
/// contribution only.
inline ControlStructure build_subset(int n, int d, int d_count, const RandomStream& stream) {
  require(n >= 1, "n must be >= 1");
  require(d >= 0 && d <= n - 1, "d must be in [0, n-1]");
  require(d_count >= 0 && d_count <= n, "d_count must be in [0, n]");
  auto chooser = stream.fork(Purpose::choose, 0);
  const auto controlled = chooser.sample_distinct(n, d_count);
  std::vector<std::vector<int>> partners(static_cast<std::size_t>(n));
  for (int g : controlled) partners[static_cast<std::size_t>(g)] = random_partners(n, d, stream, g);
  return {n, ControlMode::subset, d, d_count, std::move(partners)};
}

/// The first min(K, d) partners are the gene's epistatic neighbors in
/// stored order; any further partners are drawn from the remaining genes.
inline ControlStructure build_correlated(const NkLandscape& landscape, int d, const RandomStream& stream) {
  const int n = landscape.n();
  require(d >= 0 && d <= n - 1, "d must be in [0, n-1]");
  std::vector<std::vector<int>> partners(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    auto nbs = landscape.neighbors(i);
    const int shared = std::min<int>(landscape.k(), d);
    auto& p = partners[static_cast<std::size_t>(i)];
    p.assign(nbs.begin(), nbs.begin() + shared);
    if (d > shared) {
      std::vector<int> pool;
      for (int j = 0; j < n; ++j) {
        if (j != i && std::find(nbs.begin(), nbs.end(), j) == nbs.end()) pool.push_back(j);
      }
      auto s = stream.fork(Purpose::gene, static_cast<std::uint64_t>(i));
      for (int idx : s.sample_distinct(static_cast<int>(pool.size()), d - shared)) {
        p.push_back(pool[static_cast<std::size_t>(idx)]);
      }
    }
  }
  return {n, ControlMode::correlated, d, n, std::move(partners)};
}

inline std::span<const int> decision_set(const ControlStructure& control, int gene) {
  require(gene >= 0 && gene < control.n(), "gene out of range");
  return control.decision_set(gene);
}

/// Control topology re-drawn every generation. Only the sets actually asked
/// for are built; each matches what build_random(n, d, stream) would give
/// for the current generation's stream.
class GenerationControl {
 public:
  GenerationControl(int n, int d, RandomStream generation_stream)
      : n_(n), d_(d), stream_(std::move(generation_stream)) {
    require(d >= 0 && d <= n - 1, "d must be in [0, n-1]");
    pool_.resize(static_cast<std::size_t>(n > 0 ? n - 1 : 0));
    mark_.assign(static_cast<std::size_t>(n), 0);
  }

  int n() const noexcept { return n_; }

  void set_generation_stream(RandomStream generation_stream) { stream_ = std::move(generation_stream); }

  /// Ascending; the reference stays valid until the next call.
  const std::vector<int>& decision_set(int gene) const {
    // Same draws as random_partners(): partial Fisher-Yates over the others.
    auto s = stream_.fork(Purpose::gene, static_cast<std::uint64_t>(gene));
    std::iota(pool_.begin(), pool_.end(), 0);
    const int range = n_ - 1;
    for (int i = 0; i < d_; ++i) {
      const auto j = i + static_cast<int>(s.below(static_cast<std::uint64_t>(range - i)));
      std::swap(pool_[static_cast<std::size_t>(i)], pool_[static_cast<std::size_t>(j)]);
    }
    mark_[static_cast<std::size_t>(gene)] = 1;
    for (int i = 0; i < d_; ++i) {
      const int p = pool_[static_cast<std::size_t>(i)];
      mark_[static_cast<std::size_t>(p >= gene ? p + 1 : p)] = 1;
    }
    set_.clear();
    for (int j = 0; j < n_; ++j) {
      if (mark_[static_cast<std::size_t>(j)]) {
        set_.push_back(j);
        mark_[static_cast<std::size_t>(j)] = 0;
      }
    }
    return set_;
  }

 private:
  int n_;
  int d_;
  RandomStream stream_;
  mutable std::vector<int> pool_;
  mutable std::vector<std::uint8_t> mark_;
  mutable std::vector<int> set_;
};

}  // namespace nkd
