#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nkd/errors.hpp"
#include "nkd/prng.hpp"

namespace nkd {

/// Binary configuration of the system, one allele per gene.
class Genome {
 public:
  Genome() = default;
  explicit Genome(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
    for (auto& b : bits_) b = b ? 1 : 0;
  }
  static Genome zeros(int n) { return Genome(std::vector<std::uint8_t>(static_cast<std::size_t>(n), 0)); }

  static Genome random(int n, RandomStream& stream) {
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(n));
    for (auto& b : bits) b = stream.coin() ? 1 : 0;
    return Genome(std::move(bits));
  }

  int size() const noexcept { return static_cast<int>(bits_.size()); }
  int operator[](int i) const noexcept { return bits_[static_cast<std::size_t>(i)]; }
  void flip(int i) noexcept { bits_[static_cast<std::size_t>(i)] ^= 1; }
  void set(int i, int allele) noexcept { bits_[static_cast<std::size_t>(i)] = allele ? 1 : 0; }
  std::span<const std::uint8_t> bits() const noexcept { return bits_; }

  std::string to_string() const {
    std::string s;
    s.reserve(bits_.size());
    for (auto b : bits_) s += b ? '1' : '0';
    return s;
  }

  friend bool operator==(const Genome&, const Genome&) = default;

 private:
  std::vector<std::uint8_t> bits_;
};

/// NK landscape: for each gene, K epistatic neighbors and a table of
/// 2^(K+1) uniform [0,1) contributions. Table index packs the gene's own
/// allele as the most significant bit followed by the neighbor alleles in
/// stored order. Immutable once built.
class NkLandscape {
 public:
  static void validate(int n, int k) {
    require(n >= 1, "n must be >= 1");
    require(k >= 0, "k must be >= 0");
    require(k < n, "k must be < n");
    if (k + 1 > kMaxTableBits) throw TableSizeExceeded("k + 1 must be <= 26");
  }

  /// Neighbors sampled without replacement from the other n-1 genes; table
  /// values drawn gene by gene after that gene's neighbor list.
  static NkLandscape generate(int n, int k, RandomStream& stream, SeedPath provenance = SeedPath{}) {
    validate(n, k);
    const std::size_t table = std::size_t{1} << (k + 1);
    std::vector<int> neighbors;
    std::vector<double> values;
    neighbors.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(k));
    values.reserve(static_cast<std::size_t>(n) * table);
    for (int i = 0; i < n; ++i) {
      auto picks = stream.sample_others(n, i, k);
      neighbors.insert(neighbors.end(), picks.begin(), picks.end());
      for (std::size_t v = 0; v < table; ++v) values.push_back(stream.uniform());
    }
    NkLandscape out(n, k, std::move(neighbors), std::move(values));
    out.provenance_ = std::move(provenance);
    return out;
  }

  /// Build from explicit tables (hand-built instances, loaded dumps).
  static NkLandscape from_tables(int n, int k, std::vector<int> neighbors, std::vector<double> values,
                                 SeedPath provenance = SeedPath{}) {
    validate(n, k);
    const std::size_t table = std::size_t{1} << (k + 1);
    require(neighbors.size() == static_cast<std::size_t>(n) * static_cast<std::size_t>(k),
            "neighbor list size must be n*k");
    require(values.size() == static_cast<std::size_t>(n) * table, "value list size must be n*2^(k+1)");
    for (int i = 0; i < n; ++i) {
      std::vector<int> row(neighbors.begin() + i * k, neighbors.begin() + (i + 1) * k);
      for (int j : row) require(j >= 0 && j < n && j != i, "neighbor out of range or self");
      std::sort(row.begin(), row.end());
      require(std::adjacent_find(row.begin(), row.end()) == row.end(), "duplicate neighbor");
    }
    for (double v : values) require(v >= 0.0 && v < 1.0, "table value outside [0,1)");
    NkLandscape out(n, k, std::move(neighbors), std::move(values));
    out.provenance_ = std::move(provenance);
    return out;
  }

  int n() const noexcept { return n_; }
  int k() const noexcept { return k_; }
  std::size_t table_size() const noexcept { return std::size_t{1} << (k_ + 1); }
  const SeedPath& provenance() const noexcept { return provenance_; }

  std::span<const int> neighbors(int gene) const noexcept {
    return {neighbors_.data() + static_cast<std::size_t>(gene) * static_cast<std::size_t>(k_),
            static_cast<std::size_t>(k_)};
  }
  std::span<const double> values(int gene) const noexcept {
    return {values_.data() + static_cast<std::size_t>(gene) * table_size(), table_size()};
  }

  std::size_t table_index(const Genome& genome, int gene) const noexcept {
    std::size_t index = static_cast<std::size_t>(genome[gene]);
    for (int j : neighbors(gene)) index = (index << 1) | static_cast<std::size_t>(genome[j]);
    return index;
  }

  double contribution(const Genome& genome, int gene) const noexcept {
    return values_[static_cast<std::size_t>(gene) * table_size() + table_index(genome, gene)];
  }

  /// Sum over `genes` in the order given.
  double partial_fitness(const Genome& genome, std::span<const int> genes) const {
    require(!genes.empty(), "partial_fitness: gene set must be nonempty");
    double sum = 0.0;
    for (int g : genes) sum += contribution(genome, g);
    return sum;
  }

  double total_fitness(const Genome& genome) const {
    require(genome.size() == n_, "genome length must equal n");
    double sum = 0.0;
    for (int i = 0; i < n_; ++i) sum += contribution(genome, i);
    return sum / n_;
  }

  /// Genes whose contribution can change when `gene` flips, ascending.
  std::span<const int> flip_delta_set(int gene) const noexcept { return dependents_[static_cast<std::size_t>(gene)]; }

 private:
  NkLandscape(int n, int k, std::vector<int> neighbors, std::vector<double> values)
      : n_(n), k_(k), neighbors_(std::move(neighbors)), values_(std::move(values)),
        dependents_(static_cast<std::size_t>(n)) {
    for (int i = 0; i < n_; ++i) {
      dependents_[static_cast<std::size_t>(i)].push_back(i);
      for (int j : this->neighbors(i)) dependents_[static_cast<std::size_t>(j)].push_back(i);
    }
    for (auto& d : dependents_) std::sort(d.begin(), d.end());
  }

  int n_ = 0;
  int k_ = 0;
  std::vector<int> neighbors_;
  std::vector<double> values_;
  std::vector<std::vector<int>> dependents_;
  SeedPath provenance_;
};

inline NkLandscape generate_nk(int n, int k, RandomStream& stream) { return NkLandscape::generate(n, k, stream); }

inline double contribution(const NkLandscape& landscape, const Genome& genome, int gene) {
  require(gene >= 0 && gene < landscape.n(), "gene out of range");
  return landscape.contribution(genome, gene);
}

inline double total_fitness(const NkLandscape& landscape, const Genome& genome) {
  return landscape.total_fitness(genome);
}

inline double partial_fitness(const NkLandscape& landscape, const Genome& genome, std::span<const int> genes) {
  return landscape.partial_fitness(genome, genes);
}

inline std::span<const int> flip_delta_set(const NkLandscape& landscape, int gene) {
  require(gene >= 0 && gene < landscape.n(), "gene out of range");
  return landscape.flip_delta_set(gene);
}

}  // namespace nkd
