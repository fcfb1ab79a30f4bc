#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "nkd/errors.hpp"
#include "nkd/landscape.hpp"
#include "nkd/prng.hpp"
#include "nkd/walk.hpp"

namespace nkd {

/// S+1 coupled species sharing n, k and c. Gene i of species a reads its own
/// allele, k local neighbors, then c genes of each partner species in
/// ascending species order; that is also the table-index packing order,
/// own allele most significant.
class Ecosystem {
 public:
  static void validate(int n, int k, int c, int s) {
    NkLandscape::validate(n, k);
    require(s >= 1, "s must be >= 1");
    require(c >= 0, "c must be >= 0");
    require(c <= n, "c must be <= n");
    if (k + s * c + 1 > kMaxTableBits) throw TableSizeExceeded("k + s*c + 1 must be <= 26");
  }

  static Ecosystem generate(int n, int k, int c, int s, RandomStream& stream, SeedPath provenance = SeedPath{}) {
    validate(n, k, c, s);
    Ecosystem eco(n, k, c, s);
    const std::size_t table = eco.table_size();
    for (int a = 0; a < eco.species_count(); ++a) {
      auto& sp = eco.species_[static_cast<std::size_t>(a)];
      for (int i = 0; i < n; ++i) {
        auto local = stream.sample_others(n, i, k);
        sp.local.insert(sp.local.end(), local.begin(), local.end());
        for (int b = 0; b < eco.species_count(); ++b) {
          if (b == a) continue;
          auto ext = stream.sample_distinct(n, c);
          sp.external.insert(sp.external.end(), ext.begin(), ext.end());
        }
        for (std::size_t v = 0; v < table; ++v) sp.values.push_back(stream.uniform());
      }
    }
    eco.provenance_ = std::move(provenance);
    eco.index_dependents();
    return eco;
  }

  /// Tables laid out per species as in generate(): local is n*k, external is
  /// n*s*c (partners ascending), values is n*2^(k+s*c+1).
  static Ecosystem from_tables(int n, int k, int c, int s, std::vector<std::vector<int>> local,
                               std::vector<std::vector<int>> external, std::vector<std::vector<double>> values,
                               SeedPath provenance = SeedPath{}) {
    validate(n, k, c, s);
    Ecosystem eco(n, k, c, s);
    const auto count = static_cast<std::size_t>(eco.species_count());
    require(local.size() == count && external.size() == count && values.size() == count,
            "need tables for every species");
    for (std::size_t a = 0; a < count; ++a) {
      require(local[a].size() == static_cast<std::size_t>(n * k), "local list size must be n*k");
      require(external[a].size() == static_cast<std::size_t>(n * s * c), "external list size must be n*s*c");
      require(values[a].size() == static_cast<std::size_t>(n) * eco.table_size(), "value list size mismatch");
      for (int i = 0; i < n; ++i) {
        for (int t = 0; t < k; ++t) {
          const int j = local[a][static_cast<std::size_t>(i * k + t)];
          require(j >= 0 && j < n && j != static_cast<int>(i), "local neighbor out of range or self");
        }
      }
      for (int j : external[a]) require(j >= 0 && j < n, "external neighbor out of range");
      for (double v : values[a]) require(v >= 0.0 && v < 1.0, "table value outside [0,1)");
      eco.species_[a].local = std::move(local[a]);
      eco.species_[a].external = std::move(external[a]);
      eco.species_[a].values = std::move(values[a]);
    }
    eco.provenance_ = std::move(provenance);
    eco.index_dependents();
    return eco;
  }

  int n() const noexcept { return n_; }
  int k() const noexcept { return k_; }
  int c() const noexcept { return c_; }
  int s() const noexcept { return s_; }
  int species_count() const noexcept { return s_ + 1; }
  int table_bits() const noexcept { return k_ + s_ * c_ + 1; }
  std::size_t table_size() const noexcept { return std::size_t{1} << table_bits(); }
  const SeedPath& provenance() const noexcept { return provenance_; }

  std::span<const int> local_neighbors(int species, int gene) const noexcept {
    const auto& sp = species_[static_cast<std::size_t>(species)];
    return {sp.local.data() + static_cast<std::size_t>(gene * k_), static_cast<std::size_t>(k_)};
  }

  /// C genes of partner species `partner` (!= species) read by `gene`.
  std::span<const int> external_neighbors(int species, int gene, int partner) const noexcept {
    const auto& sp = species_[static_cast<std::size_t>(species)];
    const int slot = partner < species ? partner : partner - 1;
    return {sp.external.data() + static_cast<std::size_t>((gene * s_ + slot) * c_), static_cast<std::size_t>(c_)};
  }

  std::span<const double> values(int species, int gene) const noexcept {
    const auto& sp = species_[static_cast<std::size_t>(species)];
    return {sp.values.data() + static_cast<std::size_t>(gene) * table_size(), table_size()};
  }

  std::size_t table_index(std::span<const Genome> genomes, int species, int gene) const noexcept {
    const Genome& own = genomes[static_cast<std::size_t>(species)];
    std::size_t index = static_cast<std::size_t>(own[gene]);
    for (int j : local_neighbors(species, gene)) index = (index << 1) | static_cast<std::size_t>(own[j]);
    for (int b = 0; b < species_count(); ++b) {
      if (b == species) continue;
      const Genome& other = genomes[static_cast<std::size_t>(b)];
      for (int j : external_neighbors(species, gene, b)) index = (index << 1) | static_cast<std::size_t>(other[j]);
    }
    return index;
  }

  double contribution(std::span<const Genome> genomes, int species, int gene) const noexcept {
    return values(species, gene)[table_index(genomes, species, gene)];
  }

  /// Genes of `species` whose contribution depends on `gene` of the same species, ascending.
  std::span<const int> local_dependents(int species, int gene) const noexcept {
    return species_[static_cast<std::size_t>(species)].local_dependents[static_cast<std::size_t>(gene)];
  }

  /// (partner species, gene) pairs reading `gene` of `species` through an external link.
  std::span<const std::pair<int, int>> external_dependents(int species, int gene) const noexcept {
    return species_[static_cast<std::size_t>(species)].external_dependents[static_cast<std::size_t>(gene)];
  }

  /// One species' tables as a plain NK landscape; only meaningful when c = 0.
  NkLandscape species_landscape(int species) const {
    require(c_ == 0, "species_landscape requires c = 0");
    const auto& sp = species_[static_cast<std::size_t>(species)];
    return NkLandscape::from_tables(n_, k_, sp.local, sp.values, provenance_);
  }

 private:
  struct Species {
    std::vector<int> local;
    std::vector<int> external;
    std::vector<double> values;
    std::vector<std::vector<int>> local_dependents;
    std::vector<std::vector<std::pair<int, int>>> external_dependents;
  };

  Ecosystem(int n, int k, int c, int s)
      : n_(n), k_(k), c_(c), s_(s), species_(static_cast<std::size_t>(s + 1)) {}

  void index_dependents() {
    for (auto& sp : species_) {
      sp.local_dependents.assign(static_cast<std::size_t>(n_), {});
      sp.external_dependents.assign(static_cast<std::size_t>(n_), {});
    }
    for (int a = 0; a < species_count(); ++a) {
      auto& sp = species_[static_cast<std::size_t>(a)];
      for (int i = 0; i < n_; ++i) {
        sp.local_dependents[static_cast<std::size_t>(i)].push_back(i);
        for (int j : local_neighbors(a, i)) sp.local_dependents[static_cast<std::size_t>(j)].push_back(i);
        for (int b = 0; b < species_count(); ++b) {
          if (b == a) continue;
          for (int j : external_neighbors(a, i, b)) {
            auto& deps = species_[static_cast<std::size_t>(b)].external_dependents[static_cast<std::size_t>(j)];
            if (deps.empty() || deps.back() != std::pair{a, i}) deps.emplace_back(a, i);
          }
        }
      }
      for (auto& d : sp.local_dependents) std::sort(d.begin(), d.end());
    }
  }

  int n_, k_, c_, s_;
  std::vector<Species> species_;
  SeedPath provenance_;
};

inline Ecosystem generate_nkcs(int n, int k, int c, int s, RandomStream& stream) {
  return Ecosystem::generate(n, k, c, s, stream);
}

inline double species_fitness(const Ecosystem& eco, std::span<const Genome> genomes, int species) {
  require(species >= 0 && species < eco.species_count(), "species out of range");
  require(genomes.size() == static_cast<std::size_t>(eco.species_count()), "need one genome per species");
  double sum = 0.0;
  for (int i = 0; i < eco.n(); ++i) sum += eco.contribution(genomes, species, i);
  return sum / eco.n();
}

struct CoevolutionResult {
  std::vector<WalkResult> species;
  std::vector<Genome> final_genomes;
};

/// Round-robin coevolution: every generation each species in turn proposes
/// one flip and keeps it iff its own fitness rises given the partners'
/// current genomes (coin flip on an exact tie). Species a draws from the
/// streams run_walk would use for `run_path/species:a`.
inline CoevolutionResult coevolve(const Ecosystem& eco, int generations, const SeedPath& run_path) {
  require(generations >= 0, "generations must be >= 0");
  const int count = eco.species_count();
  const int n = eco.n();
  std::vector<WalkStreams> streams;
  std::vector<Genome> genomes;
  for (int a = 0; a < count; ++a) {
    streams.emplace_back(run_path.child(Purpose::species, static_cast<std::uint64_t>(a)));
    genomes.push_back(Genome::random(n, streams.back().init));
  }
  std::vector<std::vector<double>> cache(static_cast<std::size_t>(count), std::vector<double>(static_cast<std::size_t>(n)));
  for (int a = 0; a < count; ++a) {
    for (int i = 0; i < n; ++i) cache[static_cast<std::size_t>(a)][static_cast<std::size_t>(i)] = eco.contribution(genomes, a, i);
  }
  auto trial = cache;
  std::vector<long> accepted(static_cast<std::size_t>(count), 0);

  for (int gen = 0; gen < generations; ++gen) {
    for (int a = 0; a < count; ++a) {
      auto& own = cache[static_cast<std::size_t>(a)];
      auto& mutant = trial[static_cast<std::size_t>(a)];
      auto& ws = streams[static_cast<std::size_t>(a)];
      const int g = static_cast<int>(ws.proposal.below(static_cast<std::uint64_t>(n)));
      auto& genome = genomes[static_cast<std::size_t>(a)];
      genome.flip(g);
      for (int j : eco.local_dependents(a, g)) mutant[static_cast<std::size_t>(j)] = eco.contribution(genomes, a, j);
      double before = 0.0;
      double after = 0.0;
      for (int i = 0; i < n; ++i) {
        before += own[static_cast<std::size_t>(i)];
        after += mutant[static_cast<std::size_t>(i)];
      }
      const bool accept = after > before || (after == before && ws.tie.coin());
      if (accept) {
        ++accepted[static_cast<std::size_t>(a)];
        for (int j : eco.local_dependents(a, g)) own[static_cast<std::size_t>(j)] = mutant[static_cast<std::size_t>(j)];
        for (auto [b, j] : eco.external_dependents(a, g)) {
          const double v = eco.contribution(genomes, b, j);
          cache[static_cast<std::size_t>(b)][static_cast<std::size_t>(j)] = v;
          trial[static_cast<std::size_t>(b)][static_cast<std::size_t>(j)] = v;
        }
      } else {
        genome.flip(g);
        for (int j : eco.local_dependents(a, g)) mutant[static_cast<std::size_t>(j)] = own[static_cast<std::size_t>(j)];
      }
    }
  }

  CoevolutionResult result;
  for (int a = 0; a < count; ++a) {
    WalkResult r;
    double sum = 0.0;
    for (double v : cache[static_cast<std::size_t>(a)]) sum += v;
    r.final_fitness = sum / n;
    r.accepted_count = accepted[static_cast<std::size_t>(a)];
    r.final_genome = genomes[static_cast<std::size_t>(a)];
    result.species.push_back(std::move(r));
  }
  result.final_genomes = std::move(genomes);
  return result;
}

}  // namespace nkd
