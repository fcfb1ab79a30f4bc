#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <set>

#include "nkd/landscape.hpp"
#include "oracle.hpp"

using nkd::Genome;
using nkd::NkLandscape;
using nkd::Purpose;
using nkd::RandomStream;
using nkd::SeedPath;

namespace {

RandomStream stream_for(std::uint64_t seed, std::uint64_t idx = 0) {
  return RandomStream(SeedPath(seed).child(Purpose::landscape, idx));
}

Genome random_genome(int n, RandomStream& s) { return Genome::random(n, s); }

}  // namespace

TEST(Landscape, SmallInstanceShape) {
  auto s = stream_for(1);
  const auto l = nkd::generate_nk(3, 1, s);
  for (int i = 0; i < 3; ++i) {
    ASSERT_EQ(l.neighbors(i).size(), 1u);
    EXPECT_NE(l.neighbors(i)[0], i);
    EXPECT_EQ(l.values(i).size(), 4u);
  }
}

TEST(Landscape, ZeroEpistasis) {
  auto s = stream_for(2);
  const auto l = nkd::generate_nk(20, 0, s);
  for (int i = 0; i < 20; ++i) {
    EXPECT_TRUE(l.neighbors(i).empty());
    EXPECT_EQ(l.values(i).size(), 2u);
  }
}

TEST(Landscape, GenerationIsDeterministic) {
  auto a = stream_for(9, 4);
  auto b = stream_for(9, 4);
  const auto la = nkd::generate_nk(12, 3, a);
  const auto lb = nkd::generate_nk(12, 3, b);
  for (int i = 0; i < 12; ++i) {
    EXPECT_TRUE(std::ranges::equal(la.neighbors(i), lb.neighbors(i)));
    EXPECT_TRUE(std::ranges::equal(la.values(i), lb.values(i)));
  }
}

TEST(Landscape, StructuralInvariants) {
  for (int trial = 0; trial < 20; ++trial) {
    auto s = stream_for(3, static_cast<std::uint64_t>(trial));
    const int n = 5 + trial;
    const int k = trial % n;
    const auto l = nkd::generate_nk(n, k, s);
    for (int i = 0; i < n; ++i) {
      const auto nbs = l.neighbors(i);
      std::set<int> uniq(nbs.begin(), nbs.end());
      ASSERT_EQ(static_cast<int>(uniq.size()), k);
      ASSERT_EQ(uniq.count(i), 0u);
      ASSERT_EQ(l.values(i).size(), std::size_t{1} << (k + 1));
      for (double v : l.values(i)) ASSERT_TRUE(v >= 0.0 && v < 1.0);
    }
  }
}

TEST(Landscape, ParameterErrors) {
  auto s = stream_for(4);
  EXPECT_THROW(nkd::generate_nk(0, 0, s), nkd::InvalidParameter);
  EXPECT_THROW(nkd::generate_nk(20, 30, s), nkd::InvalidParameter);
  EXPECT_THROW(nkd::generate_nk(20, 20, s), nkd::InvalidParameter);
  EXPECT_THROW(nkd::generate_nk(20, -1, s), nkd::InvalidParameter);
  EXPECT_THROW(nkd::generate_nk(40, 26, s), nkd::TableSizeExceeded);
  try {
    nkd::generate_nk(20, 30, s);
  } catch (const nkd::InvalidParameter& e) {
    EXPECT_STREQ(e.what(), "k must be < n");
  }
}

TEST(Landscape, DirectLookupWithoutEpistasis) {
  const auto l = NkLandscape::from_tables(1, 0, {}, {0.25, 0.75});
  EXPECT_EQ(nkd::contribution(l, Genome({1}), 0), 0.75);
  EXPECT_EQ(nkd::contribution(l, Genome({0}), 0), 0.25);
}

TEST(Landscape, PackingOrderOwnAlleleMostSignificant) {
  // gene 0 reads neighbors [2, 1]: index = own*4 + g2*2 + g1
  std::vector<double> values;
  for (int g = 0; g < 3; ++g) {
    for (int v = 0; v < 8; ++v) values.push_back((g * 8 + v) / 32.0);
  }
  const auto l = NkLandscape::from_tables(3, 2, {2, 1, 0, 2, 0, 1}, values);
  EXPECT_EQ(l.table_index(Genome({1, 0, 0}), 0), 4u);
  EXPECT_EQ(l.table_index(Genome({0, 0, 1}), 0), 2u);
  EXPECT_EQ(l.table_index(Genome({0, 1, 0}), 0), 1u);
  EXPECT_EQ(l.contribution(Genome({1, 1, 1}), 0), 7 / 32.0);
}

TEST(Landscape, ContributionDependsOnExactlyKPlusOneAlleles) {
  auto s = stream_for(5);
  const auto l = nkd::generate_nk(3, 1, s);
  auto gs = stream_for(5, 1);
  for (int trial = 0; trial < 50; ++trial) {
    const Genome g = random_genome(3, gs);
    for (int gene = 0; gene < 3; ++gene) {
      const int nb = l.neighbors(gene)[0];
      const int other = 3 - gene - nb;
      Genome m = g;
      m.flip(other);
      EXPECT_EQ(l.contribution(g, gene), l.contribution(m, gene));
    }
  }
}

TEST(Landscape, ContributionMatchesIndependentPacking) {
  auto s = stream_for(6);
  const auto l = nkd::generate_nk(16, 5, s);
  auto gs = stream_for(6, 1);
  for (int trial = 0; trial < 200; ++trial) {
    const Genome g = random_genome(16, gs);
    for (int gene = 0; gene < 16; ++gene) ASSERT_EQ(l.contribution(g, gene), oracle::contribution(l, g, gene));
  }
}

TEST(Landscape, TotalFitnessArithmetic) {
  const auto l = NkLandscape::from_tables(2, 0, {}, {0.1, 0.8, 0.6, 0.3});
  EXPECT_DOUBLE_EQ(nkd::total_fitness(l, Genome({1, 0})), 0.7);
}

TEST(Landscape, TotalAndPartialAgree) {
  auto s = stream_for(7);
  const auto l = nkd::generate_nk(8, 2, s);
  auto gs = stream_for(7, 1);
  std::vector<int> all(8);
  std::iota(all.begin(), all.end(), 0);
  for (int trial = 0; trial < 100; ++trial) {
    const Genome g = random_genome(8, gs);
    const double total = nkd::total_fitness(l, g);
    EXPECT_GE(total, 0.0);
    EXPECT_LT(total, 1.0);
    EXPECT_NEAR(8 * total, nkd::partial_fitness(l, g, all), 1e-12);
    EXPECT_EQ(nkd::partial_fitness(l, g, std::vector<int>{3}), l.contribution(g, 3));
    const std::vector<int> subset{1, 4, 6};
    EXPECT_EQ(nkd::partial_fitness(l, g, subset), oracle::partial(l, g, subset));
  }
  EXPECT_THROW(nkd::partial_fitness(l, Genome::zeros(8), std::vector<int>{}), nkd::InvalidParameter);
}

TEST(Landscape, BruteForceOptimumIsReachableMaximum) {
  auto s = stream_for(8);
  const auto l = nkd::generate_nk(10, 2, s);
  const double best = oracle::brute_force_max(l);
  double seen = 0.0;
  for (std::uint64_t b = 0; b < 1024; ++b) {
    const double f = l.total_fitness(oracle::genome_from_bits(10, b));
    seen = std::max(seen, f);
    ASSERT_LE(f, best);
  }
  EXPECT_EQ(seen, best);
}

TEST(Landscape, FlipDeltaSetEdgeCases) {
  auto s = stream_for(9);
  const auto flat = nkd::generate_nk(10, 0, s);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(std::vector<int>(flat.flip_delta_set(i).begin(), flat.flip_delta_set(i).end()), std::vector<int>{i});
  const auto full = nkd::generate_nk(10, 9, s);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(full.flip_delta_set(i).size(), 10u);
}

TEST(Landscape, FlipDeltaSetMatchesFullRecompute) {
  auto s = stream_for(10);
  const auto l = nkd::generate_nk(12, 3, s);
  auto gs = stream_for(10, 1);
  for (int trial = 0; trial < 100; ++trial) {
    const Genome g = random_genome(12, gs);
    const int gene = static_cast<int>(gs.below(12));
    Genome m = g;
    m.flip(gene);
    const auto delta = l.flip_delta_set(gene);
    const std::set<int> predicted(delta.begin(), delta.end());
    for (int j = 0; j < 12; ++j) {
      if (oracle::contribution(l, g, j) != oracle::contribution(l, m, j)) {
        ASSERT_TRUE(predicted.count(j)) << "gene " << j << " changed but not predicted";
      }
      // Membership must be structural: j is gene itself or reads gene.
      const auto nbs = l.neighbors(j);
      const bool reads = j == gene || std::find(nbs.begin(), nbs.end(), gene) != nbs.end();
      ASSERT_EQ(reads, predicted.count(j) == 1);
    }
  }
}

TEST(Landscape, IncrementalEqualsFullRecomputeExhaustive) {
  for (int trial = 0; trial < 10; ++trial) {
    auto s = stream_for(11, static_cast<std::uint64_t>(trial));
    const int n = 6 + trial;  // up to 15
    const int k = trial % 5;
    const auto l = nkd::generate_nk(n, k, s);
    auto gs = stream_for(11, 100 + static_cast<std::uint64_t>(trial));
    Genome g = random_genome(n, gs);
    std::vector<double> cache(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) cache[static_cast<std::size_t>(i)] = l.contribution(g, i);
    for (int gene = 0; gene < n; ++gene) {
      Genome m = g;
      m.flip(gene);
      auto updated = cache;
      for (int j : l.flip_delta_set(gene)) updated[static_cast<std::size_t>(j)] = l.contribution(m, j);
      for (int j = 0; j < n; ++j) ASSERT_EQ(updated[static_cast<std::size_t>(j)], oracle::contribution(l, m, j));
    }
  }
}

TEST(Landscape, ZeroEpistasisFlipTouchesOnlyItself) {
  auto s = stream_for(12);
  const auto l = nkd::generate_nk(15, 0, s);
  auto gs = stream_for(12, 1);
  const Genome g = random_genome(15, gs);
  for (int gene = 0; gene < 15; ++gene) {
    Genome m = g;
    m.flip(gene);
    for (int j = 0; j < 15; ++j) {
      if (j != gene) ASSERT_EQ(l.contribution(g, j), l.contribution(m, j));
    }
  }
}

TEST(Landscape, FitAlleleAveragesTwoThirds) {
  auto s = stream_for(13);
  double sum = 0.0;
  constexpr int kTables = 100000;
  for (int i = 0; i < kTables; ++i) {
    const auto l = nkd::generate_nk(1, 0, s);
    sum += std::max(l.values(0)[0], l.values(0)[1]);
  }
  const double mean = sum / kTables;
  EXPECT_GE(mean, 0.664);
  EXPECT_LE(mean, 0.670);
}

TEST(Landscape, FromTablesRejectsBadInput) {
  EXPECT_THROW(NkLandscape::from_tables(2, 1, {0, 0}, std::vector<double>(8, 0.5)), nkd::InvalidParameter);
  EXPECT_THROW(NkLandscape::from_tables(2, 1, {1, 0}, std::vector<double>(7, 0.5)), nkd::InvalidParameter);
  EXPECT_THROW(NkLandscape::from_tables(2, 1, {1, 0}, std::vector<double>(8, 1.0)), nkd::InvalidParameter);
  EXPECT_NO_THROW(NkLandscape::from_tables(2, 1, {1, 0}, std::vector<double>(8, 0.5)));
}
