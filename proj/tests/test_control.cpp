#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "nkd/control.hpp"

using nkd::ControlMode;
using nkd::ControlStructure;
using nkd::Purpose;
using nkd::RandomStream;
using nkd::SeedPath;

namespace {

RandomStream control_stream(std::uint64_t seed, std::uint64_t idx = 0) {
  return RandomStream(SeedPath(seed).child(Purpose::control, idx));
}

std::vector<int> as_vec(std::span<const int> s) { return {s.begin(), s.end()}; }

void expect_self_membership(const ControlStructure& c) {
  for (int i = 0; i < c.n(); ++i) {
    const auto set = c.decision_set(i);
    ASSERT_TRUE(std::binary_search(set.begin(), set.end(), i));
  }
}

bool same_decisions(const ControlStructure& a, const ControlStructure& b) {
  if (a.n() != b.n()) return false;
  for (int i = 0; i < a.n(); ++i) {
    if (as_vec(a.decision_set(i)) != as_vec(b.decision_set(i))) return false;
  }
  return true;
}

}  // namespace

TEST(Control, GlobalSetsAreWholeGenome) {
  const auto c = nkd::build_global(9);
  EXPECT_EQ(c.mode(), ControlMode::global);
  for (int i = 0; i < 9; ++i) EXPECT_EQ(c.decision_set(i).size(), 9u);
  const auto one = nkd::build_global(1);
  EXPECT_EQ(as_vec(one.decision_set(0)), std::vector<int>{0});
}

TEST(Control, GlobalEqualsRandomWithFullD) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    EXPECT_TRUE(same_decisions(nkd::build_global(12), nkd::build_random(12, 11, control_stream(seed))));
  }
}

TEST(Control, RandomZeroIsSelfOnly) {
  const auto c = nkd::build_random(10, 0, control_stream(1));
  for (int i = 0; i < 10; ++i) EXPECT_EQ(as_vec(c.decision_set(i)), std::vector<int>{i});
}

TEST(Control, RandomSetsHaveDPlusOneMembers) {
  const auto c = nkd::build_random(9, 1, control_stream(2));
  for (int i = 0; i < 9; ++i) EXPECT_EQ(c.decision_set(i).size(), 2u);
}

TEST(Control, RandomPartnersDistinctNonSelfOverManyDraws) {
  for (std::uint64_t t = 0; t < 10000; ++t) {
    const auto c = nkd::build_random(20, 5, control_stream(3, t));
    for (int i = 0; i < 20; ++i) {
      const auto p = c.partners(i);
      ASSERT_EQ(p.size(), 5u);
      std::set<int> uniq(p.begin(), p.end());
      ASSERT_EQ(uniq.size(), 5u);
      ASSERT_EQ(uniq.count(i), 0u);
    }
  }
}

TEST(Control, RandomIsDeterministic) {
  EXPECT_EQ(nkd::build_random(30, 7, control_stream(4)), nkd::build_random(30, 7, control_stream(4)));
  EXPECT_FALSE(nkd::build_random(30, 7, control_stream(4)) == nkd::build_random(30, 7, control_stream(5)));
}

TEST(Control, RandomRangeErrors) {
  EXPECT_THROW(nkd::build_random(10, 10, control_stream(0)), nkd::InvalidParameter);
  EXPECT_THROW(nkd::build_random(10, -1, control_stream(0)), nkd::InvalidParameter);
}

TEST(Control, BlocksPartitionGenome) {
  const auto c = nkd::build_block(9, 3);
  for (int i = 0; i < 9; ++i) {
    const int first = (i / 3) * 3;
    EXPECT_EQ(as_vec(c.decision_set(i)), (std::vector<int>{first, first + 1, first + 2}));
  }
  EXPECT_TRUE(same_decisions(nkd::build_block(9, 9), nkd::build_global(9)));
  EXPECT_TRUE(same_decisions(nkd::build_block(9, 1), nkd::build_random(9, 0, control_stream(6))));
  EXPECT_THROW(nkd::build_block(10, 3), nkd::InvalidParameter);
  EXPECT_THROW(nkd::build_block(10, 0), nkd::InvalidParameter);
}

TEST(Control, SubsetCounts) {
  for (std::uint64_t t = 0; t < 200; ++t) {
    const auto c = nkd::build_subset(20, 8, 12, control_stream(7, t));
    int big = 0, single = 0;
    for (int i = 0; i < 20; ++i) {
      const auto size = c.decision_set(i).size();
      if (size == 9) ++big;
      if (size == 1) ++single;
    }
    ASSERT_EQ(big, 12);
    ASSERT_EQ(single, 8);
    expect_self_membership(c);
  }
}

TEST(Control, SubsetExtremes) {
  const auto none = nkd::build_subset(15, 4, 0, control_stream(8));
  for (int i = 0; i < 15; ++i) EXPECT_EQ(as_vec(none.decision_set(i)), std::vector<int>{i});
  // With every gene controlled the per-gene draws are exactly build_random's.
  const auto all = nkd::build_subset(15, 4, 15, control_stream(8));
  EXPECT_TRUE(same_decisions(all, nkd::build_random(15, 4, control_stream(8))));
  EXPECT_THROW(nkd::build_subset(15, 4, 16, control_stream(8)), nkd::InvalidParameter);
}

TEST(Control, CorrelatedSharesEpistaticNeighbors) {
  for (std::uint64_t t = 0; t < 50; ++t) {
    RandomStream ls(SeedPath(9).child(Purpose::landscape, t));
    const auto l = nkd::generate_nk(20, 4, ls);
    const auto c = nkd::build_correlated(l, 10, control_stream(9, t));
    for (int i = 0; i < 20; ++i) {
      const auto p = c.partners(i);
      ASSERT_EQ(p.size(), 10u);
      ASSERT_TRUE(std::equal(p.begin(), p.begin() + 4, l.neighbors(i).begin()));
      std::set<int> uniq(p.begin(), p.end());
      ASSERT_EQ(uniq.size(), 10u);
      ASSERT_EQ(uniq.count(i), 0u);
    }
  }
}

TEST(Control, CorrelatedWithSmallD) {
  RandomStream ls(SeedPath(10).child(Purpose::landscape, 0));
  const auto l = nkd::generate_nk(12, 5, ls);
  const auto c = nkd::build_correlated(l, 3, control_stream(10));
  for (int i = 0; i < 12; ++i) {
    EXPECT_TRUE(std::ranges::equal(c.partners(i), l.neighbors(i).subspan(0, 3)));
  }
  const auto zero = nkd::build_correlated(l, 0, control_stream(10));
  for (int i = 0; i < 12; ++i) EXPECT_EQ(as_vec(zero.decision_set(i)), std::vector<int>{i});
}

TEST(Control, SelfMembershipEveryMode) {
  RandomStream ls(SeedPath(11).child(Purpose::landscape, 0));
  const auto l = nkd::generate_nk(12, 3, ls);
  expect_self_membership(nkd::build_global(12));
  expect_self_membership(nkd::build_random(12, 5, control_stream(11)));
  expect_self_membership(nkd::build_block(12, 4));
  expect_self_membership(nkd::build_subset(12, 5, 6, control_stream(11)));
  expect_self_membership(nkd::build_correlated(l, 7, control_stream(11)));
}

TEST(Control, DecisionSetAccessor) {
  const auto g = nkd::build_global(6);
  EXPECT_EQ(nkd::decision_set(g, 2).size(), 6u);
  const auto sub = nkd::build_subset(6, 3, 0, control_stream(12));
  EXPECT_EQ(as_vec(nkd::decision_set(sub, 4)), std::vector<int>{4});
  const auto r = nkd::build_random(6, 3, control_stream(12));
  EXPECT_EQ(nkd::decision_set(r, 5).size(), 4u);
  EXPECT_THROW(nkd::decision_set(r, 6), nkd::InvalidParameter);
}

TEST(Control, GenerationControlMatchesFullBuild) {
  for (std::uint64_t t = 0; t < 20; ++t) {
    const auto stream = control_stream(13, t);
    const int n = 10 + static_cast<int>(t);
    const int d = static_cast<int>(t) % n;
    const auto full = nkd::build_random(n, d, stream);
    const nkd::GenerationControl lazy(n, d, stream);
    for (int i = 0; i < n; ++i) ASSERT_EQ(lazy.decision_set(i), as_vec(full.decision_set(i)));
  }
}
