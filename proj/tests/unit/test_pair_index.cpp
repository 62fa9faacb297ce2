#include <gtest/gtest.h>

#include "covmax/errors.hpp"
#include "covmax/pair_index.hpp"

using namespace covmax;

namespace {

std::size_t count_visits(const PairIndexSet& idx) {
  std::size_t k = 0;
  idx.for_each([&](Pair) { ++k; });
  return k;
}

}  // namespace

TEST(PairIndexSet, StrictAndDiagonalSizes) {
  for (std::size_t m = 2; m <= 12; ++m) {
    EXPECT_EQ(PairIndexSet::strict_pairs(m).size(), m * (m - 1) / 2);
    EXPECT_EQ(PairIndexSet::with_diagonal(m).size(), m * (m + 1) / 2);
    EXPECT_EQ(count_visits(PairIndexSet::with_diagonal(m)), m * (m + 1) / 2);
  }
}

TEST(PairIndexSet, BandExteriorExample) {
  const auto idx = PairIndexSet::band_exterior(5, 1);
  EXPECT_EQ(idx.size(), 6u);
  const std::vector<Pair> expected{{0, 2}, {0, 3}, {0, 4}, {1, 3}, {1, 4}, {2, 4}};
  EXPECT_EQ(idx.pairs(), expected);
}

TEST(PairIndexSet, BandExteriorClosedFormMatchesEnumeration) {
  for (std::size_t m = 2; m <= 30; ++m) {
    for (std::size_t b = 0; b + 2 <= m; ++b) {
      const auto idx = PairIndexSet::band_exterior(m, b);
      std::size_t brute = 0;
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j)
          if (j - i > b) ++brute;
      ASSERT_EQ(idx.size(), brute) << m << " " << b;
      ASSERT_EQ(idx.size(), (m - b - 1) * (m - b) / 2);
      ASSERT_EQ(count_visits(idx), brute);
    }
  }
}

TEST(PairIndexSet, BandZeroIsStrictPairs) {
  EXPECT_EQ(PairIndexSet::band_exterior(9, 0).pairs(), PairIndexSet::strict_pairs(9).pairs());
}

TEST(PairIndexSet, IterationIsRowMajor) {
  const auto pairs = PairIndexSet::with_diagonal(4).pairs();
  for (std::size_t k = 1; k < pairs.size(); ++k) EXPECT_LT(pairs[k - 1], pairs[k]);
  EXPECT_EQ(pairs.front(), (Pair{0, 0}));
  EXPECT_EQ(pairs.back(), (Pair{3, 3}));
}

TEST(PairIndexSet, EmptyBandExterior) {
  EXPECT_THROW((void)PairIndexSet::band_exterior(5, 4), EmptyIndexSet);
  EXPECT_THROW((void)PairIndexSet::band_exterior(5, 9), EmptyIndexSet);
  EXPECT_THROW((void)PairIndexSet::strict_pairs(1), EmptyIndexSet);
}

TEST(PairIndexSet, CustomValidation) {
  EXPECT_THROW((void)PairIndexSet::custom(4, {}), EmptyIndexSet);
  EXPECT_THROW((void)PairIndexSet::custom(4, {{2, 1}}), InvalidArgument);
  EXPECT_THROW((void)PairIndexSet::custom(4, {{0, 4}}), IndexOutOfRange);
  EXPECT_THROW((void)PairIndexSet::custom(4, {{0, 1}, {0, 1}}), InvalidArgument);
}

TEST(PairIndexSet, CustomIsSortedAndSearchable) {
  const auto idx = PairIndexSet::custom(6, {{3, 5}, {0, 2}, {1, 1}});
  EXPECT_EQ(idx.pairs(), (std::vector<Pair>{{0, 2}, {1, 1}, {3, 5}}));
  EXPECT_TRUE(idx.contains({1, 1}));
  EXPECT_FALSE(idx.contains({2, 0}));
  EXPECT_FALSE(idx.contains({0, 3}));
}

TEST(PairIndexSet, ContainsMatchesMembership) {
  const auto band = PairIndexSet::band_exterior(7, 2);
  for (std::size_t i = 0; i < 7; ++i)
    for (std::size_t j = 0; j < 7; ++j) EXPECT_EQ(band.contains({i, j}), i < j && j - i > 2);
  EXPECT_FALSE(PairIndexSet::strict_pairs(4).contains({0, 4}));
}
