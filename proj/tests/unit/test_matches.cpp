#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "photostyle/error.hpp"
#include "photostyle/matches.hpp"

namespace ps = photostyle;

namespace {

const ps::Dims kDims{40, 50};

ps::MatchedPointSet parse(const std::string& text, ps::Dims in = kDims, ps::Dims ref = kDims) {
  std::istringstream s(text);
  return ps::load_matches(s, in, ref);
}

ps::MatchedPointSet random_set(std::size_t n, std::uint64_t seed, ps::Dims dims = kDims) {
  std::mt19937_64 rng(seed);
  std::vector<ps::Match> entries;
  for (std::size_t i = 0; i < n; ++i) {
    const ps::PixelLoc p{static_cast<int>(rng() % dims.height), static_cast<int>(rng() % dims.width)};
    entries.push_back({p, p, static_cast<double>(rng() % 1000) / 1000.0});
  }
  return ps::MatchedPointSet(entries, dims, dims);
}

std::vector<int> scan_oracle(const ps::MatchedPointSet& set, ps::Side side, ps::PixelLoc loc, std::size_t k) {
  std::vector<int> ids(set.size());
  std::iota(ids.begin(), ids.end(), 0);
  auto d2 = [&](int id) {
    const ps::PixelLoc p = set.loc(static_cast<std::size_t>(id), side);
    const long long dr = p.row - loc.row, dc = p.col - loc.col;
    return dr * dr + dc * dc;
  };
  std::sort(ids.begin(), ids.end(), [&](int a, int b) { return d2(a) != d2(b) ? d2(a) < d2(b) : a < b; });
  ids.resize(k);
  return ids;
}

}  // namespace

TEST(LoadMatches, ParsesInFileOrderWithCommentsAndBlanks) {
  const auto set = parse("# header\n1 2 3 4 0.5\n\n5 6 7 8 0.25\n9 10 11 12 1\n13 14 15 16 0\n17 18 19 20 0.75\n");
  ASSERT_EQ(set.size(), 5u);
  EXPECT_EQ(set[0].input, (ps::PixelLoc{2, 1}));
  EXPECT_EQ(set[0].ref, (ps::PixelLoc{4, 3}));
  EXPECT_DOUBLE_EQ(set[1].score, 0.25);
  EXPECT_EQ(set[4].input, (ps::PixelLoc{18, 17}));
}

TEST(LoadMatches, ThreeLinesAreTooFew) {
  try {
    parse("1 1 1 1 1\n2 2 2 2 1\n3 3 3 3 1\n");
    FAIL() << "expected InsufficientMatchesError";
  } catch (const ps::InsufficientMatchesError& e) {
    EXPECT_EQ(e.have(), 3u);
  }
}

TEST(LoadMatches, OutOfRangeNamesTheLine) {
  try {
    parse("1 1 1 1 1\n2 2 2 2 1\n60 3 3 3 1\n4 4 4 4 1\n5 5 5 5 1\n");
    FAIL() << "expected ValidationError";
  } catch (const ps::ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
  EXPECT_THROW(parse("1 1 1 1 1\n2 2 2 2 1\n3 3 3 3 1\n4 4 4 4 1\n5 5 5 5 -0.5\n"), ps::ValidationError);
}

TEST(LoadMatches, MalformedLineIsParseError) {
  try {
    parse("1 1 1 1 1\n2 2 x 2 1\n");
    FAIL() << "expected ParseError";
  } catch (const ps::ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  EXPECT_THROW(parse("1 1 1 1 1 9\n"), ps::ParseError);
  EXPECT_THROW(parse("1 1 1 1\n"), ps::ParseError);
}

TEST(LoadMatches, DuplicateInputKeepsHigherScore) {
  const auto set = parse("4 4 0 0 0.2\n1 1 1 1 1\n4 4 9 9 0.9\n2 2 2 2 1\n3 3 3 3 1\n5 5 5 5 1\n");
  ASSERT_EQ(set.size(), 5u);
  EXPECT_EQ(set[0].input, (ps::PixelLoc{4, 4}));
  EXPECT_DOUBLE_EQ(set[0].score, 0.9);
  EXPECT_EQ(set[0].ref, (ps::PixelLoc{9, 9}));
}

TEST(FilterTopFraction, SeventyPercentOfTen) {
  const auto set = random_set(10, 1);
  EXPECT_EQ(ps::filter_top_fraction(set, 0.7).size(), 7u);
}

TEST(FilterTopFraction, FullFractionIsIdentity) {
  const auto set = random_set(12, 2);
  const auto out = ps::filter_top_fraction(set, 1.0);
  EXPECT_EQ(out.entries(), set.entries());
}

TEST(FilterTopFraction, MatchesSortOracle) {
  std::vector<ps::Match> entries;
  const double scores[9] = {0.3, 0.9, 0.1, 0.8, 0.5, 0.7, 0.2, 0.6, 0.4};
  for (int i = 0; i < 9; ++i) entries.push_back({{i, i}, {i, i}, scores[i]});
  const ps::MatchedPointSet set(entries, kDims, kDims);
  const auto out = ps::filter_top_fraction(set, 0.5);
  ASSERT_EQ(out.size(), 5u);

  std::vector<int> order(9);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return scores[a] > scores[b]; });
  order.resize(5);
  std::sort(order.begin(), order.end());
  for (std::size_t i = 0; i < 5; ++i) EXPECT_EQ(out[i], entries[static_cast<std::size_t>(order[i])]);
}

TEST(FilterTopFraction, TiesPreferEarlierEntries) {
  std::vector<ps::Match> entries;
  for (int i = 0; i < 10; ++i) entries.push_back({{i, 0}, {i, 0}, 0.5});
  const auto out = ps::filter_top_fraction(ps::MatchedPointSet(entries, kDims, kDims), 0.6);
  ASSERT_EQ(out.size(), 6u);
  for (int i = 0; i < 6; ++i) EXPECT_EQ(out[static_cast<std::size_t>(i)].input.row, i);
}

TEST(FilterTopFraction, BelowFiveThrows) {
  EXPECT_THROW(ps::filter_top_fraction(random_set(10, 3), 0.4), ps::InsufficientMatchesError);
  EXPECT_THROW(ps::filter_top_fraction(random_set(10, 3), 0.0), ps::ValidationError);
}

TEST(FilterTopFraction, IsIdempotentAndDense) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto set = random_set(40, seed);
    const auto once = ps::filter_top_fraction(set, 0.7);
    // A second pass keeps an order-preserving subset of the first.
    const auto twice = ps::filter_top_fraction(once, 0.7);
    std::size_t j = 0;
    for (std::size_t i = 0; i < once.size() && j < twice.size(); ++i)
      if (once[i] == twice[j]) ++j;
    EXPECT_EQ(j, twice.size());
    EXPECT_EQ(ps::filter_top_fraction(once, 1.0).entries(), once.entries());
  }
}

TEST(Nearest, SelfQueryReturnsOwnId) {
  const auto set = random_set(30, 4);
  for (std::size_t id = 0; id < set.size(); ++id) {
    const auto got = ps::nearest_matches(set, ps::Side::input, set[id].input, 1);
    ASSERT_EQ(got.size(), 1u);
    const ps::PixelLoc p = set.loc(static_cast<std::size_t>(got[0]), ps::Side::input);
    EXPECT_EQ(p, set[id].input);
  }
}

TEST(Nearest, FullKReturnsEverythingSorted) {
  const auto set = random_set(25, 5);
  const ps::PixelLoc loc{7, 13};
  EXPECT_EQ(ps::nearest_matches(set, ps::Side::reference, loc, set.size()),
            scan_oracle(set, ps::Side::reference, loc, set.size()));
}

TEST(Nearest, MatchesScanOracleOnRandomSets) {
  std::mt19937_64 rng(6);
  for (int t = 0; t < 200; ++t) {
    const auto set = random_set(50, rng());
    const ps::PixelLoc loc{static_cast<int>(rng() % 40), static_cast<int>(rng() % 50)};
    EXPECT_EQ(ps::nearest_matches(set, ps::Side::input, loc, 5), scan_oracle(set, ps::Side::input, loc, 5));
  }
}

TEST(Nearest, GridPathMatchesScanOracle) {
  const ps::Dims big{300, 400};
  std::mt19937_64 rng(8);
  const auto set = random_set(1500, 9, big);
  ASSERT_GE(set.size(), ps::kGridIndexThreshold);
  for (int t = 0; t < 300; ++t) {
    const ps::PixelLoc loc{static_cast<int>(rng() % 300), static_cast<int>(rng() % 400)};
    for (std::size_t k : {1u, 5u, 12u})
      EXPECT_EQ(ps::nearest_matches(set, ps::Side::input, loc, k), scan_oracle(set, ps::Side::input, loc, k));
  }
}

TEST(Nearest, DistancesNonDecreasing) {
  const auto set = random_set(60, 10);
  const ps::PixelLoc loc{20, 20};
  const auto ids = ps::nearest_matches(set, ps::Side::input, loc, 20);
  long long prev = -1;
  for (int id : ids) {
    const ps::PixelLoc p = set[static_cast<std::size_t>(id)].input;
    const long long d = (p.row - loc.row) * (p.row - loc.row) + (p.col - loc.col) * (p.col - loc.col);
    EXPECT_GE(d, prev);
    prev = d;
  }
}

TEST(MatchedPointSet, RejectsOutOfBounds) {
  std::vector<ps::Match> entries{{{0, 0}, {40, 0}, 1.0}};
  EXPECT_THROW(ps::MatchedPointSet(entries, kDims, kDims), ps::ValidationError);
}
