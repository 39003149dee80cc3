#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "skorohull/rng.hpp"

namespace skorohull {
namespace {

// Known-answer vectors published with the Random123 reference implementation.
TEST(Philox, KnownAnswerZero) {
  const auto out = Philox4x32::block({0, 0, 0, 0}, {0, 0});
  EXPECT_EQ(out, (Philox4x32::Counter{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
}

TEST(Philox, KnownAnswerAllOnes) {
  const auto out = Philox4x32::block({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff},
                                     {0xffffffff, 0xffffffff});
  EXPECT_EQ(out, (Philox4x32::Counter{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
}

TEST(Philox, KnownAnswerPiDigits) {
  const auto out = Philox4x32::block({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344},
                                     {0xa4093822, 0x299f31d0});
  EXPECT_EQ(out, (Philox4x32::Counter{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(Mix64, IsInjectiveOnSmallRange) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 10000; ++i) seen.insert(mix64(i));
  EXPECT_EQ(seen.size(), 10000u);
}

TEST(NormalStream, SameKeyGivesSameSequence) {
  NormalStream a(42, 7);
  NormalStream b(42, 7);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next(), b.next());
}

TEST(NormalStream, DistinctStreamsDiffer) {
  NormalStream a(42, 1);
  NormalStream b(42, 2);
  NormalStream c(43, 1);
  int same_ab = 0;
  int same_ac = 0;
  for (int i = 0; i < 100; ++i) {
    const double x = a.next();
    same_ab += x == b.next();
    same_ac += x == c.next();
  }
  EXPECT_EQ(same_ab, 0);
  EXPECT_EQ(same_ac, 0);
}

TEST(NormalStream, MomentsMatchStandardNormal) {
  NormalStream s(2024, 1);
  const int n = 400000;
  double sum = 0.0;
  double sq = 0.0;
  double fourth = 0.0;
  int below = 0;
  for (int i = 0; i < n; ++i) {
    const double x = s.next();
    ASSERT_TRUE(std::isfinite(x));
    sum += x;
    sq += x * x;
    fourth += x * x * x * x;
    below += x <= -1.0;
  }
  // Bands of about four standard errors.
  EXPECT_NEAR(sum / n, 0.0, 4 / std::sqrt(n));
  EXPECT_NEAR(sq / n, 1.0, 4 * std::sqrt(2.0 / n));
  EXPECT_NEAR(fourth / n, 3.0, 4 * std::sqrt(96.0 / n));
  EXPECT_NEAR(static_cast<double>(below) / n, 0.15865525393145707, 4 * std::sqrt(0.134 / n));
}

}  // namespace
}  // namespace skorohull
