#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "ccme/cost_model.hpp"
#include "test_support.hpp"

using namespace ccme;

namespace {

// ue(v) length by repeated halving: a codeword for k has 2*len(k+1)-1 bits.
int ue_length(long k) {
  int len = 0;
  for (long v = k + 1; v > 0; v >>= 1) ++len;
  return 2 * len - 1;
}

int component_bits_oracle(int d) {
  const long q = 4L * d;  // quarter-pel
  const long k = q > 0 ? 2 * q - 1 : -2 * q;
  return ue_length(k);
}

}  // namespace

TEST(Lambda, ClosedFormValues) {
  EXPECT_NEAR(lambda_for_qp(12), std::sqrt(0.85), 1e-12);
  EXPECT_NEAR(lambda_for_qp(12), 0.922, 5e-4);
  EXPECT_NEAR(lambda_for_qp(28), 5.854, 5e-4);
  EXPECT_NEAR(lambda_for_qp(33), std::sqrt(0.85 * std::pow(2.0, 7.0)), 1e-12);
  EXPECT_NEAR(lambda_for_qp(33), 10.4307, 5e-4);
  EXPECT_THROW(lambda_for_qp(-1), ConfigError);
  EXPECT_THROW(lambda_for_qp(52), ConfigError);
}

TEST(RateBits, ZeroDifferentialIsTwoBits) {
  EXPECT_EQ(mv_rate_bits({3, -7}, {3, -7}), 2);
  EXPECT_EQ(mv_rate_bits({}, {}), 2);
}

TEST(RateBits, HandExamples) {
  EXPECT_EQ(mvd_component_bits(1), 7);   // v = 4, k = 7
  EXPECT_EQ(mvd_component_bits(-1), 7);  // v = -4, k = 8
  EXPECT_EQ(mv_rate_bits({1, 0}, {}), 8);
  EXPECT_EQ(mv_rate_bits({-1, 1}, {}), 14);
  EXPECT_EQ(mv_rate_bits({5, 3}, {4, 4}), 14);
}

TEST(RateBits, MatchesOracleTable) {
  for (int d = -64; d <= 64; ++d) ASSERT_EQ(mvd_component_bits(d), component_bits_oracle(d)) << d;
}

TEST(RateBits, MinimumOnlyAtPredictorAndSignSymmetric) {
  const MotionVector pmv{2, -3};
  for (int dy = -32; dy <= 32; ++dy) {
    for (int dx = -32; dx <= 32; ++dx) {
      const MotionVector mv{dx, dy};
      const int bits = mv_rate_bits(mv, pmv);
      ASSERT_GE(bits, 2);
      ASSERT_EQ(bits == 2, mv == pmv);
      const MotionVector d = mv - pmv;
      ASSERT_EQ(bits, mv_rate_bits(pmv + MotionVector{-d.dx, d.dy}, pmv));
      ASSERT_EQ(bits, mv_rate_bits(pmv + MotionVector{d.dx, -d.dy}, pmv));
    }
  }
}

TEST(Sad16, IdenticalAndExtremeBlocks) {
  const LumaFrame f = testing_support::random_frame(48, 48, 3);
  const PaddedFrame p = pad(f);
  EXPECT_EQ(sad16(f, {1, 1}, p, {}), 0);
  const LumaFrame white(32, 32, std::uint8_t{255});
  const LumaFrame black(32, 32, std::uint8_t{0});
  EXPECT_EQ(sad16(white, {0, 0}, pad(black), {5, -7}), 65280);
}

TEST(Sad16, MatchesClampedOracleAcrossWindow) {
  const LumaFrame cur = testing_support::random_frame(48, 32, 21);
  const LumaFrame ref = testing_support::random_frame(48, 32, 22);
  const PaddedFrame p = pad(ref);
  std::mt19937 rng(1);
  std::uniform_int_distribution<int> d(-32, 32);
  for (int i = 0; i < 300; ++i) {
    const MotionVector mv{d(rng), d(rng)};
    const MbIndex mb{i % 3, i % 2};
    ASSERT_EQ(sad16(cur, mb, p, mv), testing_support::sad_oracle(cur, mb, ref, mv));
  }
}

TEST(Sad16, ShiftedContentHasZeroAtPlantedMv) {
  const LumaFrame ref = testing_support::smooth_frame(96, 96, 4);
  const LumaFrame cur = testing_support::shifted(ref, {2, 0});
  EXPECT_EQ(sad16(cur, {2, 2}, pad(ref), {2, 0}), 0);
}

TEST(Cost, IdenticalFramesAtPredictor) {
  const LumaFrame f = testing_support::random_frame(32, 32, 8);
  const CostParams params;
  const CostValue c = cost(f, {0, 0}, pad(f), {}, {}, params);
  EXPECT_EQ(c.sad, 0);
  EXPECT_EQ(c.rate_bits, 2);
  EXPECT_EQ(c.cost, 12);  // round(2 * 5.8535)
}

TEST(Cost, SadPlusRoundedRate) {
  const CostParams params;
  for (int sad : {0, 1, 999, 4321}) EXPECT_EQ(cost_from_sad(sad, {4, 4}, {4, 4}, params).cost, sad + 12);
  const double lam = std::sqrt(0.85 * std::pow(2.0, 16.0 / 3.0));
  EXPECT_EQ(cost_from_sad(100, {1, 0}, {}, params).cost, 100 + static_cast<int>(std::floor(lam * 8 + 0.5)));
  CostParams zero = params;
  zero.lambda_motion = 0.0;
  EXPECT_EQ(cost_from_sad(777, {9, -9}, {}, zero).cost, 777);
}

TEST(Cost, RoundsHalfUp) {
  EXPECT_EQ(rate_cost(0.25, 2), 1);
  EXPECT_EQ(rate_cost(0.75, 2), 2);
  EXPECT_EQ(rate_cost(1.25, 2), 3);
}

TEST(Cost, NeverBelowSad) {
  const CostParams params = CostParams::for_qp(40);
  for (int d = -32; d <= 32; ++d) {
    const CostValue c = cost_from_sad(50, {d, -d}, {1, 2}, params);
    ASSERT_GE(c.cost, c.sad);
  }
}

TEST(MedianPmv, Examples) {
  EXPECT_EQ(median_pmv(MotionVector{1, 1}, MotionVector{3, 5}, MotionVector{2, 2}), (MotionVector{2, 2}));
  EXPECT_EQ(median_pmv(std::nullopt, std::nullopt, std::nullopt), (MotionVector{0, 0}));
  EXPECT_EQ(median_pmv(MotionVector{4, -3}, std::nullopt, std::nullopt), (MotionVector{4, -3}));
  EXPECT_EQ(median_pmv(std::nullopt, std::nullopt, MotionVector{4, -3}), (MotionVector{4, -3}));
  // two present: the missing one counts as (0,0)
  EXPECT_EQ(median_pmv(MotionVector{4, 6}, MotionVector{2, 8}, std::nullopt), (MotionVector{2, 6}));
}

TEST(MedianPmv, WithinNeighbourRangeAndMatchesSortOracle) {
  std::mt19937 rng(9);
  std::uniform_int_distribution<int> d(-32, 32);
  for (int i = 0; i < 2000; ++i) {
    const MotionVector a{d(rng), d(rng)}, b{d(rng), d(rng)}, c{d(rng), d(rng)};
    const MotionVector m = median_pmv(a, b, c);
    std::array<int, 3> xs{a.dx, b.dx, c.dx}, ys{a.dy, b.dy, c.dy};
    std::sort(xs.begin(), xs.end());
    std::sort(ys.begin(), ys.end());
    ASSERT_EQ(m, (MotionVector{xs[1], ys[1]}));
  }
}

TEST(InitCost, PredictorAtOriginCostsOneSp) {
  const LumaFrame f = testing_support::random_frame(32, 32, 12);
  const InitCost ic = init_cost(f, {1, 1}, pad(f), {}, CostParams{});
  EXPECT_EQ(ic.sp_used, 1);
  EXPECT_EQ(ic.mv, (MotionVector{}));
  EXPECT_EQ(ic.value.cost, 12);
}

TEST(InitCost, PicksPredictorWhenCheaper) {
  const LumaFrame ref = testing_support::smooth_frame(96, 96, 13);
  const LumaFrame cur = testing_support::shifted(ref, {5, -3});
  const CostParams params;
  const MbIndex mb{2, 2};
  const InitCost ic = init_cost(cur, mb, pad(ref), {5, -3}, params);
  EXPECT_EQ(ic.sp_used, 2);
  EXPECT_EQ(ic.mv, (MotionVector{5, -3}));
  EXPECT_EQ(ic.value.sad, 0);
  EXPECT_LE(ic.value.cost, cost(cur, mb, pad(ref), {}, {5, -3}, params).cost);

  // exhaustive scan: the planted MV is a SAD-0 candidate
  int zero_hits = 0;
  for (int dy = -32; dy <= 32; ++dy) {
    for (int dx = -32; dx <= 32; ++dx) zero_hits += testing_support::sad_oracle(cur, mb, ref, {dx, dy}) == 0;
  }
  EXPECT_GE(zero_hits, 1);
  EXPECT_EQ(testing_support::sad_oracle(cur, mb, ref, {5, -3}), 0);
}

TEST(InitCost, TieGoesToOrigin) {
  const LumaFrame f(32, 32, std::uint8_t{50});
  // flat frame with lambda 0: both candidates cost 0
  CostParams zero;
  zero.lambda_motion = 0.0;
  const InitCost ic = init_cost(f, {0, 0}, pad(f), {3, 3}, zero);
  EXPECT_EQ(ic.mv, (MotionVector{}));
  EXPECT_EQ(ic.sp_used, 2);
}

TEST(InitCost, ClampsPredictorIntoWindow) {
  const LumaFrame f = testing_support::random_frame(32, 32, 14);
  const InitCost ic = init_cost(f, {0, 0}, pad(f), {40, -50}, CostParams{});
  EXPECT_EQ(ic.sp_used, 2);
  EXPECT_LE(chebyshev(ic.mv), 32);
}

TEST(CostParams, Validation) {
  CostParams p;
  EXPECT_NO_THROW(p.validate());
  p.th1 = 6000;
  EXPECT_THROW(p.validate(), ConfigError);
  p = CostParams{};
  p.pac_threshold = -1;
  EXPECT_THROW(p.validate(), ConfigError);
  p = CostParams{};
  p.class_eps = -0.01;
  EXPECT_THROW(p.validate(), ConfigError);
  EXPECT_EQ(CostParams::for_qp(28), CostParams{});
}
