#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "ccme/ccme_allocator.hpp"
#include "ccme/cost_model.hpp"
#include "ccme/video_io.hpp"

namespace ccme {

inline constexpr int kBaselineBasicPerMb = 6;
inline constexpr int kBaselineAdditionalMax = kMaxSpPerMb - kBaselineBasicPerMb;

// COST-only allocation: one classless pool with the same basic/additional layering.
struct PoolState {
  std::int64_t ab = 0;
  int nm = 0;
  CostMean running;
  CostMean previous;
  bool sub_basic = false;

  static PoolState start(std::int64_t c_f, int mbs, const CostMean& prev_mean) {
    PoolState p;
    p.ab = c_f - static_cast<std::int64_t>(kBaselineBasicPerMb) * mbs;
    if (p.ab < 0) {
      p.ab = 0;
      p.sub_basic = true;
    }
    p.nm = mbs;
    p.previous = prev_mean;
    return p;
  }
};

inline MbBudget cost_only_allocate(const PoolState& pool, int cost_init) {
  return {kBaselineBasicPerMb,
          proportional_share(cost_init, pool.running, pool.previous, pool.ab, pool.nm, kBaselineAdditionalMax)};
}

inline void cost_only_update(PoolState& pool, int ca_used, int bl_given, int cost_init) {
  pool.ab -= ca_used - bl_given;
  pool.nm = std::max(pool.nm - 1, 0);
  pool.running.add(cost_init);
}

// (0,0)-SAD prepass allocation. Each prepass SAD is charged one SP.
struct PrepassTable {
  int mb_cols = 0;
  int mb_rows = 0;
  std::vector<int> sad00;
  std::int64_t sad_total = 0;
  std::int64_t additional_budget = 0;
  int charged_sp = 0;
  bool sub_basic = false;

  int sad_at(MbIndex mb) const { return sad00[static_cast<std::size_t>(mb.row * mb_cols + mb.col)]; }
};

inline PrepassTable zero_sad_prepass(const LumaFrame& frame, const PaddedFrame& ref, std::int64_t c_f) {
  PrepassTable t;
  t.mb_cols = frame.mb_cols();
  t.mb_rows = frame.mb_rows();
  const int nmb = frame.mb_count();
  t.sad00.reserve(static_cast<std::size_t>(nmb));
  for (int row = 0; row < t.mb_rows; ++row) {
    for (int col = 0; col < t.mb_cols; ++col) {
      t.sad00.push_back(sad16(frame, {col, row}, ref, {}));
      t.sad_total += t.sad00.back();
    }
  }
  t.charged_sp = nmb;
  t.additional_budget = c_f - static_cast<std::int64_t>(kBaselineBasicPerMb) * nmb - nmb;
  if (t.additional_budget < 0) {
    t.additional_budget = 0;
    t.sub_basic = true;
  }
  return t;
}

inline MbBudget zero_sad_allocate(const PrepassTable& t, MbIndex mb) {
  MbBudget b{kBaselineBasicPerMb, 0};
  if (t.sad_total > 0) {
    const std::int64_t share = t.additional_budget * t.sad_at(mb) / t.sad_total;
    b.al_cur = static_cast<int>(std::min<std::int64_t>(share, kBaselineAdditionalMax));
  }
  return b;
}

}  // namespace ccme
