#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <optional>

#include "ccme/cost_model.hpp"
#include "ccme/motion_vector.hpp"
#include "ccme/shs_engine.hpp"
#include "ccme/video_io.hpp"

namespace ccme {

enum class MbClass : int { class1 = 1, class2 = 2, class3 = 3 };

constexpr std::size_t index_of(MbClass c) { return static_cast<std::size_t>(c) - 1; }
constexpr int number_of(MbClass c) { return static_cast<int>(c); }

template <class T>
using PerClass = std::array<T, 3>;

inline constexpr PerClass<int> kBasicLayerPerMb{6, 25, 6};
inline constexpr int kMaxSpPerMb = 250;
inline constexpr PerClass<int> kAdditionalMaxPerMb{kMaxSpPerMb - 6, kMaxSpPerMb - 25, kMaxSpPerMb - 6};
inline constexpr int kStepMin = 4;

// Mean kept as an exact (sum, count) pair so proportional shares floor exactly.
struct CostMean {
  std::int64_t sum = 0;
  std::int64_t count = 0;

  bool usable() const { return count > 0 && sum > 0; }
  double value() const { return count > 0 ? static_cast<double>(sum) / static_cast<double>(count) : 0.0; }
  void add(std::int64_t v) {
    sum += v;
    ++count;
  }

  friend bool operator==(const CostMean&, const CostMean&) = default;
};

using MvMap = std::map<MbIndex, MotionVector>;

struct PrevFrameStats {
  PerClass<int> nm_pre{};
  PerClass<std::int64_t> ca_pre{};
  PerClass<CostMean> avg_init_cost_pre{};
  MvMap mv_final_map;

  int total_mbs() const { return nm_pre[0] + nm_pre[1] + nm_pre[2]; }
  CostMean overall_init_mean() const {
    CostMean m;
    for (const auto& c : avg_init_cost_pre) {
      m.sum += c.sum;
      m.count += c.count;
    }
    return m;
  }
};

// Per-class tallies of the frame being coded.
struct FrameTally {
  PerClass<int> count{};
  PerClass<std::int64_t> sp{};
  PerClass<CostMean> init{};
  MvMap mv_final;

  void record(MbClass cls, MbIndex mb, int sp_used, int cost_init, MotionVector mv_final_mb) {
    const std::size_t i = index_of(cls);
    ++count[i];
    sp[i] += sp_used;
    init[i].add(cost_init);
    mv_final[mb] = mv_final_mb;
  }

  // Classes absent from this frame keep the previous mean init COST.
  PrevFrameStats finish(const PrevFrameStats& prev) const {
    PrevFrameStats out;
    out.nm_pre = count;
    out.ca_pre = sp;
    for (std::size_t i = 0; i < 3; ++i) {
      out.avg_init_cost_pre[i] = init[i].count > 0 ? init[i] : prev.avg_init_cost_pre[i];
    }
    out.mv_final_map = mv_final;
    return out;
  }
};

struct ClassBudgetState {
  std::int64_t c_f = 0;
  std::int64_t bl_f = 0;
  std::int64_t al_f = 0;
  bool sub_basic = false;
  PerClass<std::int64_t> bl_class{};
  PerClass<std::int64_t> al_class{};
  PerClass<int> bl_mb = kBasicLayerPerMb;
  PerClass<int> al_mb_max = kAdditionalMaxPerMb;
  PerClass<std::int64_t> ab{};
  PerClass<int> nm{};
  PerClass<CostMean> prev_avg_init{};
  FrameTally running;
};

struct MbBudget {
  int bl_cur = 0;
  int al_cur = 0;

  int c_cur() const { return bl_cur + al_cur; }
  friend bool operator==(const MbBudget&, const MbBudget&) = default;
};

// ---------------------------------------------------------------------------
// Classification

// Predictive-MV-accuracy classifier.
inline MbClass classify_pac(int cost_init, MotionVector pmv, MotionVector mv_pre_final, const CostParams& params) {
  if (cost_init < params.th1) return MbClass::class1;
  return chebyshev(pmv - mv_pre_final) > params.pac_threshold ? MbClass::class2 : MbClass::class3;
}

// Ground-truth classifier; needs COST_mid / COST_final from an unconstrained lower-path run.
inline MbClass classify_oracle(int cost_init, int cost_mid, int cost_final, const CostParams& params) {
  if (cost_init < params.th1) return MbClass::class1;
  const double c = params.class_eps * cost_mid;
  return static_cast<double>(std::abs(cost_mid - cost_final)) > c ? MbClass::class2 : MbClass::class3;
}

// ---------------------------------------------------------------------------
// Class-level allocation

inline ClassBudgetState cla(std::int64_t c_f, const PrevFrameStats& prev) {
  ClassBudgetState s;
  s.c_f = c_f;
  for (std::size_t i = 0; i < 3; ++i) {
    s.bl_class[i] = static_cast<std::int64_t>(s.bl_mb[i]) * prev.nm_pre[i];
    s.bl_f += s.bl_class[i];
  }
  s.al_f = c_f - s.bl_f;
  if (s.al_f < 0) {
    s.sub_basic = true;
    s.al_f = 0;
  }

  const std::int64_t ca23 = prev.ca_pre[1] + prev.ca_pre[2];
  const std::int64_t share2 = ca23 > 0 ? s.al_f * prev.ca_pre[1] / ca23 : 0;
  s.al_class[0] = 0;
  s.al_class[1] = std::min(share2, static_cast<std::int64_t>(s.al_mb_max[1]) * prev.nm_pre[1]);
  s.al_class[2] = s.al_f - s.al_class[1];

  s.ab = s.al_class;
  s.nm = prev.nm_pre;
  s.prev_avg_init = prev.avg_init_cost_pre;
  return s;
}

// floor((cost_init / mean) * ab / max(nm, 1)), clamped to [0, cap]. The mean
// falls back from this frame to the previous frame to a ratio of 1.
inline int proportional_share(int cost_init, const CostMean& current, const CostMean& previous, std::int64_t ab,
                              int nm, int cap) {
  if (ab <= 0 || cap <= 0) return 0;
  const std::int64_t denom_nm = std::max(nm, 1);
  const CostMean* mean = current.usable() ? &current : previous.usable() ? &previous : nullptr;
  std::int64_t share = 0;
  if (mean == nullptr) {
    share = ab / denom_nm;
  } else {
    const __int128 num = static_cast<__int128>(std::max(cost_init, 0)) * mean->count * ab;
    const __int128 den = static_cast<__int128>(mean->sum) * denom_nm;
    const __int128 q = num / den;
    share = q > cap ? cap : static_cast<std::int64_t>(q);
  }
  return static_cast<int>(std::clamp<std::int64_t>(share, 0, cap));
}

// MB-level allocation.
inline MbBudget mla(const ClassBudgetState& s, MbClass cls, int cost_init) {
  const std::size_t i = index_of(cls);
  MbBudget b;
  switch (cls) {
    case MbClass::class1:
      b.bl_cur = s.bl_mb[0];
      return b;
    case MbClass::class2:
      b.bl_cur = (s.ab[1] > 0 || s.nm[1] > 1) ? s.bl_mb[1] : s.bl_mb[2];
      break;
    case MbClass::class3:
      b.bl_cur = s.bl_mb[2];
      break;
  }
  b.al_cur = proportional_share(cost_init, s.running.init[i], s.prev_avg_init[i], s.ab[i], s.nm[i], s.al_mb_max[i]);
  return b;
}

struct MbRecord {
  MbIndex mb;
  MbClass cls = MbClass::class1;
  int ca_used = 0;   // SPs actually consumed
  int bl_given = 0;  // basic layer granted
  int cost_init = 0;
  MotionVector mv_final;
};

// Only the coded MB's class counters move.
inline void update_after_mb(ClassBudgetState& s, const MbRecord& r) {
  const std::size_t i = index_of(r.cls);
  s.ab[i] -= r.ca_used - r.bl_given;
  s.nm[i] = std::max(s.nm[i] - 1, 0);
  s.running.record(r.cls, r.mb, r.ca_used, r.cost_init, r.mv_final);
}

// Step-level allocation: 4 SPs to small local search, 32% / 64% of the rest
// to cross / multi-hexagon sub-steps of 4 / 16 SPs.
inline StepPlan sla(int c_cur) {
  StepPlan p;
  p.c_small_local = kStepMin;
  const int rest = std::max(c_cur - kStepMin, 0);
  p.ns_cross = (32 * rest) / (100 * kCrossSubStep);
  p.ns_multihex = (64 * rest) / (100 * kMultiHexSubStep);
  p.allow_small_hex = p.ns_cross + p.ns_multihex > 1;
  p.allow_small_diamond = p.ns_cross > 1;
  return p;
}

inline PrevFrameStats end_of_frame(const ClassBudgetState& s, const PrevFrameStats& prev) {
  return s.running.finish(prev);
}

// ---------------------------------------------------------------------------
// Frame guard

// Keeps a frame within its SP budget: the MB being coded may spend whatever
// the frame has left minus a 6-SP reserve for every MB still to come.
class FrameGuard {
 public:
  static constexpr int kReservePerMb = 6;

  FrameGuard(std::int64_t budget, int mbs) : budget_(budget), remaining_mbs_(mbs) {}

  void charge(std::int64_t sp) { used_ += sp; }

  int cap_for_next_mb() const {
    const std::int64_t reserve = static_cast<std::int64_t>(kReservePerMb) * std::max(remaining_mbs_ - 1, 0);
    const std::int64_t cap = budget_ - used_ - reserve;
    return static_cast<int>(std::clamp<std::int64_t>(cap, 1, kNoSpCap - 1));
  }

  void finish_mb(int sp) {
    used_ += sp;
    remaining_mbs_ = std::max(remaining_mbs_ - 1, 0);
  }

  std::int64_t used() const { return used_; }
  std::int64_t budget() const { return budget_; }
  bool feasible() const { return budget_ - used_ >= static_cast<std::int64_t>(kReservePerMb) * remaining_mbs_; }

 private:
  std::int64_t budget_;
  std::int64_t used_ = 0;
  int remaining_mbs_;
};

}  // namespace ccme
