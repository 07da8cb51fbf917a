#pragma once

#include <array>
#include <bitset>
#include <climits>
#include <cstdlib>
#include <optional>
#include <span>
#include <tuple>
#include <vector>

#include "ccme/cost_model.hpp"
#include "ccme/motion_vector.hpp"
#include "ccme/video_io.hpp"

namespace ccme {

inline constexpr int kCrossSubStep = 4;
inline constexpr int kMultiHexSubStep = 16;
inline constexpr int kMultiHexRings = kSearchRange / 4;
inline constexpr int kRefineIterations = 16;
inline constexpr int kNoSpCap = INT_MAX;

// Per-MB step budget produced by step-level allocation.
struct StepPlan {
  int c_small_local = 4;
  int ns_cross = 0;
  int ns_multihex = 0;
  bool allow_small_hex = false;
  bool allow_small_diamond = false;
  bool unconstrained = false;
  // Hard ceiling on SPs for the whole MB. Set by the frame guard; never binds
  // when the frame budget has room.
  int sp_cap = kNoSpCap;

  static StepPlan full() {
    StepPlan p;
    p.ns_cross = kSearchRange / 2;
    p.ns_multihex = kMultiHexRings;
    p.allow_small_hex = p.allow_small_diamond = p.unconstrained = true;
    return p;
  }

  friend bool operator==(const StepPlan&, const StepPlan&) = default;
};

enum class SearchPath { upper, lower };

struct SearchOutcome {
  MotionVector mv_final;
  int cost_init = 0;
  int cost_mid = 0;
  int cost_final = 0;
  int sad_final = 0;
  int sp_used = 0;
  SearchPath path = SearchPath::upper;
  MotionVector pmv;
  MotionVector mv_init;
};

// Candidate evaluation state for one MB. Every distinct in-window candidate
// costs one SP; re-proposals are free.
class SearchContext {
 public:
  SearchContext(const LumaFrame& cur, const PaddedFrame& ref, MbIndex mb, MotionVector pmv, const CostParams& params)
      : cur_(&cur), ref_(&ref), mb_(mb), pmv_(clamp_to_window(pmv)), params_(&params) {}

  const LumaFrame& cur() const { return *cur_; }
  const PaddedFrame& ref() const { return *ref_; }
  MbIndex mb() const { return mb_; }
  MotionVector pmv() const { return pmv_; }
  const CostParams& params() const { return *params_; }

  // SAD at mv already paid for elsewhere (e.g. a prepass); evaluating mv later is free.
  void preload(MotionVector mv, int sad) {
    const std::size_t i = slot(mv);
    if (!visited_[i]) known_[i] = true;
    known_sad_[i] = sad;
  }

  void set_sp_cap(int cap) { sp_cap_ = cap; }
  int sp_cap() const { return sp_cap_; }
  bool exhausted() const { return sp_used_ >= sp_cap_; }

  // Returns true if the candidate was newly evaluated.
  bool try_candidate(MotionVector mv) {
    if (!in_window(mv)) return false;
    const std::size_t i = slot(mv);
    if (visited_[i]) return false;
    int sad = 0;
    if (known_[i]) {
      sad = known_sad_[i];
      known_[i] = false;
    } else {
      if (exhausted()) return false;
      sad = sad16(*cur_, mb_, *ref_, mv);
      ++sp_used_;
    }
    visited_[i] = true;
    const CostValue c = cost_from_sad(sad, mv, pmv_, *params_);
    if (!best_ || c.cost < best_->second.cost) best_ = {mv, c};
    return true;
  }

  // Initial candidates: (0,0) then pmv. Idempotent.
  const InitCost& init() {
    if (!init_) {
      try_candidate({});
      try_candidate(pmv_);
      if (!best_) {  // zero cap: (0,0) is still evaluated so the MB has a result
        const int saved = sp_cap_;
        sp_cap_ = kNoSpCap;
        try_candidate({});
        sp_cap_ = saved;
      }
      init_ = InitCost{best_->second, best_->first, sp_used_};
    }
    return *init_;
  }

  bool has_init() const { return init_.has_value(); }
  bool visited(MotionVector mv) const { return in_window(mv) && visited_[slot(mv)]; }
  MotionVector best_mv() const { return best_->first; }
  const CostValue& best_cost() const { return best_->second; }
  int sp_used() const { return sp_used_; }
  int visited_count() const { return static_cast<int>(visited_.count()); }

 private:
  static std::size_t slot(MotionVector mv) {
    return static_cast<std::size_t>((mv.dy + kSearchRange) * kWindowSide + (mv.dx + kSearchRange));
  }

  const LumaFrame* cur_;
  const PaddedFrame* ref_;
  MbIndex mb_;
  MotionVector pmv_;
  const CostParams* params_;
  std::bitset<kWindowSide * kWindowSide> visited_;
  std::bitset<kWindowSide * kWindowSide> known_;
  std::array<int, kWindowSide * kWindowSide> known_sad_{};
  std::optional<std::pair<MotionVector, CostValue>> best_;
  std::optional<InitCost> init_;
  int sp_used_ = 0;
  int sp_cap_ = kNoSpCap;
};

// ---------------------------------------------------------------------------
// Patterns

inline constexpr std::array<MotionVector, 4> kSmallDiamond{{{0, -1}, {-1, 0}, {1, 0}, {0, 1}}};
inline constexpr std::array<MotionVector, 6> kSmallHexagon{{{-2, 0}, {-1, -2}, {1, -2}, {2, 0}, {1, 2}, {-1, 2}}};

// 16-point multi-hexagon ring at k = 1; ring k is this set scaled by k.
inline constexpr std::array<MotionVector, 16> kMultiHexRing{{{0, 4},
                                                             {-2, 3},
                                                             {-4, 2},
                                                             {-4, 1},
                                                             {-4, 0},
                                                             {-4, -1},
                                                             {-4, -2},
                                                             {-2, -3},
                                                             {0, -4},
                                                             {2, -3},
                                                             {4, -2},
                                                             {4, -1},
                                                             {4, 0},
                                                             {4, 1},
                                                             {4, 2},
                                                             {2, 3}}};

// Cross candidates at strides 2, 4, ..., range, four per stride, window-clipped
// and re-packed into sub-steps of four.
inline std::vector<std::vector<MotionVector>> cross_points(MotionVector center, int range = kSearchRange) {
  std::vector<MotionVector> flat;
  for (int s = 2; s <= range; s += 2) {
    for (MotionVector d : {MotionVector{s, 0}, MotionVector{-s, 0}, MotionVector{0, s}, MotionVector{0, -s}}) {
      const MotionVector mv = center + d;
      if (in_window(mv)) flat.push_back(mv);
    }
  }
  std::vector<std::vector<MotionVector>> steps;
  for (std::size_t i = 0; i < flat.size(); i += kCrossSubStep) {
    const auto end = std::min(flat.size(), i + kCrossSubStep);
    steps.emplace_back(flat.begin() + static_cast<std::ptrdiff_t>(i), flat.begin() + static_cast<std::ptrdiff_t>(end));
  }
  return steps;
}

inline std::vector<MotionVector> hex_points(MotionVector center, int k, bool clip = true) {
  std::vector<MotionVector> out;
  out.reserve(kMultiHexRing.size());
  for (MotionVector d : kMultiHexRing) {
    const MotionVector mv = center + d * k;
    if (!clip || in_window(mv)) out.push_back(mv);
  }
  return out;
}

enum class RefinePattern { small_hexagon, small_diamond };

// Recentre on the best candidate until the centre stays best or the iteration cap.
// Returns iterations performed.
inline int refine(SearchContext& ctx, RefinePattern pattern, int max_iterations = kRefineIterations) {
  const std::span<const MotionVector> offsets =
      pattern == RefinePattern::small_hexagon ? std::span<const MotionVector>(kSmallHexagon)
                                              : std::span<const MotionVector>(kSmallDiamond);
  int iterations = 0;
  while (iterations < max_iterations && !ctx.exhausted()) {
    ++iterations;
    const MotionVector center = ctx.best_mv();
    for (MotionVector d : offsets) ctx.try_candidate(center + d);
    if (ctx.best_mv() == center) break;
  }
  return iterations;
}

inline void small_local_search(SearchContext& ctx, MotionVector center, int points = 4) {
  const int n = std::clamp(points, 0, static_cast<int>(kSmallDiamond.size()));
  for (int i = 0; i < n; ++i) ctx.try_candidate(center + kSmallDiamond[static_cast<std::size_t>(i)]);
}

// SHS control flow: upper path (init + local search) when init COST < th1,
// otherwise local search, th2-gated cross and multi-hexagon, then refinements.
inline SearchOutcome search_mb(SearchContext& ctx, const StepPlan& plan) {
  if (plan.sp_cap != kNoSpCap) ctx.set_sp_cap(plan.sp_cap);
  const InitCost init = ctx.init();
  const CostParams& params = ctx.params();

  SearchOutcome out;
  out.cost_init = init.value.cost;
  out.pmv = ctx.pmv();
  out.mv_init = init.mv;

  if (init.value.cost < params.th1) {
    out.path = SearchPath::upper;
    small_local_search(ctx, init.mv);
    out.cost_mid = ctx.best_cost().cost;
  } else {
    out.path = SearchPath::lower;
    small_local_search(ctx, init.mv, plan.unconstrained ? 4 : plan.c_small_local);
    out.cost_mid = ctx.best_cost().cost;

    if (out.cost_mid >= params.th2) {
      const auto cross = cross_points(ctx.best_mv());
      const std::size_t n_cross =
          plan.unconstrained ? cross.size() : std::min(cross.size(), static_cast<std::size_t>(std::max(plan.ns_cross, 0)));
      for (std::size_t s = 0; s < n_cross; ++s) {
        for (MotionVector mv : cross[s]) ctx.try_candidate(mv);
      }
      const MotionVector hex_center = ctx.best_mv();
      const int rings = plan.unconstrained ? kMultiHexRings : std::clamp(plan.ns_multihex, 0, kMultiHexRings);
      for (int k = 1; k <= rings; ++k) {
        for (MotionVector mv : hex_points(hex_center, k)) ctx.try_candidate(mv);
      }
    }
    if (plan.unconstrained || plan.allow_small_hex) refine(ctx, RefinePattern::small_hexagon);
    if (plan.unconstrained || plan.allow_small_diamond) refine(ctx, RefinePattern::small_diamond);
  }

  out.mv_final = ctx.best_mv();
  out.cost_final = ctx.best_cost().cost;
  out.sad_final = ctx.best_cost().sad;
  out.sp_used = ctx.sp_used();
  return out;
}

// ---------------------------------------------------------------------------
// Exhaustive oracle

// SAD at every MV of the +/-32 window for one MB.
class SadSurface {
 public:
  SadSurface(const LumaFrame& cur, MbIndex mb, const PaddedFrame& ref) {
    for (int dy = -kSearchRange; dy <= kSearchRange; ++dy) {
      for (int dx = -kSearchRange; dx <= kSearchRange; ++dx) sad_[slot({dx, dy})] = sad16(cur, mb, ref, {dx, dy});
    }
  }

  int at(MotionVector mv) const { return sad_[slot(mv)]; }

 private:
  static std::size_t slot(MotionVector mv) {
    return static_cast<std::size_t>((mv.dy + kSearchRange) * kWindowSide + (mv.dx + kSearchRange));
  }
  std::array<int, kWindowSide * kWindowSide> sad_{};
};

// COST-minimal MV over the window; ties prefer smaller |dy|, |dx|, then dy, dx.
inline SearchOutcome full_search(const SadSurface& surface, MotionVector pmv, const CostParams& params) {
  pmv = clamp_to_window(pmv);
  SearchOutcome out;
  out.pmv = pmv;
  out.path = SearchPath::lower;
  out.sp_used = kWindowSide * kWindowSide;

  auto key = [](MotionVector v, int c) { return std::make_tuple(c, std::abs(v.dy), std::abs(v.dx), v.dy, v.dx); };
  std::optional<std::pair<MotionVector, CostValue>> best;
  for (int dy = -kSearchRange; dy <= kSearchRange; ++dy) {
    for (int dx = -kSearchRange; dx <= kSearchRange; ++dx) {
      const MotionVector mv{dx, dy};
      const CostValue c = cost_from_sad(surface.at(mv), mv, pmv, params);
      if (!best || key(mv, c.cost) < key(best->first, best->second.cost)) best = {mv, c};
    }
  }

  const int c00 = cost_from_sad(surface.at({}), {}, pmv, params).cost;
  const int cp = cost_from_sad(surface.at(pmv), pmv, pmv, params).cost;
  out.mv_init = cp < c00 ? pmv : MotionVector{};
  out.cost_init = std::min(c00, cp);
  out.mv_final = best->first;
  out.cost_final = out.cost_mid = best->second.cost;
  out.sad_final = best->second.sad;
  return out;
}

inline SearchOutcome full_search_oracle(const SearchContext& ctx) {
  return full_search(SadSurface(ctx.cur(), ctx.mb(), ctx.ref()), ctx.pmv(), ctx.params());
}

}  // namespace ccme
