#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <optional>

#include "ccme/errors.hpp"
#include "ccme/motion_vector.hpp"
#include "ccme/video_io.hpp"

namespace ccme {

// Lagrange multiplier for the motion rate term, sqrt(0.85 * 2^((qp - 12) / 3)).
inline double lambda_for_qp(int qp) {
  if (qp < 0 || qp > 51) throw ConfigError("qp must be in [0, 51]");
  return std::sqrt(0.85 * std::exp2((qp - 12) / 3.0));
}

struct CostParams {
  int qp = 28;
  double lambda_motion = lambda_for_qp(28);
  int th1 = 1000;            // upper/lower path gate on init COST
  int th2 = 5000;            // cross + multi-hexagon gate on COST after small local search
  double class_eps = 0.0;    // ground-truth class threshold as a fraction of COST_mid
  int pac_threshold = 1;     // integer-pel PMV accuracy threshold

  static CostParams for_qp(int qp) {
    CostParams p;
    p.qp = qp;
    p.lambda_motion = lambda_for_qp(qp);
    return p;
  }

  void validate() const {
    if (qp < 0 || qp > 51) throw ConfigError("qp must be in [0, 51]");
    if (!(lambda_motion >= 0.0)) throw ConfigError("lambda_motion must be >= 0");
    if (th1 > th2) throw ConfigError("th1 must not exceed th2");
    if (!(class_eps >= 0.0)) throw ConfigError("class_eps must be >= 0");
    if (pac_threshold < 0) throw ConfigError("pac threshold must be >= 0");
  }

  friend bool operator==(const CostParams&, const CostParams&) = default;
};

struct CostValue {
  int cost = 0;
  int sad = 0;
  int rate_bits = 0;

  friend bool operator==(const CostValue&, const CostValue&) = default;
};

// 16x16 SAD between the current MB and the reference block displaced by mv.
inline int sad16(const LumaFrame& cur, MbIndex mb, const PaddedFrame& ref, MotionVector mv) {
  const int x0 = mb.x();
  const int y0 = mb.y();
  const std::uint8_t* r = ref.at_ptr(x0 + mv.dx, y0 + mv.dy);
  int sad = 0;
  for (int y = 0; y < kMbSize; ++y, r += ref.stride()) {
    const std::uint8_t* c = cur.row(y0 + y).data() + x0;
    for (int x = 0; x < kMbSize; ++x) sad += std::abs(int{c[x]} - int{r[x]});
  }
  return sad;
}

// Order-0 exp-Golomb length of one MV differential component in quarter-pel units.
inline int mvd_component_bits(int d_integer_pel) {
  const long v = 4L * d_integer_pel;
  const auto k = static_cast<unsigned long>(v <= 0 ? -2 * v : 2 * v - 1);
  return 2 * (static_cast<int>(std::bit_width(k + 1)) - 1) + 1;
}

inline int mv_rate_bits(MotionVector mv, MotionVector pmv) {
  return mvd_component_bits(mv.dx - pmv.dx) + mvd_component_bits(mv.dy - pmv.dy);
}

// lambda * bits rounded half up.
inline int rate_cost(double lambda, int bits) {
  return static_cast<int>(std::floor(lambda * bits + 0.5));
}

inline CostValue cost_from_sad(int sad, MotionVector mv, MotionVector pmv, const CostParams& params) {
  const int bits = mv_rate_bits(mv, pmv);
  return {sad + rate_cost(params.lambda_motion, bits), sad, bits};
}

inline CostValue cost(const LumaFrame& cur, MbIndex mb, const PaddedFrame& ref, MotionVector mv,
                      MotionVector pmv, const CostParams& params) {
  return cost_from_sad(sad16(cur, mb, ref, mv), mv, pmv, params);
}

// Component-wise median of the left / top / top-right neighbour MVs.
// Missing neighbours count as (0,0) unless exactly one neighbour exists.
inline MotionVector median_pmv(std::optional<MotionVector> left, std::optional<MotionVector> top,
                               std::optional<MotionVector> topright) {
  const int present = int{left.has_value()} + int{top.has_value()} + int{topright.has_value()};
  if (present == 0) return {};
  if (present == 1) return left ? *left : top ? *top : *topright;
  const MotionVector a = left.value_or(MotionVector{});
  const MotionVector b = top.value_or(MotionVector{});
  const MotionVector c = topright.value_or(MotionVector{});
  auto med = [](int x, int y, int z) { return std::max(std::min(x, y), std::min(std::max(x, y), z)); };
  return {med(a.dx, b.dx, c.dx), med(a.dy, b.dy, c.dy)};
}

struct InitCost {
  CostValue value;
  MotionVector mv;
  int sp_used = 0;
};

// min(COST(0,0), COST(pmv)); (0,0) wins ties. pmv is clamped to the search window.
inline InitCost init_cost(const LumaFrame& cur, MbIndex mb, const PaddedFrame& ref, MotionVector pmv,
                          const CostParams& params) {
  const MotionVector p = clamp_to_window(pmv);
  InitCost out{cost(cur, mb, ref, {}, p, params), {}, 1};
  if (p != MotionVector{}) {
    ++out.sp_used;
    const CostValue at_pmv = cost(cur, mb, ref, p, p, params);
    if (at_pmv.cost < out.value.cost) {
      out.value = at_pmv;
      out.mv = p;
    }
  }
  return out;
}

}  // namespace ccme
