#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <future>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "ccme/baselines.hpp"
#include "ccme/ccme_allocator.hpp"
#include "ccme/cost_model.hpp"
#include "ccme/errors.hpp"
#include "ccme/shs_engine.hpp"
#include "ccme/video_io.hpp"

namespace ccme {

enum class Method { shs, ccme, cost_only, zero_sad, full_search };
enum class InputFormat { y4m, yuv420, synth };

inline std::string_view to_string(Method m) {
  switch (m) {
    case Method::shs: return "shs";
    case Method::ccme: return "ccme";
    case Method::cost_only: return "cost_only";
    case Method::zero_sad: return "zero_sad";
    case Method::full_search: return "full_search";
  }
  return "?";
}

inline Method parse_method(std::string_view s) {
  for (Method m : {Method::shs, Method::ccme, Method::cost_only, Method::zero_sad, Method::full_search}) {
    if (s == to_string(m)) return m;
  }
  throw ConfigError("unknown method '" + std::string(s) + "'");
}

inline bool is_budgeted(Method m) { return m == Method::ccme || m == Method::cost_only || m == Method::zero_sad; }

inline std::string_view to_string(InputFormat f) {
  switch (f) {
    case InputFormat::y4m: return "y4m";
    case InputFormat::yuv420: return "yuv420";
    case InputFormat::synth: return "synth";
  }
  return "?";
}

inline InputFormat parse_format(std::string_view s) {
  if (s == "y4m") return InputFormat::y4m;
  if (s == "yuv420") return InputFormat::yuv420;
  if (s == "synth") return InputFormat::synth;
  throw ConfigError("unknown input format '" + std::string(s) + "'");
}

inline std::string_view class_name(MbClass c) {
  switch (c) {
    case MbClass::class1: return "1";
    case MbClass::class2: return "2";
    case MbClass::class3: return "3";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Synthetic presets

// Mixed content: quiet static background (class 1), a grainy static textured
// block whose cost stays high at the true MV (class 3), a panning block, and
// an erratically jittering block (class 2).
inline SynthSpec acceptance_sequence(std::uint64_t seed = 1) {
  SynthSpec s;
  s.width = 128;
  s.height = 96;
  s.frames = 30;
  s.seed = seed;
  s.noise_amplitude = 2;
  s.background = {TextureKind::noise, 110, 30, 16, 2};

  SynthLayer grainy;
  grainy.texture = {TextureKind::noise, 140, 50, 4, 10};
  grainy.region = {0, 48, 64, 48};
  grainy.grain = 30;
  s.layers.push_back(grainy);

  SynthLayer pan;
  pan.texture = {TextureKind::noise, 120, 60, 8, 4};
  pan.region = {40, 4, 48, 36};
  for (int i = 0; i < 7; ++i) pan.motion.push_back({2, 1});
  for (int i = 0; i < 7; ++i) pan.motion.push_back({-2, -1});
  pan.grain = 4;
  s.layers.push_back(pan);

  SynthLayer mover;
  mover.texture = {TextureKind::noise, 90, 70, 6, 6};
  mover.region = {80, 52, 40, 36};
  mover.jitter = 10;
  mover.grain = 3;
  s.layers.push_back(mover);
  return s;
}

// Textured static background under sensor noise plus one erratic mover.
inline SynthSpec classification_sequence(std::uint64_t seed = 1) {
  SynthSpec s;
  s.width = 128;
  s.height = 96;
  s.frames = 30;
  s.seed = seed;
  s.noise_amplitude = 8;
  s.background = {TextureKind::noise, 120, 40, 6, 4};

  SynthLayer mover;
  mover.texture = {TextureKind::noise, 100, 70, 8, 6};
  mover.region = {40, 24, 48, 48};
  mover.jitter = 8;
  s.layers.push_back(mover);
  return s;
}

inline SynthSpec static_sequence(std::uint64_t seed = 1) {
  SynthSpec s;
  s.width = 64;
  s.height = 64;
  s.frames = 5;
  s.seed = seed;
  s.background = {TextureKind::flat, 128, 0, 8, 0};
  return s;
}

inline SynthSpec preset_sequence(std::string_view name, std::uint64_t seed) {
  if (name == "acceptance") return acceptance_sequence(seed);
  if (name == "classification") return classification_sequence(seed);
  if (name == "static") return static_sequence(seed);
  throw ConfigError("unknown synthetic preset '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// Configuration

struct RunConfig {
  std::string input = "acceptance";
  InputFormat format = InputFormat::synth;
  int width = 0;
  int height = 0;
  int frames = 0;  // 0 = every frame of the input
  CostParams params;
  Method method = Method::ccme;
  double budget_scale = 100.0;  // percent of the calibrated SHS SPs per frame
  std::vector<double> scales{100.0, 60.0, 40.0};
  std::vector<Method> methods{Method::ccme, Method::cost_only, Method::zero_sad};
  std::uint64_t seed = 1;
  std::filesystem::path out_dir = "out";
  bool strict = false;
  std::optional<SynthSpec> synth;  // explicit spec from a config file; overrides presets

  void validate() const {
    params.validate();
    if (!(budget_scale > 0.0 && budget_scale <= 400.0)) throw ConfigError("scale must be in (0, 400]");
    for (double s : scales) {
      if (!(s > 0.0 && s <= 400.0)) throw ConfigError("scales must be in (0, 400]");
    }
    if (frames < 0) throw ConfigError("frames must be >= 0");
    if (format == InputFormat::yuv420 && (width <= 0 || height <= 0)) {
      throw ConfigError("yuv420 input needs --width and --height");
    }
  }
};

inline SynthSpec synth_spec_for(const RunConfig& config) {
  SynthSpec spec = config.synth ? *config.synth : preset_sequence(config.input, config.seed);
  if (config.frames > 0) spec.frames = config.frames;
  return spec;
}

inline std::vector<LumaFrame> load_sequence(const RunConfig& config) {
  std::vector<LumaFrame> frames;
  switch (config.format) {
    case InputFormat::synth:
      frames = synthesize(synth_spec_for(config)).frames;
      break;
    case InputFormat::y4m:
      frames = load_y4m(config.input);
      break;
    case InputFormat::yuv420:
      frames = load_raw_yuv420(config.input, config.width, config.height);
      break;
  }
  if (config.frames > 0 && static_cast<int>(frames.size()) > config.frames) frames.resize(static_cast<std::size_t>(config.frames));
  if (frames.size() < 2) throw InputError("need at least two frames (one reference, one P frame)");
  return frames;
}

// ---------------------------------------------------------------------------
// Reports

struct MbLogRow {
  int frame = 0;
  MbIndex mb;
  MbClass cls = MbClass::class1;  // PAC class (reported for every method)
  MbBudget budget;
  StepPlan plan;
  int sp_used = 0;
  SearchPath path = SearchPath::upper;
  MotionVector pmv;
  MotionVector mv_pre;
  MotionVector mv_init;
  MotionVector mv_final;
  int cost_init = 0;
  int cost_mid = 0;
  int cost_final = 0;
};

struct FrameRow {
  int frame = 0;
  bool seed = false;
  bool budgeted = false;
  std::int64_t budget_sp = 0;
  std::int64_t actual_sp = 0;  // including prepass charges
  std::int64_t prepass_sp = 0;
  int mbs = 0;
  PerClass<int> class_mbs{};
  PerClass<std::int64_t> class_sp{};
  std::int64_t total_cost = 0;
  double mean_cost = 0.0;
  bool sub_basic = false;
};

struct Aggregates {
  int frames = 0;
  double avg_actual_sp = 0.0;
  double avg_sp_per_mb = 0.0;
  std::int64_t total_cost = 0;
  std::int64_t budgeted_total_cost = 0;  // non-seed frames
  PerClass<double> class_pct{};
  int violations = 0;
  int sub_basic_frames = 0;
};

struct SequenceReport {
  Method method = Method::shs;
  double scale = 100.0;
  double reference_sp_per_frame = 0.0;
  std::int64_t budget_sp = 0;
  CostParams params;
  std::string input;
  std::vector<FrameRow> rows;
  std::vector<MbLogRow> mb_log;

  Aggregates aggregates() const {
    Aggregates a;
    a.frames = static_cast<int>(rows.size());
    std::int64_t sp = 0;
    std::int64_t mbs = 0;
    PerClass<std::int64_t> cls{};
    for (const auto& r : rows) {
      sp += r.actual_sp;
      mbs += r.mbs;
      a.total_cost += r.total_cost;
      if (!r.seed) a.budgeted_total_cost += r.total_cost;
      for (std::size_t i = 0; i < 3; ++i) cls[i] += r.class_mbs[i];
      if (r.budgeted && r.actual_sp > r.budget_sp) ++a.violations;
      if (r.sub_basic) ++a.sub_basic_frames;
    }
    if (a.frames > 0) a.avg_actual_sp = static_cast<double>(sp) / a.frames;
    if (mbs > 0) {
      a.avg_sp_per_mb = static_cast<double>(sp) / static_cast<double>(mbs);
      for (std::size_t i = 0; i < 3; ++i) a.class_pct[i] = 100.0 * static_cast<double>(cls[i]) / static_cast<double>(mbs);
    }
    return a;
  }
};

// Per-MB hook used by evaluations that need a parallel search on the same inputs.
struct MbEvent {
  int frame = 0;
  bool seed = false;
  const LumaFrame* cur = nullptr;
  const PaddedFrame* ref = nullptr;
  MbIndex mb;
  MotionVector pmv;
  InitCost init;
  MbClass pac = MbClass::class1;
  MotionVector mv_pre;
  const SearchOutcome* outcome = nullptr;
};
using MbObserver = std::function<void(const MbEvent&)>;

// ---------------------------------------------------------------------------
// Sequence runner

namespace detail {

inline MotionVector predict_mv(const std::vector<std::optional<MotionVector>>& grid, int cols, MbIndex mb) {
  auto at = [&](int c, int r) -> std::optional<MotionVector> {
    if (c < 0 || r < 0 || c >= cols) return std::nullopt;
    return grid[static_cast<std::size_t>(r * cols + c)];
  };
  return median_pmv(at(mb.col - 1, mb.row), at(mb.col, mb.row - 1), at(mb.col + 1, mb.row - 1));
}

}  // namespace detail

// Frame 0 is the reference only; frame 1 is the seed P frame, searched by
// unconstrained SHS; later frames use `method` under `frame_budget`.
inline SequenceReport run_frames(std::span<const LumaFrame> frames, Method method, const CostParams& params,
                                 std::optional<std::int64_t> frame_budget, const MbObserver& observer = {}) {
  if (is_budgeted(method) && !frame_budget) throw ConfigError("budgeted method needs a frame budget");
  SequenceReport report;
  report.method = method;
  report.params = params;
  report.budget_sp = frame_budget.value_or(0);

  PrevFrameStats prev;
  for (std::size_t f = 1; f < frames.size(); ++f) {
    const LumaFrame& cur = frames[f];
    const PaddedFrame ref = pad(frames[f - 1]);
    const int cols = cur.mb_cols();
    const int nmb = cur.mb_count();
    const bool seed = f == 1;
    const bool budgeted = is_budgeted(method) && !seed;

    FrameRow row;
    row.frame = static_cast<int>(f);
    row.seed = seed;
    row.budgeted = budgeted;
    row.mbs = nmb;

    std::optional<ClassBudgetState> class_state;
    std::optional<PoolState> pool;
    std::optional<PrepassTable> prepass;
    std::optional<FrameGuard> guard;
    FrameTally tally;
    if (budgeted) {
      row.budget_sp = *frame_budget;
      guard.emplace(*frame_budget, nmb);
      switch (method) {
        case Method::ccme:
          class_state = cla(*frame_budget, prev);
          row.sub_basic = class_state->sub_basic;
          break;
        case Method::cost_only:
          pool = PoolState::start(*frame_budget, nmb, prev.overall_init_mean());
          row.sub_basic = pool->sub_basic;
          break;
        case Method::zero_sad:
          prepass = zero_sad_prepass(cur, ref, *frame_budget);
          row.prepass_sp = prepass->charged_sp;
          row.sub_basic = prepass->sub_basic;
          guard->charge(prepass->charged_sp);
          break;
        default:
          break;
      }
      if (!guard->feasible()) row.sub_basic = true;
    }

    std::vector<std::optional<MotionVector>> grid(static_cast<std::size_t>(nmb));
    for (int r = 0; r < cur.mb_rows(); ++r) {
      for (int c = 0; c < cols; ++c) {
        const MbIndex mb{c, r};
        const MotionVector pmv = detail::predict_mv(grid, cols, mb);
        SearchContext ctx(cur, ref, mb, pmv, params);
        if (prepass) ctx.preload({}, prepass->sad_at(mb));
        if (guard) ctx.set_sp_cap(guard->cap_for_next_mb());
        const InitCost init = ctx.init();
        const auto pre_it = prev.mv_final_map.find(mb);
        const MotionVector mv_pre = pre_it == prev.mv_final_map.end() ? MotionVector{} : pre_it->second;
        const MbClass cls = classify_pac(init.value.cost, ctx.pmv(), mv_pre, params);

        MbBudget budget;
        StepPlan plan = StepPlan::full();
        if (budgeted) {
          if (method == Method::ccme) budget = mla(*class_state, cls, init.value.cost);
          else if (method == Method::cost_only) budget = cost_only_allocate(*pool, init.value.cost);
          else budget = zero_sad_allocate(*prepass, mb);
          plan = sla(budget.c_cur());
          plan.sp_cap = guard->cap_for_next_mb();
        }

        SearchOutcome out;
        if (method == Method::full_search) {
          out = full_search_oracle(ctx);
        } else {
          out = search_mb(ctx, plan);
        }

        if (class_state) {
          update_after_mb(*class_state, {mb, cls, out.sp_used, budget.bl_cur, out.cost_init, out.mv_final});
        } else {
          tally.record(cls, mb, out.sp_used, out.cost_init, out.mv_final);
        }
        if (pool) cost_only_update(*pool, out.sp_used, budget.bl_cur, out.cost_init);
        if (guard) guard->finish_mb(out.sp_used);

        grid[static_cast<std::size_t>(r * cols + c)] = out.mv_final;
        row.class_mbs[index_of(cls)] += 1;
        row.class_sp[index_of(cls)] += out.sp_used;
        row.actual_sp += out.sp_used;
        row.total_cost += out.cost_final;

        if (observer) {
          observer(MbEvent{static_cast<int>(f), seed, &cur, &ref, mb, ctx.pmv(), init, cls, mv_pre, &out});
        }
        report.mb_log.push_back({static_cast<int>(f), mb, cls, budget, plan, out.sp_used, out.path, out.pmv, mv_pre,
                                 out.mv_init, out.mv_final, out.cost_init, out.cost_mid, out.cost_final});
      }
    }
    row.actual_sp += row.prepass_sp;
    row.mean_cost = static_cast<double>(row.total_cost) / nmb;
    prev = class_state ? end_of_frame(*class_state, prev) : tally.finish(prev);
    report.rows.push_back(row);
  }
  return report;
}

// ---------------------------------------------------------------------------
// Calibration

struct Calibration {
  std::int64_t total_sp = 0;
  int frames = 0;
  int mbs_per_frame = 0;

  double sp_per_frame() const { return frames > 0 ? static_cast<double>(total_sp) / frames : 0.0; }

  // floor(scale% x mean SHS SPs per frame)
  std::int64_t budget_for(double scale_percent) const {
    const long double v = static_cast<long double>(scale_percent) * total_sp / (100.0L * frames);
    return static_cast<std::int64_t>(std::floor(v + 1e-9L));
  }
};

inline Calibration calibrate(std::span<const LumaFrame> frames, const CostParams& params) {
  const SequenceReport r = run_frames(frames, Method::shs, params, std::nullopt);
  Calibration c;
  for (const auto& row : r.rows) c.total_sp += row.actual_sp;
  c.frames = static_cast<int>(r.rows.size());
  c.mbs_per_frame = frames.front().mb_count();
  return c;
}

namespace detail {

inline std::string calibration_key(const RunConfig& config) {
  std::ostringstream k;
  k << to_string(config.format) << '|' << config.input << '|' << config.width << 'x' << config.height << '|'
    << config.frames << '|' << config.seed << '|' << config.synth.has_value() << '|' << config.params.qp << '|'
    << config.params.lambda_motion << '|' << config.params.th1 << '|' << config.params.th2;
  return k.str();
}

class CalibrationCache {
 public:
  template <class Compute>
  Calibration get(const std::string& key, Compute&& compute) {
    {
      std::lock_guard lock(mutex_);
      if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    }
    Calibration c = compute();
    std::lock_guard lock(mutex_);
    return cache_.emplace(key, c).first->second;
  }

 private:
  std::mutex mutex_;
  std::map<std::string, Calibration> cache_;
};

inline CalibrationCache& calibration_cache() {
  static CalibrationCache cache;
  return cache;
}

}  // namespace detail

inline Calibration calibrate_reference(const RunConfig& config, std::span<const LumaFrame> frames) {
  // Explicit synth specs are not part of the key, so they bypass the cache.
  if (config.synth) return calibrate(frames, config.params);
  return detail::calibration_cache().get(detail::calibration_key(config),
                                         [&] { return calibrate(frames, config.params); });
}

inline Calibration calibrate_reference(const RunConfig& config) {
  const auto frames = load_sequence(config);
  return calibrate_reference(config, frames);
}

inline void enforce_strict(const SequenceReport& report) {
  for (const auto& row : report.rows) {
    if (!row.budgeted) continue;
    if (row.sub_basic) {
      throw BudgetViolation("frame " + std::to_string(row.frame) + ": budget below the basic-layer floor");
    }
    if (row.actual_sp > row.budget_sp) {
      throw BudgetViolation("frame " + std::to_string(row.frame) + ": actual SPs exceed budget");
    }
  }
}

inline SequenceReport run_configured(const RunConfig& config, std::span<const LumaFrame> frames, Method method,
                                     double scale, const MbObserver& observer = {}) {
  std::optional<std::int64_t> budget;
  double reference = 0.0;
  if (is_budgeted(method)) {
    const Calibration cal = calibrate_reference(config, frames);
    reference = cal.sp_per_frame();
    budget = cal.budget_for(scale);
  }
  SequenceReport report = run_frames(frames, method, config.params, budget, observer);
  report.scale = scale;
  report.reference_sp_per_frame = reference;
  report.input = config.input;
  if (config.strict) enforce_strict(report);
  return report;
}

inline SequenceReport run_sequence(const RunConfig& config) {
  config.validate();
  const auto frames = load_sequence(config);
  return run_configured(config, frames, config.method, config.budget_scale);
}

// ---------------------------------------------------------------------------
// Sweep

struct SweepCell {
  Method method = Method::ccme;
  double scale = 100.0;
  std::int64_t budget_sp = 0;
  double avg_actual_sp = 0.0;
  double sp_per_mb = 0.0;
  std::int64_t total_cost = 0;  // non-seed frames
  double cost_inflation = 0.0;  // vs the same method at 100%
  int violations = 0;
  int sub_basic_frames = 0;
  std::string error;
};

struct SweepReport {
  double reference_sp_per_frame = 0.0;
  std::vector<SweepCell> cells;
  std::vector<SequenceReport> runs;  // parallel to cells; empty report on error

  const SweepCell* find(Method m, double scale) const {
    for (const auto& c : cells) {
      if (c.method == m && c.scale == scale) return &c;
    }
    return nullptr;
  }
};

inline SweepReport sweep(const RunConfig& config, std::span<const double> scales, std::span<const Method> methods) {
  config.validate();
  if (!std::is_sorted(scales.begin(), scales.end(), std::greater<>())) {
    throw ConfigError("sweep scales must be sorted descending");
  }
  if (std::find(scales.begin(), scales.end(), 100.0) == scales.end()) {
    throw ConfigError("sweep scales must include 100");
  }
  const auto frames = load_sequence(config);
  const Calibration cal = calibrate_reference(config, frames);

  RunConfig cell_config = config;
  cell_config.strict = false;
  std::vector<std::future<SequenceReport>> jobs;
  for (Method m : methods) {
    for (double s : scales) {
      jobs.push_back(std::async(std::launch::async, [&cell_config, &frames, m, s] {
        return run_configured(cell_config, frames, m, s);
      }));
    }
  }

  SweepReport out;
  out.reference_sp_per_frame = cal.sp_per_frame();
  std::size_t j = 0;
  for (Method m : methods) {
    std::optional<std::int64_t> base_cost;
    const std::size_t first = out.cells.size();
    for (double s : scales) {
      SweepCell cell;
      cell.method = m;
      cell.scale = s;
      SequenceReport run;
      try {
        run = jobs[j].get();
        const Aggregates a = run.aggregates();
        cell.budget_sp = run.budget_sp;
        cell.avg_actual_sp = a.avg_actual_sp;
        cell.sp_per_mb = a.avg_sp_per_mb;
        cell.total_cost = a.budgeted_total_cost;
        cell.violations = a.violations;
        cell.sub_basic_frames = a.sub_basic_frames;
        if (s == 100.0) base_cost = cell.total_cost;
      } catch (const std::exception& e) {
        cell.error = e.what();
      }
      ++j;
      out.cells.push_back(cell);
      out.runs.push_back(std::move(run));
    }
    for (std::size_t i = first; i < out.cells.size(); ++i) {
      auto& cell = out.cells[i];
      if (cell.error.empty() && base_cost && *base_cost > 0) {
        cell.cost_inflation = static_cast<double>(cell.total_cost) / static_cast<double>(*base_cost) - 1.0;
      }
    }
  }
  return out;
}

inline SweepReport sweep(const RunConfig& config) { return sweep(config, config.scales, config.methods); }

// ---------------------------------------------------------------------------
// Classification evaluations

struct DetectionReport {
  // confusion[truth][prediction], index 0 = class 2, 1 = class 3
  std::array<std::array<int, 2>, 2> confusion{};
  int lower_path_mbs = 0;
  int class1_mbs = 0;
  double recall2 = 0.0;
  double recall3 = 0.0;
  bool empty = true;
};

// PAC predictions from the ccme pipeline against the ground-truth classifier
// fed by an unconstrained search of the same MB (same PMV). Seed frame excluded.
inline DetectionReport eval_detection(const RunConfig& config) {
  config.validate();
  const auto frames = load_sequence(config);
  DetectionReport rep;
  const CostParams& params = config.params;
  auto observer = [&](const MbEvent& e) {
    if (e.seed) return;
    if (e.pac == MbClass::class1) {
      ++rep.class1_mbs;
      return;
    }
    SearchContext fresh(*e.cur, *e.ref, e.mb, e.pmv, params);
    const SearchOutcome truth_run = search_mb(fresh, StepPlan::full());
    const MbClass truth = classify_oracle(truth_run.cost_init, truth_run.cost_mid, truth_run.cost_final, params);
    const std::size_t t = truth == MbClass::class2 ? 0 : 1;
    const std::size_t p = e.pac == MbClass::class2 ? 0 : 1;
    ++rep.confusion[t][p];
    ++rep.lower_path_mbs;
  };
  run_configured(config, frames, Method::ccme, config.budget_scale, observer);

  rep.empty = rep.lower_path_mbs == 0;
  const int truth2 = rep.confusion[0][0] + rep.confusion[0][1];
  const int truth3 = rep.confusion[1][0] + rep.confusion[1][1];
  rep.recall2 = truth2 > 0 ? static_cast<double>(rep.confusion[0][0]) / truth2 : 0.0;
  rep.recall3 = truth3 > 0 ? static_cast<double>(rep.confusion[1][1]) / truth3 : 0.0;
  return rep;
}

struct ClassDistributionRow {
  double class_eps = 0.0;
  PerClass<int> mbs{};
  PerClass<double> pct{};
};

struct ClassDistributionReport {
  int total_mbs = 0;
  std::vector<ClassDistributionRow> rows;
};

inline constexpr std::array<double, 3> kClassEpsLevels{0.0, 0.02, 0.04};

inline ClassDistributionReport class_distribution(std::span<const LumaFrame> frames, const CostParams& params) {
  const SequenceReport shs = run_frames(frames, Method::shs, params, std::nullopt);
  ClassDistributionReport rep;
  rep.total_mbs = static_cast<int>(shs.mb_log.size());
  for (double eps : kClassEpsLevels) {
    CostParams p = params;
    p.class_eps = eps;
    ClassDistributionRow row;
    row.class_eps = eps;
    for (const auto& mb : shs.mb_log) {
      row.mbs[index_of(classify_oracle(mb.cost_init, mb.cost_mid, mb.cost_final, p))] += 1;
    }
    for (std::size_t i = 0; i < 3; ++i) {
      row.pct[i] = rep.total_mbs > 0 ? 100.0 * row.mbs[i] / rep.total_mbs : 0.0;
    }
    rep.rows.push_back(row);
  }
  return rep;
}

inline ClassDistributionReport class_distribution(const RunConfig& config) {
  config.validate();
  const auto frames = load_sequence(config);
  return class_distribution(frames, config.params);
}

}  // namespace ccme
