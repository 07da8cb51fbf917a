#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ccme/errors.hpp"
#include "ccme/harness.hpp"

namespace ccme {

using ordered_json = nlohmann::ordered_json;

// Reals are written with 6 significant digits everywhere.
inline std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline double round_real(double v) { return std::stod(format_real(v)); }

enum class ReportFormat { csv, json };

namespace detail {

inline std::string mv_field(MotionVector v) { return std::to_string(v.dx) + "," + std::to_string(v.dy); }

class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}

  CsvWriter& header(std::initializer_list<std::string_view> cols) {
    bool first = true;
    for (auto c : cols) {
      if (!first) out_ << ',';
      out_ << c;
      first = false;
    }
    out_ << '\n';
    return *this;
  }

  template <class T>
  CsvWriter& cell(const T& v) {
    sep();
    if constexpr (std::is_floating_point_v<T>) out_ << format_real(v);
    else if constexpr (std::is_same_v<T, bool>) out_ << (v ? 1 : 0);
    else out_ << v;
    return *this;
  }

  void end_row() {
    out_ << '\n';
    started_ = false;
  }

 private:
  void sep() {
    if (started_) out_ << ',';
    started_ = true;
  }
  std::ostream& out_;
  bool started_ = false;
};

inline std::ofstream open_output(const std::filesystem::path& path) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  return out;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  auto out = open_output(path);
  out << text;
  if (!out) throw InputError("write failed: " + path.string());
}

}  // namespace detail

// ---------------------------------------------------------------------------
// JSON

inline ordered_json to_json(const CostParams& p) {
  return ordered_json{{"qp", p.qp},
                      {"lambda_motion", round_real(p.lambda_motion)},
                      {"th1", p.th1},
                      {"th2", p.th2},
                      {"class_eps", round_real(p.class_eps)},
                      {"pac_threshold", p.pac_threshold}};
}

inline ordered_json to_json(const Aggregates& a) {
  return ordered_json{{"frames", a.frames},
                      {"avg_actual_sp", round_real(a.avg_actual_sp)},
                      {"avg_sp_per_mb", round_real(a.avg_sp_per_mb)},
                      {"total_cost", a.total_cost},
                      {"budgeted_total_cost", a.budgeted_total_cost},
                      {"class1_pct", round_real(a.class_pct[0])},
                      {"class2_pct", round_real(a.class_pct[1])},
                      {"class3_pct", round_real(a.class_pct[2])},
                      {"violations", a.violations},
                      {"sub_basic_frames", a.sub_basic_frames}};
}

inline ordered_json to_json(const SequenceReport& r) {
  ordered_json frames = ordered_json::array();
  for (const auto& row : r.rows) {
    frames.push_back(ordered_json{{"frame", row.frame},
                                  {"seed", row.seed},
                                  {"budgeted", row.budgeted},
                                  {"budget_sp", row.budget_sp},
                                  {"actual_sp", row.actual_sp},
                                  {"prepass_sp", row.prepass_sp},
                                  {"mbs", row.mbs},
                                  {"class_mbs", row.class_mbs},
                                  {"class_sp", row.class_sp},
                                  {"total_cost", row.total_cost},
                                  {"mean_cost", round_real(row.mean_cost)},
                                  {"sub_basic", row.sub_basic}});
  }
  return ordered_json{{"method", to_string(r.method)},
                      {"input", r.input},
                      {"scale", round_real(r.scale)},
                      {"reference_sp_per_frame", round_real(r.reference_sp_per_frame)},
                      {"budget_sp", r.budget_sp},
                      {"params", to_json(r.params)},
                      {"quality_proxy", "total final COST (SAD + lambda * R(MV))"},
                      {"aggregates", to_json(r.aggregates())},
                      {"frames", frames}};
}

inline ordered_json to_json(const SweepReport& r) {
  ordered_json cells = ordered_json::array();
  for (const auto& c : r.cells) {
    cells.push_back(ordered_json{{"method", to_string(c.method)},
                                 {"scale", round_real(c.scale)},
                                 {"budget_sp", c.budget_sp},
                                 {"avg_actual_sp", round_real(c.avg_actual_sp)},
                                 {"sp_per_mb", round_real(c.sp_per_mb)},
                                 {"total_cost", c.total_cost},
                                 {"cost_inflation", round_real(c.cost_inflation)},
                                 {"violations", c.violations},
                                 {"sub_basic_frames", c.sub_basic_frames},
                                 {"error", c.error}});
  }
  return ordered_json{{"reference_sp_per_frame", round_real(r.reference_sp_per_frame)}, {"cells", cells}};
}

inline ordered_json to_json(const DetectionReport& r) {
  return ordered_json{{"lower_path_mbs", r.lower_path_mbs},
                      {"class1_mbs", r.class1_mbs},
                      {"truth2_pred2", r.confusion[0][0]},
                      {"truth2_pred3", r.confusion[0][1]},
                      {"truth3_pred2", r.confusion[1][0]},
                      {"truth3_pred3", r.confusion[1][1]},
                      {"recall2", round_real(r.recall2)},
                      {"recall3", round_real(r.recall3)},
                      {"empty", r.empty}};
}

inline ordered_json to_json(const ClassDistributionReport& r) {
  ordered_json rows = ordered_json::array();
  for (const auto& row : r.rows) {
    rows.push_back(ordered_json{{"class_eps", round_real(row.class_eps)},
                                {"class1_mbs", row.mbs[0]},
                                {"class2_mbs", row.mbs[1]},
                                {"class3_mbs", row.mbs[2]},
                                {"class1_pct", round_real(row.pct[0])},
                                {"class2_pct", round_real(row.pct[1])},
                                {"class3_pct", round_real(row.pct[2])}});
  }
  return ordered_json{{"total_mbs", r.total_mbs}, {"rows", rows}};
}

inline ordered_json to_json(const Calibration& c) {
  return ordered_json{{"frames", c.frames},
                      {"mbs_per_frame", c.mbs_per_frame},
                      {"total_sp", c.total_sp},
                      {"sp_per_frame", round_real(c.sp_per_frame())}};
}

// ---------------------------------------------------------------------------
// CSV

// frame,seed,budgeted,budget_sp,actual_sp,prepass_sp,mbs,c1_mbs,c2_mbs,c3_mbs,
// c1_sp,c2_sp,c3_sp,total_cost,mean_cost,sub_basic
inline std::string frames_csv(const SequenceReport& r) {
  std::ostringstream s;
  detail::CsvWriter w(s);
  w.header({"frame", "seed", "budgeted", "budget_sp", "actual_sp", "prepass_sp", "mbs", "c1_mbs", "c2_mbs", "c3_mbs",
            "c1_sp", "c2_sp", "c3_sp", "total_cost", "mean_cost", "sub_basic"});
  for (const auto& row : r.rows) {
    w.cell(row.frame).cell(row.seed).cell(row.budgeted).cell(row.budget_sp).cell(row.actual_sp).cell(row.prepass_sp);
    w.cell(row.mbs).cell(row.class_mbs[0]).cell(row.class_mbs[1]).cell(row.class_mbs[2]);
    w.cell(row.class_sp[0]).cell(row.class_sp[1]).cell(row.class_sp[2]);
    w.cell(row.total_cost).cell(row.mean_cost).cell(row.sub_basic);
    w.end_row();
  }
  return s.str();
}

// Per-MB decision log.
inline std::string mb_log_csv(const SequenceReport& r) {
  std::ostringstream s;
  detail::CsvWriter w(s);
  w.header({"frame", "mb_col", "mb_row", "class", "bl", "al", "c_cur", "ns_cross", "ns_multihex", "small_hex",
            "small_diamond", "sp_cap", "sp_used", "path", "pmv_dx", "pmv_dy", "mv_pre_dx", "mv_pre_dy", "mv_dx", "mv_dy",
            "cost_init", "cost_mid", "cost_final"});
  for (const auto& m : r.mb_log) {
    const bool full = m.plan.unconstrained;
    w.cell(m.frame).cell(m.mb.col).cell(m.mb.row).cell(class_name(m.cls));
    w.cell(m.budget.bl_cur).cell(m.budget.al_cur).cell(m.budget.c_cur());
    w.cell(full ? -1 : m.plan.ns_cross).cell(full ? -1 : m.plan.ns_multihex);
    w.cell(m.plan.allow_small_hex).cell(m.plan.allow_small_diamond);
    w.cell(m.plan.sp_cap == kNoSpCap ? -1 : m.plan.sp_cap).cell(m.sp_used);
    w.cell(m.path == SearchPath::upper ? "upper" : "lower");
    w.cell(m.pmv.dx).cell(m.pmv.dy).cell(m.mv_pre.dx).cell(m.mv_pre.dy).cell(m.mv_final.dx).cell(m.mv_final.dy);
    w.cell(m.cost_init).cell(m.cost_mid).cell(m.cost_final);
    w.end_row();
  }
  return s.str();
}

inline std::string sweep_csv(const SweepReport& r) {
  std::ostringstream s;
  detail::CsvWriter w(s);
  w.header({"method", "scale", "budget_sp", "avg_actual_sp", "sp_per_mb", "total_cost", "cost_inflation", "violations",
            "sub_basic_frames", "error"});
  for (const auto& c : r.cells) {
    w.cell(to_string(c.method)).cell(c.scale).cell(c.budget_sp).cell(c.avg_actual_sp).cell(c.sp_per_mb);
    w.cell(c.total_cost).cell(c.cost_inflation).cell(c.violations).cell(c.sub_basic_frames);
    w.cell(c.error.empty() ? std::string{} : "\"" + c.error + "\"");
    w.end_row();
  }
  return s.str();
}

inline std::string detection_csv(const DetectionReport& r) {
  std::ostringstream s;
  detail::CsvWriter w(s);
  w.header({"truth", "pred2", "pred3", "recall"});
  w.cell(2).cell(r.confusion[0][0]).cell(r.confusion[0][1]).cell(r.recall2);
  w.end_row();
  w.cell(3).cell(r.confusion[1][0]).cell(r.confusion[1][1]).cell(r.recall3);
  w.end_row();
  return s.str();
}

inline std::string class_distribution_csv(const ClassDistributionReport& r) {
  std::ostringstream s;
  detail::CsvWriter w(s);
  w.header({"class_eps", "class1_mbs", "class2_mbs", "class3_mbs", "class1_pct", "class2_pct", "class3_pct"});
  for (const auto& row : r.rows) {
    w.cell(row.class_eps).cell(row.mbs[0]).cell(row.mbs[1]).cell(row.mbs[2]);
    w.cell(row.pct[0]).cell(row.pct[1]).cell(row.pct[2]);
    w.end_row();
  }
  return s.str();
}

inline std::string calibration_csv(const Calibration& c) {
  std::ostringstream s;
  detail::CsvWriter w(s);
  w.header({"frames", "mbs_per_frame", "total_sp", "sp_per_frame"});
  w.cell(c.frames).cell(c.mbs_per_frame).cell(c.total_sp).cell(c.sp_per_frame());
  w.end_row();
  return s.str();
}

// ---------------------------------------------------------------------------
// emit: <dir>/<stem>.json or <dir>/<stem>[_suffix].csv. Returns written paths.

inline std::vector<std::filesystem::path> emit(const SequenceReport& r, ReportFormat fmt,
                                               const std::filesystem::path& dir, const std::string& stem = "run") {
  if (fmt == ReportFormat::json) {
    auto p = dir / (stem + ".json");
    detail::write_text(p, to_json(r).dump(2) + "\n");
    return {p};
  }
  auto frames = dir / (stem + "_frames.csv");
  auto mbs = dir / (stem + "_mbs.csv");
  detail::write_text(frames, frames_csv(r));
  detail::write_text(mbs, mb_log_csv(r));
  return {frames, mbs};
}

template <class Report, class Csv>
std::vector<std::filesystem::path> emit_simple(const Report& r, ReportFormat fmt, const std::filesystem::path& dir,
                                               const std::string& stem, Csv&& csv) {
  auto p = dir / (stem + (fmt == ReportFormat::json ? ".json" : ".csv"));
  detail::write_text(p, fmt == ReportFormat::json ? to_json(r).dump(2) + "\n" : csv(r));
  return {p};
}

inline std::vector<std::filesystem::path> emit(const SweepReport& r, ReportFormat fmt, const std::filesystem::path& dir,
                                               const std::string& stem = "sweep") {
  return emit_simple(r, fmt, dir, stem, [](const SweepReport& x) { return sweep_csv(x); });
}

inline std::vector<std::filesystem::path> emit(const DetectionReport& r, ReportFormat fmt,
                                               const std::filesystem::path& dir, const std::string& stem = "detection") {
  return emit_simple(r, fmt, dir, stem, [](const DetectionReport& x) { return detection_csv(x); });
}

inline std::vector<std::filesystem::path> emit(const ClassDistributionReport& r, ReportFormat fmt,
                                               const std::filesystem::path& dir,
                                               const std::string& stem = "class_dist") {
  return emit_simple(r, fmt, dir, stem, [](const ClassDistributionReport& x) { return class_distribution_csv(x); });
}

inline std::vector<std::filesystem::path> emit(const Calibration& r, ReportFormat fmt, const std::filesystem::path& dir,
                                               const std::string& stem = "calibrate") {
  return emit_simple(r, fmt, dir, stem, [](const Calibration& x) { return calibration_csv(x); });
}

}  // namespace ccme
