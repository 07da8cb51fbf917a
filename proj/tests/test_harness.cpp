#include <cstdlib>

#include <gtest/gtest.h>

#include "ccme/harness.hpp"
#include "ccme/report_io.hpp"
#include "test_support.hpp"

using namespace ccme;

namespace {

SynthSpec small_spec() {
  SynthSpec s;
  s.width = 64;
  s.height = 48;
  s.frames = 6;
  s.seed = 4;
  s.noise_amplitude = 3;
  s.background = {TextureKind::noise, 110, 40, 6, 2};
  SynthLayer mover;
  mover.texture = {TextureKind::noise, 90, 60, 4, 4};
  mover.region = {16, 8, 32, 24};
  mover.jitter = 6;
  mover.grain = 12;
  s.layers.push_back(mover);
  return s;
}

RunConfig small_config() {
  RunConfig c;
  c.synth = small_spec();
  return c;
}

void check_conservation(const SequenceReport& r) {
  std::map<int, std::int64_t> sp;
  std::map<int, std::int64_t> cost;
  for (const auto& m : r.mb_log) {
    sp[m.frame] += m.sp_used;
    cost[m.frame] += m.cost_final;
  }
  for (const auto& row : r.rows) {
    ASSERT_EQ(row.actual_sp, sp[row.frame] + row.prepass_sp) << row.frame;
    ASSERT_EQ(row.total_cost, cost[row.frame]) << row.frame;
    ASSERT_EQ(row.class_mbs[0] + row.class_mbs[1] + row.class_mbs[2], row.mbs);
    ASSERT_EQ(row.class_sp[0] + row.class_sp[1] + row.class_sp[2] + row.prepass_sp, row.actual_sp);
  }
}

}  // namespace

TEST(Calibration, StaticSequenceNeedsAtMostFivePerMb) {
  const auto frames = synthesize(static_sequence()).frames;
  const Calibration c = calibrate(frames, CostParams{});
  EXPECT_EQ(c.frames, 4);
  EXPECT_EQ(c.mbs_per_frame, 16);
  EXPECT_LE(c.total_sp, 5 * 16 * 4);
  EXPECT_EQ(calibrate(frames, CostParams{}).total_sp, c.total_sp);
}

TEST(Calibration, BudgetIsFlooredScaleOfMean) {
  Calibration c;
  c.total_sp = 1001;
  c.frames = 4;
  EXPECT_DOUBLE_EQ(c.sp_per_frame(), 250.25);
  EXPECT_EQ(c.budget_for(100), 250);
  EXPECT_EQ(c.budget_for(60), 150);  // 150.15
  EXPECT_EQ(c.budget_for(40), 100);  // 100.1
  c.total_sp = 1000;
  EXPECT_EQ(c.budget_for(60), 150);
}

TEST(RunFrames, SeedFrameIsUnconstrainedAndOthersBudgeted) {
  const auto frames = synthesize(small_spec()).frames;
  const SequenceReport r = run_frames(frames, Method::ccme, CostParams{}, 300);
  ASSERT_EQ(r.rows.size(), 5u);
  EXPECT_TRUE(r.rows[0].seed);
  EXPECT_FALSE(r.rows[0].budgeted);
  for (std::size_t i = 1; i < r.rows.size(); ++i) {
    EXPECT_TRUE(r.rows[i].budgeted);
    EXPECT_LE(r.rows[i].actual_sp, 300);
  }
  EXPECT_EQ(r.mb_log.size(), 5u * 12);
  check_conservation(r);
  EXPECT_THROW(run_frames(frames, Method::ccme, CostParams{}, std::nullopt), ConfigError);
}

TEST(RunFrames, ConservationForEveryMethod) {
  const auto frames = synthesize(small_spec()).frames;
  for (Method m : {Method::shs, Method::full_search, Method::ccme, Method::cost_only, Method::zero_sad}) {
    SCOPED_TRACE(std::string(to_string(m)));
    const SequenceReport r = run_frames(frames, m, CostParams{}, is_budgeted(m) ? std::optional<std::int64_t>(200) : std::nullopt);
    check_conservation(r);
    for (const auto& row : r.rows) {
      if (row.budgeted) EXPECT_LE(row.actual_sp, 200);
    }
  }
}

TEST(RunFrames, ZeroSadChargesPrepass) {
  const auto frames = synthesize(small_spec()).frames;
  const SequenceReport r = run_frames(frames, Method::zero_sad, CostParams{}, 400);
  EXPECT_EQ(r.rows[0].prepass_sp, 0);
  for (std::size_t i = 1; i < r.rows.size(); ++i) EXPECT_EQ(r.rows[i].prepass_sp, 12);
}

TEST(RunFrames, SubBasicFramesAreFlagged) {
  const auto frames = synthesize(small_spec()).frames;
  const SequenceReport co = run_frames(frames, Method::cost_only, CostParams{}, 60);
  EXPECT_EQ(co.aggregates().sub_basic_frames, 4);
  const SequenceReport zs = run_frames(frames, Method::zero_sad, CostParams{}, 80);
  EXPECT_EQ(zs.aggregates().sub_basic_frames, 4);
  const SequenceReport ok = run_frames(frames, Method::zero_sad, CostParams{}, 84);
  EXPECT_EQ(ok.aggregates().sub_basic_frames, 0);
}

TEST(RunFrames, PredictorIsMedianOfCodedNeighbours) {
  const auto frames = synthesize(small_spec()).frames;
  const SequenceReport r = run_frames(frames, Method::shs, CostParams{}, std::nullopt);
  std::map<std::pair<int, int>, MotionVector> mv;
  for (const auto& m : r.mb_log) {
    if (m.frame != 3) continue;
    auto get = [&](int c, int row) -> std::optional<MotionVector> {
      if (c < 0 || row < 0 || c >= 4) return std::nullopt;
      return mv.at({c, row});
    };
    const MotionVector expect = median_pmv(get(m.mb.col - 1, m.mb.row), get(m.mb.col, m.mb.row - 1),
                                           get(m.mb.col + 1, m.mb.row - 1));
    EXPECT_EQ(clamp_to_window(expect), m.pmv);
    mv[{m.mb.col, m.mb.row}] = m.mv_final;
  }
}

TEST(Sweep, ProducesAllCellsWithZeroInflationAtFullScale) {
  const RunConfig c = small_config();
  const SweepReport s = sweep(c);
  ASSERT_EQ(s.cells.size(), 9u);
  ASSERT_EQ(s.runs.size(), 9u);
  for (const auto& cell : s.cells) {
    EXPECT_TRUE(cell.error.empty()) << cell.error;
    if (cell.scale == 100.0) EXPECT_DOUBLE_EQ(cell.cost_inflation, 0.0);
    EXPECT_EQ(cell.violations, 0);
  }
  const SweepCell* cell = s.find(Method::ccme, 60);
  ASSERT_NE(cell, nullptr);
  EXPECT_EQ(cell->budget_sp, calibrate(synthesize(small_spec()).frames, CostParams{}).budget_for(60));
  EXPECT_EQ(s.find(Method::shs, 60), nullptr);
}

TEST(Sweep, RejectsUnsortedOrMissingFullScale) {
  const RunConfig c = small_config();
  const std::vector<Method> methods{Method::ccme};
  EXPECT_THROW(sweep(c, std::vector<double>{60, 100}, methods), ConfigError);
  EXPECT_THROW(sweep(c, std::vector<double>{80, 60}, methods), ConfigError);
}

TEST(Strict, LowBudgetThrows) {
  RunConfig c = small_config();
  c.method = Method::ccme;
  c.budget_scale = 2;
  c.strict = true;
  EXPECT_THROW(run_sequence(c), BudgetViolation);
  c.strict = false;
  EXPECT_GT(run_sequence(c).aggregates().sub_basic_frames, 0);
}

TEST(Detection, StaticSequenceHasNoLowerPathMbs) {
  RunConfig c;
  c.input = "static";
  const DetectionReport d = eval_detection(c);
  EXPECT_TRUE(d.empty);
  EXPECT_EQ(d.lower_path_mbs, 0);
  EXPECT_EQ(d.class1_mbs, 3 * 16);
}

TEST(ClassDistribution, StaticIsAllClassOne) {
  RunConfig c;
  c.input = "static";
  const ClassDistributionReport r = class_distribution(c);
  ASSERT_EQ(r.rows.size(), 3u);
  for (const auto& row : r.rows) {
    EXPECT_DOUBLE_EQ(row.pct[0], 100.0);
    EXPECT_EQ(row.mbs[0], r.total_mbs);
  }
}

TEST(ClassDistribution, PercentagesSumToHundredAndClassThreeGrows) {
  const auto frames = synthesize(small_spec()).frames;
  const ClassDistributionReport r = class_distribution(frames, CostParams{});
  int prev3 = -1;
  for (const auto& row : r.rows) {
    EXPECT_NEAR(row.pct[0] + row.pct[1] + row.pct[2], 100.0, 1e-9);
    EXPECT_EQ(row.mbs[0] + row.mbs[1] + row.mbs[2], r.total_mbs);
    EXPECT_GE(row.mbs[2], prev3);
    prev3 = row.mbs[2];
  }
  EXPECT_EQ(r.rows[0].mbs[0], r.rows[2].mbs[0]);
}

TEST(Reports, AggregatesJsonRoundTrip) {
  const auto frames = synthesize(small_spec()).frames;
  const SequenceReport r = run_frames(frames, Method::cost_only, CostParams{}, 250);
  const Aggregates a = r.aggregates();
  const auto parsed = ordered_json::parse(to_json(r).dump());
  const auto& j = parsed.at("aggregates");
  EXPECT_EQ(j.at("frames").get<int>(), a.frames);
  EXPECT_EQ(j.at("total_cost").get<std::int64_t>(), a.total_cost);
  EXPECT_EQ(j.at("budgeted_total_cost").get<std::int64_t>(), a.budgeted_total_cost);
  EXPECT_NEAR(j.at("avg_sp_per_mb").get<double>(), a.avg_sp_per_mb, 1e-5 * a.avg_sp_per_mb);
  EXPECT_EQ(j.at("violations").get<int>(), 0);
  EXPECT_EQ(parsed.at("frames").size(), r.rows.size());
  EXPECT_EQ(parsed.at("method").get<std::string>(), "cost_only");
}

TEST(Reports, CsvShapes) {
  const auto frames = synthesize(small_spec()).frames;
  const SequenceReport r = run_frames(frames, Method::ccme, CostParams{}, 250);
  const std::string csv = frames_csv(r);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 5);
  const std::string mbs = mb_log_csv(r);
  EXPECT_EQ(std::count(mbs.begin(), mbs.end(), '\n'), 1 + 60);
  EXPECT_EQ(format_real(1.0 / 3.0), "0.333333");
}

// Frozen output of a small fixed run; set CCME_UPDATE_GOLDEN=1 to regenerate.
TEST(Reports, GoldenFrameTable) {
  const auto frames = synthesize(small_spec()).frames;
  const Calibration cal = calibrate(frames, CostParams{});
  std::string text;
  for (Method m : {Method::ccme, Method::cost_only, Method::zero_sad}) {
    SequenceReport r = run_frames(frames, m, CostParams{}, cal.budget_for(60));
    text += std::string(to_string(m)) + "\n" + frames_csv(r);
  }
  const std::filesystem::path golden = std::filesystem::path(CCME_GOLDEN_DIR) / "small_60pct_frames.csv";
  if (std::getenv("CCME_UPDATE_GOLDEN") != nullptr) testing_support::write_file(golden, text);
  ASSERT_TRUE(std::filesystem::exists(golden));
  EXPECT_EQ(testing_support::read_file(golden), text);
}
