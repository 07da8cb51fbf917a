#include <sstream>

#include <gtest/gtest.h>

#include "ccme/cli.hpp"
#include "test_support.hpp"

using namespace ccme;
using testing_support::TempDir;

namespace {

constexpr const char* kSmallSynth = R"(# small mixed scene
method = ccme
scale = 60
[synth]
width = 64
height = 48
frames = 5
noise = 3
seed = 4
background = noise base=110 amp=40 cell=6 detail=2
layer = noise rect=16,8,32,24 jitter=6 grain=12 base=90 amp=60 cell=4 detail=4
)";

struct CliResult {
  int code = 0;
  std::string log;
  std::string err;
};

CliResult cli(std::vector<std::string> args) {
  args.insert(args.begin(), "ccme");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream log, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), log, err);
  return {code, log.str(), err.str()};
}

}  // namespace

TEST(ConfigFile, ParsesKeysCommentsAndSynthSection) {
  const ConfigFile f = parse_config(kSmallSynth);
  EXPECT_EQ(f.values.at("method"), "ccme");
  EXPECT_EQ(f.values.at("scale"), "60");
  ASSERT_TRUE(f.synth);
  EXPECT_EQ(f.synth->width, 64);
  EXPECT_EQ(f.synth->frames, 5);
  ASSERT_EQ(f.synth->layers.size(), 1u);
  EXPECT_EQ(f.synth->layers[0].region, (Rect{16, 8, 32, 24}));
  EXPECT_EQ(f.synth->layers[0].jitter, 6);
  EXPECT_EQ(f.synth->background.kind, TextureKind::noise);
}

TEST(ConfigFile, DashedKeysAndMotionLists) {
  const ConfigFile f = parse_config("class-eps = 0.02\n[synth]\nlayer = checker rect=0,0,16,16 motion=1,0;0,-2\n");
  EXPECT_EQ(f.values.at("class_eps"), "0.02");
  ASSERT_EQ(f.synth->layers[0].motion.size(), 2u);
  EXPECT_EQ(f.synth->layers[0].motion[1], (MotionVector{0, -2}));
}

TEST(ConfigFile, Errors) {
  EXPECT_THROW(parse_config("no equals sign"), ConfigError);
  EXPECT_THROW(parse_config("[other]\n"), ConfigError);
  EXPECT_THROW(parse_config("[synth]\ncolour = red\n"), ConfigError);
  EXPECT_THROW(parse_config("[synth]\nlayer = plaid rect=0,0,16,16\n"), ConfigError);
  RunConfig c;
  EXPECT_THROW(apply_setting(c, "speed", "9"), ConfigError);
  EXPECT_THROW(apply_setting(c, "th1", "12x"), ConfigError);
  EXPECT_THROW(apply_setting(c, "method", "diamond"), ConfigError);
}

TEST(ConfigFile, QpSetsLambdaRegardlessOfOrder) {
  RunConfig c;
  apply_config(c, parse_config("th1 = 800\nqp = 33\n"));
  EXPECT_EQ(c.params.qp, 33);
  EXPECT_NEAR(c.params.lambda_motion, 10.4307, 5e-4);
  EXPECT_EQ(c.params.th1, 800);
}

TEST(Cli, FlagsOverrideConfig) {
  TempDir dir("cli_precedence");
  testing_support::write_file(dir / "c.cfg", "th1 = 700\nscale = 60\nqp = 30\n");
  detail::CliFlags f;
  f.config = (dir / "c.cfg").string();
  f.scale = 40;
  const RunConfig c = f.resolve();
  EXPECT_EQ(c.params.th1, 700);
  EXPECT_EQ(c.params.qp, 30);
  EXPECT_DOUBLE_EQ(c.budget_scale, 40);
}

TEST(Cli, InputFlagReplacesConfigSynthSection) {
  TempDir dir("cli_input_override");
  testing_support::write_file(dir / "c.cfg", kSmallSynth);
  detail::CliFlags f;
  f.config = (dir / "c.cfg").string();
  EXPECT_TRUE(f.resolve().synth.has_value());
  f.input = "static";
  EXPECT_FALSE(f.resolve().synth.has_value());
}

TEST(Cli, RunWritesCsvAndJson) {
  TempDir dir("cli_run");
  testing_support::write_file(dir / "c.cfg", kSmallSynth);
  const auto r = cli({"run", "--config", (dir / "c.cfg").string(), "--out", (dir / "out").string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_TRUE(std::filesystem::exists(dir / "out" / "run_frames.csv"));
  EXPECT_TRUE(std::filesystem::exists(dir / "out" / "run_mbs.csv"));
  const auto j = ordered_json::parse(testing_support::read_file(dir / "out" / "run.json"));
  EXPECT_EQ(j.at("method").get<std::string>(), "ccme");
  EXPECT_DOUBLE_EQ(j.at("scale").get<double>(), 60.0);
  EXPECT_EQ(j.at("aggregates").at("violations").get<int>(), 0);
}

TEST(Cli, SynthSubcommand) {
  TempDir dir("cli_synth");
  testing_support::write_file(dir / "c.cfg", kSmallSynth);
  const auto r = cli({"synth", "--config", (dir / "c.cfg").string(), "--out", (dir / "out").string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto frames = load_y4m(dir / "out" / "synth.y4m");
  EXPECT_EQ(frames.size(), 5u);
  EXPECT_EQ(frames[0].width(), 64);
  const std::string truth = testing_support::read_file(dir / "out" / "synth_truth.csv");
  EXPECT_EQ(truth.rfind("frame,layer,x,y,width,height,dx,dy,clipped\n", 0), 0u);
  EXPECT_EQ(std::count(truth.begin(), truth.end(), '\n'), 1 + 5);

  // the written file is a valid input for the other subcommands
  const auto cal = cli({"calibrate", "--input", (dir / "out" / "synth.y4m").string(), "--format", "y4m", "--out",
                        (dir / "cal").string()});
  EXPECT_EQ(cal.code, kExitOk) << cal.err;
  EXPECT_TRUE(std::filesystem::exists(dir / "cal" / "calibrate.csv"));
}

TEST(Cli, ExitCodeConfigError) {
  TempDir dir("cli_exit1");
  EXPECT_EQ(cli({}).code, kExitConfig);
  EXPECT_EQ(cli({"run", "--bogus"}).code, kExitConfig);
  EXPECT_EQ(cli({"run", "--method", "diamond", "--out", dir.path().string()}).code, kExitConfig);
  EXPECT_EQ(cli({"run", "--scale", "500", "--out", dir.path().string()}).code, kExitConfig);
  testing_support::write_file(dir / "bad.cfg", "speed = 9\n");
  const auto r = cli({"run", "--config", (dir / "bad.cfg").string(), "--out", dir.path().string()});
  EXPECT_EQ(r.code, kExitConfig);
  EXPECT_NE(r.err.find("speed"), std::string::npos);
}

TEST(Cli, ExitCodeInputError) {
  TempDir dir("cli_exit2");
  const auto r = cli({"run", "--input", (dir / "missing.y4m").string(), "--format", "y4m", "--out", dir.path().string()});
  EXPECT_EQ(r.code, kExitInput);
  testing_support::write_file(dir / "bad.y4m", "YUV4MPEG2 W100 H64\n");
  EXPECT_EQ(cli({"calibrate", "--input", (dir / "bad.y4m").string(), "--format", "y4m", "--out", dir.path().string()}).code,
            kExitInput);
}

TEST(Cli, ExitCodeBudgetViolation) {
  TempDir dir("cli_exit3");
  testing_support::write_file(dir / "c.cfg", kSmallSynth);
  const auto r = cli({"run", "--config", (dir / "c.cfg").string(), "--scale", "2", "--strict", "--out",
                      (dir / "out").string()});
  EXPECT_EQ(r.code, kExitBudget);
  const auto lax = cli({"run", "--config", (dir / "c.cfg").string(), "--scale", "2", "--out", (dir / "out").string()});
  EXPECT_EQ(lax.code, kExitOk) << lax.err;
}

TEST(Cli, HelpExitsZero) {
  const auto r = cli({"--help"});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_NE(r.log.find("sweep"), std::string::npos);
}
