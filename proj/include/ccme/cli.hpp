#pragma once

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ccme/config.hpp"
#include "ccme/errors.hpp"
#include "ccme/harness.hpp"
#include "ccme/report_io.hpp"

namespace ccme {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitInput = 2;
inline constexpr int kExitBudget = 3;

namespace detail {

struct CliFlags {
  std::optional<std::string> config;
  std::optional<std::string> input;
  std::optional<std::string> format;
  std::optional<int> width;
  std::optional<int> height;
  std::optional<int> frames;
  std::optional<int> qp;
  std::optional<int> th1;
  std::optional<int> th2;
  std::optional<double> class_eps;
  std::optional<int> pac_th;
  std::optional<std::string> method;
  std::optional<std::string> methods;
  std::optional<double> scale;
  std::optional<std::string> scales;
  std::optional<int> seed;
  std::optional<std::string> out;
  bool strict = false;

  RunConfig resolve() const {
    RunConfig c;
    if (config) apply_config(c, load_config(*config));
    auto set = [&c](const char* key, const auto& opt) {
      if (!opt) return;
      if constexpr (std::is_same_v<std::decay_t<decltype(*opt)>, std::string>) apply_setting(c, key, *opt);
      else {
        std::ostringstream s;
        s.precision(17);
        s << *opt;
        apply_setting(c, key, s.str());
      }
    };
    set("qp", qp);
    set("input", input);
    set("format", format);
    set("width", width);
    set("height", height);
    set("frames", frames);
    set("th1", th1);
    set("th2", th2);
    set("class_eps", class_eps);
    set("pac_th", pac_th);
    set("method", method);
    set("methods", methods);
    set("scale", scale);
    set("scales", scales);
    set("seed", seed);
    set("out", out);
    if (strict) c.strict = true;
    // a flag naming a preset or file replaces a [synth] section from the config
    if (input || (format && *format != "synth")) c.synth.reset();
    c.validate();
    return c;
  }
};

inline void both_formats(const auto& emit_one, std::ostream& log) {
  for (ReportFormat f : {ReportFormat::csv, ReportFormat::json}) {
    for (const auto& p : emit_one(f)) log << "wrote " << p.string() << '\n';
  }
}

}  // namespace detail

// Entry point shared by the `ccme` binary and the tests.
inline int run_cli(int argc, const char* const* argv, std::ostream& log = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Computation-controlled block motion estimation experiments"};
  app.require_subcommand(1);
  detail::CliFlags f;

  app.add_option("--config", f.config, "key = value config file (flags win on conflict)");
  app.add_option("--input", f.input, "input path, or synthetic preset: acceptance | classification | static");
  app.add_option("--format", f.format, "y4m | yuv420 | synth");
  app.add_option("--width", f.width, "frame width for yuv420");
  app.add_option("--height", f.height, "frame height for yuv420");
  app.add_option("--frames", f.frames, "number of frames to use (0 = all)");
  app.add_option("--qp", f.qp, "quantization parameter (sets lambda)");
  app.add_option("--th1", f.th1, "upper/lower path threshold");
  app.add_option("--th2", f.th2, "cross/multi-hexagon threshold");
  app.add_option("--class-eps", f.class_eps, "ground-truth class threshold as a fraction of COST_mid");
  app.add_option("--pac-th", f.pac_th, "PMV accuracy threshold in integer pixels");
  app.add_option("--method", f.method, "shs | ccme | cost_only | zero_sad | full_search");
  app.add_option("--methods", f.methods, "comma-separated methods for sweep");
  app.add_option("--scale", f.scale, "budget scale in percent of calibrated SHS SPs per frame");
  app.add_option("--scales", f.scales, "comma-separated descending scales for sweep (must include 100)");
  app.add_option("--seed", f.seed, "synthetic sequence seed");
  app.add_option("--out", f.out, "output directory");
  app.add_flag("--strict", f.strict, "abort (exit 3) when a budgeted frame cannot honour its budget");

  auto* calibrate_cmd = app.add_subcommand("calibrate", "mean SHS SPs per frame (the 100% reference)");
  auto* run_cmd = app.add_subcommand("run", "run one method at one budget scale");
  auto* sweep_cmd = app.add_subcommand("sweep", "methods x scales comparison");
  auto* detect_cmd = app.add_subcommand("classify-eval", "PAC detection rates against the ground-truth classes");
  auto* dist_cmd = app.add_subcommand("class-dist", "ground-truth class shares for c in {0, 2%, 4%} of COST_mid");
  auto* synth_cmd = app.add_subcommand("synth", "write the synthetic sequence as Y4M plus layer truth");
  for (auto* sub : {calibrate_cmd, run_cmd, sweep_cmd, detect_cmd, dist_cmd, synth_cmd}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    log << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    const RunConfig config = f.resolve();
    const auto& out = config.out_dir;
    if (calibrate_cmd->parsed()) {
      const Calibration cal = calibrate_reference(config);
      detail::both_formats([&](ReportFormat fmt) { return emit(cal, fmt, out); }, log);
      log << "reference SPs/frame: " << format_real(cal.sp_per_frame()) << '\n';
    } else if (run_cmd->parsed()) {
      const SequenceReport r = run_sequence(config);
      detail::both_formats([&](ReportFormat fmt) { return emit(r, fmt, out); }, log);
      const Aggregates a = r.aggregates();
      log << to_string(r.method) << " @" << format_real(r.scale) << "%: avg SP/frame " << format_real(a.avg_actual_sp)
          << ", total COST " << a.total_cost << ", violations " << a.violations << '\n';
    } else if (sweep_cmd->parsed()) {
      const SweepReport r = sweep(config);
      detail::both_formats([&](ReportFormat fmt) { return emit(r, fmt, out); }, log);
      if (config.strict) {
        for (const auto& c : r.cells) {
          if (c.violations > 0 || c.sub_basic_frames > 0) {
            throw BudgetViolation(std::string(to_string(c.method)) + " @" + format_real(c.scale) +
                                  "%: budget not honoured");
          }
        }
      }
    } else if (detect_cmd->parsed()) {
      const DetectionReport r = eval_detection(config);
      detail::both_formats([&](ReportFormat fmt) { return emit(r, fmt, out); }, log);
      log << "class-2 recall " << format_real(r.recall2) << ", class-3 recall " << format_real(r.recall3) << '\n';
    } else if (dist_cmd->parsed()) {
      const ClassDistributionReport r = class_distribution(config);
      detail::both_formats([&](ReportFormat fmt) { return emit(r, fmt, out); }, log);
    } else if (synth_cmd->parsed()) {
      if (config.format != InputFormat::synth) throw ConfigError("synth needs --format synth or a [synth] section");
      const SynthSpec spec = synth_spec_for(config);
      const SynthResult res = synthesize(spec);
      std::filesystem::create_directories(out);
      save_y4m(out / "synth.y4m", res.frames);
      std::ostringstream truth;
      truth << "frame,layer,x,y,width,height,dx,dy,clipped\n";
      for (std::size_t t = 0; t < res.truth.size(); ++t) {
        for (std::size_t i = 0; i < res.truth[t].size(); ++i) {
          const auto& l = res.truth[t][i];
          truth << t << ',' << i << ',' << l.region.x << ',' << l.region.y << ',' << l.region.width << ','
                << l.region.height << ',' << l.motion.dx << ',' << l.motion.dy << ',' << (l.clipped ? 1 : 0) << '\n';
        }
      }
      detail::write_text(out / "synth_truth.csv", truth.str());
      log << "wrote " << (out / "synth.y4m").string() << '\n' << "wrote " << (out / "synth_truth.csv").string() << '\n';
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const InputError& e) {
    err << "input error: " << e.what() << '\n';
    return kExitInput;
  } catch (const BudgetViolation& e) {
    err << "budget violation: " << e.what() << '\n';
    return kExitBudget;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "input error: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitOk;
}

}  // namespace ccme
