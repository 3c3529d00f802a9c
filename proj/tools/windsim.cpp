#include <CLI11.hpp>

#include <iostream>

#include "windsim/windsim.hpp"

using namespace windsim;

namespace {

enum Exit { ok = 0, failure = 1, bad_input = 2, degraded = 3 };

void print_warnings(const std::vector<std::string> &w) {
  for (const auto &m : w)
    std::cerr << "warning: " << m << '\n';
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Wind power simulation from gridded reanalysis winds"};
  app.require_subcommand(1);

  std::string config, method, out;
  auto add_common = [&](CLI::App *sub, bool need_config) {
    auto *c = sub->add_option("--config", config, "run configuration file");
    if (need_config)
      c->required()->check(CLI::ExistingFile);
    sub->add_option("--method", method,
                    "run only this method: nn|bli|bci|idw, a correction name, or interp:correction");
    sub->add_option("--out", out, "output directory");
  };
  auto *simulate = app.add_subcommand("simulate", "simulate park and region generation");
  auto *validate = app.add_subcommand("validate", "compare simulate outputs with observations");
  auto *sweep = app.add_subcommand("sweep-distance", "mean_station run per station distance limit");
  auto *synthetic = app.add_subcommand("synthetic", "write a synthetic input bundle");
  auto *full = app.add_subcommand("full", "simulate, validate and sweep");
  for (auto *s : {simulate, validate, sweep, full})
    add_common(s, true);
  add_common(synthetic, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int rc = app.exit(e);
    return rc == 0 ? ok : bad_input;
  }

  try {
    if (synthetic->parsed()) {
      RunConfig::Synthetic s;
      if (!config.empty())
        s = synthetic_settings(ConfigFile::load(config));
      const auto b = run_synthetic(s, out.empty() ? fs::path("synthetic") : fs::path(out));
      std::cout << b.config.string() << '\n';
      return ok;
    }

    RunConfig cfg = load_run_config(config);
    if (!method.empty())
      apply_method_override(cfg, method);
    if (!out.empty())
      cfg.out_dir = out;

    Pipeline p(cfg);
    int code = ok;
    try {
      if (simulate->parsed()) {
        p.simulate();
      } else if (validate->parsed()) {
        p.validate();
      } else if (sweep->parsed()) {
        p.sweep_distance();
      } else {
        p.simulate();
        p.validate();
        if (!cfg.input.stations.empty() && !cfg.input.measurements.empty())
          p.sweep_distance();
      }
      p.check_degradation();
    } catch (const DegradationError &e) {
      std::cerr << "degraded: " << e.what() << '\n';
      code = degraded;
    }
    print_warnings(p.warnings());
    return code;
  } catch (const ConfigError &e) {
    std::cerr << "config error: " << e.what() << '\n';
    return bad_input;
  } catch (const IngestError &e) {
    std::cerr << "input error: " << e.what() << '\n';
    return bad_input;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return failure;
  }
}
