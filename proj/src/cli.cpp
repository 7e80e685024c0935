#include "dipole/cli.hpp"

#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "dipole/harness.hpp"
#include "dipole/report_io.hpp"

namespace dipole {

namespace {

struct Common {
  std::string config_path;
  std::string preset;
  std::string out = "results";
  std::optional<std::uint64_t> seed;
  int threads = 1;
};

void add_common(CLI::App* cmd, Common& c, bool preset_flag = true) {
  cmd->add_option("--config", c.config_path, "INI study configuration");
  if (preset_flag) cmd->add_option("--preset", c.preset, "built-in preset instead of a config file");
  cmd->add_option("--out", c.out, "output root directory");
  cmd->add_option("--seed", c.seed, "probe-set seed override");
  cmd->add_option("--threads", c.threads, "worker threads for lambda fan-out")->check(CLI::PositiveNumber);
}

StudyConfig resolve(const Common& c) {
  StudyConfig config;
  if (!c.config_path.empty()) config = load_config(c.config_path);
  else if (!c.preset.empty()) config = preset_config(c.preset);
  else throw ConfigError("no configuration: pass --config <path> or --preset <name>");
  if (c.seed) config.seed = *c.seed;
  return config;
}

void print_sweep(std::ostream& out, const SweepResult& s) {
  out << "lambda,error,cook_bound,status\n";
  for (const auto& r : s.records)
    out << format_number(r.lambda) << "," << format_number(r.error) << "," << format_number(r.cook_bound) << ","
        << (r.ok ? "ok" : "failed: " + r.diagnostic) << "\n";
  out << "slope " << format_number(s.slope) << (s.partial ? " (partial)" : "") << "\n";
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"dipolelab: dipole-approximation checks for laser-driven Schroedinger dynamics"};
  app.require_subcommand(1);
  Common common;
  std::string preset_name;

  auto* sweep = app.add_subcommand("sweep", "convergence sweep over lambda at fixed omega");
  auto* gauge = app.add_subcommand("gauge-check", "cross-gauge fidelity of the dipole trajectories");
  auto* cook = app.add_subcommand("cook", "Cook certificate against measured errors");
  auto* bounds = app.add_subcommand("bounds", "relative-bound, contraction and graph-norm scans");
  auto* preset = app.add_subcommand("preset", "run every study of a built-in preset");
  auto* field = app.add_subcommand("field-check", "transversality, divergence and pulse checks");
  for (auto* cmd : {sweep, gauge, cook, bounds, field}) add_common(cmd, common);
  add_common(preset, common, false);
  preset->add_option("name", preset_name, "cw-1d | pulse-1d | two-body-1d")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    const RunOptions options{common.threads};
    if (preset->parsed()) {
      StudyConfig config = preset_config(preset_name);
      if (!common.config_path.empty()) config = load_config(common.config_path);
      if (common.seed) config.seed = *common.seed;
      const PresetArtifacts art = run_preset(config, common.out, options);
      print_sweep(out, art.sweep);
      out << "gauge min fidelity " << format_number(art.gauge.min_fidelity) << "\n";
      out << "written to " << art.directory.string() << "\n";
      return 0;
    }
    const StudyConfig config = resolve(common);
    const auto dir = output_directory(config, common.out);
    if (sweep->parsed() || cook->parsed()) {
      const SweepResult s = run_convergence_sweep(config, options);
      write_sweep_csv(dir / "sweep.csv", s);
      write_cook_csv(dir / "cook.csv", s.cook);
      write_json(dir / (sweep->parsed() ? "sweep.json" : "cook.json"), to_json(s));
      Manifest m{config, common.threads, s.runtime_seconds, {}, s.partial};
      for (const auto& r : s.records) m.record_runtimes.push_back(r.runtime_seconds);
      write_json(dir / "manifest.json", to_json(m));
      print_sweep(out, s);
      if (cook->parsed())
        for (const auto& c : s.cook)
          out << "lambda " << format_number(c.lambda) << ": B = " << format_number(c.bound)
              << ", e = " << format_number(c.measured_error) << "\n";
      return s.partial ? 2 : 0;
    }
    if (gauge->parsed()) {
      const GaugeCheckReport r = run_gauge_check(config);
      write_json(dir / "gauge.json", to_json(r));
      out << "min fidelity " << format_number(r.min_fidelity) << "\n";
      return 0;
    }
    if (bounds->parsed()) {
      const BoundsReport r = run_bounds(config);
      write_json(dir / "bounds.json", to_json(r));
      out << format_bounds_table(r);
      return 0;
    }
    if (field->parsed()) {
      const FieldCheckReport r = run_field_check(config);
      write_json(dir / "field.json", to_json(r));
      out << to_json(r).dump(2) << "\n";
      return 0;
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 1;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

}  // namespace dipole
