#pragma once

#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include "dipole/bounds.hpp"
#include "dipole/config.hpp"
#include "dipole/cook.hpp"
#include "dipole/gauge.hpp"

namespace dipole {

struct RunOptions {
  int threads = 1;
};

struct SweepRecord {
  double lambda = 0.0;
  double c_derived = 0.0;
  double error = std::numeric_limits<double>::quiet_NaN();  ///< ||(U_lambda - U_inf) psi0||(t_final)
  double cook_bound = std::numeric_limits<double>::quiet_NaN();
  double cook_self_estimate = 0.0;
  bool cook_consistent = true;
  double max_step_drift = 0.0;
  double terminal_norm_defect = 0.0;
  bool ok = false;
  std::string diagnostic;
  double runtime_seconds = 0.0;  ///< manifest only
};

struct SweepResult {
  std::string preset;
  std::string config_hash;
  double omega = 0.0;
  std::vector<SweepRecord> records;
  std::vector<CookReport> cook;
  double slope = std::numeric_limits<double>::quiet_NaN();  ///< -d log e / d log lambda
  bool partial = false;
  bool strictly_decreasing = false;
  bool cook_nonincreasing = false;
  double initial_energy = std::numeric_limits<double>::quiet_NaN();
  double dipole_max_step_drift = 0.0;
  double dipole_terminal_norm_defect = 0.0;
  WaveFunction initial_state;
  DipoleSamples dipole;  ///< U_inf states at the Simpson nodes
  double runtime_seconds = 0.0;
};

/// psi0 from the config recipe; the ground-state energy is written to `energy` when requested.
WaveFunction initial_state(const StudyConfig& config, const Grid& grid, const PotentialModel& potential,
                           double* energy = nullptr);

/// Least-squares slope of -log e against log lambda over the top decade of lambda.
double fit_decay_slope(const std::vector<double>& lambdas, const std::vector<double>& errors);

SweepResult run_convergence_sweep(const StudyConfig& config, const RunOptions& options = {});

/// Cook reports of the sweep with measured errors filled in.
std::vector<CookReport> run_cook_comparison(const StudyConfig& config, const RunOptions& options = {});

struct GaugeCheckReport {
  std::string config_hash;
  CrossGaugeReport forward;  ///< preset field, velocity -> length
  CrossGaugeReport reverse;  ///< preset field, length -> velocity
  /// Same envelope with polarisation turned onto the grid; present when the
  /// preset polarisation has no on-grid component (the map is then trivial).
  bool has_polarized = false;
  CrossGaugeReport polarized_forward;
  CrossGaugeReport polarized_reverse;
  double omega_mismatch = 0.0;
  double initial_map_defect = 0.0;  ///< ||map(psi0, t0) - psi0||
  double min_fidelity = 1.0;
};

GaugeCheckReport run_gauge_check(const StudyConfig& config);

/// Envelope with k_hat and eps_hat exchanged, so the polarisation lies along the grid.
LaserEnvelope polarized_on_grid(const LaserEnvelope& env);

BoundsReport run_bounds(const StudyConfig& config);

struct FieldCheckReport {
  TransversalityReport transversality;
  std::vector<double> lambdas;
  std::vector<double> divergence_defects;
  bool commensurate = true;
  double max_divergence_defect = 0.0;
  bool is_pulse = false;
  double pulse_asymptote = 0.0;           ///< -E F(-inf) from the table
  double pulse_asymptote_expected = 0.0;  ///< sqrt(pi) e^{-1/4} E
  double pulse_window = 0.0;              ///< table covers u in [-window, window], constant outside
  double peak_field = 0.0;                ///< max over sampled t of |E(0, t)|
  double peak_field_expected = 0.0;
};

FieldCheckReport run_field_check(const StudyConfig& config);

struct PresetArtifacts {
  std::filesystem::path directory;
  SweepResult sweep;
  GaugeCheckReport gauge;
  BoundsReport bounds;
  FieldCheckReport field;
};

/// Runs every study for the config and writes
/// <out>/<preset>/<config-hash>/{sweep.csv, cook.csv, observables.csv, *.json, manifest.json, snapshots/}.
PresetArtifacts run_preset(const StudyConfig& config, const std::filesystem::path& out, const RunOptions& options = {});

/// <out>/<preset>/<config-hash>
std::filesystem::path output_directory(const StudyConfig& config, const std::filesystem::path& out);

}  // namespace dipole
