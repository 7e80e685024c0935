#include "dipole/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <mutex>
#include <thread>

#include "dipole/report_io.hpp"

namespace dipole {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

template <class Fn>
void parallel_for(int count, int threads, Fn&& fn) {
  threads = std::max(1, std::min(threads, count));
  if (threads == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (int w = 0; w < threads; ++w)
    pool.emplace_back([&] {
      for (int i = next++; i < count; i = next++) fn(i);
    });
  for (auto& t : pool) t.join();
}

bool has_on_grid_component(const Vec3& v, const Grid& grid) {
  for (int j = 0; j < grid.dims_per_particle(); ++j)
    if (v[j] != 0.0) return true;
  return false;
}

}  // namespace

WaveFunction initial_state(const StudyConfig& config, const Grid& grid, const PotentialModel& potential,
                           double* energy) {
  if (config.run.initial == InitialState::Packet) {
    if (energy) *energy = std::numeric_limits<double>::quiet_NaN();
    return gaussian_packet(grid, config.run.packet_center, config.run.packet_sigma, config.run.packet_momentum);
  }
  const GroundState gs = ground_state_imaginary_time(potential, config.run.ground_tolerance);
  if (energy) *energy = gs.energy;
  return gs.state;
}

double fit_decay_slope(const std::vector<double>& lambdas, const std::vector<double>& errors) {
  if (lambdas.size() != errors.size()) throw ConfigError("slope fit needs matching arrays");
  double top = 0.0;
  for (std::size_t i = 0; i < lambdas.size(); ++i)
    if (errors[i] > 0.0) top = std::max(top, lambdas[i]);
  std::vector<double> x, y;
  for (std::size_t i = 0; i < lambdas.size(); ++i)
    if (errors[i] > 0.0 && lambdas[i] >= top / 10.0 * (1.0 - 1e-12)) {
      x.push_back(std::log(lambdas[i]));
      y.push_back(std::log(errors[i]));
    }
  if (x.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return -(n * sxy - sx * sy) / (n * sxx - sx * sx);
}

SweepResult run_convergence_sweep(const StudyConfig& config, const RunOptions& options) {
  const auto start = Clock::now();
  if (config.field.lambdas.empty()) throw ConfigError("sweep needs a lambda list");
  SweepResult result;
  result.preset = config.preset;
  result.config_hash = config_hash(config);
  result.omega = config.field.omega;

  const Grid grid = config.make_grid();
  const PotentialModel potential = config.make_potential(grid);
  result.initial_state = initial_state(config, grid, potential, &result.initial_energy);
  const StepperConfig stepper = config.stepper();

  std::vector<ScaledField> fields;
  for (double lambda : config.field.lambdas) fields.push_back(config.field_at(lambda));

  // U_inf does not depend on lambda: one dipole run, sampled on the Simpson nodes
  result.dipole = sample_dipole_trajectory(fields.front(), potential, result.initial_state, stepper,
                                           config.run.cook_panels);
  result.dipole_max_step_drift = result.dipole.max_step_drift;
  result.dipole_terminal_norm_defect = result.dipole.terminal_norm_defect;
  const WaveFunction& dipole_final = result.dipole.states.back();

  result.records.resize(fields.size());
  result.cook.resize(fields.size());
  parallel_for(static_cast<int>(fields.size()), options.threads, [&](int i) {
    const auto t_start = Clock::now();
    SweepRecord& rec = result.records[i];
    rec.lambda = fields[i].lambda;
    rec.c_derived = fields[i].c_derived();
    try {
      const Trajectory full = evolve(make_spec(CouplingKind::FullCoupling, fields[i], potential),
                                     result.initial_state, stepper, result.dipole.times);
      rec.error = distance(full.final_state, dipole_final);
      rec.max_step_drift = full.max_step_drift;
      rec.terminal_norm_defect = full.terminal_norm_defect;
      CookReport cook = cook_bound_from_samples(fields[i], result.dipole);
      cook.measured_error = rec.error;
      result.cook[i] = std::move(cook);
      rec.ok = true;
    } catch (const std::exception& e) {
      rec.ok = false;
      rec.diagnostic = e.what();
    }
    rec.runtime_seconds = seconds_since(t_start);
  });

  // panel doubling when any record fails the quadrature self-check
  for (int refine = 0; refine < 4; ++refine) {
    bool consistent = true;
    for (std::size_t i = 0; i < fields.size(); ++i)
      if (result.records[i].ok && !result.cook[i].quadrature_consistent) consistent = false;
    if (consistent) break;
    const DipoleSamples finer = sample_dipole_trajectory(fields.front(), potential, result.initial_state, stepper,
                                                         2 * result.cook.front().panels);
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (!result.records[i].ok) continue;
      CookReport cook = cook_bound_from_samples(fields[i], finer);
      cook.measured_error = result.records[i].error;
      result.cook[i] = std::move(cook);
    }
  }

  std::vector<double> lambdas, errors;
  result.strictly_decreasing = true;
  result.cook_nonincreasing = true;
  const SweepRecord* prev = nullptr;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    SweepRecord& rec = result.records[i];
    if (!rec.ok) {
      result.partial = true;
      result.strictly_decreasing = false;
      result.cook_nonincreasing = false;
      continue;
    }
    rec.cook_bound = result.cook[i].bound;
    rec.cook_self_estimate = result.cook[i].self_estimate();
    rec.cook_consistent = result.cook[i].quadrature_consistent;
    lambdas.push_back(rec.lambda);
    errors.push_back(rec.error);
    if (prev) {
      if (!(rec.error < prev->error)) result.strictly_decreasing = false;
      if (rec.cook_bound > prev->cook_bound) result.cook_nonincreasing = false;
    }
    prev = &rec;
  }
  result.slope = fit_decay_slope(lambdas, errors);
  result.runtime_seconds = seconds_since(start);
  return result;
}

std::vector<CookReport> run_cook_comparison(const StudyConfig& config, const RunOptions& options) {
  SweepResult sweep = run_convergence_sweep(config, options);
  std::vector<CookReport> out;
  for (std::size_t i = 0; i < sweep.records.size(); ++i)
    if (sweep.records[i].ok) out.push_back(std::move(sweep.cook[i]));
  return out;
}

LaserEnvelope polarized_on_grid(const LaserEnvelope& env) {
  LaserEnvelope out = env;
  std::swap(out.k_hat, out.eps_hat);
  return out;
}

GaugeCheckReport run_gauge_check(const StudyConfig& config) {
  GaugeCheckReport report;
  report.config_hash = config_hash(config);
  report.omega_mismatch = config.run.gauge_omega_mismatch;

  const Grid grid = config.make_grid();
  const PotentialModel potential = config.make_potential(grid);
  const WaveFunction psi0 = initial_state(config, grid, potential);
  const StepperConfig stepper = config.stepper();
  const std::vector<double> times = config.gauge_sample_times();
  const double lambda = config.field.lambdas.empty() ? 1.0 : config.field.lambdas.back();

  const auto mismatched = [&](ScaledField f) {
    f.omega *= 1.0 + config.run.gauge_omega_mismatch;
    return f;
  };

  const ScaledField field(config.envelope(), lambda, config.field.omega);
  report.initial_map_defect = distance(velocity_to_length(field, psi0, stepper.t0), psi0);
  report.has_polarized = !field.is_zero() && !has_on_grid_component(field.envelope.eps_hat, grid);
  const ScaledField polarized(polarized_on_grid(field.envelope), lambda, field.omega);

  // the omega mismatch perturbs only the fixture where the map is non-trivial
  const bool perturb_preset = !report.has_polarized;
  report.forward = cross_gauge_check(field, perturb_preset ? mismatched(field) : field, potential, psi0, stepper,
                                     times, GaugeDirection::VelocityToLength);
  report.reverse = cross_gauge_check(field, perturb_preset ? mismatched(field) : field, potential, psi0, stepper,
                                     times, GaugeDirection::LengthToVelocity);
  report.min_fidelity = std::min(report.forward.min_fidelity, report.reverse.min_fidelity);
  if (report.has_polarized) {
    report.polarized_forward = cross_gauge_check(polarized, mismatched(polarized), potential, psi0, stepper, times,
                                                 GaugeDirection::VelocityToLength);
    report.polarized_reverse = cross_gauge_check(polarized, mismatched(polarized), potential, psi0, stepper, times,
                                                 GaugeDirection::LengthToVelocity);
    report.min_fidelity = std::min({report.min_fidelity, report.polarized_forward.min_fidelity,
                                    report.polarized_reverse.min_fidelity});
  }
  return report;
}

BoundsReport run_bounds(const StudyConfig& config) {
  BoundsReport report;
  report.grid = config.make_grid();
  report.time = config.bounds.time;
  report.seed = config.seed;
  report.probe_count = config.bounds.probes;
  const PotentialModel potential = config.make_potential(report.grid);
  const double lambda = config.field.lambdas.empty() ? 1.0 : config.field.lambdas.back();
  const HamiltonianSpec spec =
      make_spec(CouplingKind::DipoleVelocity, ScaledField(config.envelope(), lambda, config.field.omega), potential);
  const std::vector<WaveFunction> probes = make_probe_set(report.grid, config.bounds.probes, config.seed);
  PowerIterationOptions power;
  power.seed = config.seed;
  report.contraction = contraction_scan(spec, report.time, config.bounds.alphas, power);
  report.infinitesimal = infinitesimal_bound_scan(spec, report.time, config.bounds.epsilons, probes);
  report.graph_norm = graph_norm_constants(spec, report.time, config.bounds.graph_alpha, probes);
  return report;
}

FieldCheckReport run_field_check(const StudyConfig& config) {
  FieldCheckReport report;
  const LaserEnvelope env = config.envelope();
  report.transversality = check_transversality(env);
  const Grid grid = config.make_grid();
  const std::vector<double> times{0.0, 0.25, 0.5, 1.0, 2.0};
  for (double lambda : config.field.lambdas) {
    std::vector<double> scaled = grid.lengths;
    for (double& l : scaled) l /= lambda;
    const Grid unit = make_grid(grid.dim(), grid.points, scaled, grid.particles);
    const DivergenceReport div = check_divergence_free(env, unit, times);
    report.lambdas.push_back(lambda);
    report.divergence_defects.push_back(div.max_defect);
    report.commensurate = report.commensurate && div.commensurate;
    report.max_divergence_defect = std::max(report.max_divergence_defect, div.max_defect);
  }
  report.is_pulse = env.kind == EnvelopeKind::GaussianPulse;
  if (report.is_pulse) {
    report.pulse_asymptote = -env.amplitude * PulsePrimitive::shared().left_limit();
    report.pulse_asymptote_expected = std::sqrt(kPi) * std::exp(-0.25) * env.amplitude;
    report.pulse_window = PulsePrimitive::shared().window();
  }
  if (env.kind != EnvelopeKind::Zero) {
    const ScaledField field(env, config.field.lambdas.empty() ? 1.0 : config.field.lambdas.front(), config.field.omega);
    // the peak |g'| = E sits at u = 0 (t = t_center for the pulse, t = 0 for the wave)
    const double peak_time = (report.is_pulse ? env.t_center : 0.0) / config.field.omega;
    const int samples = 4001;
    const double span = config.run.t_final - config.run.t0;
    for (int i = 0; i < samples; ++i) {
      const double t = config.run.t0 + span * i / (samples - 1);
      report.peak_field = std::max(report.peak_field, eval_E_field(field, Vec3::Zero(), t).norm());
    }
    if (peak_time >= 0.0) report.peak_field = std::max(report.peak_field, eval_E_field(field, Vec3::Zero(), peak_time).norm());
    report.peak_field_expected = env.amplitude;
  }
  return report;
}

std::filesystem::path output_directory(const StudyConfig& config, const std::filesystem::path& out) {
  return out / config.preset / config_hash(config);
}

PresetArtifacts run_preset(const StudyConfig& config, const std::filesystem::path& out, const RunOptions& options) {
  const auto start = Clock::now();
  PresetArtifacts art;
  art.directory = output_directory(config, out);
  std::filesystem::create_directories(art.directory / "snapshots");

  art.field = run_field_check(config);
  art.sweep = run_convergence_sweep(config, options);
  art.gauge = run_gauge_check(config);
  art.bounds = run_bounds(config);

  write_sweep_csv(art.directory / "sweep.csv", art.sweep);
  write_cook_csv(art.directory / "cook.csv", art.sweep.cook);
  write_observables_csv(art.directory / "observables.csv", art.sweep.dipole);
  write_json(art.directory / "sweep.json", to_json(art.sweep));
  write_json(art.directory / "gauge.json", to_json(art.gauge));
  write_json(art.directory / "bounds.json", to_json(art.bounds));
  write_json(art.directory / "field.json", to_json(art.field));
  write_text(art.directory / "config.ini", to_ini(config));
  write_snapshot(art.directory / "snapshots" / "psi0.bin", art.sweep.initial_state);
  write_snapshot(art.directory / "snapshots" / "dipole_final.bin", art.sweep.dipole.states.back());

  Manifest manifest;
  manifest.config = config;
  manifest.threads = options.threads;
  manifest.runtime_seconds = seconds_since(start);
  for (const auto& r : art.sweep.records) manifest.record_runtimes.push_back(r.runtime_seconds);
  manifest.partial = art.sweep.partial;
  write_json(art.directory / "manifest.json", to_json(manifest));
  return art;
}

}  // namespace dipole
