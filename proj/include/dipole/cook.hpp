#pragma once

#include <limits>
#include <vector>

#include "dipole/hamiltonians.hpp"
#include "dipole/propagate.hpp"

namespace dipole {

/// g(s) = (2/omega) ||(a(r/lambda, omega s) - a(0, omega s)) . grad psi_s||
///      + (1/omega^2) ||(a(r/lambda, omega s)^2 - a(0, omega s)^2) psi_s||
/// with one term per particle; psi_s is a sample of the dipole trajectory.
double cook_integrand(const ScaledField& field, double s, const WaveFunction& psi_s);

/// Dipole trajectory sampled on composite-Simpson nodes over [t0, t_final].
struct DipoleSamples {
  int panels = 0;
  std::vector<double> times;  ///< 2 * panels + 1 equally spaced nodes
  std::vector<WaveFunction> states;
  double max_step_drift = 0.0;
  double terminal_norm_defect = 0.0;
};

/// Runs U_inf (velocity gauge) from psi0 and keeps the states at the Simpson nodes.
DipoleSamples sample_dipole_trajectory(const ScaledField& field, const PotentialModel& potential,
                                       const WaveFunction& psi0, const StepperConfig& config, int panels);

struct CookReport {
  double lambda = 0.0;
  double omega = 0.0;
  double t0 = 0.0;
  double t = 0.0;
  int panels = 0;
  std::vector<double> nodes;
  std::vector<double> weights;
  std::vector<double> integrand;
  double bound = 0.0;         ///< B with all nodes (M panels)
  double coarse_bound = 0.0;  ///< same integral on M/2 panels (every other node)
  bool quadrature_consistent = true;
  double measured_error = std::numeric_limits<double>::quiet_NaN();

  bool has_measured_error() const { return measured_error == measured_error; }
  double slack() const { return bound - measured_error; }
  /// |B_M - B_{M/2}| / B_M, 0 when B = 0.
  double self_estimate() const;
};

/// Certificate from pre-sampled dipole states. Panels must be even and >= 16.
CookReport cook_bound_from_samples(const ScaledField& field, const DipoleSamples& samples,
                                   double tolerance = 0.01);

struct CookOptions {
  int panels = 16;
  double tolerance = 0.01;
  int max_refinements = 4;
};

/// Samples the dipole trajectory once and evaluates B for every field (all sharing omega
/// and the envelope; they differ in lambda). Panels are doubled until the M vs M/2
/// estimates agree within tolerance for every field, or the refinement budget runs out.
std::vector<CookReport> cook_bounds(const std::vector<ScaledField>& fields, const PotentialModel& potential,
                                    const WaveFunction& psi0, const StepperConfig& config,
                                    const CookOptions& options = {});

CookReport cook_bound(const ScaledField& field, const PotentialModel& potential, const WaveFunction& psi0,
                      const StepperConfig& config, const CookOptions& options = {});

}  // namespace dipole
