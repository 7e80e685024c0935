#pragma once

#include <functional>
#include <string>
#include <vector>

#include "dipole/hamiltonians.hpp"
#include "dipole/spatial.hpp"

namespace dipole {

enum class StepMethod { SplitStrang, Krylov };

StepMethod parse_step_method(const std::string& name);
std::string to_string(StepMethod method);

struct KrylovOptions {
  int subspace = 24;
  double tolerance = 1e-10;
  int max_halvings = 8;
  double hermiticity_guard = 1e-8;
};

/// Time-integration policy. H(t) is frozen at the midpoint of every step.
struct StepperConfig {
  double t0 = 0.0;
  double t_final = 0.0;
  double dt = 1e-2;
  StepMethod method = StepMethod::Krylov;
  KrylovOptions krylov;

  void validate() const;
};

class KrylovConvergenceError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

struct StepStats {
  int subspace_used = 0;
  double residual_estimate = 0.0;
};

/// Strang step exp(-i dt/2 V_eff) exp(-i dt K(t_mid)) exp(-i dt/2 V_eff) for dipole generators.
/// The kinetic factor is diagonal in momentum space with symbol (k - b(t_mid))^2.
WaveFunction step_split(const HamiltonianSpec& spec, const WaveFunction& psi, double t, double dt);

/// exp(-i dt H(t + dt/2)) psi from a Lanczos subspace. Throws KrylovConvergenceError
/// when the residual estimate is still above tolerance at the full subspace size.
WaveFunction step_krylov(const HamiltonianSpec& spec, const WaveFunction& psi, double t, double dt,
                         const KrylovOptions& options = {}, StepStats* stats = nullptr);

using Observer = std::function<void(double t, const WaveFunction& psi)>;

struct Trajectory {
  StepMethod method = StepMethod::Krylov;
  std::vector<double> sample_times;
  std::vector<double> sample_norms;
  std::vector<WaveFunction> states;  ///< only filled when requested
  WaveFunction final_state;
  long steps = 0;
  int halvings = 0;
  double max_step_drift = 0.0;
  double max_residual = 0.0;
  double terminal_norm_defect = 0.0;  ///< | ||psi(t_final)|| - ||psi0|| |
};

/// Propagates psi0 from config.t0 to config.t_final. Sample times (clipped to the
/// interval, t0 and t_final always included) are hit exactly: each gap between
/// consecutive samples is split into ceil(gap / dt) equal steps. The observer sees
/// every sample; per-step norm drift is checked against the method's bound.
Trajectory evolve(const HamiltonianSpec& spec, const WaveFunction& psi0, const StepperConfig& config,
                  const std::vector<double>& sample_times = {}, const Observer& observer = {},
                  bool keep_states = false);

/// Per-step norm drift bound asserted by evolve.
double drift_bound(const StepperConfig& config);

struct GroundState {
  double energy = 0.0;
  WaveFunction state;
  double residual = 0.0;
  int iterations = 0;
};

/// Lowest eigenpair of -Lap + V by imaginary-time propagation psi <- exp(-tau H) psi / norm,
/// with the exponential taken in a Lanczos subspace. Stops when ||H psi - E psi|| <= tol.
GroundState ground_state_imaginary_time(const PotentialModel& potential, double tol = 1e-8,
                                        int max_iterations = 500);

/// Brute-force product of exact matrix exponentials of the midpoint-frozen dense H. Grids of at most 64 points.
WaveFunction dense_oracle_evolve(const HamiltonianSpec& spec, const WaveFunction& psi0, double t0, double t,
                                 int steps);

}  // namespace dipole
