#pragma once

#include <vector>

#include "dipole/hamiltonians.hpp"
#include "dipole/propagate.hpp"

namespace dipole {

enum class GaugeDirection { VelocityToLength, LengthToVelocity };

/// Multiplier exp(-+i b(0,t) . sum_k r_k) linking the two dipole gauges.
/// Only the r = 0 values of the field enter.
struct GaugeMap {
  ScaledField field;
  GaugeDirection direction = GaugeDirection::VelocityToLength;

  WaveFunction operator()(const WaveFunction& psi, double t) const;
  GaugeMap inverse() const;
};

/// psi_L = exp(-i b(0,t) . r) psi_V.
WaveFunction velocity_to_length(const ScaledField& field, const WaveFunction& psi_v, double t);
/// psi_V = exp(+i b(0,t) . r) psi_L.
WaveFunction length_to_velocity(const ScaledField& field, const WaveFunction& psi_l, double t);

/// |<a, b>| / (||a|| ||b||); throws NumericalError on a zero state.
double phase_fidelity(const WaveFunction& a, const WaveFunction& b);

struct CrossGaugeReport {
  GaugeDirection direction = GaugeDirection::VelocityToLength;
  std::vector<double> times;
  std::vector<double> fidelities;
  double min_fidelity = 1.0;
};

/// Evolves psi0 in its own gauge and, separately, the mapped psi0 in the other gauge,
/// maps back and compares at every sample time. `other_field` drives the second
/// trajectory (normally identical to `field`; a mismatch serves as a negative control).
CrossGaugeReport cross_gauge_check(const ScaledField& field, const ScaledField& other_field,
                                   const PotentialModel& potential, const WaveFunction& psi0,
                                   const StepperConfig& config, const std::vector<double>& sample_times,
                                   GaugeDirection direction = GaugeDirection::VelocityToLength);

}  // namespace dipole
