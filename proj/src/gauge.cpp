#include "dipole/gauge.hpp"

#include <algorithm>
#include <cmath>

namespace dipole {

namespace {

WaveFunction multiply_phase(const ScaledField& field, const WaveFunction& psi, double t, double sign) {
  if (psi.space != Space::Position) throw ConfigError("gauge map acts on position-space states");
  const Grid& grid = psi.grid;
  const DipoleCoupling c = dipole_coupling(field, grid, t);
  WaveFunction out = psi;
  if (c.along_axis.isZero(0.0)) return out;
  const int n = grid.dim();
  for_each_point(grid, [&](Eigen::Index flat, const auto& x) {
    double phase = 0.0;
    for (int j = 0; j < n; ++j) phase += c.along_axis[j] * x[j];
    out.values[flat] *= std::polar(1.0, sign * phase);
  });
  return out;
}

}  // namespace

WaveFunction GaugeMap::operator()(const WaveFunction& psi, double t) const {
  return direction == GaugeDirection::VelocityToLength ? velocity_to_length(field, psi, t)
                                                       : length_to_velocity(field, psi, t);
}

GaugeMap GaugeMap::inverse() const {
  return {field, direction == GaugeDirection::VelocityToLength ? GaugeDirection::LengthToVelocity
                                                               : GaugeDirection::VelocityToLength};
}

WaveFunction velocity_to_length(const ScaledField& field, const WaveFunction& psi_v, double t) {
  return multiply_phase(field, psi_v, t, -1.0);
}

WaveFunction length_to_velocity(const ScaledField& field, const WaveFunction& psi_l, double t) {
  return multiply_phase(field, psi_l, t, 1.0);
}

double phase_fidelity(const WaveFunction& a, const WaveFunction& b) {
  if (!(a.grid == b.grid) || a.space != b.space) throw ConfigError("fidelity needs states on the same grid");
  const double na = norm(a), nb = norm(b);
  if (na == 0.0 || nb == 0.0) throw NumericalError("fidelity of a zero state");
  return std::min(1.0, std::abs(inner_product(a, b)) / (na * nb));
}

CrossGaugeReport cross_gauge_check(const ScaledField& field, const ScaledField& other_field,
                                   const PotentialModel& potential, const WaveFunction& psi0,
                                   const StepperConfig& config, const std::vector<double>& sample_times,
                                   GaugeDirection direction) {
  const bool from_velocity = direction == GaugeDirection::VelocityToLength;
  const CouplingKind own = from_velocity ? CouplingKind::DipoleVelocity : CouplingKind::DipoleLength;
  const CouplingKind other = from_velocity ? CouplingKind::DipoleLength : CouplingKind::DipoleVelocity;
  const GaugeMap to_other{field, direction};
  const GaugeMap back = to_other.inverse();

  const Trajectory reference = evolve(make_spec(own, field, potential), psi0, config, sample_times, {}, true);
  const Trajectory mapped =
      evolve(make_spec(other, other_field, potential), to_other(psi0, config.t0), config, sample_times, {}, true);

  CrossGaugeReport report;
  report.direction = direction;
  for (std::size_t i = 0; i < reference.sample_times.size(); ++i) {
    const double t = reference.sample_times[i];
    const double f = phase_fidelity(reference.states[i], back(mapped.states[i], t));
    report.times.push_back(t);
    report.fidelities.push_back(f);
    report.min_fidelity = std::min(report.min_fidelity, f);
  }
  return report;
}

}  // namespace dipole
