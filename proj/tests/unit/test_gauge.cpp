#include <doctest.h>

#include <cmath>

#include "dipole/gauge.hpp"

using namespace dipole;

namespace {

// polarisation along the grid so the map is a genuine position-dependent phase
ScaledField polarized_cw(double omega = 1.0) {
  return ScaledField(LaserEnvelope::plane_wave(1.0, Vec3::UnitY(), Vec3::UnitX()), 50.0, omega);
}

StepperConfig config(double t0, double t1, double dt) {
  StepperConfig c;
  c.t0 = t0;
  c.t_final = t1;
  c.dt = dt;
  return c;
}

}  // namespace

TEST_CASE("gauge map is the identity where the dipole potential vanishes") {
  const Grid g = make_grid(1, 128, 40.0);
  const WaveFunction psi = make_probe_set(g, 1, 2).front();
  // b(0, t) = sin(-t) / omega vanishes at t = 0
  CHECK(distance(velocity_to_length(polarized_cw(), psi, 0.0), psi) == 0.0);
  CHECK(distance(velocity_to_length(ScaledField(), psi, 0.7), psi) == 0.0);
  CHECK(distance(length_to_velocity(ScaledField(), psi, 0.7), psi) == 0.0);
}

TEST_CASE("gauge map preserves norms and is involutive") {
  const Grid g = make_grid(2, 32, 20.0);
  const ScaledField field(LaserEnvelope::plane_wave(1.3, Vec3::UnitZ(), Vec3(1, 1, 0).normalized()), 10.0, 0.8);
  for (const auto& psi : make_probe_set(g, 4, 12)) {
    const WaveFunction l = velocity_to_length(field, psi, 1.1);
    CHECK(std::abs(norm(l) - norm(psi)) <= 1e-13);
    CHECK(distance(length_to_velocity(field, l, 1.1), psi) <= 1e-13);
    const GaugeMap map{field, GaugeDirection::VelocityToLength};
    CHECK(distance(map.inverse()(map(psi, 1.1), 1.1), psi) <= 1e-13);
    CHECK(distance(l, psi) > 1e-3);
  }
}

TEST_CASE("phase fidelity") {
  const Grid g = make_grid(1, 256, 40.0);
  const WaveFunction psi = gaussian_packet(g, {-5.0}, 1.0, {0.0});
  WaveFunction rotated = psi;
  rotated.values *= std::polar(1.0, 2.1);
  CHECK(phase_fidelity(psi, rotated) == doctest::Approx(1.0).epsilon(1e-15));

  const WaveFunction far = gaussian_packet(g, {5.0}, 1.0, {0.0});
  // overlap e^{-d^2/(4 sigma^2)} with d = 10
  CHECK(phase_fidelity(psi, far) <= 1e-10);

  // psi + eps phi with phi orthogonal: 1/sqrt(1 + eps^2)
  WaveFunction phi = gaussian_packet(g, {-5.0}, 1.0, {0.0});
  for (int i = 0; i < 256; ++i) phi.values[i] *= (g.coordinate(0, i) + 5.0);
  phi = normalized(phi);
  REQUIRE(std::abs(inner_product(psi, phi)) < 1e-14);
  WaveFunction mixed = psi;
  mixed.values += 1e-3 * phi.values;
  CHECK(phase_fidelity(psi, mixed) == doctest::Approx(1.0 / std::sqrt(1.0 + 1e-6)).epsilon(1e-14));
  CHECK_THROWS_AS(phase_fidelity(psi, WaveFunction::zeros(g)), NumericalError);
}

TEST_CASE("velocity- and length-gauge dipole trajectories agree under the map") {
  const Grid g = make_grid(1, 512, 100.0);
  const auto v = make_soft_core(g, 1.0);
  const WaveFunction psi0 = ground_state_imaginary_time(v).state;
  const std::vector<double> times{1.0, 2.0, 3.0, 4.0, 5.0, 6.0};
  for (GaugeDirection d : {GaugeDirection::VelocityToLength, GaugeDirection::LengthToVelocity}) {
    const auto r = cross_gauge_check(polarized_cw(), polarized_cw(), v, psi0, config(0.01, 2 * kPi, 0.01), times, d);
    CHECK(r.times.size() == 8);
    CHECK(r.min_fidelity >= 1.0 - 1e-6);
  }
  // a mismatched frequency in the second gauge is caught
  const auto bad = cross_gauge_check(polarized_cw(), polarized_cw(1.5), v, psi0, config(0.01, 2 * kPi, 0.01), times);
  CHECK(bad.min_fidelity < 0.99);
}

TEST_CASE("mid-pulse start maps the initial state too") {
  const Grid g = make_grid(1, 512, 100.0);
  const auto v = make_soft_core(g, 1.0);
  const WaveFunction psi0 = ground_state_imaginary_time(v).state;
  const ScaledField pulse(LaserEnvelope::gaussian_pulse(1.0, Vec3::UnitY(), Vec3::UnitX(), 2.0), 50.0, 1.0);
  REQUIRE(dipole_coupling(pulse, g, 2.5).along_axis[0] != 0.0);
  const auto r = cross_gauge_check(pulse, pulse, v, psi0, config(2.5, 6.0, 0.01), {3.0, 4.0, 5.0});
  CHECK(r.min_fidelity >= 1.0 - 1e-6);
}
