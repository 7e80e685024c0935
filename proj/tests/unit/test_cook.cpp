#include <doctest.h>

#include <cmath>

#include "dipole/cook.hpp"

using namespace dipole;

namespace {

ScaledField cw(double amplitude, const Vec3& k, const Vec3& eps, double lambda, double omega = 1.0) {
  return ScaledField(LaserEnvelope::plane_wave(amplitude, k, eps), lambda, omega);
}

// g(s) assembled point by point from the envelope itself
double brute_force_integrand(const ScaledField& f, double s, const WaveFunction& psi) {
  const Grid& grid = psi.grid;
  const auto grad = spectral_gradient(psi);
  const Vec3 a0 = eval_envelope(f.envelope, Vec3::Zero(), f.omega * s);
  double lin = 0.0, quad = 0.0;
  for_each_point(grid, [&](Eigen::Index flat, const auto& x) {
    Complex dot = 0.0;
    double sq = 0.0;
    for (int p = 0; p < grid.particles; ++p) {
      const Vec3 a = eval_envelope(f.envelope, particle_position(grid, x, p) / f.lambda, f.omega * s);
      for (int j = 0; j < grid.dim(); ++j)
        if (grid.particle_of_axis(j) == p) dot += (a - a0)[grid.physical_axis(j)] * grad[j].values[flat];
      sq += a.squaredNorm() - a0.squaredNorm();
    }
    lin += std::norm(dot);
    quad += std::norm(sq * psi.values[flat]);
  });
  const double dv = grid.cell_volume();
  return 2.0 / f.omega * std::sqrt(lin * dv) + 1.0 / (f.omega * f.omega) * std::sqrt(quad * dv);
}

StepperConfig config(double t0, double t1, double dt) {
  StepperConfig c;
  c.t0 = t0;
  c.t_final = t1;
  c.dt = dt;
  return c;
}

}  // namespace

TEST_CASE("zero field gives a zero integrand and a zero bound") {
  const Grid g = make_grid(1, 128, 40.0);
  const auto v = make_soft_core(g, 1.0);
  const WaveFunction psi = gaussian_packet(g, {0.0}, 1.0, {0.0});
  CHECK(cook_integrand(ScaledField(), 0.4, psi) == 0.0);
  const auto r = cook_bound(ScaledField(LaserEnvelope::plane_wave(0.0, Vec3::UnitX(), Vec3::UnitY()), 40.0, 1.0), v,
                            psi, config(0.01, 1.0, 0.01));
  CHECK(r.bound == 0.0);
  CHECK(r.quadrature_consistent);
}

TEST_CASE("integrand matches pointwise assembly") {
  SUBCASE("1D preset geometry, ground state, lambda = 40") {
    const Grid g = make_grid(1, 512, 80.0);
    const WaveFunction psi = ground_state_imaginary_time(make_soft_core(g, 1.0)).state;
    const auto f = cw(1.0, Vec3::UnitX(), Vec3::UnitY(), 40.0);
    for (double s : {0.3, 1.2, 4.0}) CHECK(std::abs(cook_integrand(f, s, psi) - brute_force_integrand(f, s, psi)) <= 1e-12);
  }
  SUBCASE("2D with the polarisation on the grid") {
    const Grid g = make_grid(2, {64, 64}, {20.0, 20.0});
    const WaveFunction psi = gaussian_packet(g, {0.5, -0.3}, 1.5, {0.4, 0.2});
    const auto f = cw(1.0, Vec3::UnitX(), Vec3::UnitY(), 10.0, 1.3);
    for (double s : {0.3, 2.2}) CHECK(std::abs(cook_integrand(f, s, psi) - brute_force_integrand(f, s, psi)) <= 1e-12);
  }
  SUBCASE("two particles") {
    const Grid g = make_grid(2, 32, 20.0, 2);
    const WaveFunction psi = gaussian_packet(g, {0.5, -0.3}, 1.5, {0.0, 0.0});
    const auto f = cw(1.0, Vec3::UnitX(), Vec3::UnitY(), 10.0);
    CHECK(std::abs(cook_integrand(f, 0.8, psi) - brute_force_integrand(f, 0.8, psi)) <= 1e-12);
  }
}

TEST_CASE("integrand obeys the first-order Taylor bound for long wavelengths") {
  const Grid g = make_grid(2, {256, 32}, {128.0, 16.0});
  const double sigma = 1.5, E = 1.0, omega = 1.0, R = 8.0 * sigma;
  const WaveFunction psi = gaussian_packet(g, {0.0, 0.0}, sigma, {0.0, 0.5});
  double grad_norm = 0.0;
  for (const auto& d : spectral_gradient(psi)) grad_norm += std::pow(norm(d), 2);
  grad_norm = std::sqrt(grad_norm);
  for (double lambda : {64.0, 128.0}) {
    const auto f = cw(E, Vec3::UnitX(), Vec3::UnitY(), lambda, omega);
    const double shift = 2 * kPi * E * R / lambda;  // |a(r/lambda) - a(0)| on the support
    const double bound = 1.1 * (2.0 / omega * shift * grad_norm + 1.0 / (omega * omega) * shift * 2 * E);
    for (double s : {0.5, 1.7, 3.0}) CHECK(cook_integrand(f, s, psi) <= bound);
  }
}

TEST_CASE("bound decays at first order and dominates the measured error") {
  const Grid g = make_grid(1, 256, 100.0);
  const auto v = make_soft_core(g, 1.0);
  const WaveFunction psi0 = ground_state_imaginary_time(v).state;
  const StepperConfig c = config(0.01, 2 * kPi, 0.01);
  std::vector<ScaledField> fields;
  for (double lambda : {25.0, 50.0, 100.0}) fields.push_back(cw(1.0, Vec3::UnitX(), Vec3::UnitY(), lambda));
  auto reports = cook_bounds(fields, v, psi0, c);
  REQUIRE(reports.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(reports[i].quadrature_consistent);
    CHECK(reports[i].bound >= 0.0);
    for (double gj : reports[i].integrand) CHECK(gj >= 0.0);
  }
  for (std::size_t i = 1; i < 3; ++i) {
    const double ratio = reports[i].bound / reports[i - 1].bound;
    CHECK(ratio >= 0.4);
    CHECK(ratio <= 0.6);
  }
  const WaveFunction dipole_final =
      evolve(make_spec(CouplingKind::DipoleVelocity, fields[0], v), psi0, c, reports[0].nodes).final_state;
  for (std::size_t i = 0; i < 3; ++i) {
    const double e = distance(evolve(make_spec(CouplingKind::FullCoupling, fields[i], v), psi0, c, reports[0].nodes).final_state,
                              dipole_final);
    CHECK(e > 0.0);
    CHECK(reports[i].bound >= e - 1e-6);
  }
}

TEST_CASE("Simpson layout, self-estimate and bit-level determinism") {
  const Grid g = make_grid(1, 128, 50.0);
  const auto v = make_soft_core(g, 1.0);
  const WaveFunction psi0 = ground_state_imaginary_time(v).state;
  const auto f = cw(1.0, Vec3::UnitX(), Vec3::UnitY(), 25.0);
  const DipoleSamples samples = sample_dipole_trajectory(f, v, psi0, config(0.01, 2.0, 0.01), 16);
  CHECK(samples.times.size() == 33);
  const CookReport a = cook_bound_from_samples(f, samples);
  const CookReport b = cook_bound_from_samples(f, samples);
  CHECK(a.bound == b.bound);
  CHECK(a.integrand == b.integrand);
  double wsum = 0.0;
  for (double w : a.weights) wsum += w;
  CHECK(wsum == doctest::Approx(2.0 - 0.01).epsilon(1e-14));
  CHECK(a.self_estimate() <= 0.01);
  CHECK_THROWS_AS(sample_dipole_trajectory(f, v, psi0, config(0.01, 2.0, 0.01), 15), ConfigError);
  CHECK_THROWS_AS(sample_dipole_trajectory(f, v, psi0, config(0.01, 2.0, 0.01), 8), ConfigError);
}
