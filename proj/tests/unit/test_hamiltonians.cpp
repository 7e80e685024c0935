#include <doctest.h>

#include <cmath>

#include "dipole/hamiltonians.hpp"

using namespace dipole;

namespace {

ScaledField cw(double amplitude, const Vec3& k, const Vec3& eps, double lambda, double omega = 1.0) {
  return ScaledField(LaserEnvelope::plane_wave(amplitude, k, eps), lambda, omega);
}

std::vector<HamiltonianSpec> small_specs(const Grid& grid) {
  const auto v = make_soft_core(grid, 1.0);
  const auto along = cw(0.8, Vec3::UnitY(), Vec3::UnitX(), 2.0);  // polarised on the grid
  const double l = grid.lengths[0];
  const auto varying = cw(0.8, Vec3::UnitX(), Vec3::UnitY(), l / 2);  // varies along the grid
  std::vector<HamiltonianSpec> specs;
  for (const auto& f : {along, varying}) {
    specs.push_back(make_spec(CouplingKind::DipoleVelocity, f, v));
    specs.push_back(make_spec(CouplingKind::DipoleLength, f, v));
    specs.push_back(make_spec(CouplingKind::FullCoupling, f, v));
  }
  return specs;
}

}  // namespace

TEST_CASE("potential models") {
  const Grid g = make_grid(1, 64, 20.0);
  const auto soft = make_soft_core(g, 2.0, 0.5);
  CHECK(soft.samples[32] == doctest::Approx(-2.0 * 2.0 / 0.5));  // x = 0
  const auto well = make_gaussian_well(g, 3.0, 1.5);
  CHECK(well.samples[32] == doctest::Approx(-3.0));
  CHECK(make_zero_potential(g).samples.isZero(0.0));
  CHECK_THROWS_AS(make_soft_core(g, 1.0, 0.0), ConfigError);
  CHECK_THROWS_AS(parse_potential_kind("coulomb"), ConfigError);
  CHECK(parse_potential_kind("nbody-soft-core") == PotentialKind::NBodySoftCore);
}

TEST_CASE("two-body potential: formula and exchange symmetry") {
  const Grid g = make_grid(2, 16, 10.0, 2);
  const auto v = build_nbody(2, 1.0, g);
  double worst = 0.0, worst_sym = 0.0;
  for (int i = 0; i < 16; ++i)
    for (int j = 0; j < 16; ++j) {
      const double x1 = g.coordinate(0, i), x2 = g.coordinate(1, j);
      const double expect = -4.0 / std::sqrt(x1 * x1 + 1) - 4.0 / std::sqrt(x2 * x2 + 1) +
                            2.0 / std::sqrt((x1 - x2) * (x1 - x2) + 1);
      worst = std::max(worst, std::abs(v.samples[i * 16 + j] - expect));
      worst_sym = std::max(worst_sym, std::abs(v.samples[i * 16 + j] - v.samples[j * 16 + i]));
    }
  CHECK(worst < 1e-14);
  CHECK(worst_sym < 1e-14);
  CHECK_THROWS_AS(build_nbody(3, 1.0, g), ConfigError);
}

TEST_CASE("plane waves are eigenfunctions of the free and velocity-gauge generators") {
  const Grid g = make_grid(1, 64, 16.0);
  const int m = 5;
  const double k = 2 * kPi * m / 16.0;
  WaveFunction psi = WaveFunction::zeros(g);
  for (int i = 0; i < 64; ++i) psi.values[i] = std::polar(1.0, k * g.coordinate(0, i));

  const auto free = make_spec(CouplingKind::DipoleVelocity, ScaledField(), make_zero_potential(g));
  CHECK((apply_hamiltonian(free, 0.3, psi).values - k * k * psi.values).norm() < 1e-11);

  // b(0,t) = (E/omega) sin(-omega t) along the grid
  const auto field = cw(0.7, Vec3::UnitY(), Vec3::UnitX(), 3.0, 1.3);
  const auto spec = make_spec(CouplingKind::DipoleVelocity, field, make_zero_potential(g));
  const double t = 0.4;
  const double b = 0.7 / 1.3 * std::sin(-1.3 * t);
  CHECK((apply_hamiltonian(spec, t, psi).values - (k - b) * (k - b) * psi.values).norm() < 1e-11);
}

TEST_CASE("length-gauge interaction is the field-rate times position") {
  const Grid g = make_grid(1, 32, 10.0);
  const auto field = cw(0.9, Vec3::UnitY(), Vec3::UnitX(), 3.0, 2.0);
  const Eigen::VectorXd v = length_gauge_potential(field, g, 0.35);
  const double rate = dipole_coupling_rate(field, 0.35).x();
  for (int i = 0; i < 32; ++i) CHECK(v[i] == doctest::Approx(rate * g.coordinate(0, i)).epsilon(1e-14));
}

TEST_CASE("matrix-free application matches the dense assembly for every generator") {
  for (const Grid& g : {make_grid(1, 16, 8.0), make_grid(2, 8, 6.0)}) {
    const auto probes = make_probe_set(g, 3, 2);
    for (const auto& spec : small_specs(g)) {
      const Eigen::MatrixXcd h = dense_hamiltonian(spec, 0.77);
      for (const auto& p : probes)
        CHECK((apply_hamiltonian(spec, 0.77, p).values - h * p.values).norm() < 1e-10 * (1 + h.norm()));
    }
  }
}

TEST_CASE("interaction operator is H minus the free kinetic term") {
  const Grid g = make_grid(1, 64, 20.0);
  const auto field = cw(1.0, Vec3::UnitX(), Vec3::UnitY(), 10.0);
  const auto spec = make_spec(CouplingKind::FullCoupling, field, make_soft_core(g, 1.0));
  const WaveFunction p = make_probe_set(g, 1, 4).front();
  const WaveFunction lap = spectral_laplacian(p);
  CHECK((apply_interaction(spec, 0.5, p).values - apply_hamiltonian(spec, 0.5, p).values - lap.values).norm() < 1e-11);
}

TEST_CASE("hermiticity defects") {
  const Grid g = make_grid(2, 32, 10.0);
  const auto v = make_soft_core(g, 1.0);
  const auto oblique = cw(1.0, Vec3(3, 4, 0) / 5.0, Vec3(-4, 3, 0) / 5.0, 2.0);
  CHECK(hermiticity_defect(make_spec(CouplingKind::DipoleVelocity, oblique, v), 0.3) <= 1e-11);
  CHECK(hermiticity_defect(make_spec(CouplingKind::DipoleLength, oblique, v), 0.3) <= 1e-11);
  CHECK(hermiticity_defect(make_spec(CouplingKind::FullCoupling, oblique, v), 0.3) <= 1e-10);

  // polarisation along the propagation direction breaks the Coulomb gauge
  LaserEnvelope broken;
  broken.kind = EnvelopeKind::PlaneWaveCW;
  broken.amplitude = 1.0;
  broken.k_hat = Vec3::UnitX();
  broken.eps_hat = Vec3::UnitX();
  const HamiltonianSpec bad{CouplingKind::FullCoupling, ScaledField(broken, 5.0, 1.0), v};
  CHECK(hermiticity_defect(bad, 0.3) > 1e-4);
  CHECK_THROWS_AS(hermiticity_defect(bad, 0.3, 4), ConfigError);
}

TEST_CASE("full coupling rejects non-commensurate wavelengths") {
  const Grid g = make_grid(1, 64, 20.0);
  const auto field = cw(1.0, Vec3::UnitX(), Vec3::UnitY(), 7.0);
  CHECK_THROWS_AS(make_spec(CouplingKind::FullCoupling, field, make_zero_potential(g)), ConfigError);
  CHECK_NOTHROW(make_spec(CouplingKind::DipoleVelocity, field, make_zero_potential(g)));
}

TEST_CASE("dense assembly is size capped") {
  const Grid g = make_grid(1, 2048, 20.0);
  const auto spec = make_spec(CouplingKind::DipoleVelocity, ScaledField(), make_zero_potential(g));
  CHECK_THROWS_AS(dense_hamiltonian(spec, 0.0), ConfigError);
}

TEST_CASE("coupling samples of the full field and the dipole value") {
  const Grid g = make_grid(1, 64, 40.0);
  const auto field = cw(1.0, Vec3::UnitX(), Vec3::UnitY(), 20.0, 2.0);
  const auto s = sample_coupling(field, g, 0.6);
  CHECK_FALSE(s.active[0]);  // polarisation is off the grid
  for (int i = 0; i < 64; i += 7) {
    const Vec3 r(g.coordinate(0, i), 0, 0);
    CHECK(s.squared[i] == doctest::Approx(eval_scaled_A(field, r, 0.6).squaredNorm()).epsilon(1e-14));
  }
  const auto d = dipole_coupling(field, g, 0.6);
  CHECK(d.along_axis[0] == 0.0);
  CHECK(d.squared == doctest::Approx(eval_scaled_A(field, Vec3::Zero(), 0.6).squaredNorm()));
}
