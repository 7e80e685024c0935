#include <doctest.h>

#include <cmath>

#include <Eigen/Eigenvalues>

#include "dipole/propagate.hpp"

using namespace dipole;

namespace {

ScaledField cw(double amplitude, const Vec3& k, const Vec3& eps, double lambda, double omega = 1.0) {
  return ScaledField(LaserEnvelope::plane_wave(amplitude, k, eps), lambda, omega);
}

// exp(-i dt k^2) in momentum space
WaveFunction free_evolution(const WaveFunction& psi, double dt) {
  Eigen::VectorXcd v = psi.values;
  fft_forward(psi.grid, v);
  for_each_mode(psi.grid, [&](Eigen::Index flat, const auto& k) {
    double k2 = 0.0;
    for (int j = 0; j < psi.grid.dim(); ++j) k2 += k[j] * k[j];
    v[flat] *= std::polar(1.0, -dt * k2);
  });
  fft_inverse(psi.grid, v);
  return WaveFunction(psi.grid, v);
}

StepperConfig stepper(double t0, double t1, double dt, StepMethod m) {
  StepperConfig c;
  c.t0 = t0;
  c.t_final = t1;
  c.dt = dt;
  c.method = m;
  return c;
}

}  // namespace

TEST_CASE("stepper configuration invariants") {
  CHECK_THROWS_AS(stepper(0, 1, 0.0, StepMethod::Krylov).validate(), ConfigError);
  CHECK_THROWS_AS(stepper(1, 0.5, 0.1, StepMethod::Krylov).validate(), ConfigError);
  StepperConfig c = stepper(0, 1, 0.1, StepMethod::Krylov);
  c.krylov.subspace = 4;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  CHECK(parse_step_method("split") == StepMethod::SplitStrang);
  CHECK_THROWS_AS(parse_step_method("rk4"), ConfigError);
}

TEST_CASE("split step without field or potential is exact free evolution") {
  const Grid g = make_grid(1, 256, 40.0);
  const auto spec = make_spec(CouplingKind::DipoleVelocity, ScaledField(), make_zero_potential(g));
  const WaveFunction psi = gaussian_packet(g, {-2.0}, 1.0, {1.5});
  CHECK(distance(step_split(spec, psi, 0.0, 0.05), free_evolution(psi, 0.05)) < 1e-13);
  CHECK_THROWS_AS(step_split(make_spec(CouplingKind::FullCoupling, ScaledField(), make_zero_potential(g)), psi, 0, 0.1),
                  ConfigError);
}

TEST_CASE("split dipole evolution reproduces the analytic momentum-space phase") {
  const Grid g = make_grid(1, 256, 60.0);
  const auto field = cw(1.0, Vec3::UnitY(), Vec3::UnitX(), 1.0);
  const auto spec = make_spec(CouplingKind::DipoleVelocity, field, make_zero_potential(g));
  const WaveFunction psi0 = gaussian_packet(g, {0.0}, 1.0, {0.5});
  const double dt = 1e-3, t1 = 2 * kPi;
  const Trajectory traj = evolve(spec, psi0, stepper(0.0, t1, dt, StepMethod::SplitStrang));

  // exact phase: int_0^T (k - b(s))^2 ds with b(s) = -sin(s): k^2 T + 2k(1 - cos T) + T/2 - sin(2T)/4
  Eigen::VectorXcd v = psi0.values;
  fft_forward(g, v);
  for_each_mode(g, [&](Eigen::Index flat, const auto& k) {
    const double kk = k[0];
    const double phase = kk * kk * t1 + 2 * kk * (1 - std::cos(t1)) + t1 / 2 - std::sin(2 * t1) / 4;
    v[flat] *= std::polar(1.0, -phase);
  });
  fft_inverse(g, v);
  CHECK(distance(traj.final_state, WaveFunction(g, v)) <= 1e-6);
}

TEST_CASE("split stepping keeps the norm over 10^4 steps") {
  const Grid g = make_grid(1, 512, 100.0);
  const auto spec = make_spec(CouplingKind::DipoleLength, cw(1.0, Vec3::UnitY(), Vec3::UnitX(), 1.0),
                              make_soft_core(g, 1.0));
  const Trajectory traj = evolve(spec, gaussian_packet(g, {0.0}, 1.0, {0.0}), stepper(0.0, 10.0, 1e-3, StepMethod::SplitStrang));
  CHECK(traj.steps >= 10000);
  CHECK(traj.max_step_drift <= 1e-10);
  CHECK(std::abs(norm(traj.final_state) - 1.0) <= 1e-9);
}

TEST_CASE("Krylov step agrees with the split step on a dipole problem") {
  const Grid g = make_grid(1, 512, 100.0);
  const auto spec = make_spec(CouplingKind::DipoleVelocity, cw(1.0, Vec3::UnitY(), Vec3::UnitX(), 1.0),
                              make_soft_core(g, 1.0));
  const WaveFunction psi = gaussian_packet(g, {0.5}, 1.0, {0.3});
  CHECK(distance(step_krylov(spec, psi, 0.2, 1e-3), step_split(spec, psi, 0.2, 1e-3)) <= 1e-8);
}

TEST_CASE("Krylov step of the free problem is exact") {
  const Grid g = make_grid(1, 256, 40.0);
  const auto spec = make_spec(CouplingKind::DipoleVelocity, ScaledField(), make_zero_potential(g));
  const WaveFunction psi = gaussian_packet(g, {0.0}, 1.0, {2.0});
  CHECK(distance(step_krylov(spec, psi, 0.0, 0.05), free_evolution(psi, 0.05)) <= 1e-9);
}

TEST_CASE("Krylov and split steppers match the dense oracle on 16 points") {
  const Grid g = make_grid(1, 16, 8.0);
  const auto v = make_soft_core(g, 1.0);
  const WaveFunction psi = normalized(make_probe_set(g, 1, 3).front());
  const std::vector<ScaledField> fields{cw(0.8, Vec3::UnitY(), Vec3::UnitX(), 2.0), cw(0.8, Vec3::UnitX(), Vec3::UnitY(), 4.0)};
  for (const auto& f : fields)
    for (CouplingKind kind : {CouplingKind::DipoleVelocity, CouplingKind::DipoleLength, CouplingKind::FullCoupling}) {
      const auto spec = make_spec(kind, f, v);
      const WaveFunction oracle = dense_oracle_evolve(spec, psi, 0.3, 0.35, 1);
      CHECK(distance(step_krylov(spec, psi, 0.3, 0.05), oracle) <= 1e-9);
      CHECK(std::abs(norm(oracle) - norm(psi)) <= 1e-12);
      if (kind != CouplingKind::FullCoupling) {
        // splitting error is O(dt^3) per step: compare over a short step
        const WaveFunction tiny = dense_oracle_evolve(spec, psi, 0.3, 0.3001, 1);
        CHECK(distance(step_split(spec, psi, 0.3, 1e-4), tiny) <= 1e-9);
      }
    }
  CHECK_THROWS_AS(dense_oracle_evolve(make_spec(CouplingKind::DipoleVelocity, ScaledField(), make_zero_potential(make_grid(1, 128, 8.0))),
                                      WaveFunction::zeros(make_grid(1, 128, 8.0)), 0, 1, 1),
                  ConfigError);
}

TEST_CASE("dense oracle of the free problem is analytic") {
  const Grid g = make_grid(1, 32, 10.0);
  const auto spec = make_spec(CouplingKind::DipoleVelocity, ScaledField(), make_zero_potential(g));
  const WaveFunction psi = make_probe_set(g, 2, 1).back();
  CHECK(distance(dense_oracle_evolve(spec, psi, 0.0, 0.7, 3), free_evolution(psi, 0.7)) <= 1e-11);
}

TEST_CASE("evolve: identity at t_final = t0 and observer sampling") {
  const Grid g = make_grid(1, 128, 40.0);
  const auto spec = make_spec(CouplingKind::DipoleVelocity, cw(1.0, Vec3::UnitY(), Vec3::UnitX(), 1.0), make_soft_core(g, 1.0));
  const WaveFunction psi = gaussian_packet(g, {0.0}, 1.0, {0.0});
  const Trajectory id = evolve(spec, psi, stepper(0.5, 0.5, 0.01, StepMethod::Krylov));
  CHECK(distance(id.final_state, psi) == 0.0);

  std::vector<double> seen;
  const Trajectory traj = evolve(spec, psi, stepper(0.0, 1.0, 0.03, StepMethod::Krylov), {0.25, 0.5, 2.0},
                                 [&](double t, const WaveFunction&) { seen.push_back(t); });
  CHECK(seen == std::vector<double>{0.0, 0.25, 0.5, 1.0});
  CHECK(traj.sample_norms.size() == 4);

  CHECK_THROWS_AS(evolve(spec, psi, stepper(0.0, 1.0, 0.1, StepMethod::Krylov), {0.5},
                         [](double t, const WaveFunction&) {
                           if (t > 0.4) throw std::runtime_error("boom");
                         }),
                  NumericalError);
}

TEST_CASE("both steppers converge at second order") {
  const Grid g = make_grid(1, 256, 60.0);
  const auto spec = make_spec(CouplingKind::DipoleVelocity, cw(1.0, Vec3::UnitY(), Vec3::UnitX(), 1.0), make_soft_core(g, 1.0));
  const WaveFunction psi = gaussian_packet(g, {0.0}, 1.0, {0.0});
  for (StepMethod m : {StepMethod::SplitStrang, StepMethod::Krylov}) {
    const double dt = 0.04;
    const auto run = [&](double h) { return evolve(spec, psi, stepper(0.0, 1.0, h, m)).final_state; };
    const WaveFunction ref = run(dt / 4);
    const double e1 = distance(run(dt), ref), e2 = distance(run(dt / 2), ref);
    // Richardson: with the dt/4 reference, e(dt)/e(dt/2) = (1 - 1/16)/(1/4 - 1/16) = 5 at order 2
    const double order = std::log2((e1 / e2) * (1.0 / 4 - 1.0 / 16) / (1 - 1.0 / 16)) + 2.0;
    CHECK(order >= 1.8);
    CHECK(order <= 2.2);
  }
}

TEST_CASE("evolve then evolve back with the time-reversed field recovers the state") {
  const Grid g = make_grid(1, 256, 60.0);
  const auto env = LaserEnvelope::gaussian_pulse(1.0, Vec3::UnitX(), Vec3::UnitY(), 2.0);
  const ScaledField field(env, 30.0, 1.0);
  const auto v = make_soft_core(g, 1.0);
  const WaveFunction psi = gaussian_packet(g, {0.3}, 1.0, {0.4});
  const double t0 = 0.1, t1 = 3.0;
  const Trajectory fwd = evolve(make_spec(CouplingKind::FullCoupling, field, v), psi, stepper(t0, t1, 0.01, StepMethod::Krylov));

  // phi(t') = conj psi(t1 - t') evolves under b'(t') = -b(t1 - t')
  const ScaledField reversed(env.time_reversed(field.omega * t1), field.lambda, field.omega);
  WaveFunction start = fwd.final_state;
  start.values = start.values.conjugate();
  const Trajectory back = evolve(make_spec(CouplingKind::FullCoupling, reversed, v), start,
                                 stepper(0.0, t1 - t0, 0.01, StepMethod::Krylov));
  WaveFunction out = back.final_state;
  out.values = out.values.conjugate();
  CHECK(distance(out, psi) <= 1e-7);
}

TEST_CASE("Krylov non-convergence is reported and evolve halves the step") {
  const Grid g = make_grid(1, 256, 20.0);
  const auto spec = make_spec(CouplingKind::DipoleVelocity, ScaledField(), make_soft_core(g, 1.0));
  const WaveFunction psi = make_probe_set(g, 2, 8).front();
  KrylovOptions small;
  small.subspace = 8;
  CHECK_THROWS_AS(step_krylov(spec, psi, 0.0, 0.5, small), KrylovConvergenceError);

  StepperConfig c = stepper(0.0, 0.5, 0.5, StepMethod::Krylov);
  c.krylov.subspace = 8;
  c.krylov.max_halvings = 12;
  const Trajectory traj = evolve(spec, psi, c);
  CHECK(traj.halvings > 0);
  const WaveFunction ref = evolve(spec, psi, stepper(0.0, 0.5, 0.001, StepMethod::SplitStrang)).final_state;
  CHECK(distance(traj.final_state, ref) < 1e-3);
}

TEST_CASE("the hermiticity guard refuses a broken generator") {
  const Grid g = make_grid(1, 128, 20.0);
  LaserEnvelope broken;
  broken.kind = EnvelopeKind::PlaneWaveCW;
  broken.amplitude = 1.0;
  broken.k_hat = Vec3::UnitX();
  broken.eps_hat = Vec3::UnitX();
  const HamiltonianSpec bad{CouplingKind::FullCoupling, ScaledField(broken, 10.0, 1.0), make_zero_potential(g)};
  CHECK_THROWS_AS(evolve(bad, gaussian_packet(g, {0.0}, 1.0, {0.0}), stepper(0.0, 0.1, 0.01, StepMethod::Krylov)),
                  NumericalError);
}

TEST_CASE("imaginary-time ground states match dense diagonalisation") {
  SUBCASE("soft core") {
    const Grid g = make_grid(1, 256, 40.0);
    const auto v = make_soft_core(g, 1.0, 1.0);
    const GroundState gs = ground_state_imaginary_time(v, 1e-8);
    const Eigen::MatrixXcd h = dense_hamiltonian(make_spec(CouplingKind::DipoleVelocity, ScaledField(), v), 0.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(0.5 * (h + h.adjoint()), Eigen::EigenvaluesOnly);
    CHECK(std::abs(gs.energy - eig.eigenvalues()[0]) <= 1e-6);
    CHECK(gs.residual <= 1e-8);
    CHECK(norm(gs.state) == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("harmonic-like Gaussian well") {
    const Grid g = make_grid(1, 256, 40.0);
    const auto v = make_gaussian_well(g, 20.0, 3.0);
    const GroundState gs = ground_state_imaginary_time(v, 1e-8);
    const Eigen::MatrixXcd h = dense_hamiltonian(make_spec(CouplingKind::DipoleVelocity, ScaledField(), v), 0.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(0.5 * (h + h.adjoint()), Eigen::EigenvaluesOnly);
    CHECK(std::abs(gs.energy - eig.eigenvalues()[0]) <= 1e-4);
    // near the bottom V ~ -D + D x^2 / w^2, so E ~ -D + sqrt(D) / w
    CHECK(gs.energy == doctest::Approx(-20.0 + std::sqrt(20.0) / 3.0).epsilon(0.01));
  }
  SUBCASE("no bound state without a potential") {
    CHECK_THROWS_AS(ground_state_imaginary_time(make_zero_potential(make_grid(1, 128, 20.0))), NumericalError);
  }
}
