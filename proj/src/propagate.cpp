#include "dipole/propagate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

namespace dipole {

namespace {

struct LanczosResult {
  Eigen::VectorXcd values;
  int subspace = 0;
  double residual = 0.0;
  bool converged = true;
};

// exp(z H) v for Hermitian H, z = -i dt (real time) or -tau (imaginary time).
template <class Apply>
LanczosResult lanczos_exponential(Apply&& apply, const Eigen::VectorXcd& v, Complex z, int max_dim, double tol) {
  LanczosResult out;
  const double beta0 = v.norm();
  if (beta0 == 0.0) {
    out.values = v;
    return out;
  }
  const Eigen::Index size = v.size();
  max_dim = static_cast<int>(std::min<Eigen::Index>(max_dim, size));
  Eigen::MatrixXcd basis(size, max_dim);
  Eigen::VectorXd alpha(max_dim), beta(max_dim);
  basis.col(0) = v / beta0;

  Eigen::VectorXcd y;
  for (int j = 0; j < max_dim; ++j) {
    Eigen::VectorXcd w = apply(basis.col(j));
    alpha[j] = basis.col(j).dot(w).real();
    w -= alpha[j] * basis.col(j);
    if (j > 0) w -= beta[j - 1] * basis.col(j - 1);
    // full reorthogonalisation keeps the basis orthonormal to roundoff
    w -= basis.leftCols(j + 1) * (basis.leftCols(j + 1).adjoint() * w);
    const double b = w.norm();
    beta[j] = b;

    const int m = j + 1;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig;
    if (m == 1) {
      y = Eigen::VectorXcd::Constant(1, std::exp(z * alpha[0]));
    } else {
      eig.computeFromTridiagonal(alpha.head(m), beta.head(m - 1), Eigen::ComputeEigenvectors);
      const Eigen::MatrixXd& q = eig.eigenvectors();
      Eigen::VectorXcd coeff(m);
      for (int i = 0; i < m; ++i) coeff[i] = std::exp(z * eig.eigenvalues()[i]) * q(0, i);
      y = q.cast<Complex>() * coeff;
    }
    const double residual = std::abs(z) * b * std::abs(y[m - 1]);
    const bool breakdown = b <= 1e-14 * std::max(1.0, std::abs(alpha[j]));
    if (residual <= tol || breakdown || m == max_dim) {
      out.subspace = m;
      out.residual = breakdown ? 0.0 : residual;
      out.values = beta0 * (basis.leftCols(m) * y);
      out.converged = residual <= tol || breakdown || m == size;
      return out;
    }
    basis.col(j + 1) = w / b;
  }
  return out;
}

Eigen::VectorXd kinetic_symbol(const HamiltonianSpec& spec, double t) {
  const Grid& grid = spec.grid();
  const int n = grid.dim();
  Eigen::VectorXd symbol(grid.size());
  DipoleCoupling c;
  c.along_axis = Eigen::VectorXd::Zero(n);
  if (spec.kind == CouplingKind::DipoleVelocity) c = dipole_coupling(spec.field, grid, t);
  const double off_grid = c.squared - c.along_axis.squaredNorm();
  for_each_mode(grid, [&](Eigen::Index flat, const auto& k) {
    double s = off_grid;
    for (int j = 0; j < n; ++j) {
      const double shifted = k[j] - c.along_axis[j];
      s += shifted * shifted;
    }
    symbol[flat] = s;
  });
  return symbol;
}

double norm_of(const Eigen::VectorXcd& v, double dv) { return std::sqrt(v.squaredNorm() * dv); }

}  // namespace

StepMethod parse_step_method(const std::string& name) {
  if (name == "split" || name == "split-strang") return StepMethod::SplitStrang;
  if (name == "krylov") return StepMethod::Krylov;
  throw ConfigError("unknown step method '" + name + "'");
}

std::string to_string(StepMethod method) { return method == StepMethod::SplitStrang ? "split" : "krylov"; }

void StepperConfig::validate() const {
  if (!(dt > 0.0)) throw ConfigError("time step must be positive");
  if (!(t0 >= 0.0) || !(t_final >= t0)) throw ConfigError("need 0 <= t0 <= t_final");
  if (method == StepMethod::Krylov && (krylov.subspace < 8 || krylov.subspace > 64))
    throw ConfigError("Krylov subspace dimension must lie in [8, 64]");
  if (!(krylov.tolerance > 0.0)) throw ConfigError("Krylov tolerance must be positive");
}

double drift_bound(const StepperConfig& config) {
  return config.method == StepMethod::SplitStrang ? 1e-10 : std::max(config.krylov.tolerance, 1e-12);
}

WaveFunction step_split(const HamiltonianSpec& spec, const WaveFunction& psi, double t, double dt) {
  if (spec.kind == CouplingKind::FullCoupling)
    throw ConfigError("split-operator stepping needs a spatially constant (dipole) coupling");
  const Grid& grid = spec.grid();
  if (!(psi.grid == grid)) throw ConfigError("state grid is incompatible with the Hamiltonian");
  const double t_mid = t + 0.5 * dt;

  Eigen::VectorXd v_eff = spec.potential.samples;
  if (spec.kind == CouplingKind::DipoleLength) v_eff += length_gauge_potential(spec.field, grid, t_mid);
  Eigen::VectorXcd half(v_eff.size());
  for (Eigen::Index i = 0; i < v_eff.size(); ++i) half[i] = std::polar(1.0, -0.5 * dt * v_eff[i]);

  const Eigen::VectorXd symbol = kinetic_symbol(spec, t_mid);
  Eigen::VectorXcd values = half.cwiseProduct(psi.values);
  fft_forward(grid, values);
  for (Eigen::Index i = 0; i < values.size(); ++i) values[i] *= std::polar(1.0, -dt * symbol[i]);
  fft_inverse(grid, values);
  values = half.cwiseProduct(values);
  return WaveFunction(grid, std::move(values));
}

WaveFunction step_krylov(const HamiltonianSpec& spec, const WaveFunction& psi, double t, double dt,
                         const KrylovOptions& options, StepStats* stats) {
  const double t_mid = t + 0.5 * dt;
  const Grid& grid = spec.grid();
  auto apply = [&](const Eigen::VectorXcd& v) {
    return apply_hamiltonian(spec, t_mid, WaveFunction(grid, v)).values;
  };
  const LanczosResult r = lanczos_exponential(apply, psi.values, Complex(0.0, -dt), options.subspace,
                                              options.tolerance);
  if (!r.converged)
    throw KrylovConvergenceError("Lanczos exponential did not converge within " + std::to_string(r.subspace) +
                                 " vectors (residual " + std::to_string(r.residual) + ")");
  if (stats) {
    stats->subspace_used = r.subspace;
    stats->residual_estimate = r.residual;
  }
  return WaveFunction(grid, r.values);
}

namespace {

struct StepContext {
  const HamiltonianSpec& spec;
  const StepperConfig& config;
  Trajectory& traj;
  double bound;
};

WaveFunction advance(StepContext& ctx, const WaveFunction& psi, double t, double dt, int depth) {
  WaveFunction next;
  if (ctx.config.method == StepMethod::SplitStrang) {
    next = step_split(ctx.spec, psi, t, dt);
  } else {
    try {
      StepStats stats;
      next = step_krylov(ctx.spec, psi, t, dt, ctx.config.krylov, &stats);
      ctx.traj.max_residual = std::max(ctx.traj.max_residual, stats.residual_estimate);
    } catch (const KrylovConvergenceError&) {
      if (depth >= ctx.config.krylov.max_halvings) throw;
      ctx.traj.halvings += 1;
      const WaveFunction mid = advance(ctx, psi, t, 0.5 * dt, depth + 1);
      return advance(ctx, mid, t + 0.5 * dt, 0.5 * dt, depth + 1);
    }
  }
  const double dv = psi.volume_element();
  const double drift = std::abs(norm_of(next.values, dv) - norm_of(psi.values, dv));
  ctx.traj.max_step_drift = std::max(ctx.traj.max_step_drift, drift);
  ctx.traj.steps += 1;
  if (drift > ctx.bound)
    throw NumericalError("norm drift " + std::to_string(drift) + " exceeds the per-step bound at t = " +
                         std::to_string(t));
  return next;
}

}  // namespace

Trajectory evolve(const HamiltonianSpec& spec, const WaveFunction& psi0, const StepperConfig& config,
                  const std::vector<double>& sample_times, const Observer& observer, bool keep_states) {
  config.validate();
  if (!(psi0.grid == spec.grid())) throw ConfigError("initial state grid is incompatible with the Hamiltonian");
  if (config.method == StepMethod::SplitStrang && spec.kind == CouplingKind::FullCoupling)
    throw ConfigError("split-operator stepping needs a dipole generator; use krylov for full coupling");

  std::vector<double> times{config.t0};
  for (double s : sample_times)
    if (s > config.t0 && s < config.t_final) times.push_back(s);
  if (config.t_final > config.t0) times.push_back(config.t_final);
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end(), [](double a, double b) { return std::abs(a - b) < 1e-13; }),
              times.end());

  if (config.method == StepMethod::Krylov && config.t_final > config.t0 && !spec.field.is_zero()) {
    const double defect = hermiticity_defect(spec, config.t0 + 0.5 * config.dt);
    if (defect > config.krylov.hermiticity_guard)
      throw NumericalError("hermiticity guard tripped: defect " + std::to_string(defect));
  }

  Trajectory traj;
  traj.method = config.method;
  StepContext ctx{spec, config, traj, drift_bound(config)};
  WaveFunction psi = psi0;
  const double initial_norm = norm(psi0);

  auto record = [&](double t) {
    traj.sample_times.push_back(t);
    traj.sample_norms.push_back(norm(psi));
    if (keep_states) traj.states.push_back(psi);
    if (observer) {
      try {
        observer(t, psi);
      } catch (const std::exception& e) {
        throw NumericalError("observer failed at t = " + std::to_string(t) + ": " + e.what());
      }
    }
  };

  record(times.front());
  for (std::size_t i = 1; i < times.size(); ++i) {
    const double gap = times[i] - times[i - 1];
    const long steps = std::max<long>(1, static_cast<long>(std::ceil(gap / config.dt - 1e-9)));
    const double h = gap / static_cast<double>(steps);
    for (long s = 0; s < steps; ++s) psi = advance(ctx, psi, times[i - 1] + s * h, h, 0);
    record(times[i]);
  }
  traj.terminal_norm_defect = std::abs(norm(psi) - initial_norm);
  traj.final_state = std::move(psi);
  return traj;
}

GroundState ground_state_imaginary_time(const PotentialModel& potential, double tol, int max_iterations) {
  const Grid& grid = potential.grid;
  const HamiltonianSpec spec{CouplingKind::DipoleVelocity, ScaledField{}, potential};
  auto apply = [&](const Eigen::VectorXcd& v) { return apply_hamiltonian(spec, 0.0, WaveFunction(grid, v)).values; };

  double sigma = 1.0;
  for (int j = 0; j < grid.dim(); ++j) sigma = std::max(sigma, 3.0 * grid.spacing(j));
  WaveFunction psi = gaussian_packet(grid, std::vector<double>(grid.dim(), 0.0), sigma, std::vector<double>(grid.dim(), 0.0));

  GroundState gs;
  const double tau = 2.0;
  for (int it = 1; it <= max_iterations; ++it) {
    // an inexact filter still contracts toward the ground state, so convergence is not required here
    psi.values = lanczos_exponential(apply, psi.values, Complex(-tau, 0.0), 32, 1e-12).values;
    psi = normalized(std::move(psi));
    const WaveFunction h_psi = apply_hamiltonian(spec, 0.0, psi);
    const double energy = inner_product(psi, h_psi).real();
    const double residual = std::sqrt((h_psi.values - energy * psi.values).squaredNorm() * grid.cell_volume());
    gs.energy = energy;
    gs.residual = residual;
    gs.iterations = it;
    if (residual <= tol) {
      gs.state = std::move(psi);
      double threshold = std::numeric_limits<double>::infinity();
      for_each_point(grid, [&](Eigen::Index flat, const auto& x) {
        for (int j = 0; j < grid.dim(); ++j)
          if (x[j] == grid.coordinate(j, 0)) threshold = std::min(threshold, potential.samples[flat]);
      });
      if (!(gs.energy < threshold))
        throw NumericalError("no bound state: lowest energy " + std::to_string(gs.energy) +
                             " is not below the potential at the box boundary");
      return gs;
    }
  }
  throw NumericalError("imaginary-time iteration did not converge (residual " + std::to_string(gs.residual) + ")");
}

WaveFunction dense_oracle_evolve(const HamiltonianSpec& spec, const WaveFunction& psi0, double t0, double t,
                                 int steps) {
  if (spec.grid().size() > 64) throw ConfigError("dense oracle is limited to 64 grid points");
  if (steps < 1) throw ConfigError("dense oracle needs at least one step");
  const double dt = (t - t0) / steps;
  Eigen::VectorXcd v = psi0.values;
  for (int s = 0; s < steps; ++s) {
    const Eigen::MatrixXcd h = dense_hamiltonian(spec, t0 + (s + 0.5) * dt);
    const Eigen::MatrixXcd herm = 0.5 * (h + h.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(herm);
    const Eigen::VectorXcd phases =
        (Complex(0.0, -dt) * eig.eigenvalues().cast<Complex>()).array().exp().matrix();
    v = eig.eigenvectors() * phases.asDiagonal() * (eig.eigenvectors().adjoint() * v);
  }
  return WaveFunction(psi0.grid, std::move(v));
}

}  // namespace dipole
