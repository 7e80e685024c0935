#include "dipole/hamiltonians.hpp"

#include <algorithm>
#include <cmath>

namespace dipole {

namespace {

double softened(double r2, double eps) { return std::sqrt(r2 + eps * eps); }

PotentialModel sample_potential(PotentialModel model) {
  const Grid& g = model.grid;
  const int p = g.dims_per_particle();
  const int n_particles = g.particles;
  model.samples.resize(g.size());
  for_each_point(g, [&](Eigen::Index flat, const auto& x) {
    double v = 0.0;
    for (int k = 0; k < n_particles; ++k) {
      double r2 = 0.0;
      for (int d = 0; d < p; ++d) r2 += x[k * p + d] * x[k * p + d];
      switch (model.kind) {
        case PotentialKind::Zero: break;
        case PotentialKind::SoftCoreCoulomb: v -= 2.0 * model.charge / softened(r2, model.softening); break;
        case PotentialKind::GaussianWell: v -= model.depth * std::exp(-r2 / (model.width * model.width)); break;
        case PotentialKind::NBodySoftCore:
          v -= 2.0 * n_particles / softened(r2, model.softening);
          for (int l = k + 1; l < n_particles; ++l) {
            double d2 = 0.0;
            for (int d = 0; d < p; ++d) {
              const double diff = x[k * p + d] - x[l * p + d];
              d2 += diff * diff;
            }
            v += 2.0 / softened(d2, model.softening);
          }
          break;
      }
    }
    model.samples[flat] = v;
  });
  if (!model.samples.allFinite()) throw NumericalError("potential samples are not finite");
  return model;
}

// Explicit (n x n) Fourier multiplier matrix along one axis: F^{-1} diag(symbol) F.
Eigen::MatrixXcd axis_multiplier(const Grid& grid, int axis, bool second_order) {
  const int n = grid.points[axis];
  const double dx = grid.spacing(axis);
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
  for (int q = 0; q < n; ++q) {
    const double k = grid.wavenumber(axis, q);
    const Complex symbol = second_order ? Complex(-k * k, 0.0) : kI * k;
    for (int i = 0; i < n; ++i)
      for (int l = 0; l < n; ++l) m(i, l) += symbol * std::polar(1.0 / n, k * (i - l) * dx);
  }
  return m;
}

}  // namespace

PotentialKind parse_potential_kind(const std::string& name) {
  if (name == "zero") return PotentialKind::Zero;
  if (name == "soft-core") return PotentialKind::SoftCoreCoulomb;
  if (name == "gaussian-well") return PotentialKind::GaussianWell;
  if (name == "nbody-soft-core") return PotentialKind::NBodySoftCore;
  throw ConfigError("unknown potential kind '" + name + "'");
}

std::string to_string(PotentialKind kind) {
  switch (kind) {
    case PotentialKind::Zero: return "zero";
    case PotentialKind::SoftCoreCoulomb: return "soft-core";
    case PotentialKind::GaussianWell: return "gaussian-well";
    case PotentialKind::NBodySoftCore: return "nbody-soft-core";
  }
  throw ConfigError("unknown potential kind");
}

std::string to_string(CouplingKind kind) {
  switch (kind) {
    case CouplingKind::FullCoupling: return "full";
    case CouplingKind::DipoleVelocity: return "dipole-velocity";
    case CouplingKind::DipoleLength: return "dipole-length";
  }
  throw ConfigError("unknown coupling kind");
}

PotentialModel make_zero_potential(const Grid& grid) {
  PotentialModel m;
  m.grid = grid;
  m.bodies = grid.particles;
  m.samples = Eigen::VectorXd::Zero(grid.size());
  return m;
}

PotentialModel make_soft_core(const Grid& grid, double charge, double softening) {
  if (!(softening > 0.0)) throw ConfigError("soft-core softening length must be positive");
  PotentialModel m;
  m.kind = PotentialKind::SoftCoreCoulomb;
  m.charge = charge;
  m.softening = softening;
  m.bodies = grid.particles;
  m.grid = grid;
  return sample_potential(std::move(m));
}

PotentialModel make_gaussian_well(const Grid& grid, double depth, double width) {
  if (!(width > 0.0)) throw ConfigError("Gaussian well width must be positive");
  PotentialModel m;
  m.kind = PotentialKind::GaussianWell;
  m.depth = depth;
  m.width = width;
  m.bodies = grid.particles;
  m.grid = grid;
  return sample_potential(std::move(m));
}

PotentialModel build_nbody(int bodies, double softening, const Grid& grid) {
  if (bodies < 1) throw ConfigError("need at least one electron");
  if (grid.particles != bodies) throw ConfigError("grid particle count does not match the number of electrons");
  if (!(softening > 0.0)) throw ConfigError("soft-core softening length must be positive");
  PotentialModel m;
  m.kind = PotentialKind::NBodySoftCore;
  m.softening = softening;
  m.charge = bodies;
  m.bodies = bodies;
  m.grid = grid;
  return sample_potential(std::move(m));
}

HamiltonianSpec make_spec(CouplingKind kind, const ScaledField& field, const PotentialModel& potential) {
  if (potential.samples.size() != potential.grid.size()) throw ConfigError("potential is not sampled on its grid");
  if (kind == CouplingKind::FullCoupling && !is_commensurate(field, potential.grid))
    throw ConfigError("full coupling needs a wavelength commensurate with the box (lambda = L/m along k_hat)");
  return HamiltonianSpec{kind, field, potential};
}

CouplingSamples sample_coupling(const ScaledField& field, const Grid& grid, double t) {
  const int n = grid.dim();
  CouplingSamples s;
  s.along_axis = Eigen::MatrixXd::Zero(grid.size(), n);
  s.squared = Eigen::VectorXd::Zero(grid.size());
  s.active.assign(n, false);
  if (field.is_zero()) return s;
  const auto& env = field.envelope;
  for (int j = 0; j < n; ++j) s.active[j] = env.eps_hat[grid.physical_axis(j)] != 0.0;
  const double scaled_t = field.omega * t;
  for_each_point(grid, [&](Eigen::Index flat, const auto& x) {
    for (int k = 0; k < grid.particles; ++k) {
      const Vec3 r = particle_position(grid, x, k) / field.lambda;
      const double g = env.profile(env.phase(r, scaled_t)) / field.omega;
      s.squared[flat] += g * g * env.eps_hat.squaredNorm();
    }
    for (int j = 0; j < n; ++j) {
      if (!s.active[j]) continue;
      const Vec3 r = particle_position(grid, x, grid.particle_of_axis(j)) / field.lambda;
      s.along_axis(flat, j) = env.profile(env.phase(r, scaled_t)) / field.omega * env.eps_hat[grid.physical_axis(j)];
    }
  });
  return s;
}

DipoleCoupling dipole_coupling(const ScaledField& field, const Grid& grid, double t) {
  DipoleCoupling c;
  c.along_axis = Eigen::VectorXd::Zero(grid.dim());
  if (field.is_zero()) return c;
  const Vec3 b = eval_scaled_A(field, Vec3::Zero(), t);
  for (int j = 0; j < grid.dim(); ++j) c.along_axis[j] = b[grid.physical_axis(j)];
  c.squared = grid.particles * b.squaredNorm();
  return c;
}

Eigen::VectorXd length_gauge_potential(const ScaledField& field, const Grid& grid, double t) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(grid.size());
  if (field.is_zero()) return v;
  const Vec3 rate = dipole_coupling_rate(field, t);
  Eigen::VectorXd per_axis(grid.dim());
  for (int j = 0; j < grid.dim(); ++j) per_axis[j] = rate[grid.physical_axis(j)];
  for_each_point(grid, [&](Eigen::Index flat, const auto& x) {
    double s = 0.0;
    for (int j = 0; j < grid.dim(); ++j) s += per_axis[j] * x[j];
    v[flat] = s;
  });
  return v;
}

namespace {

// out += 2i sum_j b_j d_j psi, from the transformed state.
void add_gradient_coupling(const Grid& grid, const Eigen::VectorXcd& hat, const Eigen::MatrixXd& b,
                           const std::vector<bool>& active, Eigen::VectorXcd& out) {
  for (int axis = 0; axis < grid.dim(); ++axis) {
    if (!active[axis]) continue;
    Eigen::VectorXcd d(hat.size());
    for_each_mode(grid, [&](Eigen::Index flat, const auto& k) { d[flat] = kI * k[axis] * hat[flat]; });
    fft_inverse(grid, d);
    out += 2.0 * kI * (b.col(axis).array() * d.array()).matrix();
  }
}

WaveFunction apply_generator(const HamiltonianSpec& spec, double t, const WaveFunction& psi, bool with_kinetic) {
  const Grid& grid = spec.grid();
  if (!(psi.grid == grid) || psi.space != Space::Position)
    throw ConfigError("state grid is incompatible with the Hamiltonian");
  const int n = grid.dim();
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(psi.values.size());

  switch (spec.kind) {
    case CouplingKind::DipoleVelocity: {
      // spatially constant coupling: the whole (-i grad - b)^2 is a momentum-space multiplier
      const DipoleCoupling c = dipole_coupling(spec.field, grid, t);
      Eigen::VectorXcd hat = psi.values;
      fft_forward(grid, hat);
      const double off_grid = c.squared - c.along_axis.squaredNorm();
      for_each_mode(grid, [&](Eigen::Index flat, const auto& k) {
        double symbol = off_grid;
        for (int j = 0; j < n; ++j) {
          const double shifted = k[j] - c.along_axis[j];
          symbol += shifted * shifted - (with_kinetic ? 0.0 : k[j] * k[j]);
        }
        hat[flat] *= symbol;
      });
      fft_inverse(grid, hat);
      out = hat;
      break;
    }
    case CouplingKind::DipoleLength: {
      if (with_kinetic) out = -spectral_laplacian(psi).values;
      out += (length_gauge_potential(spec.field, grid, t).array() * psi.values.array()).matrix();
      break;
    }
    case CouplingKind::FullCoupling: {
      const CouplingSamples c = sample_coupling(spec.field, grid, t);
      Eigen::VectorXcd hat = psi.values;
      fft_forward(grid, hat);
      if (with_kinetic) {
        Eigen::VectorXcd kin(hat.size());
        for_each_mode(grid, [&](Eigen::Index flat, const auto& k) {
          double k2 = 0.0;
          for (int j = 0; j < n; ++j) k2 += k[j] * k[j];
          kin[flat] = k2 * hat[flat];
        });
        fft_inverse(grid, kin);
        out = kin;
      }
      add_gradient_coupling(grid, hat, c.along_axis, c.active, out);
      out += (c.squared.array() * psi.values.array()).matrix();
      break;
    }
  }
  out += (spec.potential.samples.array() * psi.values.array()).matrix();
  return WaveFunction(grid, std::move(out));
}

}  // namespace

WaveFunction apply_hamiltonian(const HamiltonianSpec& spec, double t, const WaveFunction& psi) {
  return apply_generator(spec, t, psi, true);
}

WaveFunction apply_interaction(const HamiltonianSpec& spec, double t, const WaveFunction& psi) {
  return apply_generator(spec, t, psi, false);
}

double hermiticity_defect(const HamiltonianSpec& spec, double t, const std::vector<WaveFunction>& probes) {
  std::vector<WaveFunction> images;
  images.reserve(probes.size());
  for (const auto& p : probes) images.push_back(apply_hamiltonian(spec, t, p));
  double defect = 0.0;
  for (std::size_t a = 0; a < probes.size(); ++a)
    for (std::size_t b = a; b < probes.size(); ++b)
      defect = std::max(defect, std::abs(inner_product(probes[a], images[b]) - inner_product(images[a], probes[b])));
  return defect;
}

double hermiticity_defect(const HamiltonianSpec& spec, double t, int probe_count, std::uint64_t seed) {
  if (probe_count < 8) throw ConfigError("hermiticity check needs at least 8 probes");
  return hermiticity_defect(spec, t, make_probe_set(spec.grid(), probe_count, seed));
}

Eigen::MatrixXcd dense_hamiltonian(const HamiltonianSpec& spec, double t) {
  const Grid& grid = spec.grid();
  const Eigen::Index size = grid.size();
  if (size > 1024) throw ConfigError("dense Hamiltonian is limited to 1024 grid points");
  const int n = grid.dim();

  std::vector<Eigen::MatrixXcd> first(n), second(n);
  for (int j = 0; j < n; ++j) {
    first[j] = axis_multiplier(grid, j, false);
    second[j] = axis_multiplier(grid, j, true);
  }

  Eigen::VectorXd diagonal = spec.potential.samples;
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(size, n);
  switch (spec.kind) {
    case CouplingKind::FullCoupling: {
      const CouplingSamples c = sample_coupling(spec.field, grid, t);
      b = c.along_axis;
      diagonal += c.squared;
      break;
    }
    case CouplingKind::DipoleVelocity: {
      const DipoleCoupling c = dipole_coupling(spec.field, grid, t);
      for (int j = 0; j < n; ++j) b.col(j).setConstant(c.along_axis[j]);
      diagonal.array() += c.squared;
      break;
    }
    case CouplingKind::DipoleLength:
      diagonal += length_gauge_potential(spec.field, grid, t);
      break;
  }

  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(size, size);
  std::vector<int> idx(n, 0);
  for (Eigen::Index row = 0; row < size; ++row) {
    h(row, row) += diagonal[row];
    for (int j = 0; j < n; ++j) {
      const Eigen::Index stride = grid.stride(j);
      for (int m = 0; m < grid.points[j]; ++m) {
        const Eigen::Index col = row + (m - idx[j]) * stride;
        h(row, col) += -second[j](idx[j], m) + 2.0 * kI * b(row, j) * first[j](idx[j], m);
      }
    }
    for (int j = n - 1; j >= 0; --j) {
      if (++idx[j] < grid.points[j]) break;
      idx[j] = 0;
    }
  }
  return h;
}

}  // namespace dipole
