#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "dipole/fields.hpp"
#include "dipole/spatial.hpp"

namespace dipole {

enum class PotentialKind { Zero, SoftCoreCoulomb, GaussianWell, NBodySoftCore };

PotentialKind parse_potential_kind(const std::string& name);
std::string to_string(PotentialKind kind);

/// Binding potential sampled on a grid (units hbar = e = 1, m = 1/2).
///
/// SoftCoreCoulomb: -2Z / sqrt(|r_k|^2 + eps^2) summed over particles.
/// GaussianWell: -depth exp(-|r_k|^2 / width^2) summed over particles.
/// NBodySoftCore: -sum_k 2N / |r_k|_eps + sum_{k<l} 2 / |r_k - r_l|_eps.
struct PotentialModel {
  PotentialKind kind = PotentialKind::Zero;
  double charge = 1.0;
  double softening = 1.0;
  double depth = 0.0;
  double width = 1.0;
  int bodies = 1;
  Grid grid;
  Eigen::VectorXd samples;
};

PotentialModel make_zero_potential(const Grid& grid);
PotentialModel make_soft_core(const Grid& grid, double charge, double softening = 1.0);
PotentialModel make_gaussian_well(const Grid& grid, double depth, double width);
PotentialModel build_nbody(int bodies, double softening, const Grid& grid);

enum class CouplingKind { FullCoupling, DipoleVelocity, DipoleLength };

std::string to_string(CouplingKind kind);

/// Which generator to apply:
///   FullCoupling    H_lambda(t) = (-i grad - b(r,t))^2 + V,  b = (1/omega) a(r/lambda, omega t)
///   DipoleVelocity  H_inf(t)    = (-i grad - b(0,t))^2 + V
///   DipoleLength    H_L(t)      = -Lap + V + (d_t a)(0, omega t) . r
struct HamiltonianSpec {
  CouplingKind kind = CouplingKind::DipoleVelocity;
  ScaledField field;
  PotentialModel potential;

  const Grid& grid() const { return potential.grid; }
};

HamiltonianSpec make_spec(CouplingKind kind, const ScaledField& field, const PotentialModel& potential);

/// Full-coupling vector potential b(r, t) = (1/omega) a(r/lambda, omega t) sampled on the grid.
struct CouplingSamples {
  Eigen::MatrixXd along_axis;  ///< size x dim: component of b(r_k) along grid axis j (particle k of axis j)
  Eigen::VectorXd squared;     ///< sum over particles of |b(r_k)|^2, off-grid components included
  std::vector<bool> active;    ///< axis j carries a nonzero gradient coupling
};

CouplingSamples sample_coupling(const ScaledField& field, const Grid& grid, double t);

/// Spatially constant dipole coupling b(0, t): its component along each grid axis and N |b(0,t)|^2.
struct DipoleCoupling {
  Eigen::VectorXd along_axis;
  double squared = 0.0;
};

DipoleCoupling dipole_coupling(const ScaledField& field, const Grid& grid, double t);

/// Length-gauge interaction (d_t a)(0, omega t) . sum_k r_k on the grid.
Eigen::VectorXd length_gauge_potential(const ScaledField& field, const Grid& grid, double t);

/// H psi, matrix-free. Full coupling uses -Lap + 2i b.grad + |b|^2 + V.
WaveFunction apply_hamiltonian(const HamiltonianSpec& spec, double t, const WaveFunction& psi);

/// W(t) = H(t) - (-Lap): everything but the free kinetic term.
WaveFunction apply_interaction(const HamiltonianSpec& spec, double t, const WaveFunction& psi);

/// max |<phi, H psi> - <H phi, psi>| over all probe pairs.
double hermiticity_defect(const HamiltonianSpec& spec, double t, const std::vector<WaveFunction>& probes);
double hermiticity_defect(const HamiltonianSpec& spec, double t, int probe_count = 8, std::uint64_t seed = 1);

/// Dense matrix of H(t) assembled from explicit DFT differentiation matrices (no FFT);
/// restricted to small grids and used as a brute-force oracle.
Eigen::MatrixXcd dense_hamiltonian(const HamiltonianSpec& spec, double t);

}  // namespace dipole
