#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include <Eigen/Core>

#include "dipole/common.hpp"

namespace dipole {

inline constexpr int kMaxGridDim = 6;
inline constexpr std::int64_t kDefaultPointCap = std::int64_t{1} << 24;

/// Periodic tensor-product grid centred on the origin.
///
/// Axis j covers [-L_j/2, L_j/2) with points_j samples. The grid can carry
/// several distinguishable particles: with N particles of p = dim/N physical
/// dimensions each, axis j belongs to particle j / p and points along physical
/// direction j % p.
struct Grid {
  std::vector<int> points;
  std::vector<double> lengths;
  int particles = 1;

  int dim() const { return static_cast<int>(points.size()); }
  int dims_per_particle() const { return dim() / particles; }
  int particle_of_axis(int axis) const { return axis / dims_per_particle(); }
  int physical_axis(int axis) const { return axis % dims_per_particle(); }

  Eigen::Index size() const;
  double spacing(int axis) const { return lengths[axis] / points[axis]; }
  double cell_volume() const;
  double momentum_cell_volume() const;

  double coordinate(int axis, int i) const { return -0.5 * lengths[axis] + i * spacing(axis); }
  double wavenumber(int axis, int i) const;

  /// Row-major stride of an axis (last axis is contiguous).
  Eigen::Index stride(int axis) const;

  Eigen::VectorXd axis_coordinates(int axis) const;
  Eigen::VectorXd axis_wavenumbers(int axis) const;

  bool operator==(const Grid& other) const = default;
};

Grid make_grid(int dim, const std::vector<int>& points, const std::vector<double>& lengths,
               int particles = 1, std::int64_t point_cap = kDefaultPointCap);
Grid make_grid(int dim, int points, double length, int particles = 1);

/// Visits every grid point with its flat index and coordinates.
template <class Fn>
void for_each_point(const Grid& grid, Fn&& fn) {
  const int n = grid.dim();
  std::array<int, kMaxGridDim> idx{};
  std::array<double, kMaxGridDim> x{};
  for (int j = 0; j < n; ++j) x[j] = grid.coordinate(j, 0);
  const Eigen::Index total = grid.size();
  for (Eigen::Index flat = 0; flat < total; ++flat) {
    fn(flat, x);
    for (int j = n - 1; j >= 0; --j) {
      if (++idx[j] < grid.points[j]) {
        x[j] = grid.coordinate(j, idx[j]);
        break;
      }
      idx[j] = 0;
      x[j] = grid.coordinate(j, 0);
    }
  }
}

/// Same traversal in momentum space (wavenumbers in FFT order).
template <class Fn>
void for_each_mode(const Grid& grid, Fn&& fn) {
  const int n = grid.dim();
  std::array<int, kMaxGridDim> idx{};
  std::array<double, kMaxGridDim> k{};
  for (int j = 0; j < n; ++j) k[j] = grid.wavenumber(j, 0);
  const Eigen::Index total = grid.size();
  for (Eigen::Index flat = 0; flat < total; ++flat) {
    fn(flat, k);
    for (int j = n - 1; j >= 0; --j) {
      if (++idx[j] < grid.points[j]) {
        k[j] = grid.wavenumber(j, idx[j]);
        break;
      }
      idx[j] = 0;
      k[j] = grid.wavenumber(j, 0);
    }
  }
}

enum class Space { Position, Momentum };

struct WaveFunction {
  Grid grid;
  Eigen::VectorXcd values;
  Space space = Space::Position;

  WaveFunction() = default;
  WaveFunction(Grid g, Eigen::VectorXcd v, Space s = Space::Position);
  static WaveFunction zeros(const Grid& g);

  double volume_element() const {
    return space == Space::Position ? grid.cell_volume() : grid.momentum_cell_volume();
  }
};

Complex inner_product(const WaveFunction& phi, const WaveFunction& psi);
double norm(const WaveFunction& psi);
WaveFunction normalized(WaveFunction psi);
/// L2 distance ||a - b||.
double distance(const WaveFunction& a, const WaveFunction& b);

/// Normalised Gaussian exp(-|x-c|^2/(2 sigma^2) + i k0.x); |psi|^2 has variance sigma^2/2 per axis.
WaveFunction gaussian_packet(const Grid& grid, const std::vector<double>& center, double sigma,
                             const std::vector<double>& momentum);

/// In-place unnormalised DFT along every axis (forward: e^{-ikx}); inverse includes 1/N.
void fft_forward(const Grid& grid, Eigen::VectorXcd& data);
void fft_inverse(const Grid& grid, Eigen::VectorXcd& data);

std::vector<WaveFunction> spectral_gradient(const WaveFunction& psi);
WaveFunction spectral_laplacian(const WaveFunction& psi);

/// Unitary Fourier pair; momentum-space norms use the dk volume element.
WaveFunction to_momentum(const WaveFunction& psi);
WaveFunction from_momentum(const WaveFunction& psi_hat);

struct Expectations {
  Eigen::VectorXd position;
  Eigen::VectorXd momentum;
  double momentum_squared = 0.0;
  double position_squared = 0.0;
};

Expectations expectations(const WaveFunction& psi);

/// Reproducible probe states: random Gaussians (width >= 4 dx, so products with smooth
/// fields stay inside the band) followed by band-limited noise, all normalised.
std::vector<WaveFunction> make_probe_set(const Grid& grid, int count, std::uint64_t seed);

/// Binary snapshot: "DPLW", u32 version, u32 dim, u32 points per axis, f64 lengths,
/// then interleaved (re, im) f64 in row-major order; little-endian throughout.
void write_snapshot(const std::filesystem::path& path, const WaveFunction& psi);
WaveFunction read_snapshot(const std::filesystem::path& path);

}  // namespace dipole
