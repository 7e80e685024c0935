#include "dipole/spatial.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>

#include <unsupported/Eigen/FFT>

namespace dipole {

namespace {

void require_same_grid(const WaveFunction& a, const WaveFunction& b) {
  if (!(a.grid == b.grid)) throw ConfigError("wavefunctions live on different grids");
  if (a.space != b.space) throw ConfigError("wavefunctions are in different representations");
}

Eigen::FFT<double>& fft_engine() {
  thread_local Eigen::FFT<double> engine;
  return engine;
}

// Applies a 1D transform to every line of the tensor along `axis`.
template <class Transform>
void transform_axis(const Grid& grid, Eigen::VectorXcd& data, int axis, Transform&& transform) {
  const int n = grid.points[axis];
  const Eigen::Index stride = grid.stride(axis);
  const Eigen::Index block = stride * n;
  thread_local std::vector<Complex> in, out;
  in.resize(n);
  out.resize(n);
  if (stride == 1) {
    for (Eigen::Index base = 0; base < data.size(); base += n) {
      std::memcpy(in.data(), data.data() + base, n * sizeof(Complex));
      transform(out.data(), in.data(), n);
      std::memcpy(data.data() + base, out.data(), n * sizeof(Complex));
    }
    return;
  }
  for (Eigen::Index outer = 0; outer < data.size(); outer += block) {
    for (Eigen::Index inner = 0; inner < stride; ++inner) {
      const Eigen::Index base = outer + inner;
      for (int i = 0; i < n; ++i) in[i] = data[base + i * stride];
      transform(out.data(), in.data(), n);
      for (int i = 0; i < n; ++i) data[base + i * stride] = out[i];
    }
  }
}

template <class T>
void put(std::ostream& os, T value) {
  static_assert(std::endian::native == std::endian::little, "snapshot I/O assumes a little-endian host");
  os.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <class T>
T take(std::istream& is) {
  T value{};
  is.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!is) throw ConfigError("truncated snapshot");
  return value;
}

}  // namespace

Eigen::Index Grid::size() const {
  Eigen::Index total = 1;
  for (int p : points) total *= p;
  return total;
}

double Grid::cell_volume() const {
  double v = 1.0;
  for (int j = 0; j < dim(); ++j) v *= spacing(j);
  return v;
}

double Grid::momentum_cell_volume() const {
  double v = 1.0;
  for (int j = 0; j < dim(); ++j) v *= 2.0 * kPi / lengths[j];
  return v;
}

double Grid::wavenumber(int axis, int i) const {
  const int n = points[axis];
  const int m = i < n / 2 ? i : i - n;
  return 2.0 * kPi * m / lengths[axis];
}

Eigen::Index Grid::stride(int axis) const {
  Eigen::Index s = 1;
  for (int j = dim() - 1; j > axis; --j) s *= points[j];
  return s;
}

Eigen::VectorXd Grid::axis_coordinates(int axis) const {
  Eigen::VectorXd x(points[axis]);
  for (int i = 0; i < points[axis]; ++i) x[i] = coordinate(axis, i);
  return x;
}

Eigen::VectorXd Grid::axis_wavenumbers(int axis) const {
  Eigen::VectorXd k(points[axis]);
  for (int i = 0; i < points[axis]; ++i) k[i] = wavenumber(axis, i);
  return k;
}

Grid make_grid(int dim, const std::vector<int>& points, const std::vector<double>& lengths, int particles,
               std::int64_t point_cap) {
  if (dim < 1 || dim > kMaxGridDim) throw ConfigError("grid dimension must be in [1, 6]");
  if (static_cast<int>(points.size()) != dim || static_cast<int>(lengths.size()) != dim)
    throw ConfigError("grid needs one point count and one length per axis");
  if (particles < 1 || dim % particles != 0) throw ConfigError("grid dimension must be a multiple of the particle count");
  std::int64_t total = 1;
  for (int j = 0; j < dim; ++j) {
    const int p = points[j];
    if (p < 8 || !std::has_single_bit(static_cast<unsigned>(p)))
      throw ConfigError("points per axis must be a power of two >= 8, got " + std::to_string(p));
    if (!(lengths[j] > 0.0) || !std::isfinite(lengths[j])) throw ConfigError("box length must be positive");
    total *= p;
    if (total > point_cap) throw ConfigError("grid exceeds the configured point cap");
  }
  return Grid{points, lengths, particles};
}

Grid make_grid(int dim, int points, double length, int particles) {
  return make_grid(dim, std::vector<int>(dim, points), std::vector<double>(dim, length), particles);
}

WaveFunction::WaveFunction(Grid g, Eigen::VectorXcd v, Space s) : grid(std::move(g)), values(std::move(v)), space(s) {
  if (values.size() != grid.size()) throw ConfigError("wavefunction size does not match its grid");
}

WaveFunction WaveFunction::zeros(const Grid& g) { return WaveFunction(g, Eigen::VectorXcd::Zero(g.size())); }

Complex inner_product(const WaveFunction& phi, const WaveFunction& psi) {
  require_same_grid(phi, psi);
  return phi.values.dot(psi.values) * phi.volume_element();
}

double norm(const WaveFunction& psi) { return std::sqrt(psi.values.squaredNorm() * psi.volume_element()); }

WaveFunction normalized(WaveFunction psi) {
  const double n = norm(psi);
  if (!(n > 0.0)) throw NumericalError("cannot normalise a zero state");
  psi.values /= n;
  return psi;
}

double distance(const WaveFunction& a, const WaveFunction& b) {
  require_same_grid(a, b);
  return std::sqrt((a.values - b.values).squaredNorm() * a.volume_element());
}

WaveFunction gaussian_packet(const Grid& grid, const std::vector<double>& center, double sigma,
                             const std::vector<double>& momentum) {
  const int n = grid.dim();
  if (static_cast<int>(center.size()) != n || static_cast<int>(momentum.size()) != n)
    throw ConfigError("packet centre and momentum need one entry per axis");
  double tail = 0.0;
  for (int j = 0; j < n; ++j) {
    if (!(sigma > 2.0 * grid.spacing(j))) throw ConfigError("packet width must exceed two grid spacings");
    const double gap = 0.5 * grid.lengths[j] - std::abs(center[j]);
    if (gap <= 0.0) throw ConfigError("packet centre lies outside the box");
    // probability beyond the nearest box face along this axis
    tail += 0.5 * std::erfc(gap / sigma);
  }
  if (tail >= 1e-12) throw ConfigError("packet tail mass at the boundary exceeds 1e-12");

  WaveFunction psi = WaveFunction::zeros(grid);
  const double amplitude = std::pow(kPi * sigma * sigma, -0.25 * n);
  for_each_point(grid, [&](Eigen::Index flat, const auto& x) {
    double r2 = 0.0, phase = 0.0;
    for (int j = 0; j < n; ++j) {
      const double d = x[j] - center[j];
      r2 += d * d;
      phase += momentum[j] * x[j];
    }
    psi.values[flat] = amplitude * std::exp(-0.5 * r2 / (sigma * sigma)) * std::polar(1.0, phase);
  });
  return psi;
}

void fft_forward(const Grid& grid, Eigen::VectorXcd& data) {
  auto& fft = fft_engine();
  for (int j = 0; j < grid.dim(); ++j)
    transform_axis(grid, data, j, [&](Complex* dst, const Complex* src, int len) { fft.fwd(dst, src, len); });
}

void fft_inverse(const Grid& grid, Eigen::VectorXcd& data) {
  auto& fft = fft_engine();
  for (int j = 0; j < grid.dim(); ++j)
    transform_axis(grid, data, j, [&](Complex* dst, const Complex* src, int len) { fft.inv(dst, src, len); });
}

std::vector<WaveFunction> spectral_gradient(const WaveFunction& psi) {
  Eigen::VectorXcd hat = psi.values;
  fft_forward(psi.grid, hat);
  std::vector<WaveFunction> out;
  out.reserve(psi.grid.dim());
  for (int axis = 0; axis < psi.grid.dim(); ++axis) {
    Eigen::VectorXcd d(hat.size());
    for_each_mode(psi.grid, [&](Eigen::Index flat, const auto& k) { d[flat] = kI * k[axis] * hat[flat]; });
    fft_inverse(psi.grid, d);
    out.emplace_back(psi.grid, std::move(d));
  }
  return out;
}

WaveFunction spectral_laplacian(const WaveFunction& psi) {
  Eigen::VectorXcd hat = psi.values;
  fft_forward(psi.grid, hat);
  const int n = psi.grid.dim();
  for_each_mode(psi.grid, [&](Eigen::Index flat, const auto& k) {
    double k2 = 0.0;
    for (int j = 0; j < n; ++j) k2 += k[j] * k[j];
    hat[flat] *= -k2;
  });
  fft_inverse(psi.grid, hat);
  return WaveFunction(psi.grid, std::move(hat));
}

WaveFunction to_momentum(const WaveFunction& psi) {
  if (psi.space != Space::Position) throw ConfigError("state is already in momentum space");
  Eigen::VectorXcd hat = psi.values;
  fft_forward(psi.grid, hat);
  // psi_hat(k) = prod_j dx_j / sqrt(2 pi) * sum psi(x) e^{-ikx}, with the box origin at -L/2
  double scale = 1.0;
  for (int j = 0; j < psi.grid.dim(); ++j) scale *= psi.grid.spacing(j) / std::sqrt(2.0 * kPi);
  const int n = psi.grid.dim();
  for_each_mode(psi.grid, [&](Eigen::Index flat, const auto& k) {
    double phase = 0.0;
    for (int j = 0; j < n; ++j) phase -= k[j] * psi.grid.coordinate(j, 0);
    hat[flat] *= scale * std::polar(1.0, phase);
  });
  return WaveFunction(psi.grid, std::move(hat), Space::Momentum);
}

WaveFunction from_momentum(const WaveFunction& psi_hat) {
  if (psi_hat.space != Space::Momentum) throw ConfigError("state is not in momentum space");
  Eigen::VectorXcd values = psi_hat.values;
  double scale = 1.0;
  for (int j = 0; j < psi_hat.grid.dim(); ++j) scale *= psi_hat.grid.spacing(j) / std::sqrt(2.0 * kPi);
  const int n = psi_hat.grid.dim();
  for_each_mode(psi_hat.grid, [&](Eigen::Index flat, const auto& k) {
    double phase = 0.0;
    for (int j = 0; j < n; ++j) phase += k[j] * psi_hat.grid.coordinate(j, 0);
    values[flat] *= std::polar(1.0, phase) / scale;
  });
  fft_inverse(psi_hat.grid, values);
  return WaveFunction(psi_hat.grid, std::move(values), Space::Position);
}

Expectations expectations(const WaveFunction& psi) {
  const Grid& g = psi.grid;
  const int n = g.dim();
  Expectations e;
  e.position = Eigen::VectorXd::Zero(n);
  e.momentum = Eigen::VectorXd::Zero(n);
  const double dv = g.cell_volume();
  double mass = 0.0;
  for_each_point(g, [&](Eigen::Index flat, const auto& x) {
    const double rho = std::norm(psi.values[flat]) * dv;
    mass += rho;
    for (int j = 0; j < n; ++j) {
      e.position[j] += rho * x[j];
      e.position_squared += rho * x[j] * x[j];
    }
  });
  Eigen::VectorXcd hat = psi.values;
  fft_forward(g, hat);
  double hat_mass = 0.0;
  for_each_mode(g, [&](Eigen::Index flat, const auto& k) {
    const double w = std::norm(hat[flat]);
    hat_mass += w;
    for (int j = 0; j < n; ++j) {
      e.momentum[j] += w * k[j];
      e.momentum_squared += w * k[j] * k[j];
    }
  });
  e.position /= mass;
  e.position_squared /= mass;
  e.momentum /= hat_mass;
  e.momentum_squared /= hat_mass;
  return e;
}

std::vector<WaveFunction> make_probe_set(const Grid& grid, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const int n = grid.dim();
  std::vector<WaveFunction> probes;
  probes.reserve(count);
  const int gaussians = count - count / 2;
  double min_len = grid.lengths[0], max_dx = grid.spacing(0), min_kmax = kPi / grid.spacing(0);
  for (int j = 1; j < n; ++j) {
    min_len = std::min(min_len, grid.lengths[j]);
    max_dx = std::max(max_dx, grid.spacing(j));
    min_kmax = std::min(min_kmax, kPi / grid.spacing(j));
  }
  // probes are test vectors, not physical packets: smooth periodic Gaussians (image sums)
  // with boosts rounded to grid wavenumbers
  const double sigma_lo = 4.0 * max_dx;
  const double sigma_hi = std::max(sigma_lo * 1.5, min_len / 8.0);
  for (int p = 0; p < gaussians; ++p) {
    const double sigma = sigma_lo + (sigma_hi - sigma_lo) * unit(rng);
    std::vector<double> c(n), k(n);
    for (int j = 0; j < n; ++j) {
      c[j] = 0.5 * grid.lengths[j] * (2.0 * unit(rng) - 1.0);
      const double dk = 2.0 * kPi / grid.lengths[j];
      k[j] = dk * std::round(0.25 * min_kmax * (2.0 * unit(rng) - 1.0) / dk);
    }
    Eigen::VectorXcd v(grid.size());
    for_each_point(grid, [&](Eigen::Index flat, const auto& x) {
      double amp = 1.0, phase = 0.0;
      for (int j = 0; j < n; ++j) {
        double sum = 0.0;
        for (int image = -3; image <= 3; ++image) {
          const double d = x[j] - c[j] - image * grid.lengths[j];
          sum += std::exp(-0.5 * d * d / (sigma * sigma));
        }
        amp *= sum;
        phase += k[j] * x[j];
      }
      v[flat] = std::polar(amp, phase);
    });
    probes.push_back(normalized(WaveFunction(grid, std::move(v))));
  }
  const double band = 0.25 * min_kmax;
  for (int p = gaussians; p < count; ++p) {
    Eigen::VectorXcd hat = Eigen::VectorXcd::Zero(grid.size());
    for_each_mode(grid, [&](Eigen::Index flat, const auto& k) {
      double k2 = 0.0;
      for (int j = 0; j < n; ++j) k2 += k[j] * k[j];
      const double re = gauss(rng), im = gauss(rng);
      if (k2 <= band * band) hat[flat] = Complex(re, im);
    });
    fft_inverse(grid, hat);
    probes.push_back(normalized(WaveFunction(grid, std::move(hat))));
  }
  return probes;
}

void write_snapshot(const std::filesystem::path& path, const WaveFunction& psi) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot open snapshot for writing: " + path.string());
  os.write("DPLW", 4);
  put<std::uint32_t>(os, 1);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(psi.grid.dim()));
  for (int p : psi.grid.points) put<std::uint32_t>(os, static_cast<std::uint32_t>(p));
  for (double l : psi.grid.lengths) put<double>(os, l);
  for (Eigen::Index i = 0; i < psi.values.size(); ++i) {
    put<double>(os, psi.values[i].real());
    put<double>(os, psi.values[i].imag());
  }
  if (!os) throw NumericalError("failed writing snapshot " + path.string());
}

WaveFunction read_snapshot(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot open snapshot: " + path.string());
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, "DPLW", 4) != 0) throw ConfigError("not a DPLW snapshot");
  if (take<std::uint32_t>(is) != 1) throw ConfigError("unsupported snapshot version");
  const int dim = static_cast<int>(take<std::uint32_t>(is));
  if (dim < 1 || dim > kMaxGridDim) throw ConfigError("snapshot has an invalid dimension");
  std::vector<int> points(dim);
  std::vector<double> lengths(dim);
  for (auto& p : points) p = static_cast<int>(take<std::uint32_t>(is));
  for (auto& l : lengths) l = take<double>(is);
  Grid grid = make_grid(dim, points, lengths);
  Eigen::VectorXcd values(grid.size());
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    const double re = take<double>(is);
    const double im = take<double>(is);
    values[i] = Complex(re, im);
  }
  return WaveFunction(std::move(grid), std::move(values));
}

}  // namespace dipole
