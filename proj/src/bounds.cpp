#include "dipole/bounds.hpp"

#include <algorithm>
#include <cmath>

namespace dipole {

namespace {

Eigen::VectorXd resolvent_symbol(const Grid& grid, double alpha) {
  Eigen::VectorXd r(grid.size());
  for_each_mode(grid, [&](Eigen::Index flat, const auto& k) {
    double k2 = 0.0;
    for (int j = 0; j < grid.dim(); ++j) k2 += k[j] * k[j];
    r[flat] = 1.0 / (k2 + alpha);
  });
  return r;
}

WaveFunction apply_resolvent(const Eigen::VectorXd& symbol, const WaveFunction& psi) {
  Eigen::VectorXcd v = psi.values;
  fft_forward(psi.grid, v);
  v = v.cwiseProduct(symbol.cast<Complex>());
  fft_inverse(psi.grid, v);
  return WaveFunction(psi.grid, std::move(v));
}

}  // namespace

double contraction_norm(const HamiltonianSpec& spec, double s, double alpha, const PowerIterationOptions& options) {
  if (!(alpha > 0.0)) throw ConfigError("alpha must be positive");
  const Grid& grid = spec.grid();
  const Eigen::VectorXd symbol = resolvent_symbol(grid, alpha);

  // T = W R; the normal operator is R W^* W R with W^* = W (each term of W is symmetric)
  WaveFunction x = make_probe_set(grid, 2, options.seed).back();
  for (Eigen::Index i = 0; i < x.values.size(); ++i) x.values[i] += 1e-3 * std::cos(0.37 * i);
  x = normalized(std::move(x));

  double estimate = 0.0;
  double change = 1.0;
  for (int it = 0; it < options.max_iterations; ++it) {
    const WaveFunction tx = apply_interaction(spec, s, apply_resolvent(symbol, x));
    const double next = norm(tx);
    if (next == 0.0) return 0.0;
    change = std::abs(next - estimate) / next;
    estimate = next;
    if (change <= options.relative_tolerance) return estimate;
    WaveFunction y = apply_resolvent(symbol, apply_interaction(spec, s, tx));
    const double ny = norm(y);
    if (ny == 0.0) return estimate;
    y.values /= ny;
    x = std::move(y);
  }
  if (change > options.stagnation_threshold)
    throw NumericalError("power iteration stagnated at alpha = " + std::to_string(alpha));
  return estimate;
}

ContractionScan contraction_scan(const HamiltonianSpec& spec, double s, const std::vector<double>& alphas,
                                 const PowerIterationOptions& options) {
  ContractionScan scan;
  scan.alphas = alphas;
  std::sort(scan.alphas.begin(), scan.alphas.end());
  for (double alpha : scan.alphas) {
    const double q = contraction_norm(spec, s, alpha, options);
    if (!scan.q.empty() && q > scan.q.back() * (1.0 + 1e-9) + 1e-14) scan.nonincreasing = false;
    scan.q.push_back(q);
    if (q < 1.0 && !(scan.alpha_star == scan.alpha_star)) scan.alpha_star = alpha;
  }
  return scan;
}

InfinitesimalBoundScan infinitesimal_bound_scan(const HamiltonianSpec& spec, double s,
                                                const std::vector<double>& epsilons,
                                                const std::vector<WaveFunction>& probes) {
  InfinitesimalBoundScan scan;
  scan.epsilons = epsilons;
  std::sort(scan.epsilons.begin(), scan.epsilons.end());
  scan.probe_count = static_cast<int>(probes.size());
  std::vector<double> w2, lap2, psi2;
  for (const WaveFunction& p : probes) {
    const double n = norm(p);
    if (n == 0.0) throw NumericalError("degenerate probe with zero norm");
    psi2.push_back(n * n);
    const double w = norm(apply_interaction(spec, s, p));
    w2.push_back(w * w);
    const double l = norm(spectral_laplacian(p));
    lap2.push_back(l * l);
  }
  for (double eps : scan.epsilons) {
    double c = 0.0;
    for (std::size_t i = 0; i < probes.size(); ++i) c = std::max(c, (w2[i] - eps * lap2[i]) / psi2[i]);
    if (!scan.constants.empty() && c > scan.constants.back()) scan.nonincreasing = false;
    scan.constants.push_back(c);
  }
  return scan;
}

double sobolev_norm(const WaveFunction& psi) {
  const Grid& grid = psi.grid;
  Eigen::VectorXcd v = psi.values;
  fft_forward(grid, v);
  double sum = 0.0;
  for_each_mode(grid, [&](Eigen::Index flat, const auto& k) {
    double k2 = 0.0;
    for (int j = 0; j < grid.dim(); ++j) k2 += k[j] * k[j];
    sum += (1.0 + k2 + k2 * k2) * std::norm(v[flat]);
  });
  // Parseval for the unnormalised DFT: sum |psi|^2 = sum |v|^2 / N
  return std::sqrt(sum / static_cast<double>(grid.size()) * grid.cell_volume());
}

GraphNormInterval graph_norm_constants(const HamiltonianSpec& spec, double t, double alpha,
                                       const std::vector<WaveFunction>& probes) {
  if (probes.empty()) throw ConfigError("graph-norm constants need probes");
  GraphNormInterval out;
  out.alpha = alpha;
  out.probe_count = static_cast<int>(probes.size());
  out.c_min = std::numeric_limits<double>::infinity();
  out.c_max = 0.0;
  for (const WaveFunction& p : probes) {
    const double n = norm(p);
    if (n == 0.0) throw NumericalError("degenerate probe with zero norm");
    WaveFunction shifted = apply_hamiltonian(spec, t, p);
    shifted.values += alpha * p.values;
    const double ratio = sobolev_norm(p) / (n + norm(shifted));
    out.c_min = std::min(out.c_min, ratio);
    out.c_max = std::max(out.c_max, ratio);
  }
  return out;
}

}  // namespace dipole
