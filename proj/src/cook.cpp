#include "dipole/cook.hpp"

#include <algorithm>
#include <cmath>

namespace dipole {

double cook_integrand(const ScaledField& field, double s, const WaveFunction& psi_s) {
  if (psi_s.space != Space::Position) throw ConfigError("cook integrand needs a position-space state");
  const Grid& grid = psi_s.grid;
  if (field.is_zero()) return 0.0;
  if (!is_commensurate(field, grid)) throw ConfigError("field is not commensurate with the grid");

  const CouplingSamples b = sample_coupling(field, grid, s);
  const DipoleCoupling b0 = dipole_coupling(field, grid, s);
  const double dv = grid.cell_volume();

  Eigen::VectorXcd gradient_term = Eigen::VectorXcd::Zero(grid.size());
  const std::vector<WaveFunction> grad = spectral_gradient(psi_s);
  for (int j = 0; j < grid.dim(); ++j) {
    const Eigen::VectorXd diff = b.along_axis.col(j).array() - b0.along_axis[j];
    if (diff.isZero(0.0)) continue;
    gradient_term += diff.cast<Complex>().cwiseProduct(grad[j].values);
  }
  const Eigen::VectorXd square_diff = b.squared.array() - b0.squared;
  const Eigen::VectorXcd square_term = square_diff.cast<Complex>().cwiseProduct(psi_s.values);

  // b = a / omega, so 2 ||db . grad psi|| = (2/omega) ||da . grad psi|| and likewise for the square
  return 2.0 * std::sqrt(gradient_term.squaredNorm() * dv) + std::sqrt(square_term.squaredNorm() * dv);
}

DipoleSamples sample_dipole_trajectory(const ScaledField& field, const PotentialModel& potential,
                                       const WaveFunction& psi0, const StepperConfig& config, int panels) {
  if (panels < 16 || panels % 2 != 0) throw ConfigError("Simpson quadrature needs an even panel count >= 16");
  if (!(config.t_final > config.t0)) throw ConfigError("cook bound needs t_final > t0");
  DipoleSamples out;
  out.panels = panels;
  const int nodes = 2 * panels + 1;
  const double h = (config.t_final - config.t0) / (nodes - 1);
  for (int i = 0; i < nodes; ++i) out.times.push_back(i + 1 == nodes ? config.t_final : config.t0 + i * h);
  const Trajectory traj =
      evolve(make_spec(CouplingKind::DipoleVelocity, field, potential), psi0, config, out.times, {}, true);
  if (traj.sample_times.size() != out.times.size())
    throw NumericalError("dipole trajectory missed Simpson nodes");
  out.states = traj.states;
  out.max_step_drift = traj.max_step_drift;
  out.terminal_norm_defect = traj.terminal_norm_defect;
  return out;
}

double CookReport::self_estimate() const {
  if (bound == 0.0) return coarse_bound == 0.0 ? 0.0 : 1.0;
  return std::abs(bound - coarse_bound) / std::abs(bound);
}

CookReport cook_bound_from_samples(const ScaledField& field, const DipoleSamples& samples, double tolerance) {
  const int nodes = static_cast<int>(samples.times.size());
  if (nodes != 2 * samples.panels + 1 || samples.states.size() != samples.times.size())
    throw ConfigError("dipole samples do not match the Simpson layout");
  CookReport r;
  r.lambda = field.lambda;
  r.omega = field.omega;
  r.t0 = samples.times.front();
  r.t = samples.times.back();
  r.panels = samples.panels;
  r.nodes = samples.times;
  const double h = (r.t - r.t0) / (nodes - 1);

  r.integrand.resize(nodes);
  r.weights.resize(nodes);
  for (int i = 0; i < nodes; ++i) {
    r.integrand[i] = cook_integrand(field, samples.times[i], samples.states[i]);
    r.weights[i] = (i == 0 || i == nodes - 1) ? h / 3.0 : (i % 2 == 1 ? 4.0 * h / 3.0 : 2.0 * h / 3.0);
  }
  for (int i = 0; i < nodes; ++i) r.bound += r.weights[i] * r.integrand[i];

  // the same rule on every other node
  const int coarse_nodes = samples.panels + 1;
  const double hc = 2.0 * h;
  for (int i = 0; i < coarse_nodes; ++i) {
    const double w = (i == 0 || i == coarse_nodes - 1) ? hc / 3.0 : (i % 2 == 1 ? 4.0 * hc / 3.0 : 2.0 * hc / 3.0);
    r.coarse_bound += w * r.integrand[2 * i];
  }
  r.quadrature_consistent = r.self_estimate() <= tolerance;
  return r;
}

std::vector<CookReport> cook_bounds(const std::vector<ScaledField>& fields, const PotentialModel& potential,
                                    const WaveFunction& psi0, const StepperConfig& config,
                                    const CookOptions& options) {
  if (fields.empty()) return {};
  int panels = options.panels;
  std::vector<CookReport> reports;
  for (int attempt = 0; attempt <= options.max_refinements; ++attempt, panels *= 2) {
    const DipoleSamples samples = sample_dipole_trajectory(fields.front(), potential, psi0, config, panels);
    reports.clear();
    bool consistent = true;
    for (const ScaledField& f : fields) {
      reports.push_back(cook_bound_from_samples(f, samples, options.tolerance));
      consistent = consistent && reports.back().quadrature_consistent;
    }
    if (consistent) break;
  }
  return reports;
}

CookReport cook_bound(const ScaledField& field, const PotentialModel& potential, const WaveFunction& psi0,
                      const StepperConfig& config, const CookOptions& options) {
  return cook_bounds({field}, potential, psi0, config, options).front();
}

}  // namespace dipole
