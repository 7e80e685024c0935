#include "dipole/fields.hpp"

#include <algorithm>
#include <cmath>

namespace dipole {

namespace {

double pulse_integrand(double s) { return std::exp(-s * s) * std::cos(s); }

}  // namespace

EnvelopeKind parse_envelope_kind(const std::string& name) {
  if (name == "zero") return EnvelopeKind::Zero;
  if (name == "cw" || name == "plane-wave") return EnvelopeKind::PlaneWaveCW;
  if (name == "pulse" || name == "gaussian-pulse") return EnvelopeKind::GaussianPulse;
  throw ConfigError("unknown envelope kind '" + name + "'");
}

std::string to_string(EnvelopeKind kind) {
  switch (kind) {
    case EnvelopeKind::Zero: return "zero";
    case EnvelopeKind::PlaneWaveCW: return "cw";
    case EnvelopeKind::GaussianPulse: return "pulse";
  }
  throw ConfigError("unknown envelope kind");
}

PulsePrimitive::PulsePrimitive(double window, int nodes_per_unit)
    : window_(window), step_(1.0 / nodes_per_unit) {
  const int panels = static_cast<int>(std::lround(2.0 * window * nodes_per_unit));
  values_.assign(panels + 1, 0.0);
  // accumulate from the right end, where F is zero up to e^{-window^2}
  values_[panels] = -integrate_gauss_kronrod(pulse_integrand, window, window + 12.0, 1e-15);
  for (int i = panels - 1; i >= 0; --i) {
    const double a = -window + i * step_;
    values_[i] = values_[i + 1] - integrate_gauss_kronrod(pulse_integrand, a, a + step_, 1e-12 / panels);
  }
}

double PulsePrimitive::operator()(double u) const {
  if (u >= window_) return values_.back();
  if (u <= -window_) return values_.front();
  const double pos = (u + window_) / step_;
  const auto i = std::min(static_cast<std::size_t>(pos), values_.size() - 2);
  const double t = pos - static_cast<double>(i);
  const double u0 = -window_ + static_cast<double>(i) * step_;
  const double f0 = values_[i], f1 = values_[i + 1];
  const double d0 = pulse_integrand(u0) * step_, d1 = pulse_integrand(u0 + step_) * step_;
  const double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * f0 + (t3 - 2 * t2 + t) * d0 + (-2 * t3 + 3 * t2) * f1 + (t3 - t2) * d1;
}

const PulsePrimitive& PulsePrimitive::shared() {
  static const PulsePrimitive table;
  return table;
}

LaserEnvelope LaserEnvelope::zero() { return LaserEnvelope{}; }

LaserEnvelope LaserEnvelope::plane_wave(double amplitude, const Vec3& k_hat, const Vec3& eps_hat) {
  LaserEnvelope env{EnvelopeKind::PlaneWaveCW, amplitude, k_hat, eps_hat, 0.0, 1.0};
  env.validate();
  return env;
}

LaserEnvelope LaserEnvelope::gaussian_pulse(double amplitude, const Vec3& k_hat, const Vec3& eps_hat,
                                            double t_center) {
  LaserEnvelope env{EnvelopeKind::GaussianPulse, amplitude, k_hat, eps_hat, t_center, 1.0};
  env.validate();
  PulsePrimitive::shared();
  return env;
}

LaserEnvelope LaserEnvelope::time_reversed(double pivot) const {
  LaserEnvelope env = *this;
  env.amplitude = -amplitude;
  env.time_sign = -time_sign;
  env.t_center = pivot - t_center;
  return env;
}

void LaserEnvelope::validate() const {
  if (kind == EnvelopeKind::Zero) return;
  const auto report = check_transversality(*this);
  if (report.k_norm_defect > 1e-12 || report.eps_norm_defect > 1e-12)
    throw ConfigError("k_hat and eps_hat must be unit vectors");
  if (!report.pass) throw ConfigError("polarisation must be transverse to the propagation direction");
  if (!std::isfinite(amplitude)) throw ConfigError("field amplitude must be finite");
}

double LaserEnvelope::profile(double u) const {
  switch (kind) {
    case EnvelopeKind::Zero: return 0.0;
    case EnvelopeKind::PlaneWaveCW: return amplitude * std::sin(u);
    case EnvelopeKind::GaussianPulse: return amplitude * PulsePrimitive::shared()(u);
  }
  throw ConfigError("unknown envelope kind");
}

double LaserEnvelope::profile_du(double u) const {
  switch (kind) {
    case EnvelopeKind::Zero: return 0.0;
    case EnvelopeKind::PlaneWaveCW: return amplitude * std::cos(u);
    case EnvelopeKind::GaussianPulse: return amplitude * pulse_integrand(u);
  }
  throw ConfigError("unknown envelope kind");
}

double LaserEnvelope::profile_du2(double u) const {
  switch (kind) {
    case EnvelopeKind::Zero: return 0.0;
    case EnvelopeKind::PlaneWaveCW: return -amplitude * std::sin(u);
    case EnvelopeKind::GaussianPulse:
      return -amplitude * std::exp(-u * u) * (2.0 * u * std::cos(u) + std::sin(u));
  }
  throw ConfigError("unknown envelope kind");
}

Vec3 eval_envelope(const LaserEnvelope& env, const Vec3& x, double t) {
  if (env.kind == EnvelopeKind::Zero) return Vec3::Zero();
  return env.profile(env.phase(x, t)) * env.eps_hat;
}

Vec3 eval_envelope_dt(const LaserEnvelope& env, const Vec3& x, double t, int order) {
  if (order != 1 && order != 2) throw ConfigError("envelope time derivative order must be 1 or 2");
  if (env.kind == EnvelopeKind::Zero) return Vec3::Zero();
  const double u = env.phase(x, t);
  // du/dt = -time_sign and time_sign^2 = 1
  if (order == 1) return -env.time_sign * env.profile_du(u) * env.eps_hat;
  return env.profile_du2(u) * env.eps_hat;
}

ScaledField::ScaledField(LaserEnvelope env, double lambda_, double omega_)
    : envelope(std::move(env)), lambda(lambda_), omega(omega_) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ConfigError("wavelength must be positive");
  if (!(omega > 0.0) || !std::isfinite(omega)) throw ConfigError("angular frequency must be positive");
}

Vec3 eval_scaled_A(const ScaledField& field, const Vec3& r, double t) {
  return eval_envelope(field.envelope, r / field.lambda, field.omega * t) / field.omega;
}

Vec3 eval_E_field(const ScaledField& field, const Vec3& r, double t) {
  return -eval_envelope_dt(field.envelope, r / field.lambda, field.omega * t, 1);
}

Vec3 dipole_coupling_rate(const ScaledField& field, double t) {
  return eval_envelope_dt(field.envelope, Vec3::Zero(), field.omega * t, 1);
}

TransversalityReport check_transversality(const LaserEnvelope& env, double tol) {
  TransversalityReport r;
  r.defect = std::abs(env.k_hat.dot(env.eps_hat));
  r.k_norm_defect = std::abs(env.k_hat.norm() - 1.0);
  r.eps_norm_defect = std::abs(env.eps_hat.norm() - 1.0);
  r.pass = r.defect <= tol && r.k_norm_defect <= tol && r.eps_norm_defect <= tol;
  return r;
}

Vec3 particle_position(const Grid& grid, const std::array<double, kMaxGridDim>& x, int particle) {
  Vec3 r = Vec3::Zero();
  const int p = grid.dims_per_particle();
  for (int d = 0; d < p && d < 3; ++d) r[d] = x[particle * p + d];
  return r;
}

DivergenceReport check_divergence_free(const LaserEnvelope& env, const Grid& grid,
                                       const std::vector<double>& times) {
  DivergenceReport report;
  report.sample_times = times;
  const int n = grid.dim();
  for (int j = 0; j < n; ++j) {
    const double cycles = env.k_hat[grid.physical_axis(j)] * grid.lengths[j];
    if (std::abs(cycles - std::round(cycles)) > 1e-9) report.commensurate = false;
  }
  if (env.kind == EnvelopeKind::Zero) return report;
  for (double t : times) {
    Eigen::VectorXd div = Eigen::VectorXd::Zero(grid.size());
    for (int axis = 0; axis < n; ++axis) {
      const double pol = env.eps_hat[grid.physical_axis(axis)];
      const int particle = grid.particle_of_axis(axis);
      Eigen::VectorXcd component(grid.size());
      for_each_point(grid, [&](Eigen::Index flat, const auto& x) {
        component[flat] = env.profile(env.phase(particle_position(grid, x, particle), t)) * pol;
      });
      fft_forward(grid, component);
      for_each_mode(grid, [&](Eigen::Index flat, const auto& k) { component[flat] *= kI * k[axis]; });
      fft_inverse(grid, component);
      div += component.real();
    }
    report.max_defect = std::max(report.max_defect, div.cwiseAbs().maxCoeff());
  }
  return report;
}

bool is_commensurate(const ScaledField& field, const Grid& grid, double tol) {
  if (field.is_zero()) return true;
  for (int j = 0; j < grid.dim(); ++j) {
    const double cycles = field.envelope.k_hat[grid.physical_axis(j)] * grid.lengths[j] / field.lambda;
    if (std::abs(cycles - std::round(cycles)) > tol) return false;
  }
  return true;
}

double snap_wavelength(double target, double box_length) {
  if (!(target > 0.0) || !(box_length > 0.0)) throw ConfigError("wavelength and box length must be positive");
  const double m = std::max(1.0, std::round(box_length / target));
  return box_length / m;
}

}  // namespace dipole
