#pragma once

#include <array>
#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "dipole/common.hpp"
#include "dipole/spatial.hpp"

namespace dipole {

enum class EnvelopeKind { Zero, PlaneWaveCW, GaussianPulse };

EnvelopeKind parse_envelope_kind(const std::string& name);
std::string to_string(EnvelopeKind kind);

/// Tabulated primitive F(u) = int_{+inf}^{u} e^{-s^2} cos(s) ds on [-window, window].
///
/// Nodes come from adaptive Gauss-Kronrod quadrature; values in between are
/// cubic Hermite interpolants using the exact slope e^{-u^2} cos(u). Outside the
/// window F is held at its end values (0 on the right, the full integral on the left).
class PulsePrimitive {
 public:
  explicit PulsePrimitive(double window = 8.0, int nodes_per_unit = 1024);

  double operator()(double u) const;
  double window() const { return window_; }
  /// F(-window), i.e. -int_{-inf}^{inf} e^{-s^2} cos(s) ds up to the truncated tails.
  double left_limit() const { return values_.front(); }

  static const PulsePrimitive& shared();

 private:
  double window_;
  double step_;
  std::vector<double> values_;
};

/// Adaptive 7/15-point Gauss-Kronrod quadrature of f over [a, b].
template <class F>
double integrate_gauss_kronrod(F&& f, double a, double b, double abs_tol, int max_depth = 40);

/// Dimensionless laser envelope a(x, t) = g(u) eps_hat with u = 2 pi k_hat.x - s (t - t_center).
///
/// g(u) = E sin(u) for the continuous wave and E F(u) for the Gaussian pulse.
/// `time_sign` = -1 runs the envelope backwards in time.
struct LaserEnvelope {
  EnvelopeKind kind = EnvelopeKind::Zero;
  double amplitude = 0.0;
  Vec3 k_hat = Vec3::UnitX();
  Vec3 eps_hat = Vec3::UnitY();
  double t_center = 0.0;
  double time_sign = 1.0;

  static LaserEnvelope zero();
  static LaserEnvelope plane_wave(double amplitude, const Vec3& k_hat, const Vec3& eps_hat);
  static LaserEnvelope gaussian_pulse(double amplitude, const Vec3& k_hat, const Vec3& eps_hat, double t_center = 0.0);

  /// The envelope b(t') = -a(x, pivot - t'), used to run a trajectory backwards.
  LaserEnvelope time_reversed(double pivot) const;

  /// Throws ConfigError unless k_hat and eps_hat are orthonormal.
  void validate() const;

  double phase(const Vec3& x, double t) const { return 2.0 * kPi * k_hat.dot(x) - time_sign * (t - t_center); }
  /// Profile g and its u-derivatives.
  double profile(double u) const;
  double profile_du(double u) const;
  double profile_du2(double u) const;
};

Vec3 eval_envelope(const LaserEnvelope& env, const Vec3& x, double t);
/// Analytic time derivative of order 1 or 2.
Vec3 eval_envelope_dt(const LaserEnvelope& env, const Vec3& x, double t, int order);

/// A_lambda(r, t) = (c / omega) a(r / lambda, omega t) with c = omega lambda / (2 pi).
///
/// The speed of light is derived, never independent: (1/c) A_lambda depends on
/// lambda and omega only, so the dipole limit is a single-parameter limit.
struct ScaledField {
  LaserEnvelope envelope;
  double lambda = 1.0;
  double omega = 1.0;

  ScaledField() = default;
  ScaledField(LaserEnvelope env, double lambda, double omega);

  double c_derived() const { return omega * lambda / (2.0 * kPi); }
  bool is_zero() const { return envelope.kind == EnvelopeKind::Zero || envelope.amplitude == 0.0; }
};

/// Coupling (1/c) A_lambda(r, t) = (1/omega) a(r/lambda, omega t); multiply by c_derived() for A itself.
Vec3 eval_scaled_A(const ScaledField& field, const Vec3& r, double t);
/// E(r, t) = -(1/c) dA/dt = -(d_t a)(r/lambda, omega t).
Vec3 eval_E_field(const ScaledField& field, const Vec3& r, double t);
/// (d_t a)(0, omega t): the time derivative of the dipole coupling (1/omega) a(0, omega t).
Vec3 dipole_coupling_rate(const ScaledField& field, double t);

struct TransversalityReport {
  double defect = 0.0;
  double k_norm_defect = 0.0;
  double eps_norm_defect = 0.0;
  bool pass = false;
};

TransversalityReport check_transversality(const LaserEnvelope& env, double tol = 1e-12);

struct DivergenceReport {
  double max_defect = 0.0;
  bool commensurate = true;
  std::vector<double> sample_times;
};

/// Spectral divergence of a(., t) sampled on the grid (grid coordinates are the
/// envelope's dimensionless x). Non-commensurate boxes are flagged, not rejected.
/// A pulse is not periodic along k_hat, so the spectral check is only meaningful
/// when the polarised axes carry no k_hat component.
DivergenceReport check_divergence_free(const LaserEnvelope& env, const Grid& grid,
                                       const std::vector<double>& times);

/// Whether the plane-wave phase of a scaled field is periodic on the grid:
/// k_hat component along each axis times L / lambda must be an integer.
bool is_commensurate(const ScaledField& field, const Grid& grid, double tol = 1e-9);

/// lambda = L/m with m the positive integer nearest L / target, for box length L.
double snap_wavelength(double target, double box_length);

/// Embeds grid point coordinates into physical space for one particle.
Vec3 particle_position(const Grid& grid, const std::array<double, kMaxGridDim>& x, int particle);

// ---------------------------------------------------------------------------

template <class F>
double integrate_gauss_kronrod(F&& f, double a, double b, double abs_tol, int max_depth) {
  static constexpr double xk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                                   0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                                   0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                                   0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
  static constexpr double wk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                                   0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                                   0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                                   0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
  static constexpr double wg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                   0.381830050505118944950369775488975, 0.417959183673469387755102040816327};
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = wk[7] * fc;
  double gauss = wg[3] * fc;
  for (int i = 0; i < 7; ++i) {
    const double fl = f(center - half * xk[i]);
    const double fr = f(center + half * xk[i]);
    kronrod += wk[i] * (fl + fr);
    if (i % 2 == 1) gauss += wg[i / 2] * (fl + fr);
  }
  kronrod *= half;
  gauss *= half;
  if (std::abs(kronrod - gauss) <= abs_tol || max_depth == 0) return kronrod;
  return integrate_gauss_kronrod(f, a, center, 0.5 * abs_tol, max_depth - 1) +
         integrate_gauss_kronrod(f, center, b, 0.5 * abs_tol, max_depth - 1);
}

}  // namespace dipole
