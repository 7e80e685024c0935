#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "dipole/fields.hpp"
#include "dipole/hamiltonians.hpp"
#include "dipole/propagate.hpp"

namespace dipole {

struct GridSpec {
  int dim = 1;
  std::vector<int> points{1024};
  std::vector<double> lengths{200.0};
  int particles = 1;
};

struct PotentialSpec {
  PotentialKind kind = PotentialKind::SoftCoreCoulomb;
  double charge = 1.0;
  double softening = 1.0;
  double depth = 1.0;
  double width = 1.0;
};

struct FieldSpec {
  EnvelopeKind kind = EnvelopeKind::PlaneWaveCW;
  double amplitude = 1.0;
  Vec3 k_hat = Vec3::UnitX();
  Vec3 eps_hat = Vec3::UnitY();
  double t_center = 0.0;
  double omega = 1.0;
  std::vector<double> lambdas;  ///< snapped to L/m on load
};

enum class InitialState { GroundState, Packet };

struct RunSpec {
  double t0 = 0.0;  ///< 0 in a file means "one time step"
  double t_final = 1.0;
  double dt = 1e-2;
  StepMethod method = StepMethod::Krylov;
  KrylovOptions krylov;
  InitialState initial = InitialState::GroundState;
  double ground_tolerance = 1e-9;
  std::vector<double> packet_center;
  double packet_sigma = 1.0;
  std::vector<double> packet_momentum;
  int cook_panels = 16;
  int gauge_samples = 8;
  double gauge_omega_mismatch = 0.0;
};

struct BoundsSpec {
  double time = 0.0;
  std::vector<double> alphas{1.0, 10.0, 100.0, 1000.0};
  std::vector<double> epsilons{0.01, 0.03, 0.1, 0.3, 1.0};
  double graph_alpha = 10.0;
  int probes = 64;
};

/// Everything a study needs, read from an INI file with sections
/// [study] [grid] [potential] [field] [run] [bounds].
struct StudyConfig {
  std::string preset = "custom";
  std::uint64_t seed = 1;
  GridSpec grid;
  PotentialSpec potential;
  FieldSpec field;
  RunSpec run;
  BoundsSpec bounds;

  /// Snaps lambdas, fills t0 and checks every invariant; throws ConfigError.
  void finalize();

  Grid make_grid() const;
  PotentialModel make_potential(const Grid& grid) const;
  LaserEnvelope envelope() const;
  ScaledField field_at(double lambda) const;
  StepperConfig stepper() const;
  std::vector<double> gauge_sample_times() const;
};

StudyConfig parse_config(std::istream& in);
StudyConfig load_config(const std::filesystem::path& path);

/// Canonical INI text; parse_config(to_ini(c)) reproduces c.
std::string to_ini(const StudyConfig& config);

/// 16 hex digits of the 64-bit FNV-1a hash of the canonical INI text.
std::string config_hash(const StudyConfig& config);

StudyConfig preset_config(const std::string& name);
std::vector<std::string> preset_names();

}  // namespace dipole
