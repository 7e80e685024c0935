#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "dipole/hamiltonians.hpp"

namespace dipole {

struct PowerIterationOptions {
  int max_iterations = 20000;
  double relative_tolerance = 1e-12;  ///< change of the estimate between sweeps
  double stagnation_threshold = 1e-6; ///< still moving by more than this at the end is an error
  std::uint64_t seed = 7;
};

/// ||W(s) (-Lap + alpha)^{-1}|| by power iteration on the normal operator, W = H(s) - (-Lap).
double contraction_norm(const HamiltonianSpec& spec, double s, double alpha, const PowerIterationOptions& options = {});

struct ContractionScan {
  std::vector<double> alphas;
  std::vector<double> q;
  double alpha_star = std::numeric_limits<double>::quiet_NaN();  ///< smallest sampled alpha with q < 1
  bool nonincreasing = true;
};

ContractionScan contraction_scan(const HamiltonianSpec& spec, double s, const std::vector<double>& alphas,
                                 const PowerIterationOptions& options = {});

struct InfinitesimalBoundScan {
  std::vector<double> epsilons;
  std::vector<double> constants;  ///< C_eps: a lower bound on the true constant (sup over a finite probe set)
  int probe_count = 0;
  bool nonincreasing = true;
};

/// For each eps the smallest C with ||W psi||^2 <= eps ||Lap psi||^2 + C ||psi||^2 over the probes.
InfinitesimalBoundScan infinitesimal_bound_scan(const HamiltonianSpec& spec, double s,
                                                const std::vector<double>& epsilons,
                                                const std::vector<WaveFunction>& probes);

/// ||psi||_{W^{2,2}} = ||(1 + k^2 + k^4)^{1/2} psi_hat||.
double sobolev_norm(const WaveFunction& psi);

struct GraphNormInterval {
  double c_min = 0.0;
  double c_max = 0.0;
  double alpha = 0.0;
  int probe_count = 0;
};

/// min and max over probes of ||psi||_{W^{2,2}} / (||psi|| + ||(H(t) + alpha) psi||).
GraphNormInterval graph_norm_constants(const HamiltonianSpec& spec, double t, double alpha,
                                       const std::vector<WaveFunction>& probes);

struct BoundsReport {
  Grid grid;
  double time = 0.0;
  std::uint64_t seed = 0;
  int probe_count = 0;
  ContractionScan contraction;
  InfinitesimalBoundScan infinitesimal;
  GraphNormInterval graph_norm;
};

}  // namespace dipole
