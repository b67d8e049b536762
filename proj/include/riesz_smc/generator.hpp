// Copyright 2026 The riesz-smc authors
// SPDX-License-Identifier: Apache-2.0

#ifndef RIESZ_SMC_GENERATOR_HPP
#define RIESZ_SMC_GENERATOR_HPP

#include <cstdint>
#include <vector>

#include "riesz_smc/energy.hpp"

namespace riesz_smc {

// One-point-per-round greedy construction of a point configuration that
// maximizes the weighted Riesz polarization of the target density:
//   (I)   seed with the candidate nearest the estimated density mean,
//   (II)  per round, score a fresh candidate pool by the configuration
//         potential and take the candidate sitting in the deepest hole,
//   (III) accept it if it clears the current minimum separation and a
//         relative-move coin flip, retrying up to max_retries before the
//         best-scoring candidate is force-accepted,
//   (IV)  optionally refit the density from the accepted points (KDE).

enum class PoolMode {
  uniform,  // pool_size i.i.d. uniform draws over the box, redrawn per round
  // Fixed equispaced grid over the box (d = 1 only). Symmetric targets make
  // grid candidates tie in potential to the last bit; ties resolve to the
  // lower coordinate, so grid pools trade placement jitter for a systematic
  // fill order. The uniform pool is the default for a reason.
  grid,
};

struct GeneratorConfig {
  int n_points = 2;
  int pool_size = 512;
  PoolMode pool_mode = PoolMode::uniform;
  int max_retries = 32;
  uint64_t seed = 0;
  std::vector<double> domain_lo;
  std::vector<double> domain_hi;
  int refit_interval = 0;        // 0 disables the density refit
  double refit_bandwidth = 0.0;  // 0 = Silverman's rule
  double denom_epsilon = 1e-6;   // added to ||x_prev|| in the relative-move test

  int dim() const { return static_cast<int>(domain_lo.size()); }
  void validate() const;
};

struct SelectionDiag {
  // Log of the candidate's potential when it was selected; NaN for the seed
  // point (no field exists yet). Log scale: the linear potential overflows
  // for large Riesz exponents.
  double log_potential = kNaN;
  double running_min_separation = kNaN;  // NaN until two points exist
  bool forced = false;                   // accepted only after max_retries
};

struct GenerationResult {
  Configuration config;
  std::vector<SelectionDiag> diagnostics;  // one entry per point, generation order
  bool energy_bound_ok = true;             // polarization lower bound, checked post hoc
};

// Step (I).
Point initial_point(const DensityOracle& density, const GeneratorConfig& cfg, Rng& rng);

struct ScoredPoint {
  Point point;
  double log_potential;
};

// Step (II): minimal-potential candidate from a fresh pool, never coincident
// with an existing point.
ScoredPoint next_point(const Configuration& config, const DensityOracle& density,
                       const EnergyParams& p, const GeneratorConfig& cfg, Rng& rng);

// Step (III): true iff ||x_next - x_prev|| >= r_min and the relative move
// ||x_next - x_prev|| / (||x_prev|| + denom_epsilon) beats a fresh U(0,1).
bool accept_rule(std::span<const double> x_next, std::span<const double> x_prev,
                 double r_min, const GeneratorConfig& cfg, Rng& rng);

// Full driver; deterministic given (cfg.seed, density, p, cfg).
GenerationResult generate(const DensityOracle& density, const EnergyParams& p,
                          const GeneratorConfig& cfg);

// Step (IV): Gaussian-kernel density estimate over the accepted points.
// bandwidth = 0 applies Silverman's rule per coordinate. The returned oracle
// is peak-normalized at the sample points so gamma >= 0 with 0 near the mode.
DensityOracle refit_density(const Configuration& config, double bandwidth);

}  // namespace riesz_smc

#endif  // RIESZ_SMC_GENERATOR_HPP
