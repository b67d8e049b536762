// Copyright 2026 The riesz-smc authors
// SPDX-License-Identifier: Apache-2.0

#ifndef RIESZ_SMC_ENERGY_HPP
#define RIESZ_SMC_ENERGY_HPP

#include <functional>
#include <span>
#include <vector>

#include "riesz_smc/common.hpp"

namespace riesz_smc {

// ---------------------------------------------------------------------------
// Weighted Riesz pairwise kernel
//
//   w(x, y) = exp(b^(-m/(2d))),  b = max(alpha * g(x) * g(y) + beta * r, base_floor)
//   K(x, y) = w(x, y) / r^m,     r = ||x - y||
//
// where g is a density-derived weight exponent (see DensityOracle). With the
// default m = 40 the weight can reach exp(1e160), so every aggregate here has
// a log-space form; the linear forms overflow to +inf when out of double
// range and are only meant for small exponents and tests.
// ---------------------------------------------------------------------------

struct EnergyParams {
  double m = 40.0;         // Riesz exponent; must exceed the dimension
  int d = 1;               // ambient dimension
  double alpha = -1.0;     // weight coupling coefficient
  double beta = 1.0;       // local discrepancy coefficient; positive
  double base_floor = 1e-8;  // clamp for the weight base, keeps b > 0

  void validate() const;
  double weight_exponent() const { return -m / (2.0 * d); }
};

using Point = std::vector<double>;

// Wraps a (possibly unnormalized) log target f and exposes
//   gamma(x) = clamp(-(logpdf(x) - log_offset), gamma_floor, -log(1e-300)).
// The cap corresponds to flooring f at 1e-300 so gamma stays finite in the
// tails. The caller picks the scale of f; the provided factories normalize
// the peak to 1 so gamma is 0 at the mode.
class DensityOracle {
 public:
  using LogPdfFn = std::function<double(std::span<const double>)>;

  DensityOracle() = default;  // logpdf == 0 everywhere (flat)

  static DensityOracle from_logpdf(LogPdfFn fn, double log_offset = 0.0,
                                   double gamma_floor = 0.0);
  static DensityOracle uniform();
  // Isotropic Gaussian with peak value 1, i.e. logpdf = -||x-mean||^2/(2 sd^2).
  static DensityOracle gaussian(std::vector<double> mean, double sd);
  static DensityOracle gaussian1d(double mean, double sd);

  double logpdf(std::span<const double> x) const;
  double gamma(std::span<const double> x) const;
  double gamma_floor() const { return gamma_floor_; }

 private:
  LogPdfFn fn_;
  double log_offset_ = 0.0;
  double gamma_floor_ = 0.0;
};

// An ordered set of pairwise-distinct points with an eagerly materialized
// distance matrix. Immutable; growth happens through extended().
class Configuration {
 public:
  explicit Configuration(int dim);
  static Configuration from_points(const std::vector<Point>& points);

  int size() const { return n_; }
  int dim() const { return dim_; }
  bool empty() const { return n_ == 0; }

  std::span<const double> point(int i) const;
  double coord(int i, int c) const { return pts_[static_cast<size_t>(i) * dim_ + c]; }
  double distance(int i, int j) const { return dist_[static_cast<size_t>(i) * n_ + j]; }

  // Values of one coordinate across all points, in insertion order.
  std::vector<double> coordinate(int c) const;

  // Copy with one more point appended; throws if the point duplicates an
  // existing one or has non-finite coordinates.
  Configuration extended(std::span<const double> p) const;

 private:
  int dim_ = 1;
  int n_ = 0;
  std::vector<double> pts_;   // n x dim, row-major
  std::vector<double> dist_;  // n x n, symmetric

  void validate_point(std::span<const double> p) const;
};

double euclidean_distance(std::span<const double> a, std::span<const double> b);

// Pairwise quantities. The log forms are exact for any parameter range; the
// linear forms are exp() of them.
double log_pair_weight(std::span<const double> xi, std::span<const double> xj,
                       const DensityOracle& density, const EnergyParams& p);
double pair_weight(std::span<const double> xi, std::span<const double> xj,
                   const DensityOracle& density, const EnergyParams& p);
double log_pair_kernel(std::span<const double> xi, std::span<const double> xj,
                       const DensityOracle& density, const EnergyParams& p);
double pair_kernel(std::span<const double> xi, std::span<const double> xj,
                   const DensityOracle& density, const EnergyParams& p);

// (sum over unordered pairs of K)^(1/m). The pair terms are accumulated in
// descending order, which makes the value bit-identical under any
// permutation of the configuration points.
double log_total_energy(const Configuration& config, const DensityOracle& density,
                        const EnergyParams& p);
double total_energy(const Configuration& config, const DensityOracle& density,
                    const EnergyParams& p);

// Field felt at y from the configuration: sum over points of K(x_i, y).
double log_potential_at(std::span<const double> y, const Configuration& config,
                        const DensityOracle& density, const EnergyParams& p);
double potential_at(std::span<const double> y, const Configuration& config,
                    const DensityOracle& density, const EnergyParams& p);

double min_separation(const Configuration& config);

// Max over mesh points of the distance to the nearest configuration point.
// The mesh stands in for the continuous domain; resolution is the caller's.
double covering_radius(const Configuration& config, const std::vector<Point>& domain_mesh);

std::vector<Point> linspace_mesh(double lo, double hi, int count);

struct UniformityStat {
  double raw;            // (1/n) * sum over ordered pairs of distances
  double mean_pairwise;  // raw / (n - 1), the mean pairwise distance
};
UniformityStat uniformity_statistic(const Configuration& config);

struct KsResult {
  double statistic;
  bool pass;  // statistic < 1.358 / sqrt(n)  (5% level)
};

// Two-sided Kolmogorov-Smirnov statistic against target_cdf; d = 1 only.
KsResult ks_uniformity_test(const Configuration& config,
                            const std::function<double(double)>& target_cdf);
KsResult ks_test_values(std::vector<double> values,
                        const std::function<double(double)>& target_cdf);

// Numerical check of the polarization lower bound
//   E^m >= (1/(n-1)) * sum over pairs of r^-(m+1),
// both sides in log space.
struct EnergyBound {
  double lhs_log;  // m * log_total_energy
  double rhs_log;
  bool holds;
};
EnergyBound energy_lower_bound(const Configuration& config, const DensityOracle& density,
                               const EnergyParams& p);

namespace detail {
// Potential with the gamma values precomputed; used by the candidate-scoring
// loop so a KDE-backed gamma is not reevaluated per (candidate, point) pair.
double log_potential_with_gammas(std::span<const double> y, double gamma_y,
                                 const Configuration& config,
                                 std::span<const double> gammas, const EnergyParams& p);
}  // namespace detail

}  // namespace riesz_smc

#endif  // RIESZ_SMC_ENERGY_HPP
