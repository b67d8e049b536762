// Copyright 2026 The riesz-smc authors
// SPDX-License-Identifier: Apache-2.0

#include "riesz_smc/energy.hpp"

#include <cmath>
#include <utility>

namespace riesz_smc {

namespace {

// -ln(1e-300): flooring f at 1e-300 keeps gamma finite in density tails.
constexpr double kGammaCap = 690.77552789821368;

void check_finite(std::span<const double> x, const char* what) {
  for (double v : x) {
    if (!std::isfinite(v)) throw Error(ErrorKind::invalid_input, std::string(what) + " has non-finite coordinate");
  }
}

void check_dims(std::span<const double> xi, std::span<const double> xj, const EnergyParams& p) {
  if (xi.size() != xj.size() || static_cast<int>(xi.size()) != p.d) {
    throw Error(ErrorKind::invalid_input, "point dimension does not match EnergyParams.d");
  }
}

double log_kernel_from(double r, double gi, double gj, const EnergyParams& p) {
  double b = p.alpha * gi * gj + p.beta * r;
  if (b < p.base_floor) b = p.base_floor;
  return std::pow(b, p.weight_exponent()) - p.m * std::log(r);
}

}  // namespace

void EnergyParams::validate() const {
  if (!(m > 0.0) || d < 1 || !(m > static_cast<double>(d))) {
    throw Error(ErrorKind::invalid_input, "EnergyParams requires m > d >= 1");
  }
  if (!(beta > 0.0)) throw Error(ErrorKind::invalid_input, "EnergyParams requires beta > 0");
  if (!(base_floor > 0.0)) throw Error(ErrorKind::invalid_input, "EnergyParams requires base_floor > 0");
  if (!std::isfinite(alpha)) throw Error(ErrorKind::invalid_input, "EnergyParams.alpha must be finite");
}

DensityOracle DensityOracle::from_logpdf(LogPdfFn fn, double log_offset, double gamma_floor) {
  if (gamma_floor < 0.0) throw Error(ErrorKind::invalid_input, "gamma_floor must be >= 0");
  DensityOracle o;
  o.fn_ = std::move(fn);
  o.log_offset_ = log_offset;
  o.gamma_floor_ = gamma_floor;
  return o;
}

DensityOracle DensityOracle::uniform() { return DensityOracle(); }

DensityOracle DensityOracle::gaussian(std::vector<double> mean, double sd) {
  if (!(sd > 0.0)) throw Error(ErrorKind::invalid_input, "gaussian density requires sd > 0");
  return from_logpdf([mean = std::move(mean), sd](std::span<const double> x) {
    if (x.size() != mean.size()) {
      throw Error(ErrorKind::invalid_input, "density point dimension mismatch");
    }
    double q = 0.0;
    for (size_t c = 0; c < mean.size(); ++c) {
      double z = (x[c] - mean[c]) / sd;
      q += z * z;
    }
    return -0.5 * q;
  });
}

DensityOracle DensityOracle::gaussian1d(double mean, double sd) {
  return gaussian(std::vector<double>{mean}, sd);
}

double DensityOracle::logpdf(std::span<const double> x) const {
  return fn_ ? fn_(x) : 0.0;
}

double DensityOracle::gamma(std::span<const double> x) const {
  double lp = logpdf(x);
  if (std::isnan(lp)) throw Error(ErrorKind::invalid_input, "density logpdf returned NaN");
  double g = -(lp - log_offset_);
  if (g > kGammaCap) g = kGammaCap;
  if (g < gamma_floor_) g = gamma_floor_;
  return g;
}

Configuration::Configuration(int dim) : dim_(dim) {
  if (dim < 1) throw Error(ErrorKind::invalid_input, "Configuration dimension must be >= 1");
}

Configuration Configuration::from_points(const std::vector<Point>& points) {
  if (points.empty()) throw Error(ErrorKind::invalid_input, "Configuration needs at least one point");
  Configuration c(static_cast<int>(points.front().size()));
  for (const Point& p : points) c = c.extended(p);
  return c;
}

std::span<const double> Configuration::point(int i) const {
  return {pts_.data() + static_cast<size_t>(i) * dim_, static_cast<size_t>(dim_)};
}

std::vector<double> Configuration::coordinate(int c) const {
  std::vector<double> out(static_cast<size_t>(n_));
  for (int i = 0; i < n_; ++i) out[static_cast<size_t>(i)] = coord(i, c);
  return out;
}

void Configuration::validate_point(std::span<const double> p) const {
  if (static_cast<int>(p.size()) != dim_) {
    throw Error(ErrorKind::invalid_input, "point dimension does not match configuration");
  }
  check_finite(p, "configuration point");
}

Configuration Configuration::extended(std::span<const double> p) const {
  validate_point(p);
  Configuration out(dim_);
  out.n_ = n_ + 1;
  out.pts_ = pts_;
  out.pts_.insert(out.pts_.end(), p.begin(), p.end());
  size_t m = static_cast<size_t>(out.n_);
  out.dist_.assign(m * m, 0.0);
  for (int i = 0; i < n_; ++i) {
    for (int j = 0; j < n_; ++j) out.dist_[static_cast<size_t>(i) * m + j] = distance(i, j);
  }
  for (int i = 0; i < n_; ++i) {
    double r = euclidean_distance(point(i), p);
    if (r == 0.0) throw Error(ErrorKind::invalid_input, "configuration points must be distinct");
    out.dist_[static_cast<size_t>(i) * m + n_] = r;
    out.dist_[static_cast<size_t>(n_) * m + i] = r;
  }
  return out;
}

double euclidean_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error(ErrorKind::invalid_input, "distance: dimension mismatch");
  double s = 0.0;
  for (size_t c = 0; c < a.size(); ++c) {
    double d = a[c] - b[c];
    s += d * d;
  }
  return std::sqrt(s);
}

double log_pair_weight(std::span<const double> xi, std::span<const double> xj,
                       const DensityOracle& density, const EnergyParams& p) {
  p.validate();
  check_dims(xi, xj, p);
  check_finite(xi, "xi");
  check_finite(xj, "xj");
  double r = euclidean_distance(xi, xj);
  double b = p.alpha * density.gamma(xi) * density.gamma(xj) + p.beta * r;
  if (b < p.base_floor) b = p.base_floor;
  return std::pow(b, p.weight_exponent());
}

double pair_weight(std::span<const double> xi, std::span<const double> xj,
                   const DensityOracle& density, const EnergyParams& p) {
  return std::exp(log_pair_weight(xi, xj, density, p));
}

double log_pair_kernel(std::span<const double> xi, std::span<const double> xj,
                       const DensityOracle& density, const EnergyParams& p) {
  p.validate();
  check_dims(xi, xj, p);
  check_finite(xi, "xi");
  check_finite(xj, "xj");
  double r = euclidean_distance(xi, xj);
  if (r == 0.0) throw Error(ErrorKind::singular_kernel, "coincident points in pair_kernel");
  return log_kernel_from(r, density.gamma(xi), density.gamma(xj), p);
}

double pair_kernel(std::span<const double> xi, std::span<const double> xj,
                   const DensityOracle& density, const EnergyParams& p) {
  return std::exp(log_pair_kernel(xi, xj, density, p));
}

double log_total_energy(const Configuration& config, const DensityOracle& density,
                        const EnergyParams& p) {
  p.validate();
  if (config.size() < 2) throw Error(ErrorKind::insufficient_points, "total_energy needs n >= 2");
  if (config.dim() != p.d) throw Error(ErrorKind::invalid_input, "configuration dimension != EnergyParams.d");
  int n = config.size();
  std::vector<double> gammas(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) gammas[static_cast<size_t>(i)] = density.gamma(config.point(i));
  std::vector<double> terms;
  terms.reserve(static_cast<size_t>(n) * (n - 1) / 2);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      terms.push_back(log_kernel_from(config.distance(i, j), gammas[static_cast<size_t>(i)],
                                      gammas[static_cast<size_t>(j)], p));
    }
  }
  return logsumexp_sorted(std::move(terms)) / p.m;
}

double total_energy(const Configuration& config, const DensityOracle& density,
                    const EnergyParams& p) {
  return std::exp(log_total_energy(config, density, p));
}

namespace detail {

double log_potential_with_gammas(std::span<const double> y, double gamma_y,
                                 const Configuration& config,
                                 std::span<const double> gammas, const EnergyParams& p) {
  int n = config.size();
  std::vector<double> terms(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    double r = euclidean_distance(config.point(i), y);
    if (r == 0.0) throw Error(ErrorKind::singular_kernel, "potential evaluated at a configuration point");
    terms[static_cast<size_t>(i)] = log_kernel_from(r, gammas[i], gamma_y, p);
  }
  return logsumexp_sorted(std::move(terms));
}

}  // namespace detail

double log_potential_at(std::span<const double> y, const Configuration& config,
                        const DensityOracle& density, const EnergyParams& p) {
  p.validate();
  if (config.empty()) throw Error(ErrorKind::insufficient_points, "potential_at needs a non-empty configuration");
  if (config.dim() != p.d || static_cast<int>(y.size()) != p.d) {
    throw Error(ErrorKind::invalid_input, "potential_at dimension mismatch");
  }
  check_finite(y, "candidate point");
  int n = config.size();
  std::vector<double> gammas(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) gammas[static_cast<size_t>(i)] = density.gamma(config.point(i));
  return detail::log_potential_with_gammas(y, density.gamma(y), config, gammas, p);
}

double potential_at(std::span<const double> y, const Configuration& config,
                    const DensityOracle& density, const EnergyParams& p) {
  return std::exp(log_potential_at(y, config, density, p));
}

double min_separation(const Configuration& config) {
  if (config.size() < 2) throw Error(ErrorKind::insufficient_points, "min_separation needs n >= 2");
  double best = kInf;
  for (int i = 0; i < config.size(); ++i) {
    for (int j = i + 1; j < config.size(); ++j) best = std::min(best, config.distance(i, j));
  }
  return best;
}

double covering_radius(const Configuration& config, const std::vector<Point>& domain_mesh) {
  if (config.empty() || domain_mesh.empty()) {
    throw Error(ErrorKind::invalid_input, "covering_radius needs a non-empty configuration and mesh");
  }
  double radius = 0.0;
  for (const Point& x : domain_mesh) {
    if (static_cast<int>(x.size()) != config.dim()) {
      throw Error(ErrorKind::invalid_input, "mesh point dimension mismatch");
    }
    double nearest = kInf;
    for (int i = 0; i < config.size(); ++i) {
      nearest = std::min(nearest, euclidean_distance(config.point(i), x));
    }
    radius = std::max(radius, nearest);
  }
  return radius;
}

std::vector<Point> linspace_mesh(double lo, double hi, int count) {
  if (count < 2 || !(lo < hi)) throw Error(ErrorKind::invalid_input, "linspace_mesh needs count >= 2 and lo < hi");
  std::vector<Point> mesh(static_cast<size_t>(count));
  for (int i = 0; i < count; ++i) {
    mesh[static_cast<size_t>(i)] = {lo + (hi - lo) * static_cast<double>(i) / (count - 1)};
  }
  return mesh;
}

UniformityStat uniformity_statistic(const Configuration& config) {
  if (config.size() < 2) throw Error(ErrorKind::insufficient_points, "uniformity_statistic needs n >= 2");
  int n = config.size();
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) sum += config.distance(i, j);
  }
  double raw = 2.0 * sum / n;
  return {raw, raw / (n - 1)};
}

KsResult ks_test_values(std::vector<double> values,
                        const std::function<double(double)>& target_cdf) {
  if (values.empty()) throw Error(ErrorKind::invalid_input, "ks test needs at least one value");
  std::sort(values.begin(), values.end());
  size_t n = values.size();
  double stat = 0.0;
  for (size_t i = 0; i < n; ++i) {
    double f = target_cdf(values[i]);
    stat = std::max(stat, f - static_cast<double>(i) / n);
    stat = std::max(stat, static_cast<double>(i + 1) / n - f);
  }
  bool pass = stat < 1.358 / std::sqrt(static_cast<double>(n));
  return {stat, pass};
}

KsResult ks_uniformity_test(const Configuration& config,
                            const std::function<double(double)>& target_cdf) {
  if (config.dim() != 1) {
    throw Error(ErrorKind::unsupported_dimension,
                "ks_uniformity_test is defined for d = 1; test coordinates separately for d > 1");
  }
  return ks_test_values(config.coordinate(0), target_cdf);
}

EnergyBound energy_lower_bound(const Configuration& config, const DensityOracle& density,
                               const EnergyParams& p) {
  double lhs = p.m * log_total_energy(config, density, p);
  int n = config.size();
  std::vector<double> terms;
  terms.reserve(static_cast<size_t>(n) * (n - 1) / 2);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      terms.push_back(-(p.m + 1.0) * std::log(config.distance(i, j)));
    }
  }
  double rhs = logsumexp_sorted(std::move(terms)) - std::log(static_cast<double>(n - 1));
  bool holds = lhs >= rhs - 1e-9 * std::abs(rhs);
  return {lhs, rhs, holds};
}

}  // namespace riesz_smc
