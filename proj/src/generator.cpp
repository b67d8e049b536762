// Copyright 2026 The riesz-smc authors
// SPDX-License-Identifier: Apache-2.0

#include "riesz_smc/generator.hpp"

#include <cmath>
#include <limits>
#include <utility>

namespace riesz_smc {

namespace {

double norm2(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

std::vector<Point> draw_pool(const GeneratorConfig& cfg, Rng& rng) {
  std::vector<Point> pool(static_cast<size_t>(cfg.pool_size));
  int d = cfg.dim();
  if (cfg.pool_mode == PoolMode::grid) {
    for (int i = 0; i < cfg.pool_size; ++i) {
      double t = static_cast<double>(i) / (cfg.pool_size - 1);
      pool[static_cast<size_t>(i)] = {cfg.domain_lo[0] + t * (cfg.domain_hi[0] - cfg.domain_lo[0])};
    }
    return pool;
  }
  for (int i = 0; i < cfg.pool_size; ++i) {
    Point x(static_cast<size_t>(d));
    for (int c = 0; c < d; ++c) x[static_cast<size_t>(c)] = rng.uniform(cfg.domain_lo[c], cfg.domain_hi[c]);
    pool[static_cast<size_t>(i)] = std::move(x);
  }
  return pool;
}

double interpolated_quantile(std::vector<double> sorted, double q) {
  size_t n = sorted.size();
  double pos = q * static_cast<double>(n - 1);
  size_t lo = static_cast<size_t>(pos);
  size_t hi = std::min(lo + 1, n - 1);
  double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

double silverman_bandwidth(std::vector<double> values) {
  size_t n = values.size();
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  var /= static_cast<double>(n - 1);
  double sd = std::sqrt(var);
  std::sort(values.begin(), values.end());
  double iqr = interpolated_quantile(values, 0.75) - interpolated_quantile(values, 0.25);
  double spread = sd;
  if (iqr > 0.0) spread = std::min(spread, iqr / 1.34);
  if (!(spread > 0.0)) spread = std::max(std::abs(mean) * 1e-3, 1e-6);
  return 0.9 * spread * std::pow(static_cast<double>(n), -0.2);
}

}  // namespace

void GeneratorConfig::validate() const {
  if (n_points < 2) throw Error(ErrorKind::invalid_config, "n_points must be >= 2");
  if (pool_size < 2) throw Error(ErrorKind::invalid_config, "pool_size must be >= 2");
  if (max_retries < 1) throw Error(ErrorKind::invalid_config, "max_retries must be >= 1");
  if (!(denom_epsilon > 0.0)) throw Error(ErrorKind::invalid_config, "denom_epsilon must be > 0");
  if (refit_interval < 0) throw Error(ErrorKind::invalid_config, "refit_interval must be >= 0");
  if (domain_lo.empty() || domain_lo.size() != domain_hi.size()) {
    throw Error(ErrorKind::invalid_config, "domain bounds must be non-empty and equal length");
  }
  for (size_t c = 0; c < domain_lo.size(); ++c) {
    if (!(domain_lo[c] < domain_hi[c])) {
      throw Error(ErrorKind::invalid_config, "domain_lo must be < domain_hi componentwise");
    }
  }
  if (pool_mode == PoolMode::grid && dim() != 1) {
    throw Error(ErrorKind::unsupported_dimension, "grid pool is only available for d = 1");
  }
}

Point initial_point(const DensityOracle& density, const GeneratorConfig& cfg, Rng& rng) {
  cfg.validate();
  std::vector<Point> pool = draw_pool(cfg, rng);
  std::vector<double> lp(pool.size());
  double max_lp = -kInf;
  for (size_t i = 0; i < pool.size(); ++i) {
    lp[i] = density.logpdf(pool[i]);
    if (lp[i] > max_lp) max_lp = lp[i];
  }
  if (!std::isfinite(max_lp)) {
    throw Error(ErrorKind::degenerate_density, "density vanished on the whole candidate pool");
  }
  // Self-normalized importance estimate of the density mean over the box.
  int d = cfg.dim();
  std::vector<double> mean(static_cast<size_t>(d), 0.0);
  double wsum = 0.0;
  for (size_t i = 0; i < pool.size(); ++i) {
    double w = std::exp(lp[i] - max_lp);
    wsum += w;
    for (int c = 0; c < d; ++c) mean[static_cast<size_t>(c)] += w * pool[i][static_cast<size_t>(c)];
  }
  for (int c = 0; c < d; ++c) mean[static_cast<size_t>(c)] /= wsum;

  size_t best = 0;
  double best_dist = kInf;
  for (size_t i = 0; i < pool.size(); ++i) {
    double r = euclidean_distance(pool[i], mean);
    if (r < best_dist) {
      best_dist = r;
      best = i;
    }
  }
  return pool[best];
}

ScoredPoint next_point(const Configuration& config, const DensityOracle& density,
                       const EnergyParams& p, const GeneratorConfig& cfg, Rng& rng) {
  cfg.validate();
  p.validate();
  if (config.empty()) throw Error(ErrorKind::invalid_input, "next_point needs a non-empty configuration");
  if (config.dim() != cfg.dim() || config.dim() != p.d) {
    throw Error(ErrorKind::invalid_input, "dimension mismatch between configuration, params and domain");
  }
  std::vector<Point> pool = draw_pool(cfg, rng);

  int n = config.size();
  std::vector<double> gammas(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) gammas[static_cast<size_t>(i)] = density.gamma(config.point(i));

  bool found = false;
  ScoredPoint best{{}, kInf};
  for (Point& cand : pool) {
    bool coincident = false;
    for (int i = 0; i < n; ++i) {
      if (euclidean_distance(config.point(i), cand) == 0.0) {
        coincident = true;
        break;
      }
    }
    if (coincident) continue;
    double lp = detail::log_potential_with_gammas(cand, density.gamma(cand), config, gammas, p);
    if (!found || lp < best.log_potential) {
      best = {std::move(cand), lp};
      found = true;
    }
  }
  if (!found) throw Error(ErrorKind::degenerate_pool, "candidate pool empty after de-duplication");
  return best;
}

bool accept_rule(std::span<const double> x_next, std::span<const double> x_prev,
                 double r_min, const GeneratorConfig& cfg, Rng& rng) {
  if (!(r_min > 0.0)) throw Error(ErrorKind::invalid_input, "accept_rule requires r_min > 0");
  double sep = euclidean_distance(x_next, x_prev);
  if (sep < r_min) return false;
  double u = rng.uniform01();
  return sep / (norm2(x_prev) + cfg.denom_epsilon) >= u;
}

GenerationResult generate(const DensityOracle& density, const EnergyParams& p,
                          const GeneratorConfig& cfg) {
  cfg.validate();
  p.validate();
  if (cfg.dim() != p.d) throw Error(ErrorKind::invalid_config, "EnergyParams.d must match the domain dimension");

  Rng rng(cfg.seed);
  DensityOracle current = density;

  Configuration config(cfg.dim());
  config = config.extended(initial_point(current, cfg, rng));
  std::vector<SelectionDiag> diags;
  diags.push_back({});

  while (config.size() < cfg.n_points) {
    std::span<const double> prev = config.point(config.size() - 1);
    // With a single point there is no pairwise floor yet; any positive
    // separation clears the first clause.
    double r_min = config.size() >= 2 ? min_separation(config)
                                      : std::numeric_limits<double>::min();
    ScoredPoint best{{}, kInf};
    bool have_best = false;
    ScoredPoint chosen;
    bool forced = false;
    for (int tries = 0;;) {
      ScoredPoint cand = next_point(config, current, p, cfg, rng);
      if (!have_best || cand.log_potential < best.log_potential) {
        best = cand;
        have_best = true;
      }
      if (accept_rule(cand.point, prev, r_min, cfg, rng)) {
        chosen = std::move(cand);
        break;
      }
      if (++tries >= cfg.max_retries) {
        chosen = std::move(best);
        forced = true;
        break;
      }
    }
    config = config.extended(chosen.point);
    diags.push_back({chosen.log_potential, min_separation(config), forced});
    if (cfg.refit_interval > 0 && config.size() % cfg.refit_interval == 0 &&
        config.size() < cfg.n_points) {
      current = refit_density(config, cfg.refit_bandwidth);
    }
  }

  GenerationResult result{std::move(config), std::move(diags), true};
  result.energy_bound_ok = energy_lower_bound(result.config, density, p).holds;
  return result;
}

DensityOracle refit_density(const Configuration& config, double bandwidth) {
  if (config.size() < 2) throw Error(ErrorKind::insufficient_points, "refit_density needs n >= 2");
  if (bandwidth < 0.0) throw Error(ErrorKind::invalid_input, "bandwidth must be >= 0");
  int n = config.size();
  int d = config.dim();
  std::vector<double> h(static_cast<size_t>(d));
  for (int c = 0; c < d; ++c) {
    h[static_cast<size_t>(c)] = bandwidth > 0.0 ? bandwidth : silverman_bandwidth(config.coordinate(c));
  }
  std::vector<double> pts;
  pts.reserve(static_cast<size_t>(n) * d);
  for (int i = 0; i < n; ++i) {
    auto pt = config.point(i);
    pts.insert(pts.end(), pt.begin(), pt.end());
  }

  auto kde_logpdf = [pts = std::move(pts), h, n, d](std::span<const double> x) {
    if (static_cast<int>(x.size()) != d) {
      throw Error(ErrorKind::invalid_input, "KDE point dimension mismatch");
    }
    std::vector<double> terms(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
      double lp = 0.0;
      for (int c = 0; c < d; ++c) {
        lp += normal_logpdf(x[static_cast<size_t>(c)],
                            pts[static_cast<size_t>(i) * d + c], h[static_cast<size_t>(c)]);
      }
      terms[static_cast<size_t>(i)] = lp;
    }
    return logsumexp(terms) - std::log(static_cast<double>(n));
  };

  // Peak-normalize at the sample points so gamma is ~0 near the mode.
  double max_lp = -kInf;
  for (int i = 0; i < n; ++i) max_lp = std::max(max_lp, kde_logpdf(config.point(i)));
  return DensityOracle::from_logpdf(std::move(kde_logpdf), max_lp, 0.0);
}

}  // namespace riesz_smc
