// Copyright 2026 The riesz-smc authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <vector>

#include "doctest.h"
#include "riesz_smc/energy.hpp"

using namespace riesz_smc;

namespace {

DensityOracle constant_gamma(double g) {
  // gamma = -(logpdf) with offset 0, so a constant logpdf of -g yields gamma = g.
  return DensityOracle::from_logpdf([g](std::span<const double>) { return -g; });
}

// Proper (normalized) standard normal log density, handed in explicitly where
// a test wants gamma = -ln N(x; 0, 1).
DensityOracle proper_normal1d() {
  return DensityOracle::from_logpdf([](std::span<const double> x) {
    return -0.5 * kLogTwoPi - 0.5 * x[0] * x[0];
  });
}

// Makes the weight essentially 1: a huge beta drives the base to ~1e30, so
// exp(base^(-m/2d)) = 1 + O(1e-15).
EnergyParams unit_weight_params(double m, int d) {
  EnergyParams p;
  p.m = m;
  p.d = d;
  p.alpha = 0.0;
  p.beta = 1e30;
  return p;
}

// Independent long-double re-summation of the pair kernel in log space.
long double oracle_log_kernel(std::span<const double> xi, std::span<const double> xj,
                              const DensityOracle& f, const EnergyParams& p) {
  long double s = 0.0L;
  for (size_t c = 0; c < xi.size(); ++c) {
    long double d = static_cast<long double>(xi[c]) - xj[c];
    s += d * d;
  }
  long double r = sqrtl(s);
  long double b = static_cast<long double>(p.alpha) * f.gamma(xi) * f.gamma(xj) +
                  static_cast<long double>(p.beta) * r;
  if (b < p.base_floor) b = p.base_floor;
  return powl(b, static_cast<long double>(-p.m / (2.0 * p.d))) -
         static_cast<long double>(p.m) * logl(r);
}

long double oracle_logsumexp(std::vector<long double> v) {
  long double mx = v.front();
  for (long double x : v) mx = std::max(mx, x);
  long double s = 0.0L;
  for (long double x : v) s += expl(x - mx);
  return mx + logl(s);
}

Configuration equispaced(int n, double lo = 0.0, double hi = 1.0) {
  std::vector<Point> pts;
  for (int i = 0; i < n; ++i) pts.push_back({lo + (hi - lo) * i / (n - 1)});
  return Configuration::from_points(pts);
}

Configuration random_config(int n, int dim, Rng& rng) {
  std::vector<Point> pts;
  for (int i = 0; i < n; ++i) {
    Point p(static_cast<size_t>(dim));
    for (int c = 0; c < dim; ++c) p[static_cast<size_t>(c)] = rng.uniform01();
    pts.push_back(p);
  }
  return Configuration::from_points(pts);
}

}  // namespace

TEST_CASE("pair_weight: uniform density, base reduces to beta*r") {
  // gamma == 0, alpha=-1, beta=1, r=1, m=2, d=1 -> b = 1, w = e.
  EnergyParams p;
  p.m = 2.0;
  p.d = 1;
  DensityOracle f = DensityOracle::uniform();
  Point a{0.0}, b{1.0};
  CHECK(pair_weight(a, b, f, p) == doctest::Approx(std::exp(1.0)).epsilon(1e-14));
}

TEST_CASE("pair_weight: clamped branch hits the floor exactly") {
  // gamma_i = gamma_j = 2, alpha=-1, beta=1, r=0.5 -> b = max(-3.5, 1e-8).
  EnergyParams p;  // m=40 d=1
  DensityOracle f = constant_gamma(2.0);
  Point a{0.0}, b{0.5};
  double lw = log_pair_weight(a, b, f, p);
  long double expected = powl(1e-8L, -20.0L);
  CHECK(lw == doctest::Approx(static_cast<double>(expected)).epsilon(1e-12));
  CHECK(std::isinf(pair_weight(a, b, f, p)));  // exp(1e160) overflows by design
}

TEST_CASE("pair_weight: standard normal gammas at 0 and 1 (reference evaluation)") {
  EnergyParams p;  // m=40, d=1, alpha=-1, beta=1
  DensityOracle f = proper_normal1d();
  Point a{0.0}, b{1.0};
  // gamma(0) = ln sqrt(2 pi) = 0.9189..., gamma(1) = 1.4189...; the base
  // -gamma(0) gamma(1) + 1 is negative, so the weight clamps at the floor.
  double g0 = 0.5 * kLogTwoPi;
  double g1 = 0.5 * kLogTwoPi + 0.5;
  CHECK(f.gamma(a) == doctest::Approx(g0).epsilon(1e-15));
  CHECK(f.gamma(b) == doctest::Approx(g1).epsilon(1e-15));
  CHECK(-g0 * g1 + 1.0 < 0.0);
  long double expected = powl(1e-8L, -20.0L);
  CHECK(log_pair_weight(a, b, f, p) ==
        doctest::Approx(static_cast<double>(expected)).epsilon(1e-12));
}

TEST_CASE("pair_kernel: forced unit weight gives 1/r^m") {
  EnergyParams p = unit_weight_params(1.0, 1);
  DensityOracle f = DensityOracle::uniform();
  Point a{0.0}, b{2.0};
  CHECK(pair_kernel(a, b, f, p) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("pair_kernel: symmetric in its arguments (100 random pairs)") {
  EnergyParams p;
  p.d = 3;
  p.m = 7.5;
  DensityOracle f = DensityOracle::gaussian({0.1, -0.2, 0.4}, 0.8);
  Rng rng(2024);
  for (int k = 0; k < 100; ++k) {
    Point a{rng.uniform01(), rng.uniform01(), rng.uniform01()};
    Point b{rng.uniform01(), rng.uniform01(), rng.uniform01()};
    CHECK(log_pair_kernel(a, b, f, p) == log_pair_kernel(b, a, f, p));
  }
}

TEST_CASE("pair_kernel: coincident points raise singular-kernel") {
  EnergyParams p;
  Point a{0.25};
  CHECK_THROWS_AS(pair_kernel(a, a, DensityOracle::uniform(), p), Error);
  try {
    pair_kernel(a, a, DensityOracle::uniform(), p);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::singular_kernel);
  }
}

TEST_CASE("pair ops: non-finite coordinates raise invalid-input") {
  EnergyParams p;
  Point a{kNaN}, b{1.0};
  CHECK_THROWS_AS(pair_weight(a, b, DensityOracle::uniform(), p), Error);
}

TEST_CASE("total_energy: two points equal kernel^(1/m)") {
  EnergyParams p = unit_weight_params(1.0, 1);
  DensityOracle f = DensityOracle::uniform();
  Configuration c = Configuration::from_points({{0.0}, {2.0}});
  CHECK(total_energy(c, f, p) == doctest::Approx(0.5).epsilon(1e-12));
  // m = 2: (1/4)^(1/2) = 1/2
  EnergyParams p2 = unit_weight_params(2.0, 1);
  CHECK(total_energy(c, f, p2) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("total_energy: bit-identical under permutation") {
  EnergyParams p;  // m=40
  DensityOracle f = DensityOracle::uniform();
  Rng rng(7);
  std::vector<Point> pts;
  for (int i = 0; i < 12; ++i) pts.push_back({rng.uniform01()});
  Configuration a = Configuration::from_points(pts);
  std::vector<Point> shuffled = pts;
  for (size_t i = shuffled.size(); i > 1; --i) {
    std::swap(shuffled[i - 1], shuffled[static_cast<size_t>(rng.next_u64() % i)]);
  }
  Configuration b = Configuration::from_points(shuffled);
  CHECK(log_total_energy(a, f, p) == log_total_energy(b, f, p));
}

TEST_CASE("total_energy: matches brute-force oracle, m=40 log scale") {
  EnergyParams p;  // m=40 d=1
  DensityOracle f = DensityOracle::uniform();
  Configuration c = equispaced(10);
  std::vector<long double> terms;
  for (int i = 0; i < c.size(); ++i) {
    for (int j = i + 1; j < c.size(); ++j) {
      terms.push_back(oracle_log_kernel(c.point(i), c.point(j), f, p));
    }
  }
  long double expected = oracle_logsumexp(terms) / p.m;
  CHECK(log_total_energy(c, f, p) ==
        doctest::Approx(static_cast<double>(expected)).epsilon(1e-10));
}

TEST_CASE("total_energy: insufficient points") {
  Configuration c = Configuration::from_points({{0.5}});
  CHECK_THROWS_AS(total_energy(c, DensityOracle::uniform(), EnergyParams{}), Error);
}

TEST_CASE("pair kernel sum over 5-point set matches oracle (linear, small m)") {
  EnergyParams p = unit_weight_params(3.0, 1);
  p.alpha = -1.0;
  p.beta = 2.5;  // moderate base, no clamp, exact linear comparison possible
  DensityOracle f = constant_gamma(0.3);
  Configuration c = equispaced(5);
  double direct = 0.0;
  for (int i = 0; i < 5; ++i) {
    for (int j = i + 1; j < 5; ++j) {
      long double r = fabsl(static_cast<long double>(c.coord(i, 0)) - c.coord(j, 0));
      long double b = -0.3L * 0.3L + 2.5L * r;
      if (b < p.base_floor) b = p.base_floor;
      direct += static_cast<double>(expl(powl(b, -1.5L)) / powl(r, 3.0L));
    }
  }
  double sum = 0.0;
  for (int i = 0; i < 5; ++i) {
    for (int j = i + 1; j < 5; ++j) sum += pair_kernel(c.point(i), c.point(j), f, p);
  }
  CHECK(sum == doctest::Approx(direct).epsilon(1e-10));
  CHECK(total_energy(c, f, p) == doctest::Approx(std::pow(direct, 1.0 / 3.0)).epsilon(1e-10));
}

TEST_CASE("potential_at: single source with unit weight is r^-m") {
  EnergyParams p = unit_weight_params(4.0, 1);
  Configuration c = Configuration::from_points({{0.0}});
  Point y{0.5};
  CHECK(potential_at(y, c, DensityOracle::uniform(), p) ==
        doctest::Approx(std::pow(0.5, -4.0)).epsilon(1e-12));
}

TEST_CASE("potential_at: singular at configuration points") {
  EnergyParams p;
  Configuration c = Configuration::from_points({{0.0}, {1.0}});
  Point y{1.0};
  CHECK_THROWS_AS(potential_at(y, c, DensityOracle::uniform(), p), Error);
}

TEST_CASE("potential_at: midpoint beats a point twice as far (d=2)") {
  EnergyParams p;
  p.m = 40.0;
  p.d = 2;
  DensityOracle f = DensityOracle::uniform();
  double r = 0.3;
  Configuration c = Configuration::from_points({{-r, 0.0}, {r, 0.0}});
  Point mid{0.0, 0.0};                       // distance r from both
  Point far{0.0, std::sqrt(3.0) * r};        // distance 2r from both
  CHECK(log_potential_at(mid, c, f, p) > log_potential_at(far, c, f, p));
}

TEST_CASE("potential_at: monotone decay from a single source (constant gamma)") {
  EnergyParams p;  // m=40 d=1, alpha=-1
  DensityOracle f = constant_gamma(0.7);
  Configuration c = Configuration::from_points({{0.0}});
  Rng rng(11);
  for (int k = 0; k < 200; ++k) {
    double r1 = rng.uniform(1e-3, 2.0);
    double r2 = r1 + rng.uniform(1e-6, 1.0);
    Point y1{r1}, y2{r2};
    CHECK(log_potential_at(y1, c, f, p) > log_potential_at(y2, c, f, p));
  }
}

TEST_CASE("potential_at: grid argmin matches exhaustive oracle") {
  EnergyParams p;  // m=40
  DensityOracle f = DensityOracle::uniform();
  Configuration c = equispaced(5);
  int best_impl = -1, best_oracle = -1;
  double best_impl_v = kInf;
  long double best_oracle_v = 1e4000L;
  int picked = 0;
  for (int g = 0; g < 101; ++g) {
    double x = g / 100.0;
    bool coincident = false;
    for (int i = 0; i < c.size(); ++i) {
      if (c.coord(i, 0) == x) coincident = true;
    }
    if (coincident) continue;
    ++picked;
    Point y{x};
    double v = log_potential_at(y, c, f, p);
    if (v < best_impl_v) {
      best_impl_v = v;
      best_impl = g;
    }
    std::vector<long double> terms;
    for (int i = 0; i < c.size(); ++i) terms.push_back(oracle_log_kernel(c.point(i), y, f, p));
    long double ov = oracle_logsumexp(terms);
    if (ov < best_oracle_v) {
      best_oracle_v = ov;
      best_oracle = g;
    }
  }
  CHECK(picked > 90);
  CHECK(best_impl == best_oracle);
}

TEST_CASE("min_separation basics and brute force") {
  Configuration c = Configuration::from_points({{0.0}, {0.5}, {1.0}});
  CHECK(min_separation(c) == doctest::Approx(0.5));
  Configuration e = equispaced(11);
  CHECK(min_separation(e) == doctest::Approx(0.1).epsilon(1e-12));

  Rng rng(5);
  Configuration r = random_config(50, 2, rng);
  double expected = kInf;
  for (int i = 0; i < r.size(); ++i) {
    for (int j = i + 1; j < r.size(); ++j) {
      expected = std::min(expected, euclidean_distance(r.point(i), r.point(j)));
    }
  }
  CHECK(min_separation(r) == doctest::Approx(expected).epsilon(1e-12));

  Configuration single = Configuration::from_points({{0.0}});
  CHECK_THROWS_AS(min_separation(single), Error);
}

TEST_CASE("covering_radius: trivial geometries") {
  Configuration c = Configuration::from_points({{0.0}, {1.0}});
  std::vector<Point> mesh = linspace_mesh(0.0, 1.0, 1001);
  CHECK(covering_radius(c, mesh) == doctest::Approx(0.5).epsilon(1e-9));

  // config == mesh -> 0
  std::vector<Point> small_mesh = {{0.0}, {1.0}};
  CHECK(covering_radius(c, small_mesh) == 0.0);

  // equispaced n points: 1/(2(n-1)) within one mesh spacing
  Configuration e = equispaced(21);
  double rho = covering_radius(e, mesh);
  CHECK(rho == doctest::Approx(1.0 / 40.0).epsilon(0.05));

  CHECK_THROWS_AS(covering_radius(c, std::vector<Point>{}), Error);
}

TEST_CASE("uniformity_statistic: two points and i.i.d. uniform sample") {
  Configuration two = Configuration::from_points({{0.0}, {1.0}});
  UniformityStat s = uniformity_statistic(two);
  CHECK(s.mean_pairwise == doctest::Approx(1.0));
  CHECK(s.raw == doctest::Approx(1.0));  // (1/2) * (1 + 1)

  Rng rng(99);
  Configuration sample = random_config(10000, 1, rng);
  UniformityStat u = uniformity_statistic(sample);
  CHECK(u.mean_pairwise == doctest::Approx(1.0 / 3.0).epsilon(0.03));

  Configuration e = equispaced(2000);
  UniformityStat ue = uniformity_statistic(e);
  CHECK(std::abs(ue.mean_pairwise - 1.0 / 3.0) < 0.002);
}

TEST_CASE("ks_uniformity_test: midpoint quantiles pass, point mass fails") {
  auto uniform_cdf = [](double x) { return std::min(1.0, std::max(0.0, x)); };
  std::vector<Point> pts;
  int n = 50;
  for (int i = 0; i < n; ++i) pts.push_back({(i + 0.5) / n});
  Configuration c = Configuration::from_points(pts);
  KsResult good = ks_uniformity_test(c, uniform_cdf);
  CHECK(good.statistic <= 0.5 / n + 1e-12);
  CHECK(good.pass);

  std::vector<double> clump(100);
  for (int i = 0; i < 100; ++i) clump[static_cast<size_t>(i)] = 0.5 + 1e-9 * i;
  KsResult bad = ks_test_values(clump, uniform_cdf);
  CHECK(bad.statistic > 0.9);
  CHECK(!bad.pass);
}

TEST_CASE("ks_uniformity_test: d > 1 unsupported") {
  Configuration c = Configuration::from_points({{0.0, 0.0}, {1.0, 1.0}});
  CHECK_THROWS_AS(ks_uniformity_test(c, [](double x) { return x; }), Error);
}

TEST_CASE("energy lower bound holds on arbitrary configurations") {
  EnergyParams p;  // m=40
  DensityOracle f = DensityOracle::uniform();
  Rng rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    Configuration c = random_config(20, 1, rng);
    EnergyBound b = energy_lower_bound(c, f, p);
    CHECK(b.holds);
  }
}

TEST_CASE("brute-force equivalence on n = 100 (log scale, m = 40)") {
  EnergyParams p;
  DensityOracle f = DensityOracle::gaussian1d(0.5, 0.3);
  Rng rng(123);
  Configuration c = random_config(100, 1, rng);

  std::vector<long double> terms;
  for (int i = 0; i < c.size(); ++i) {
    for (int j = i + 1; j < c.size(); ++j) {
      terms.push_back(oracle_log_kernel(c.point(i), c.point(j), f, p));
    }
  }
  long double expected_energy = oracle_logsumexp(terms) / p.m;
  CHECK(log_total_energy(c, f, p) ==
        doctest::Approx(static_cast<double>(expected_energy)).epsilon(1e-10));

  Point y{0.333};
  std::vector<long double> pot;
  for (int i = 0; i < c.size(); ++i) pot.push_back(oracle_log_kernel(c.point(i), y, f, p));
  CHECK(log_potential_at(y, c, f, p) ==
        doctest::Approx(static_cast<double>(oracle_logsumexp(pot))).epsilon(1e-10));
}

TEST_CASE("EnergyParams validation") {
  EnergyParams p;
  p.m = 0.5;  // m <= d
  CHECK_THROWS_AS(p.validate(), Error);
  p = EnergyParams{};
  p.beta = 0.0;
  CHECK_THROWS_AS(p.validate(), Error);
  p = EnergyParams{};
  p.base_floor = 0.0;
  CHECK_THROWS_AS(p.validate(), Error);
}

TEST_CASE("Configuration rejects duplicates and tracks distances") {
  CHECK_THROWS_AS(Configuration::from_points({{0.3}, {0.3}}), Error);
  Configuration c = Configuration::from_points({{0.0}, {3.0}, {4.0}});
  CHECK(c.distance(0, 2) == doctest::Approx(4.0));
  CHECK(c.distance(2, 1) == doctest::Approx(1.0));
  Configuration d = c.extended(Point{10.0});
  CHECK(d.size() == 4);
  CHECK(d.distance(3, 0) == doctest::Approx(10.0));
  // distances stay consistent with direct recomputation
  for (int i = 0; i < d.size(); ++i) {
    for (int j = 0; j < d.size(); ++j) {
      double direct = euclidean_distance(d.point(i), d.point(j));
      CHECK(d.distance(i, j) == doctest::Approx(direct).epsilon(1e-12));
    }
  }
}
