#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "gen.hpp"
#include "sirspline/bootstrap.hpp"
#include "sirspline/error.hpp"

using namespace sirspline;

namespace {

BootstrapEnsemble ensemble_of(std::vector<double> times, std::vector<double> estimate,
                              std::vector<std::vector<double>> curves) {
  BootstrapEnsemble e;
  e.times = std::move(times);
  e.estimate = std::move(estimate);
  e.curves = std::move(curves);
  e.requested = e.curves.size();
  return e;
}

BootstrapEnsemble random_ensemble(gen::Gen& g, std::size_t n, std::size_t b) {
  std::vector<double> t(n), est(n);
  for (std::size_t i = 0; i < n; ++i) {
    t[i] = static_cast<double>(i);
    est[i] = g.uniform(0.1, 0.5);
  }
  std::vector<std::vector<double>> curves(b, std::vector<double>(n));
  const double shift = g.uniform(-0.05, 0.05);
  for (auto& c : curves)
    for (std::size_t i = 0; i < n; ++i) c[i] = est[i] + shift + g.uniform(-0.1, 0.1);
  return ensemble_of(t, est, curves);
}

// type-7 quantile, written out for the oracle
double q7(std::vector<double> v, double p) {
  std::sort(v.begin(), v.end());
  const double h = (v.size() - 1) * p;
  const auto lo = static_cast<std::size_t>(h);
  return lo + 1 < v.size() ? v[lo] + (h - lo) * (v[lo + 1] - v[lo]) : v[lo];
}

EpidemicPath growing_template() {
  const RatePair r = RatePair::constant(0.4, 0.1);
  return simulate_tau_leap(r, {9900, 100, 10000}, uniform_grid(0.0, 30.0, 30), 3);
}

}  // namespace

TEST_CASE("bootstrap bias") {
  const std::vector<double> t{0, 1}, est{1.0, 2.0};
  CHECK(bootstrap_bias(ensemble_of(t, est, {est, est, est})) == std::vector<double>{0.0, 0.0});
  const auto b = bootstrap_bias(ensemble_of(t, est, {{1.1, 2.1}, {1.1, 2.1}}));
  CHECK(b[0] == doctest::Approx(0.1));
  CHECK(b[1] == doctest::Approx(0.1));
  const auto h = bootstrap_bias(ensemble_of({0}, {3.0}, {{1}, {2}, {4}, {4}, {5}}));
  CHECK(h[0] == doctest::Approx(16.0 / 5.0 - 3.0));
}

TEST_CASE("interval formulas on the 1..10 ensemble") {
  std::vector<std::vector<double>> curves;
  for (int v = 1; v <= 10; ++v) curves.push_back({static_cast<double>(v)});
  const BootstrapEnsemble e = ensemble_of({0.0}, {5.0}, curves);

  const ConfidenceBand pct = band(e, IntervalMethod::percentile, 0.90, false);
  CHECK(pct.lower[0] == doctest::Approx(1.45));
  CHECK(pct.upper[0] == doctest::Approx(9.55));

  const ConfidenceBand bc = band(e, IntervalMethod::percentile, 0.90, true);
  CHECK(bc.lower[0] == doctest::Approx(0.45));
  CHECK(bc.upper[0] == doctest::Approx(8.55));

  const ConfidenceBand piv = band(e, IntervalMethod::pivotal, 0.90, false);
  CHECK(piv.lower[0] == doctest::Approx(10.0 - 9.55));
  CHECK(piv.upper[0] == doctest::Approx(10.0 - 1.45));
  const ConfidenceBand piv_bc = band(e, IntervalMethod::pivotal, 0.90, true);
  CHECK(piv_bc.lower == piv.lower);
  CHECK(piv_bc.upper == piv.upper);
  CHECK(piv_bc.point[0] == doctest::Approx(4.5));

  const ConfidenceBand nrm = band(e, IntervalMethod::normal, 0.90, false);
  const double sd = std::sqrt(82.5 / 9.0);
  CHECK(nrm.lower[0] == doctest::Approx(5.0 - 1.6448536269514722 * sd).epsilon(1e-12));
  const ConfidenceBand nrm_bc = band(e, IntervalMethod::normal, 0.90, true);
  CHECK(0.5 * (nrm_bc.lower[0] + nrm_bc.upper[0]) == doctest::Approx(4.5).epsilon(1e-14));
}

TEST_CASE("degenerate ensemble under the normal method") {
  const BootstrapEnsemble e = ensemble_of({0, 1}, {0.3, 0.2}, {{0.3, 0.2}, {0.3, 0.2}, {0.3, 0.2}});
  const ConfidenceBand b = band(e, IntervalMethod::normal, 0.95, false);
  CHECK(b.lower == std::vector<double>{0.3, 0.2});
  CHECK(b.upper == std::vector<double>{0.3, 0.2});
}

TEST_CASE("interval identities on random ensembles") {
  gen::Gen g(2);
  for (int r = 0; r < 200; ++r) {
    const BootstrapEnsemble e = random_ensemble(g, static_cast<std::size_t>(g.integer(1, 30)),
                                                static_cast<std::size_t>(g.integer(2, 60)));
    const double level = g.uniform(0.5, 0.99);
    const auto bias = bootstrap_bias(e);
    const auto piv = band(e, IntervalMethod::pivotal, level, false);
    const auto pct = band(e, IntervalMethod::percentile, level, false);
    const auto pct_bc = band(e, IntervalMethod::percentile, level, true);
    const auto nrm_bc = band(e, IntervalMethod::normal, level, true);
    for (std::size_t t = 0; t < e.times.size(); ++t) {
      const double two = 2.0 * e.estimate[t];
      CHECK(std::abs(piv.lower[t] + pct.upper[t] - two) <= 4e-16 * std::abs(two) + 1e-300);
      CHECK(std::abs((pct_bc.lower[t] - pct.lower[t]) + 2.0 * bias[t]) <= 1e-15);
      CHECK(std::abs((pct_bc.upper[t] - pct.upper[t]) + 2.0 * bias[t]) <= 1e-15);
      CHECK(0.5 * (nrm_bc.lower[t] + nrm_bc.upper[t]) ==
            doctest::Approx(e.estimate[t] - bias[t]).epsilon(1e-14));
      for (const auto* b : {&piv, &pct, &pct_bc, &nrm_bc}) CHECK(b->lower[t] <= b->upper[t]);
    }
  }
}

TEST_CASE("weighted smoothing") {
  ConfidenceBand flat;
  flat.times = {0, 1, 2, 3, 4};
  flat.point = flat.lower = std::vector<double>(5, 0.1);
  flat.upper = std::vector<double>(5, 0.4);
  const auto f = smooth_weighted(flat);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(f.lower[i] == doctest::Approx(0.1).epsilon(1e-14));
    CHECK(f.upper[i] == doctest::Approx(0.4).epsilon(1e-14));
  }
  CHECK(f.smoothing == Smoothing::weighted);

  // three-point grid by hand: weights phi(0), phi(1), phi(2)
  ConfidenceBand b;
  b.times = {0, 1, 2};
  b.point = {0, 0, 0};
  b.lower = {0, 0, 0};
  b.upper = {1, 4, 2};
  const double p0 = 0.3989422804014327, p1 = 0.24197072451914337, p2 = 0.05399096651318806;
  const auto s = smooth_weighted(b);
  CHECK(s.upper[0] == doctest::Approx((p0 * 1 + p1 * 4 + p2 * 2) / (p0 + p1 + p2)).epsilon(1e-14));
  CHECK(s.upper[1] == doctest::Approx((p1 * 1 + p0 * 4 + p1 * 2) / (p1 + p0 + p1)).epsilon(1e-14));
  CHECK(s.upper[2] == doctest::Approx((p2 * 1 + p1 * 4 + p0 * 2) / (p2 + p1 + p0)).epsilon(1e-14));

  // a spike spreads to its neighbours in the ratio phi(1)/phi(0)
  ConfidenceBand spike;
  spike.times = {0, 1, 2, 3, 4, 5, 6, 7, 8};
  spike.point = spike.lower = std::vector<double>(9, 0.0);
  spike.upper = std::vector<double>(9, 0.0);
  spike.upper[4] = 1.0;
  const auto k = smooth_weighted(spike);
  CHECK(k.upper[4] < 1.0);
  double w4 = 0, w3 = 0;
  for (int j = 0; j < 9; ++j) {
    w4 += std::exp(-0.5 * (4 - j) * (4 - j));
    w3 += std::exp(-0.5 * (3 - j) * (3 - j));
  }
  CHECK((k.upper[3] * w3) / (k.upper[4] * w4) == doctest::Approx(std::exp(-0.5)).epsilon(1e-12));
}

TEST_CASE("sample smoothing pools neighbouring replicate values") {
  gen::Gen g(5);
  const BootstrapEnsemble e = random_ensemble(g, 7, 40);
  const auto bias = bootstrap_bias(e);
  const double level = 0.9;
  for (bool bc : {false, true}) {
    const auto s = smooth_sample(e, IntervalMethod::percentile, level, bc);
    for (std::size_t i = 0; i < 7; ++i) {
      const std::size_t lo = i == 0 ? 0 : i - 1, hi = std::min<std::size_t>(i + 1, 6);
      std::vector<double> pool;
      double pb = 0.0;
      for (std::size_t t = lo; t <= hi; ++t) {
        for (const auto& c : e.curves) pool.push_back(c[t]);
        pb += bias[t];
      }
      pb /= static_cast<double>(hi - lo + 1);
      CHECK(pool.size() == ((i == 0 || i == 6) ? 80u : 120u));
      const double shift = bc ? 2.0 * pb : 0.0;
      CHECK(s.lower[i] == doctest::Approx(q7(pool, 0.05) - shift).epsilon(1e-14));
      CHECK(s.upper[i] == doctest::Approx(q7(pool, 0.95) - shift).epsilon(1e-14));
    }
  }

  // constant in time: matches the unsmoothed band up to the O(1/B) effect of
  // pooling copies under the interpolating quantile rule
  std::vector<std::vector<double>> curves;
  for (int b = 0; b < 200; ++b) {
    const double v = g.uniform(0.2, 0.4);
    curves.push_back({v, v, v, v});
  }
  const BootstrapEnsemble flat = ensemble_of({0, 1, 2, 3}, {0.3, 0.3, 0.3, 0.3}, curves);
  for (auto m : {IntervalMethod::pivotal, IntervalMethod::normal, IntervalMethod::percentile}) {
    const auto a = band(flat, m, 0.95, false), s = smooth_sample(flat, m, 0.95, false);
    for (std::size_t i = 0; i < 4; ++i) {
      CHECK(std::abs(a.lower[i] - s.lower[i]) <= 0.2 / 200.0 * 2);
      CHECK(std::abs(a.upper[i] - s.upper[i]) <= 0.2 / 200.0 * 2);
    }
  }

  // a step between t1 and t2 widens the band at both
  std::vector<std::vector<double>> step;
  for (int b = 0; b < 100; ++b) {
    const double v = g.uniform(-0.01, 0.01);
    step.push_back({0.2 + v, 0.2 + v, 0.5 + v, 0.5 + v});
  }
  const BootstrapEnsemble se = ensemble_of({0, 1, 2, 3}, {0.2, 0.2, 0.5, 0.5}, step);
  const auto raw = band(se, IntervalMethod::percentile, 0.95, false);
  const auto pooled = smooth_sample(se, IntervalMethod::percentile, 0.95, false);
  CHECK(pooled.upper[1] > raw.upper[1] + 0.1);
  CHECK(pooled.lower[2] < raw.lower[2] - 0.1);
}

TEST_CASE("min-max smoothing") {
  ConfidenceBand b;
  b.times = {0, 1, 2};
  b.point = {0, 0, 0};
  b.lower = {1, 2, 3};
  b.upper = {5, 6, 7};
  const auto m = smooth_minmax(b);
  CHECK(m.lower == std::vector<double>{1, 1, 2});
  CHECK(m.upper == std::vector<double>{6, 7, 7});

  gen::Gen g(14);
  for (int r = 0; r < 500; ++r) {
    const std::size_t n = static_cast<std::size_t>(g.integer(1, 40));
    ConfidenceBand x;
    for (std::size_t i = 0; i < n; ++i) {
      x.times.push_back(i);
      const double lo = g.uniform(-1, 1);
      x.lower.push_back(lo);
      x.upper.push_back(lo + g.uniform(0, 1));
      x.point.push_back(lo);
    }
    const auto y = smooth_minmax(x);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(y.lower[i] <= x.lower[i]);
      CHECK(y.upper[i] >= x.upper[i]);
    }
    const auto c = smooth_minmax(ConfidenceBand{x.times, x.point, std::vector<double>(n, 0.1),
                                                std::vector<double>(n, 0.2)});
    CHECK(c.lower == std::vector<double>(n, 0.1));
  }
}

TEST_CASE("method names") {
  CHECK(parse_interval_method("pivotal") == IntervalMethod::pivotal);
  CHECK(parse_smoothing("minmax") == Smoothing::minmax);
  CHECK_THROWS_AS(parse_interval_method("bca"), ArgumentError);
  CHECK_THROWS_AS(parse_smoothing("loess"), ArgumentError);
  const BootstrapEnsemble one = ensemble_of({0}, {1.0}, {{1.0}});
  CHECK_THROWS_AS(band(one, IntervalMethod::percentile, 0.95, false), ArgumentError);
  CHECK_THROWS_AS(band(one, IntervalMethod::normal, 1.5, false), ArgumentError);
}

TEST_CASE("parametric bootstrap run") {
  const EpidemicPath templ = growing_template();
  const ParameterVector th{0.05, SplineModel(KnotVector(0.0, 30.0, {15.0}, 0), {0.5, 0.4})};
  LikelihoodConfig config;
  BootstrapOptions o;
  o.replicates = 12;
  o.seed = 9;
  const BootstrapEnsemble e = run_bootstrap(th, templ, config, o);
  CHECK(e.size() == 12);
  CHECK(e.attempts == 12);
  CHECK(e.discarded == 0);
  CHECK_FALSE(e.shortfall);
  // refits keep the knot at 15: each curve is constant on both sides of it
  for (const auto& c : e.curves) {
    for (std::size_t t = 1; t < c.size(); ++t)
      if (t != 15) CHECK(c[t] == c[t - 1]);
  }
  o.workers = 3;
  const BootstrapEnsemble p = run_bootstrap(th, templ, config, o);
  CHECK(p.curves == e.curves);
  o.simulator = BootstrapSimulator::exact;
  o.workers = 1;
  const BootstrapEnsemble x = run_bootstrap(th, templ, config, o);
  CHECK(x.size() == 12);
}

TEST_CASE("absorbing template start gives a shortfall") {
  EpidemicPath templ;
  templ.population = 100;
  templ.times = {0, 1, 2, 3};
  templ.states.assign(4, CountState{90, 0, 100});
  templ.horizon = 3;
  const ParameterVector th{0.1, SplineModel(KnotVector(0.0, 3.0, {}, 0), {0.3})};
  BootstrapOptions o;
  o.replicates = 5;
  const BootstrapEnsemble e = run_bootstrap(th, templ, {}, o);
  CHECK(e.shortfall);
  CHECK(e.size() == 0);
  CHECK(e.attempts == 50);
  CHECK(e.discarded == 50);
}
