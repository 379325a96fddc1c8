#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "gen.hpp"
#include "sirspline/error.hpp"
#include "sirspline/spline.hpp"

using namespace sirspline;

namespace {

// Oracle: each basis function as explicit polynomial pieces, one per knot
// interval, built by multiplying out the recursion on coefficient arrays.
using Poly = std::vector<double>;  // c0 + c1 t + ...

Poly add(const Poly& a, const Poly& b) {
  Poly r(std::max(a.size(), b.size()), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) r[i] += a[i];
  for (std::size_t i = 0; i < b.size(); ++i) r[i] += b[i];
  return r;
}

// (p + q t) * a
Poly times_linear(const Poly& a, double p, double q) {
  Poly r(a.size() + 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    r[i] += p * a[i];
    r[i + 1] += q * a[i];
  }
  return r;
}

double horner(const Poly& a, double t) {
  double v = 0.0;
  for (std::size_t i = a.size(); i-- > 0;) v = v * t + a[i];
  return v;
}

struct PiecewiseBasis {
  std::vector<double> tau;
  // pieces[i][m] = polynomial of basis i on [tau_m, tau_{m+1})
  std::vector<std::vector<Poly>> pieces;

  PiecewiseBasis(std::vector<double> tau_, int d) : tau(std::move(tau_)) {
    const std::size_t intervals = tau.size() - 1;
    std::vector<std::vector<Poly>> cur(intervals, std::vector<Poly>(intervals, Poly{0.0}));
    for (std::size_t i = 0; i < intervals; ++i)
      if (tau[i + 1] > tau[i]) cur[i][i] = Poly{1.0};
    for (int p = 1; p <= d; ++p) {
      std::vector<std::vector<Poly>> next;
      for (std::size_t i = 0; i + p + 1 < tau.size(); ++i) {
        std::vector<Poly> b(intervals, Poly{0.0});
        const double d1 = tau[i + p] - tau[i];
        const double d2 = tau[i + p + 1] - tau[i + 1];
        for (std::size_t m = 0; m < intervals; ++m) {
          Poly acc{0.0};
          if (d1 > 0) acc = add(acc, times_linear(cur[i][m], -tau[i] / d1, 1.0 / d1));
          if (d2 > 0) acc = add(acc, times_linear(cur[i + 1][m], tau[i + p + 1] / d2, -1.0 / d2));
          b[m] = acc;
        }
        next.push_back(std::move(b));
      }
      cur = std::move(next);
    }
    pieces = std::move(cur);
  }

  double value(std::size_t i, double t) const {
    // last nonempty interval closed on the right
    std::size_t m = tau.size();
    for (std::size_t k = 0; k + 1 < tau.size(); ++k)
      if (tau[k] < tau[k + 1] && t >= tau[k] && t < tau[k + 1]) m = k;
    if (m == tau.size())
      for (std::size_t k = tau.size() - 1; k-- > 0;)
        if (tau[k] < tau[k + 1]) {
          m = k;
          break;
        }
    return horner(pieces[i][m], t);
  }
};

}  // namespace

TEST_CASE("degree 0 without interior knots is the indicator of the domain") {
  const KnotVector kv(0.0, 5.0, {}, 0);
  CHECK(kv.num_basis() == 1);
  for (double t : {0.0, 1.3, 4.99, 5.0}) CHECK(basis_value(kv, 0, t) == 1.0);
}

TEST_CASE("linear hat peaks at its interior knot") {
  const KnotVector kv(0.0, 2.0, {1.0}, 1);
  CHECK(basis_value(kv, 1, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(basis_value(kv, 0, 1.0) == 0.0);
  CHECK(basis_value(kv, 2, 1.0) == 0.0);
  CHECK(basis_value(kv, 1, 0.5) == doctest::Approx(0.5));
}

TEST_CASE("cubic basis matches the piecewise-polynomial oracle") {
  const KnotVector kv(0.0, 1.0, {0.25, 0.5, 0.75}, 3);
  const PiecewiseBasis oracle(kv.extended(), 3);
  REQUIRE(oracle.pieces.size() == kv.num_basis());
  for (std::size_t i = 0; i < kv.num_basis(); ++i)
    CHECK(basis_value(kv, i, 0.3) == doctest::Approx(oracle.value(i, 0.3)).epsilon(1e-13));

  gen::Gen g(11);
  for (int d = 0; d <= 3; ++d)
    for (int rep = 0; rep < 20; ++rep) {
      const KnotVector kr = g.knots(-2.0, 3.0, g.integer(0, 6), d);
      const PiecewiseBasis o(kr.extended(), d);
      for (int s = 0; s < 10; ++s) {
        const double t = s == 0 ? kr.hi() : g.uniform(kr.lo(), kr.hi());
        const BasisRow row = basis_row(kr, t);
        for (std::size_t i = 0; i < kr.num_basis(); ++i) {
          const double want = o.value(i, t);
          CHECK(basis_value(kr, i, t) == doctest::Approx(want).epsilon(1e-10).scale(1.0));
          const double local =
              (i >= row.first && i < row.first + row.values.size()) ? row.values[i - row.first] : 0.0;
          CHECK(local == doctest::Approx(want).epsilon(1e-10).scale(1.0));
        }
      }
    }
}

TEST_CASE("spline value picks the active coefficient for degree 0") {
  const SplineModel m(KnotVector(0.0, 30.0, {10.0, 20.0}, 0), {0.1, 0.3, 0.2});
  CHECK(m(15.0) == 0.3);
  CHECK(spline_value(m, 5.0) == 0.1);
  CHECK(m(10.0) == 0.3);  // half-open intervals
  CHECK(m(30.0) == 0.2);  // closed at the right end
}

TEST_CASE("equal coefficients give a constant spline") {
  gen::Gen g(3);
  for (int d = 0; d <= 3; ++d) {
    const KnotVector kv = g.knots(0.0, 70.0, 5, d);
    const SplineModel m(kv, std::vector<double>(kv.num_basis(), 0.42));
    for (int s = 0; s < 50; ++s) CHECK(m(g.uniform(0.0, 70.0)) == doctest::Approx(0.42).epsilon(1e-14));
  }
}

TEST_CASE("spline value equals the dense full sum") {
  gen::Gen g(5);
  const KnotVector kv = g.knots(0.0, 70.0, 6, 3);
  const SplineModel m = g.spline(kv, 0.0, 1.0);
  for (int s = 0; s < 100; ++s) {
    const double t = g.uniform(0.0, 70.0);
    double naive = 0.0;
    for (std::size_t i = 0; i < kv.num_basis(); ++i) naive += m.coefficients()[i] * basis_value(kv, i, t);
    CHECK(m(t) == doctest::Approx(naive).epsilon(1e-12));
  }
}

TEST_CASE("basis properties over random knot sets") {
  gen::Gen g(2024);
  for (int d = 0; d <= 3; ++d)
    for (int k = 0; k <= 10; ++k)
      for (int rep = 0; rep < 5; ++rep) {
        const KnotVector kv = g.knots(0.0, 1.0, k, d);
        REQUIRE(kv.num_basis() == static_cast<std::size_t>(k + d + 1));
        const auto& tau = kv.extended();
        for (int s = 0; s < 25; ++s) {
          const double t = s == 0 ? 0.0 : s == 1 ? 1.0 : g.uniform(0.0, 1.0);
          const auto row = basis_dense(kv, t);
          double sum = 0.0;
          for (std::size_t i = 0; i < row.size(); ++i) {
            CHECK(row[i] >= 0.0);
            sum += row[i];
            const bool inside = t >= tau[i] && t <= tau[i + d + 1];
            if (!inside) CHECK(row[i] == 0.0);
          }
          CHECK(std::abs(sum - 1.0) <= 1e-12);
        }
      }
}

TEST_CASE("Greville abscissae reproduce the identity for d >= 1") {
  gen::Gen g(77);
  for (int d = 1; d <= 3; ++d) {
    const KnotVector kv = g.knots(0.0, 10.0, 4, d);
    const auto& tau = kv.extended();
    std::vector<double> c(kv.num_basis());
    for (std::size_t i = 0; i < c.size(); ++i) {
      double s = 0.0;
      for (int r = 1; r <= d; ++r) s += tau[i + r];
      c[i] = s / d;
    }
    const SplineModel m(kv, c);
    for (int s = 0; s < 30; ++s) {
      const double t = g.uniform(0.0, 10.0);
      CHECK(m(t) == doctest::Approx(t).epsilon(1e-12));
    }
  }
}

TEST_CASE("argument errors") {
  const KnotVector kv(0.0, 1.0, {0.5}, 2);
  CHECK_THROWS_AS(basis_value(kv, 4, 0.5), ArgumentError);
  CHECK_THROWS_AS(basis_value(kv, 0, 1.5), ArgumentError);
  CHECK_THROWS_AS(basis_value(kv, 0, -0.1), ArgumentError);
  CHECK_THROWS_AS(KnotVector(0.0, 1.0, {0.6, 0.4}, 1), ArgumentError);
  CHECK_THROWS_AS(KnotVector(0.0, 1.0, {1.0}, 1), ArgumentError);
  CHECK_THROWS_AS(KnotVector(1.0, 1.0, {}, 0), ArgumentError);
  CHECK_THROWS_AS(SplineModel(kv, {1.0, 2.0}), ArgumentError);
  CHECK_THROWS_AS(SplineModel(kv, {1.0, 2.0, 3.0})(2.0), ArgumentError);
}

TEST_CASE("shifted model and sup bound") {
  gen::Gen g(9);
  const KnotVector kv = g.knots(3.0, 13.0, 3, 3);
  const SplineModel m = g.spline(kv, 0.0, 2.0);
  const SplineModel s = m.shifted(-3.0);
  for (int i = 0; i < 20; ++i) {
    const double t = g.uniform(3.0, 13.0);
    CHECK(s(t - 3.0) == doctest::Approx(m(t)).epsilon(1e-12));
    const double a = g.uniform(3.0, 12.0);
    const double b = g.uniform(a, 13.0);
    const double bound = m.sup_bound(a, b);
    for (int j = 0; j <= 20; ++j) CHECK(m(a + (b - a) * j / 20.0) <= bound + 1e-12);
  }
}
