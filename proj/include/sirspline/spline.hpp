#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace sirspline {

// Clamped knot vector for a degree-d B-spline basis on [lo, hi] with k
// strictly interior knots. The extended vector repeats each boundary d+1
// times, so there are k+d+1 basis functions.
//
// Basis functions are indexed from 0 here; basis i is supported on
// [tau_i, tau_{i+d+1}).
class KnotVector {
 public:
  KnotVector() : KnotVector(0.0, 1.0, {}, 0) {}
  KnotVector(double lo, double hi, std::vector<double> interior, int degree);

  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }
  int degree() const noexcept { return degree_; }
  const std::vector<double>& interior() const noexcept { return interior_; }
  const std::vector<double>& extended() const noexcept { return tau_; }
  std::size_t num_basis() const noexcept { return interior_.size() + degree_ + 1; }
  bool contains(double t) const noexcept { return t >= lo_ && t <= hi_; }

  // Index m of the non-empty interval [tau_m, tau_{m+1}) holding t. The last
  // non-empty interval is treated as closed so t == hi is valid.
  std::size_t span(double t) const;

 private:
  double lo_;
  double hi_;
  int degree_;
  std::vector<double> interior_;
  std::vector<double> tau_;
};

// The d+1 basis functions that may be nonzero at t.
struct BasisRow {
  std::size_t first;           // index of values[0]
  std::vector<double> values;  // size degree+1
};

// Value of basis function `index` at t by the Cox-de Boor recursion, with 0/0
// terms taken as 0.
double basis_value(const KnotVector& knots, std::size_t index, double t);

// Nonzero basis values at t, computed by the triangular (local) scheme.
BasisRow basis_row(const KnotVector& knots, double t);

// Dense row of all k+d+1 basis values at t.
std::vector<double> basis_dense(const KnotVector& knots, double t);

class SplineModel {
 public:
  SplineModel() : SplineModel(KnotVector(), {0.0}) {}
  SplineModel(KnotVector knots, std::vector<double> coefficients);

  const KnotVector& knots() const noexcept { return knots_; }
  const std::vector<double>& coefficients() const noexcept { return coef_; }
  std::vector<double>& mutable_coefficients() noexcept { return coef_; }
  int degree() const noexcept { return knots_.degree(); }

  double operator()(double t) const;

  // Upper bound of the spline on [a, b]: the largest coefficient among the
  // basis functions active there. Exact for nonnegative coefficients.
  double sup_bound(double a, double b) const;

  // Copy with the same coefficients on a domain shifted by `offset`.
  SplineModel shifted(double offset) const;

 private:
  KnotVector knots_;
  std::vector<double> coef_;
};

double spline_value(const SplineModel& model, double t);

std::vector<double> evaluate(const SplineModel& model, std::span<const double> times);

}  // namespace sirspline
