#include "sirspline/spline.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sirspline/error.hpp"

namespace sirspline {

KnotVector::KnotVector(double lo, double hi, std::vector<double> interior, int degree)
    : lo_(lo), hi_(hi), degree_(degree), interior_(std::move(interior)) {
  if (!(std::isfinite(lo) && std::isfinite(hi) && lo < hi))
    throw ArgumentError("knot domain must satisfy lo < hi");
  if (degree < 0) throw ArgumentError("spline degree must be >= 0");
  double prev = lo;
  for (double k : interior_) {
    if (!(k > prev && k < hi)) {
      std::ostringstream os;
      os << "interior knots must be strictly increasing inside (" << lo << ", " << hi
         << "); got " << k;
      throw ArgumentError(os.str());
    }
    prev = k;
  }
  tau_.reserve(interior_.size() + 2 * degree + 2);
  tau_.insert(tau_.end(), degree + 1, lo);
  tau_.insert(tau_.end(), interior_.begin(), interior_.end());
  tau_.insert(tau_.end(), degree + 1, hi);
}

std::size_t KnotVector::span(double t) const {
  if (!contains(t)) {
    std::ostringstream os;
    os << "time " << t << " outside spline domain [" << lo_ << ", " << hi_ << "]";
    throw ArgumentError(os.str());
  }
  const std::size_t last = interior_.size() + degree_;  // last non-empty interval
  if (t >= hi_) return last;
  // First tau strictly greater than t, minus one.
  const auto it = std::upper_bound(tau_.begin(), tau_.end(), t);
  return static_cast<std::size_t>(it - tau_.begin()) - 1;
}

namespace {

double recurse(const std::vector<double>& tau, double hi, std::size_t i, int d, double t) {
  if (d == 0) {
    if (tau[i] <= t && t < tau[i + 1]) return 1.0;
    // Closed final interval.
    return (t == hi && tau[i] < tau[i + 1] && tau[i + 1] == hi) ? 1.0 : 0.0;
  }
  double left = 0.0;
  const double dl = tau[i + d] - tau[i];
  if (dl > 0.0) left = (t - tau[i]) / dl * recurse(tau, hi, i, d - 1, t);
  double right = 0.0;
  const double dr = tau[i + d + 1] - tau[i + 1];
  if (dr > 0.0) right = (tau[i + d + 1] - t) / dr * recurse(tau, hi, i + 1, d - 1, t);
  return left + right;
}

}  // namespace

double basis_value(const KnotVector& knots, std::size_t index, double t) {
  if (index >= knots.num_basis()) throw ArgumentError("basis index out of range");
  if (!knots.contains(t)) {
    std::ostringstream os;
    os << "time " << t << " outside spline domain [" << knots.lo() << ", " << knots.hi() << "]";
    throw ArgumentError(os.str());
  }
  return recurse(knots.extended(), knots.hi(), index, knots.degree(), t);
}

BasisRow basis_row(const KnotVector& knots, double t) {
  const int d = knots.degree();
  const std::size_t m = knots.span(t);
  const auto& tau = knots.extended();
  BasisRow row{m - d, std::vector<double>(d + 1, 0.0)};
  auto& n = row.values;
  std::vector<double> left(d + 1), right(d + 1);
  n[0] = 1.0;
  for (int j = 1; j <= d; ++j) {
    left[j] = t - tau[m + 1 - j];
    right[j] = tau[m + j] - t;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      const double denom = right[r + 1] + left[j - r];
      const double temp = denom > 0.0 ? n[r] / denom : 0.0;
      n[r] = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    n[j] = saved;
  }
  return row;
}

std::vector<double> basis_dense(const KnotVector& knots, double t) {
  std::vector<double> out(knots.num_basis(), 0.0);
  const BasisRow row = basis_row(knots, t);
  for (std::size_t r = 0; r < row.values.size(); ++r) out[row.first + r] = row.values[r];
  return out;
}

SplineModel::SplineModel(KnotVector knots, std::vector<double> coefficients)
    : knots_(std::move(knots)), coef_(std::move(coefficients)) {
  if (coef_.size() != knots_.num_basis()) {
    std::ostringstream os;
    os << "spline needs " << knots_.num_basis() << " coefficients, got " << coef_.size();
    throw ArgumentError(os.str());
  }
}

double SplineModel::operator()(double t) const {
  const BasisRow row = basis_row(knots_, t);
  double v = 0.0;
  for (std::size_t r = 0; r < row.values.size(); ++r) v += coef_[row.first + r] * row.values[r];
  return v;
}

double SplineModel::sup_bound(double a, double b) const {
  const int d = knots_.degree();
  const std::size_t first = knots_.span(a) - d;
  const std::size_t last = knots_.span(b);
  double best = 0.0;
  for (std::size_t i = first; i <= last; ++i) best = std::max(best, coef_[i]);
  return best;
}

SplineModel SplineModel::shifted(double offset) const {
  std::vector<double> interior = knots_.interior();
  for (double& k : interior) k += offset;
  return SplineModel(KnotVector(knots_.lo() + offset, knots_.hi() + offset, std::move(interior),
                                knots_.degree()),
                     coef_);
}

double spline_value(const SplineModel& model, double t) { return model(t); }

std::vector<double> evaluate(const SplineModel& model, std::span<const double> times) {
  std::vector<double> out;
  out.reserve(times.size());
  for (double t : times) out.push_back(model(t));
  return out;
}

}  // namespace sirspline
