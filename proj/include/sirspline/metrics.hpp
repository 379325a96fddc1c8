#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "sirspline/bootstrap.hpp"
#include "sirspline/likelihood.hpp"
#include "sirspline/sir.hpp"

namespace sirspline {

// A reference infection-rate curve with a bound oracle for exact simulation.
class TruthFunction {
 public:
  enum class Interpolation { step, linear };

  TruthFunction(std::string name, std::function<double(double)> value,
                std::function<double(double, double)> sup);

  // Tabulated (time, beta) pairs; step = right-continuous piecewise constant.
  static TruthFunction tabulated(std::string name, std::vector<double> times,
                                 std::vector<double> values, Interpolation rule);
  static TruthFunction constant(double beta);

  // Built-in simulation scenarios 1..5 on [0, 70]. Scenario 1 is the
  // constant rate 0.3; 2..5 are stand-in shapes (increasing, decreasing,
  // up-then-down step functions and a smooth logistic increase).
  static TruthFunction scenario(int id);

  const std::string& name() const noexcept { return name_; }
  double operator()(double t) const { return value_(t); }
  double sup(double a, double b) const { return sup_(a, b); }
  std::vector<double> on(std::span<const double> grid) const;
  RatePair rates(double gamma) const;

 private:
  std::string name_;
  std::function<double(double)> value_;
  std::function<double(double, double)> sup_;
};

// Trapezoid approximation of the integral of (estimate - truth)^2 over the grid.
double imse(std::span<const double> estimate, const TruthFunction& truth,
            std::span<const double> grid);

// Fraction of bands with lower <= beta(t) <= upper at each time.
std::vector<double> coverage(std::span<const ConfidenceBand> bands, const TruthFunction& truth);

// beta(t) / gamma on the grid.
std::vector<double> r0_curve(const ParameterVector& theta, std::span<const double> grid);

}  // namespace sirspline
