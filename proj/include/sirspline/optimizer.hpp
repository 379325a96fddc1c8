#pragma once

#include <functional>
#include <vector>

namespace sirspline {

struct SimplexOptions {
  double ftol_rel = 1e-8;  // relative spread of simplex values
  double xtol = 1e-6;      // max coordinate distance to the best vertex
  long max_evaluations = 2000;
  double initial_step = 0.25;
};

struct SimplexResult {
  std::vector<double> x;
  double value = 0.0;
  long evaluations = 0;
  bool converged = false;
};

// Derivative-free Nelder-Mead minimization with dimension-adaptive
// coefficients. Non-finite objective values are treated as +inf.
SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& objective,
                          std::vector<double> start, const SimplexOptions& options);

}  // namespace sirspline
