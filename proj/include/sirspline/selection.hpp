#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sirspline/estimator.hpp"
#include "sirspline/knots.hpp"

namespace sirspline {

// Running state of the forward search over the number of knots. Stops once
// three consecutive candidates fail to strictly improve the best BIC; a
// failed fit counts as a non-improvement.
class BicTracker {
 public:
  explicit BicTracker(int patience = 3) : patience_(patience) {}

  void push(std::optional<double> bic);
  bool should_stop() const noexcept { return misses_ >= patience_; }
  std::optional<std::size_t> best_index() const noexcept { return best_index_; }
  std::size_t size() const noexcept { return count_; }

 private:
  int patience_;
  int misses_ = 0;
  std::size_t count_ = 0;
  std::optional<std::size_t> best_index_;
  double best_ = 0.0;
};

struct SelectionStep {
  int num_knots = 0;
  std::vector<double> knots;
  bool uniform_fallback = false;
  bool failed = false;
  std::string error;
  double loglik = 0.0;
  double bic = 0.0;
  bool converged = false;
  long evaluations = 0;
};

struct SelectionResult {
  int num_knots = 0;
  FitResult fit;
  std::vector<SelectionStep> trace;
};

struct SelectionOptions {
  int max_knots = 10;
  FitOptions fit;
};

// Spline domain used for a path: [t_1, t_M].
KnotVector basis_for(const EpidemicPath& path, std::vector<double> interior, int degree);

// Forward selection K = 0, 1, ...: place K knots on the feature curve, fit,
// score by BIC with p = K + d + 2 and M - 1 transitions.
SelectionResult forward_bic_select(const EpidemicPath& path, const RateSeries& series,
                                   const FeatureCurve& curve, int degree,
                                   const LikelihoodConfig& config,
                                   const SelectionOptions& options = {});

}  // namespace sirspline
