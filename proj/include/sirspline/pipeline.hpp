#pragma once

#include "sirspline/selection.hpp"

namespace sirspline {

struct PipelineOptions {
  int degree = 0;
  int window = 4;
  LikelihoodConfig likelihood;
  SelectionOptions selection;
};

struct PipelineResult {
  RateSeries series;
  FeatureCurve curve;
  SelectionResult selection;

  const FitResult& fit() const noexcept { return selection.fit; }
};

// Moving-average rates -> feature curve -> forward BIC selection of the
// number of knots -> fitted parameters.
PipelineResult run_pipeline(const EpidemicPath& path, const PipelineOptions& options);

// Fit on a fixed set of interior knots (no selection).
FitResult fit_with_knots(const EpidemicPath& path, std::vector<double> interior,
                         const PipelineOptions& options);

}  // namespace sirspline
