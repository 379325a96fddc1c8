#include "sirspline/pipeline.hpp"

namespace sirspline {

PipelineResult run_pipeline(const EpidemicPath& path, const PipelineOptions& options) {
  path.validate();
  PipelineResult out;
  out.series = moving_average_rates(path, options.window);
  out.curve = feature_curve_from_series(out.series, options.degree);
  out.selection = forward_bic_select(path, out.series, out.curve, options.degree,
                                     options.likelihood, options.selection);
  return out;
}

FitResult fit_with_knots(const EpidemicPath& path, std::vector<double> interior,
                         const PipelineOptions& options) {
  path.validate();
  const RateSeries series = moving_average_rates(path, options.window);
  const KnotVector basis = basis_for(path, std::move(interior), options.degree);
  return fit_mle(path, basis, options.likelihood, initial_theta(series, basis, path),
                 options.selection.fit);
}

}  // namespace sirspline
