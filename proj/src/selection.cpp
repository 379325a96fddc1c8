#include "sirspline/selection.hpp"

#include "sirspline/error.hpp"

namespace sirspline {

void BicTracker::push(std::optional<double> bic) {
  const std::size_t index = count_++;
  if (bic && (!best_index_ || *bic < best_)) {
    best_ = *bic;
    best_index_ = index;
    misses_ = 0;
  } else {
    ++misses_;
  }
}

KnotVector basis_for(const EpidemicPath& path, std::vector<double> interior, int degree) {
  if (path.size() < 2) throw ArgumentError("path needs at least 2 observations");
  return KnotVector(path.times.front(), path.times.back(), std::move(interior), degree);
}

SelectionResult forward_bic_select(const EpidemicPath& path, const RateSeries& series,
                                   const FeatureCurve& curve, int degree,
                                   const LikelihoodConfig& config,
                                   const SelectionOptions& options) {
  if (options.max_knots < 0) throw ArgumentError("max_knots must be >= 0");
  SelectionResult out;
  BicTracker tracker;
  std::vector<std::optional<FitResult>> fits;
  for (int k = 0; k <= options.max_knots && !tracker.should_stop(); ++k) {
    SelectionStep step;
    step.num_knots = k;
    std::optional<FitResult> fit;
    try {
      const KnotPlacement placement = place_knots(curve, k);
      step.knots = placement.knots;
      step.uniform_fallback = placement.uniform_fallback;
      const KnotVector basis = basis_for(path, placement.knots, degree);
      fit = fit_mle(path, basis, config, initial_theta(series, basis, path), options.fit);
      step.loglik = fit->loglik;
      step.bic = fit->bic;
      step.converged = fit->converged;
      step.evaluations = fit->evaluations;
    } catch (const DataValidityError&) {
      throw;
    } catch (const Error& e) {
      step.failed = true;
      step.error = e.what();
      fit.reset();
    }
    tracker.push(fit ? std::optional<double>(fit->bic) : std::nullopt);
    fits.push_back(std::move(fit));
    out.trace.push_back(std::move(step));
  }
  const auto best = tracker.best_index();
  if (!best) throw SelectionError("every candidate number of knots failed to fit");
  out.num_knots = out.trace[*best].num_knots;
  out.fit = std::move(*fits[*best]);
  return out;
}

}  // namespace sirspline
