#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sirspline/bootstrap.hpp"
#include "sirspline/metrics.hpp"
#include "sirspline/pipeline.hpp"

namespace sirspline::cli {

// Settings of the simulation-study protocol: per scenario, R replicates of
// exact simulation -> fit for each (degree, family) -> IMSE, optionally a
// parametric bootstrap per replicate for coverage.
struct StudySettings {
  std::int64_t population = 10000;
  double infected_fraction = 0.01;
  int days = 70;  // observations at t = 0, 1, ..., days
  double gamma = 0.1;
  int window = 4;
  int max_knots = 10;
  std::vector<int> degrees{0, 3};
  std::vector<LikelihoodFamily> families{LikelihoodFamily::tau_leap, LikelihoodFamily::diffusion};
  std::size_t bootstrap_replicates = 0;  // 0 disables coverage
  LikelihoodFamily bootstrap_family = LikelihoodFamily::tau_leap;
  double level = 0.95;
  int max_redraws = 50;
  FitOptions fit;
};

struct FitRecord {
  int degree = 0;
  LikelihoodFamily family = LikelihoodFamily::tau_leap;
  bool ok = false;
  std::string error;
  int num_knots = 0;
  double bic = 0.0;
  double imse = 0.0;
  std::vector<double> beta_hat;  // on the observation grid
  std::optional<FitResult> fit;
};

struct BandRecord {
  int degree = 0;
  IntervalMethod method = IntervalMethod::percentile;
  bool bias_corrected = false;
  Smoothing smoothing = Smoothing::none;
  std::vector<double> lower, upper;
};

struct ReplicateResult {
  int scenario = 1;
  std::size_t replicate = 0;
  int redraws = 0;
  bool simulated = false;
  std::string error;
  EpidemicPath data;
  std::vector<FitRecord> fits;
  std::vector<BandRecord> bands;
  std::vector<std::string> bootstrap_errors;
};

// Observed data for one replicate: exact simulation sampled daily, redrawn
// (next attempt key) while the epidemic dies out before the last observation.
EpidemicPath simulate_study_data(const TruthFunction& truth, const StudySettings& settings,
                                 std::uint64_t seed, int& redraws);

ReplicateResult run_replicate(int scenario, std::size_t replicate, std::uint64_t master_seed,
                              const StudySettings& settings);

}  // namespace sirspline::cli
