#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include <json.hpp>

#include "sirspline/bootstrap.hpp"
#include "sirspline/estimator.hpp"
#include "sirspline/knots.hpp"
#include "sirspline/sir.hpp"

namespace sirspline::io {

using json = nlohmann::json;

// Shortest decimal that round-trips the double.
std::string format_double(double v);

// `time,S,I,N`
void write_path_csv(std::ostream& out, const EpidemicPath& path);
EpidemicPath read_path_csv(std::istream& in);
EpidemicPath read_path_csv(const std::filesystem::path& file);

// `time,value`
void write_rate_series_csv(std::ostream& out, const RateSeries& series);
// `time,f,F`
void write_feature_curve_csv(std::ostream& out, const FeatureCurve& curve);
// `time,point,lower,upper`
void write_band_csv(std::ostream& out, const ConfidenceBand& band);
json band_metadata(const ConfidenceBand& band);

// {degree, domain:[a,b], interior_knots:[...], coefficients:[...]}
json to_json(const SplineModel& model);
SplineModel spline_from_json(const json& j);
json to_json(const FitResult& fit);

// Reads `date,cumulative_cases,active_cases` (ISO dates). S = N - cumulative,
// I = active; times are day offsets from the first row.
EpidemicPath ingest_covid_csv(std::istream& in, std::int64_t population);
EpidemicPath ingest_covid_csv(const std::filesystem::path& file, std::int64_t population);

// Days since 1970-01-01 of an ISO-8601 calendar date (YYYY-MM-DD).
long parse_iso_date(const std::string& text);

// Writes `contents` to `file` atomically enough for the CLI (temp + rename).
void write_text(const std::filesystem::path& file, const std::string& contents);

}  // namespace sirspline::io
