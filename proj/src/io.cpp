#include "sirspline/io.hpp"

#include <charconv>
#include <chrono>
#include <fstream>
#include <sstream>
#include <vector>

#include "sirspline/error.hpp"

namespace sirspline::io {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
    cells.push_back(cell);
  }
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

template <typename T>
bool parse_number(const std::string& s, T& out) {
  if (s.empty()) return false;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

std::ifstream open_input(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ArgumentError("cannot open " + file.string());
  return in;
}

}  // namespace

void write_path_csv(std::ostream& out, const EpidemicPath& path) {
  out << "time,S,I,N\n";
  for (std::size_t k = 0; k < path.size(); ++k)
    out << format_double(path.times[k]) << ',' << path.states[k].s << ',' << path.states[k].i
        << ',' << path.states[k].n << '\n';
}

EpidemicPath read_path_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DataValidityError("path CSV is empty");
  const auto header = split_csv_line(line);
  if (header != std::vector<std::string>{"time", "S", "I", "N"})
    throw DataValidityError("path CSV header must be time,S,I,N");
  EpidemicPath path;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv_line(line);
    CountState x;
    double t = 0.0;
    if (cells.size() != 4 || !parse_number(cells[0], t) || !parse_number(cells[1], x.s) ||
        !parse_number(cells[2], x.i) || !parse_number(cells[3], x.n))
      throw DataValidityError("malformed path CSV line " + std::to_string(row), row);
    if (path.states.empty()) path.population = x.n;
    path.times.push_back(t);
    path.states.push_back(x);
  }
  path.horizon = path.times.empty() ? 0.0 : path.times.back();
  path.validate();
  return path;
}

EpidemicPath read_path_csv(const std::filesystem::path& file) {
  auto in = open_input(file);
  return read_path_csv(in);
}

void write_rate_series_csv(std::ostream& out, const RateSeries& series) {
  out << "time,value\n";
  for (std::size_t i = 0; i < series.size(); ++i)
    out << format_double(series.times[i]) << ',' << format_double(series.values[i]) << '\n';
}

void write_feature_curve_csv(std::ostream& out, const FeatureCurve& curve) {
  out << "time,f,F\n";
  for (std::size_t i = 0; i < curve.times.size(); ++i)
    out << format_double(curve.times[i]) << ',' << format_double(curve.f[i]) << ','
        << format_double(curve.F[i]) << '\n';
}

void write_band_csv(std::ostream& out, const ConfidenceBand& band) {
  out << "time,point,lower,upper\n";
  for (std::size_t i = 0; i < band.times.size(); ++i)
    out << format_double(band.times[i]) << ',' << format_double(band.point[i]) << ','
        << format_double(band.lower[i]) << ',' << format_double(band.upper[i]) << '\n';
}

json band_metadata(const ConfidenceBand& band) {
  return json{{"method", to_string(band.method)},
              {"bias_corrected", band.bias_corrected},
              {"smoothing", to_string(band.smoothing)},
              {"level", band.level},
              {"points", band.times.size()}};
}

json to_json(const SplineModel& model) {
  const KnotVector& k = model.knots();
  return json{{"degree", k.degree()},
              {"domain", {k.lo(), k.hi()}},
              {"interior_knots", k.interior()},
              {"coefficients", model.coefficients()}};
}

SplineModel spline_from_json(const json& j) {
  try {
    const auto domain = j.at("domain").get<std::vector<double>>();
    if (domain.size() != 2) throw ArgumentError("spline domain must have two entries");
    return SplineModel(KnotVector(domain[0], domain[1],
                                  j.at("interior_knots").get<std::vector<double>>(),
                                  j.at("degree").get<int>()),
                       j.at("coefficients").get<std::vector<double>>());
  } catch (const json::exception& e) {
    throw ArgumentError(std::string("malformed spline JSON: ") + e.what());
  }
}

json to_json(const FitResult& fit) {
  return json{{"gamma", fit.theta_hat.gamma},
              {"spline", to_json(fit.theta_hat.spline)},
              {"loglik", fit.loglik},
              {"bic", fit.bic},
              {"num_params", fit.num_params},
              {"converged", fit.converged},
              {"evaluations", fit.evaluations}};
}

long parse_iso_date(const std::string& text) {
  int y = 0;
  unsigned m = 0, d = 0;
  if (text.size() != 10 || text[4] != '-' || text[7] != '-' ||
      !parse_number(text.substr(0, 4), y) || !parse_number(text.substr(5, 2), m) ||
      !parse_number(text.substr(8, 2), d))
    throw IngestionError("not an ISO-8601 date: '" + text + "'");
  const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m},
                                        std::chrono::day{d}};
  if (!ymd.ok()) throw IngestionError("invalid calendar date: '" + text + "'");
  return std::chrono::sys_days(ymd).time_since_epoch().count();
}

EpidemicPath ingest_covid_csv(std::istream& in, std::int64_t population) {
  if (population < 1) throw IngestionError("population must be >= 1");
  std::string line;
  if (!std::getline(in, line)) throw IngestionError("COVID CSV is empty");
  const auto header = split_csv_line(line);
  auto column = [&](const std::string& name) {
    for (std::size_t c = 0; c < header.size(); ++c)
      if (header[c] == name) return c;
    throw IngestionError("COVID CSV lacks column '" + name + "'");
  };
  const std::size_t c_date = column("date");
  const std::size_t c_cum = column("cumulative_cases");
  const std::size_t c_act = column("active_cases");

  struct Row {
    std::size_t line;
    long day;
    std::int64_t cumulative, active;
  };
  std::vector<Row> rows;
  std::vector<std::size_t> missing;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv_line(line);
    Row r{line_no, 0, 0, 0};
    const auto cell = [&](std::size_t c) { return c < cells.size() ? cells[c] : std::string(); };
    if (cell(c_date).empty() || !parse_number(cell(c_cum), r.cumulative) ||
        !parse_number(cell(c_act), r.active)) {
      missing.push_back(line_no);
      continue;
    }
    r.day = parse_iso_date(cell(c_date));
    rows.push_back(r);
  }
  auto list = [](const std::vector<std::size_t>& v) {
    std::ostringstream os;
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
    return os.str();
  };
  if (!missing.empty())
    throw IngestionError("missing or non-numeric values on line(s) " + list(missing));
  if (rows.empty()) throw IngestionError("COVID CSV has no data rows");

  std::vector<std::size_t> bad;
  for (std::size_t k = 1; k < rows.size(); ++k)
    if (rows[k].cumulative < rows[k - 1].cumulative) bad.push_back(rows[k].line);
  if (!bad.empty())
    throw IngestionError("cumulative cases decrease on line(s) " + list(bad));
  for (std::size_t k = 1; k < rows.size(); ++k)
    if (rows[k].day <= rows[k - 1].day) bad.push_back(rows[k].line);
  if (!bad.empty()) throw IngestionError("dates must strictly increase; see line(s) " + list(bad));
  for (const Row& r : rows)
    if (r.cumulative < 0 || r.active < 0 || r.cumulative > population || r.active > r.cumulative)
      bad.push_back(r.line);
  if (!bad.empty())
    throw IngestionError("counts out of bounds (need 0 <= active <= cumulative <= N) on line(s) " +
                         list(bad));

  EpidemicPath path;
  path.population = population;
  for (const Row& r : rows) {
    path.times.push_back(static_cast<double>(r.day - rows.front().day));
    path.states.push_back(CountState{population - r.cumulative, r.active, population});
  }
  path.horizon = path.times.back();
  return path;
}

EpidemicPath ingest_covid_csv(const std::filesystem::path& file, std::int64_t population) {
  auto in = open_input(file);
  return ingest_covid_csv(in, population);
}

void write_text(const std::filesystem::path& file, const std::string& contents) {
  const auto tmp = std::filesystem::path(file.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw ArgumentError("cannot write " + tmp.string());
    out << contents;
  }
  std::filesystem::rename(tmp, file);
}

}  // namespace sirspline::io
