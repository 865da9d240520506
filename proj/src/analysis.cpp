#include "ising/analysis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace ising {

namespace {

std::string format_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

}  // namespace

std::string to_string(FitKind kind) {
  return kind == FitKind::cubic ? "cubic" : "linear";
}

FitKind fit_kind_from_string(const std::string& name) {
  if (name == "cubic") return FitKind::cubic;
  if (name == "linear") return FitKind::linear;
  throw std::invalid_argument("fit kind must be 'cubic' or 'linear', got '" + name + "'");
}

void validate_config(const AnalysisConfig& config) {
  if (config.finite_size_min_l > config.finite_size_max_l) {
    throw std::invalid_argument("config: finite_size_min_L > finite_size_max_L");
  }
  if (!(config.nu > 0.0)) throw std::invalid_argument("config: nu must be > 0");
  if (config.jackknife_bins < 78) {
    throw std::invalid_argument("config: jackknife_bins must be >= 78");
  }
  if (config.tc != 0.0 && !(config.tc > 0.0)) {
    throw std::invalid_argument("config: Tc must be positive");
  }
}

double exact_tc(double coupling) {
  if (!(coupling > 0.0)) throw std::invalid_argument("exact_tc: J must be > 0");
  return 2.0 * coupling / std::log(1.0 + std::sqrt(2.0));
}

double collapse_transform(double temperature, int size, double tc, double nu) {
  if (!(tc > 0.0)) throw std::invalid_argument("collapse_transform: Tc must be > 0");
  if (!(nu > 0.0)) throw std::invalid_argument("collapse_transform: nu must be > 0");
  return std::pow(static_cast<double>(size), 1.0 / nu) * (temperature - tc) / tc;
}

SeriesSummary summarize(const MeasurementSeries& series, int bins) {
  if (bins < 2) throw std::invalid_argument("summarize: need at least 2 bins");
  const std::size_t n = series.records.size();
  const std::size_t per_bin = n / static_cast<std::size_t>(bins);
  if (per_bin == 0) {
    throw std::invalid_argument("summarize: " + std::to_string(n) +
                                " samples cannot fill " + std::to_string(bins) + " bins");
  }
  const std::size_t used = per_bin * static_cast<std::size_t>(bins);

  SeriesSummary s;
  s.params = series.metadata.params;
  s.bins = bins;
  s.samples_used = used;
  s.bin_m2.resize(static_cast<std::size_t>(bins));
  s.bin_abs_m.resize(static_cast<std::size_t>(bins));

  double total_abs = 0.0;
  for (int b = 0; b < bins; ++b) {
    double sum_m2 = 0.0, sum_abs = 0.0;
    const std::size_t begin = static_cast<std::size_t>(b) * per_bin;
    for (std::size_t i = begin; i < begin + per_bin; ++i) {
      const double m = series.magnetization(i);
      sum_m2 += m * m;
      sum_abs += std::abs(m);
    }
    s.bin_m2[static_cast<std::size_t>(b)] = sum_m2 / static_cast<double>(per_bin);
    s.bin_abs_m[static_cast<std::size_t>(b)] = sum_abs / static_cast<double>(per_bin);
    total_abs += sum_abs;
  }
  s.mean_abs_m = total_abs / static_cast<double>(used);

  // two-pass variance of |m|; <m^2> - <|m|>^2 in a form that cannot go
  // negative under floating point
  double var = 0.0;
  for (std::size_t i = 0; i < used; ++i) {
    const double d = std::abs(series.magnetization(i)) - s.mean_abs_m;
    var += d * d;
  }
  s.var_abs_m = var / static_cast<double>(used);
  return s;
}

CurvePoint susceptibility(const SeriesSummary& summary) {
  const double beta = summary.params.beta;
  const double n_sites = static_cast<double>(summary.params.size) * summary.params.size;
  const double value = beta * n_sites * summary.var_abs_m;

  std::vector<std::vector<double>> rows(static_cast<std::size_t>(summary.bins));
  for (int b = 0; b < summary.bins; ++b) {
    rows[static_cast<std::size_t>(b)] = {summary.bin_m2[static_cast<std::size_t>(b)],
                                         summary.bin_abs_m[static_cast<std::size_t>(b)]};
  }
  const ObservableEstimate est = jackknife(rows, [beta, n_sites](std::span<const double> c) {
    return beta * n_sites * (c[0] - c[1] * c[1]);
  });
  return {summary.temperature(), value, est.error};
}

CurvePoint susceptibility(const MeasurementSeries& series, int bins) {
  return susceptibility(summarize(series, bins));
}

CurvePoint binder_cumulant(const SeriesSummary& summary) {
  if (!(summary.mean_abs_m > 0.0)) {
    throw std::invalid_argument("binder_cumulant: degenerate series, <|m|> = 0");
  }
  const double value = 1.0 + summary.var_abs_m / (summary.mean_abs_m * summary.mean_abs_m);

  std::vector<std::vector<double>> rows(static_cast<std::size_t>(summary.bins));
  for (int b = 0; b < summary.bins; ++b) {
    rows[static_cast<std::size_t>(b)] = {summary.bin_m2[static_cast<std::size_t>(b)],
                                         summary.bin_abs_m[static_cast<std::size_t>(b)]};
  }
  const ObservableEstimate est = jackknife(rows, [](std::span<const double> c) {
    if (!(c[1] > 0.0)) {
      throw std::runtime_error("binder_cumulant: degenerate jackknife resample, <|m|> = 0");
    }
    return c[0] / (c[1] * c[1]);
  });
  return {summary.temperature(), value, est.error};
}

CurvePoint binder_cumulant(const MeasurementSeries& series, int bins) {
  return binder_cumulant(summarize(series, bins));
}

BinderCurve binder_curve_from_summaries(std::span<const SeriesSummary> summaries,
                                        const AnalysisConfig& config) {
  if (summaries.empty()) throw std::invalid_argument("binder_curve: no series");
  const int size = summaries.front().params.size;
  const std::size_t min_points = config.binder_crossing_fit_kind == FitKind::cubic ? 4 : 2;
  if (summaries.size() < min_points) {
    throw std::invalid_argument("binder_curve: need at least " + std::to_string(min_points) +
                                " temperatures for a " +
                                to_string(config.binder_crossing_fit_kind) + " fit, got " +
                                std::to_string(summaries.size()));
  }

  std::vector<std::size_t> order(summaries.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return summaries[a].temperature() < summaries[b].temperature();
  });

  BinderCurve curve;
  curve.size = size;
  curve.bins = summaries.front().bins;
  double prev_beta = 0.0;
  for (std::size_t i : order) {
    const SeriesSummary& s = summaries[i];
    if (s.params.size != size) {
      throw std::invalid_argument("binder_curve: mixed sizes " + std::to_string(size) +
                                  " and " + std::to_string(s.params.size));
    }
    if (s.bins != curve.bins) {
      throw std::invalid_argument("binder_curve: inconsistent bin counts");
    }
    if (!curve.temperatures.empty() && s.params.beta == prev_beta) {
      throw std::invalid_argument("binder_curve: duplicate temperature beta=" +
                                  std::to_string(s.params.beta));
    }
    prev_beta = s.params.beta;
    curve.temperatures.push_back(s.temperature());
    curve.points.push_back(binder_cumulant(s));
    curve.bin_m2.push_back(s.bin_m2);
    curve.bin_abs_m.push_back(s.bin_abs_m);
  }
  return curve;
}

BinderCurve binder_curve(std::span<const MeasurementSeries> series_list,
                         const AnalysisConfig& config) {
  std::vector<SeriesSummary> summaries;
  summaries.reserve(series_list.size());
  for (const MeasurementSeries& s : series_list) {
    summaries.push_back(summarize(s, config.jackknife_bins));
  }
  return binder_curve_from_summaries(summaries, config);
}

double Polynomial::operator()(double t) const {
  double v = 0.0;
  for (std::size_t k = coeffs.size(); k-- > 0;) v = v * t + coeffs[k];
  return v;
}

namespace {

Polynomial fit_cubic_polynomial(std::span<const CurvePoint> points) {
  constexpr std::size_t degree = 3;
  const std::size_t n = points.size();
  if (n <= degree) {
    throw std::invalid_argument("fit_curve: " + std::to_string(n) +
                                " points underdetermine a degree-" +
                                std::to_string(degree) + " polynomial");
  }
  bool weighted = true;
  for (const CurvePoint& p : points) {
    if (!(p.error > 0.0)) weighted = false;
  }

  // fit in the centered variable t - mu for conditioning, expand afterwards
  double mu = 0.0;
  for (const CurvePoint& p : points) mu += p.temperature;
  mu /= static_cast<double>(n);

  const std::size_t m = degree + 1;
  std::array<std::array<long double, 4>, 4> a{};
  std::array<long double, 4> rhs{};
  for (const CurvePoint& p : points) {
    const long double w = weighted ? 1.0L / (static_cast<long double>(p.error) * p.error) : 1.0L;
    const long double t = p.temperature - mu;
    std::array<long double, 4> powers{1.0L, t, t * t, t * t * t};
    for (std::size_t j = 0; j < m; ++j) {
      for (std::size_t k = 0; k < m; ++k) a[j][k] += w * powers[j] * powers[k];
      rhs[j] += w * powers[j] * p.value;
    }
  }

  // Gaussian elimination with partial pivoting on the (m x m) system
  for (std::size_t col = 0; col < m; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < m; ++r) {
      if (std::abs(static_cast<double>(a[r][col])) >
          std::abs(static_cast<double>(a[pivot][col]))) {
        pivot = r;
      }
    }
    if (a[pivot][col] == 0.0L) {
      throw std::invalid_argument("fit_curve: singular design (duplicate temperatures?)");
    }
    std::swap(a[col], a[pivot]);
    std::swap(rhs[col], rhs[pivot]);
    for (std::size_t r = col + 1; r < m; ++r) {
      const long double f = a[r][col] / a[col][col];
      for (std::size_t k = col; k < m; ++k) a[r][k] -= f * a[col][k];
      rhs[r] -= f * rhs[col];
    }
  }
  std::array<long double, 4> centered{};
  for (std::size_t row = m; row-- > 0;) {
    long double v = rhs[row];
    for (std::size_t k = row + 1; k < m; ++k) v -= a[row][k] * centered[k];
    centered[row] = v / a[row][row];
  }

  // p(T) = sum_k c_k (T - mu)^k  ->  coefficients in plain powers of T
  static constexpr int binom[4][4] = {{1, 0, 0, 0}, {1, 1, 0, 0}, {1, 2, 1, 0}, {1, 3, 3, 1}};
  Polynomial poly;
  poly.coeffs.assign(m, 0.0);
  for (std::size_t k = 0; k < m; ++k) {
    long double shift_pow = 1.0L;  // (-mu)^(k-j), built from j = k downwards
    for (std::size_t j = k + 1; j-- > 0;) {
      poly.coeffs[j] += static_cast<double>(centered[k] * binom[k][j] * shift_pow);
      shift_pow *= -mu;
    }
  }
  return poly;
}

}  // namespace

FittedCurve FittedCurve::cubic(std::span<const CurvePoint> points) {
  FittedCurve curve;
  curve.kind_ = FitKind::cubic;
  curve.poly_ = fit_cubic_polynomial(points);
  return curve;
}

FittedCurve FittedCurve::piecewise_linear(std::span<const CurvePoint> points) {
  if (points.size() < 2) {
    throw std::invalid_argument("fit_curve: piecewise-linear needs at least 2 points");
  }
  FittedCurve curve;
  curve.kind_ = FitKind::linear;
  for (const CurvePoint& p : points) {
    if (!curve.xs_.empty() && !(p.temperature > curve.xs_.back())) {
      throw std::invalid_argument("fit_curve: points must be strictly ascending in T");
    }
    curve.xs_.push_back(p.temperature);
    curve.ys_.push_back(p.value);
  }
  return curve;
}

double FittedCurve::operator()(double t) const {
  if (kind_ == FitKind::cubic) return poly_(t);
  // segment lookup; the end segments extend linearly beyond the data range
  std::size_t hi = 1;
  while (hi + 1 < xs_.size() && xs_[hi] < t) ++hi;
  const std::size_t lo = hi - 1;
  const double w = (t - xs_[lo]) / (xs_[hi] - xs_[lo]);
  return ys_[lo] * (1.0 - w) + ys_[hi] * w;
}

const Polynomial& FittedCurve::polynomial() const {
  if (kind_ != FitKind::cubic) {
    throw std::logic_error("FittedCurve: only the cubic kind has polynomial coefficients");
  }
  return poly_;
}

FittedCurve fit_curve(std::span<const CurvePoint> points, FitKind kind) {
  return kind == FitKind::cubic ? FittedCurve::cubic(points)
                                : FittedCurve::piecewise_linear(points);
}

namespace {

double bisect_root(const std::function<double(double)>& f, double lo, double hi,
                   double f_lo, double tol) {
  double a = lo, b = hi, fa = f_lo;
  for (int iter = 0; iter < 200 && (b - a) > tol; ++iter) {
    const double mid = 0.5 * (a + b);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fa < 0.0) != (fm < 0.0)) {
      b = mid;
    } else {
      a = mid;
      fa = fm;
    }
  }
  return 0.5 * (a + b);
}

// All roots of f in [lo, hi] from a fixed 1000-point scan with bisection on
// each sign change; deduplicated. Deterministic for identical inputs.
std::vector<double> scan_roots(const std::function<double(double)>& f, double lo, double hi) {
  constexpr int kScanPoints = 1000;
  const double tol = 1e-13 * (hi - lo);
  std::vector<double> roots;
  double prev_t = lo;
  double prev_v = f(lo);
  for (int k = 1; k < kScanPoints; ++k) {
    const double t = lo + (hi - lo) * static_cast<double>(k) / (kScanPoints - 1);
    const double v = f(t);
    if (prev_v == 0.0) {
      roots.push_back(prev_t);
    } else if (v != 0.0 && (prev_v < 0.0) != (v < 0.0)) {
      roots.push_back(bisect_root(f, prev_t, t, prev_v, tol));
    }
    prev_t = t;
    prev_v = v;
  }
  if (prev_v == 0.0) roots.push_back(prev_t);

  const double dedupe = 1e-9 * (hi - lo);
  std::vector<double> unique;
  for (double r : roots) {
    if (unique.empty() || r - unique.back() > dedupe) unique.push_back(r);
  }
  return unique;
}

std::vector<CurvePoint> loo_points(const BinderCurve& curve,
                                   const std::vector<double>& sum_m2,
                                   const std::vector<double>& sum_abs, int skip_bin) {
  std::vector<CurvePoint> pts(curve.points.size());
  const double denom = static_cast<double>(curve.bins - 1);
  for (std::size_t t = 0; t < curve.points.size(); ++t) {
    const double m2 = (sum_m2[t] - curve.bin_m2[t][static_cast<std::size_t>(skip_bin)]) / denom;
    const double am = (sum_abs[t] - curve.bin_abs_m[t][static_cast<std::size_t>(skip_bin)]) / denom;
    if (!(am > 0.0)) {
      throw std::runtime_error("find_crossing: degenerate jackknife resample, <|m|> = 0");
    }
    // full-sample errors stay in place as fit weights
    pts[t] = {curve.temperatures[t], m2 / (am * am), curve.points[t].error};
  }
  return pts;
}

}  // namespace

CrossingPoint find_crossing(const BinderCurve& curve_small, const BinderCurve& curve_large,
                            const AnalysisConfig& config) {
  if (curve_large.size != 2 * curve_small.size) {
    throw std::invalid_argument("find_crossing: expected sizes L and L/2, got " +
                                std::to_string(curve_large.size) + " and " +
                                std::to_string(curve_small.size));
  }
  if (curve_small.bins != curve_large.bins) {
    throw std::invalid_argument("find_crossing: curves have different bin counts");
  }
  const double lo = std::max(curve_small.temperatures.front(), curve_large.temperatures.front());
  const double hi = std::min(curve_small.temperatures.back(), curve_large.temperatures.back());
  if (!(lo < hi)) {
    throw std::invalid_argument("find_crossing: temperature ranges do not overlap");
  }

  const FitKind kind = config.binder_crossing_fit_kind;
  const FittedCurve fit_small = fit_curve(curve_small.points, kind);
  const FittedCurve fit_large = fit_curve(curve_large.points, kind);
  const auto diff = [&](double t) { return fit_large(t) - fit_small(t); };

  const std::vector<double> roots = scan_roots(diff, lo, hi);
  if (roots.empty()) {
    char msg[160];
    std::snprintf(msg, sizeof(msg),
                  "find_crossing: L=%d and L=%d Binder curves do not cross in [%.6f, %.6f]",
                  curve_large.size, curve_small.size, lo, hi);
    throw std::runtime_error(msg);
  }
  if (roots.size() > 1) {
    std::ostringstream msg;
    msg << "find_crossing: ambiguous crossing of L=" << curve_large.size
        << " and L=" << curve_small.size << ", candidate temperatures:";
    for (double r : roots) msg << " " << format_value(r);
    msg << " (narrow the temperature window)";
    throw std::runtime_error(msg.str());
  }
  const double t_cross = roots.front();

  // jackknife: drop bin b from every temperature of both curves, refit,
  // relocate; on a resample the nearest root to the full-sample crossing
  // disambiguates transient extra sign changes
  const int bins = curve_small.bins;
  auto column_sums = [](const BinderCurve& c) {
    std::pair<std::vector<double>, std::vector<double>> sums;
    sums.first.resize(c.temperatures.size(), 0.0);
    sums.second.resize(c.temperatures.size(), 0.0);
    for (std::size_t t = 0; t < c.temperatures.size(); ++t) {
      for (int b = 0; b < c.bins; ++b) {
        sums.first[t] += c.bin_m2[t][static_cast<std::size_t>(b)];
        sums.second[t] += c.bin_abs_m[t][static_cast<std::size_t>(b)];
      }
    }
    return sums;
  };
  const auto [small_m2, small_abs] = column_sums(curve_small);
  const auto [large_m2, large_abs] = column_sums(curve_large);

  std::vector<double> theta(static_cast<std::size_t>(bins));
  for (int b = 0; b < bins; ++b) {
    const std::vector<CurvePoint> pts_small = loo_points(curve_small, small_m2, small_abs, b);
    const std::vector<CurvePoint> pts_large = loo_points(curve_large, large_m2, large_abs, b);
    const FittedCurve fs = fit_curve(pts_small, kind);
    const FittedCurve fl = fit_curve(pts_large, kind);
    const std::vector<double> r = scan_roots([&](double t) { return fl(t) - fs(t); }, lo, hi);
    if (r.empty()) {
      throw std::runtime_error("find_crossing: crossing vanished on a jackknife resample; "
                               "statistics too poor for a stable crossing");
    }
    double best = r.front();
    for (double cand : r) {
      if (std::abs(cand - t_cross) < std::abs(best - t_cross)) best = cand;
    }
    theta[static_cast<std::size_t>(b)] = best;
  }
  double theta_bar = 0.0;
  for (double t : theta) theta_bar += t;
  theta_bar /= static_cast<double>(bins);
  double sum_sq = 0.0;
  for (double t : theta) sum_sq += (t - theta_bar) * (t - theta_bar);
  const double zeta =
      std::sqrt(sum_sq * static_cast<double>(bins - 1) / static_cast<double>(bins));
  if (!(zeta > 0.0)) {
    throw std::runtime_error("find_crossing: degenerate crossing error (zeta = 0)");
  }
  return {curve_large.size, t_cross, zeta};
}

FssResult fss_extrapolate(std::span<const CrossingPoint> crossings,
                          const AnalysisConfig& config) {
  std::vector<CrossingPoint> used;
  for (const CrossingPoint& c : crossings) {
    if (c.size >= config.finite_size_min_l && c.size <= config.finite_size_max_l) {
      used.push_back(c);
    }
  }
  std::sort(used.begin(), used.end(),
            [](const CrossingPoint& a, const CrossingPoint& b) { return a.size < b.size; });
  if (used.size() < 2) {
    throw std::invalid_argument(
        "fss_extrapolate: need at least 2 crossings with " +
        std::to_string(config.finite_size_min_l) + " <= L <= " +
        std::to_string(config.finite_size_max_l) + ", got " + std::to_string(used.size()));
  }

  std::vector<double> x(used.size()), y(used.size()), sigma(used.size());
  for (std::size_t i = 0; i < used.size(); ++i) {
    x[i] = std::pow(static_cast<double>(used[i].size), -1.0 / config.nu);
    y[i] = used[i].temperature;
    sigma[i] = used[i].std_error;
  }
  const WeightedFit fit = weighted_linear_fit(x, y, sigma);

  FssResult result;
  result.tc_star = fit.intercept;
  result.tc_star_error = fit.intercept_error;
  result.slope = fit.slope;
  result.chi_squared = fit.chi_squared;
  result.nu = config.nu;
  result.fit_kind = config.binder_crossing_fit_kind;
  result.min_l = config.finite_size_min_l;
  result.max_l = config.finite_size_max_l;
  result.crossings_used = std::move(used);
  return result;
}

Dataset load_dataset(const std::filesystem::path& data_dir, int bins) {
  if (!std::filesystem::is_directory(data_dir)) {
    throw std::runtime_error("load_dataset: no such directory: " + data_dir.string());
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(data_dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    if (name.rfind("ising_", 0) == 0 && name.size() > 4 &&
        name.substr(name.size() - 4) == ".dat") {
      files.push_back(entry.path());
    }
  }
  if (files.empty()) {
    throw std::runtime_error("load_dataset: no ising_*.dat run files in " + data_dir.string());
  }
  std::sort(files.begin(), files.end());

  Dataset data;
  bool first = true;
  for (const std::filesystem::path& f : files) {
    const MeasurementSeries series = read_run_file(f);
    if (first) {
      data.coupling = series.metadata.params.coupling;
      first = false;
    } else if (series.metadata.params.coupling != data.coupling) {
      throw std::runtime_error("load_dataset: mixed couplings in " + data_dir.string());
    }
    data.groups[series.size()].push_back(summarize(series, bins));
  }
  for (auto& [size, group] : data.groups) {
    std::sort(group.begin(), group.end(), [](const SeriesSummary& a, const SeriesSummary& b) {
      return a.params.beta > b.params.beta;  // ascending temperature
    });
    for (std::size_t i = 1; i < group.size(); ++i) {
      if (group[i].params.beta == group[i - 1].params.beta) {
        throw std::runtime_error("load_dataset: duplicate point L=" + std::to_string(size) +
                                 " beta=" + std::to_string(group[i].params.beta) +
                                 " (two seeds for one point?)");
      }
    }
  }
  return data;
}

std::filesystem::path emit_figure_data(const std::string& name,
                                       std::span<const FigureBlock> curves,
                                       const std::filesystem::path& out_dir) {
  if (name.empty()) throw std::invalid_argument("emit_figure_data: empty figure name");
  if (curves.empty()) throw std::invalid_argument("emit_figure_data: no curves for fig_" + name);
  for (const FigureBlock& block : curves) {
    if (block.points.empty()) {
      throw std::invalid_argument("emit_figure_data: empty block '" + block.label +
                                  "' in fig_" + name);
    }
  }

  const std::filesystem::path dir = out_dir / ("fig_" + name);
  std::filesystem::create_directories(dir);
  const std::filesystem::path path = dir / ("fig_" + name + ".txt");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("emit_figure_data: cannot open " + path.string());

  out << "# fig_" << name << " v1\n";
  for (std::size_t i = 0; i < curves.size(); ++i) {
    if (i > 0) out << "\n";
    out << "# label: " << curves[i].label << "\n";
    out << "# columns: T value error\n";
    for (const CurvePoint& p : curves[i].points) {
      char line[128];
      std::snprintf(line, sizeof(line), "%.6f %s %s\n", p.temperature,
                    format_value(p.value).c_str(), format_value(p.error).c_str());
      out << line;
    }
  }
  if (!out) throw std::runtime_error("emit_figure_data: I/O error on " + path.string());
  return path;
}

std::filesystem::path write_tc_estimate(const FssResult& result,
                                        const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  const std::filesystem::path path = out_dir / "tc_estimate.txt";
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_tc_estimate: cannot open " + path.string());
  out << "Tc_star=" << format_value(result.tc_star)
      << " error=" << format_value(result.tc_star_error)
      << " A=" << format_value(result.slope)
      << " chi2=" << format_value(result.chi_squared)
      << " nu=" << format_value(result.nu)
      << " fit_kind=" << to_string(result.fit_kind)
      << " min_L=" << result.min_l
      << " max_L=" << result.max_l << "\n";
  return path;
}

FssResult read_tc_estimate(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("read_tc_estimate: cannot open " + file.string());
  std::string line;
  std::getline(in, line);
  FssResult result;
  char kind[16] = {0};
  if (std::sscanf(line.c_str(),
                  "Tc_star=%lf error=%lf A=%lf chi2=%lf nu=%lf fit_kind=%15s min_L=%d max_L=%d",
                  &result.tc_star, &result.tc_star_error, &result.slope,
                  &result.chi_squared, &result.nu, kind, &result.min_l,
                  &result.max_l) != 8) {
    throw std::runtime_error("read_tc_estimate: malformed line in " + file.string());
  }
  result.fit_kind = fit_kind_from_string(kind);
  return result;
}

std::filesystem::path analyze_susceptibility(const Dataset& data,
                                             const AnalysisConfig& config,
                                             const std::filesystem::path& out_dir) {
  validate_config(config);
  std::vector<FigureBlock> blocks;
  for (const auto& [size, group] : data.groups) {
    FigureBlock block;
    block.label = "L=" + std::to_string(size);
    for (const SeriesSummary& s : group) block.points.push_back(susceptibility(s));
    blocks.push_back(std::move(block));
  }
  return emit_figure_data("susceptibility", blocks, out_dir);
}

BinderAnalysis analyze_binder(const Dataset& data, const AnalysisConfig& config,
                              const std::filesystem::path& out_dir) {
  validate_config(config);
  BinderAnalysis analysis;
  std::map<int, const BinderCurve*> by_size;
  for (const auto& [size, group] : data.groups) {
    analysis.curves.push_back(binder_curve_from_summaries(group, config));
  }
  for (const BinderCurve& c : analysis.curves) by_size[c.size] = &c;

  for (const BinderCurve& large : analysis.curves) {
    const auto it = by_size.find(large.size / 2);
    if (it == by_size.end()) continue;
    analysis.crossings.push_back(find_crossing(*it->second, large, config));
  }
  if (analysis.crossings.empty()) {
    throw std::runtime_error("analyze_binder: no (L, L/2) size pairs in the data set");
  }
  analysis.fss = fss_extrapolate(analysis.crossings, config);

  std::vector<FigureBlock> binder_blocks;
  for (const BinderCurve& c : analysis.curves) {
    binder_blocks.push_back({"L=" + std::to_string(c.size), c.points});
  }
  // the estimate and its error band as a one-row block
  binder_blocks.push_back(
      {"Tc_estimate", {{analysis.fss.tc_star, 0.0, analysis.fss.tc_star_error}}});
  analysis.binder_figure = emit_figure_data("binder_cumulant", binder_blocks, out_dir);

  std::vector<FigureBlock> scaling_blocks;
  {
    FigureBlock crossings_block;
    crossings_block.label = "crossings";  // columns: L^{-1/nu} T_L zeta_L
    double x_max = 0.0;
    for (const CrossingPoint& c : analysis.fss.crossings_used) {
      const double x = std::pow(static_cast<double>(c.size), -1.0 / config.nu);
      crossings_block.points.push_back({x, c.temperature, c.std_error});
      x_max = std::max(x_max, x);
    }
    FigureBlock fit_block;
    fit_block.label = "fit";  // T_L = Tc_star + A x, x = 0 gives the estimate
    constexpr int kLinePoints = 33;
    for (int i = 0; i < kLinePoints; ++i) {
      const double x = x_max * static_cast<double>(i) / (kLinePoints - 1);
      fit_block.points.push_back({x, analysis.fss.tc_star + analysis.fss.slope * x, 0.0});
    }
    scaling_blocks.push_back(std::move(crossings_block));
    scaling_blocks.push_back(std::move(fit_block));
  }
  analysis.sizescaling_figure = emit_figure_data("sizescaling", scaling_blocks, out_dir);
  analysis.tc_file = write_tc_estimate(analysis.fss, out_dir);
  return analysis;
}

std::filesystem::path analyze_collapse(const Dataset& data, const AnalysisConfig& config,
                                       double tc, double nu,
                                       const std::filesystem::path& out_dir) {
  validate_config(config);
  if (!(tc > 0.0)) throw std::invalid_argument("analyze_collapse: Tc must be > 0");
  if (!(nu > 0.0)) throw std::invalid_argument("analyze_collapse: nu must be > 0");

  std::vector<FigureBlock> blocks;
  for (const auto& [size, group] : data.groups) {
    FigureBlock block;
    block.label = "L=" + std::to_string(size);
    for (const SeriesSummary& s : group) {
      CurvePoint p = binder_cumulant(s);
      p.temperature = collapse_transform(s.temperature(), size, tc, nu);
      block.points.push_back(p);
    }
    blocks.push_back(std::move(block));
  }
  return emit_figure_data("binder_collapse", blocks, out_dir);
}

}  // namespace ising
