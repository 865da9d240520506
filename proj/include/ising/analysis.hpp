#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "ising/engine.hpp"
#include "ising/stats.hpp"

namespace ising {

enum class FitKind { cubic, linear };

std::string to_string(FitKind kind);
FitKind fit_kind_from_string(const std::string& name);

struct AnalysisConfig {
  FitKind binder_crossing_fit_kind = FitKind::cubic;
  int finite_size_min_l = 16;
  int finite_size_max_l = 1 << 20;
  double tc = 0.0;  // collapse override; 0 means "take the fitted estimate"
  double nu = 1.0;
  int jackknife_bins = 100;  // floor of 78
};

void validate_config(const AnalysisConfig& config);

// Exactly known critical temperature 2 J / ln(1 + sqrt(2)), the benchmark
// the fitted estimate is compared against.
double exact_tc(double coupling);

// Finite-size scaling variable L^{1/nu} (T - Tc) / Tc.
double collapse_transform(double temperature, int size, double tc, double nu);

struct CurvePoint {
  double temperature;  // abscissa; T except where a figure says otherwise
  double value;
  double error;
};

struct CrossingPoint {
  int size;            // the larger size of the (L, L/2) pair
  double temperature;  // T_L
  double std_error;    // zeta_L > 0
};

struct FssResult {
  double tc_star = 0.0;
  double tc_star_error = 0.0;
  double slope = 0.0;  // A in T_L = Tc* + A L^{-1/nu}
  double chi_squared = 0.0;
  double nu = 1.0;
  FitKind fit_kind = FitKind::cubic;
  int min_l = 0;
  int max_l = 0;
  std::vector<CrossingPoint> crossings_used;
};

// Per-series bin summary: per-bin means of m^2 and |m| over B equal bins
// (tail remainder dropped) plus the exact two-pass moments of |m| over the
// used samples. All downstream estimates derive from this.
struct SeriesSummary {
  RunParams params;
  int bins = 0;
  std::size_t samples_used = 0;
  std::vector<double> bin_m2;     // length bins
  std::vector<double> bin_abs_m;  // length bins
  double mean_abs_m = 0.0;
  double var_abs_m = 0.0;  // mean of (|m| - mean)^2; var form keeps chi >= 0

  double temperature() const { return 1.0 / params.beta; }
};

SeriesSummary summarize(const MeasurementSeries& series, int bins);

// Connected susceptibility  chi = beta L^2 (<m^2> - <|m|>^2)  with a
// jackknife error over the full expression.
CurvePoint susceptibility(const MeasurementSeries& series, int bins);
CurvePoint susceptibility(const SeriesSummary& summary);

// Binder cumulant  U2 = <m^2> / <|m|>^2  with a jackknife error. The value
// is computed as 1 + var(|m|)/<|m|>^2, which is the same number but stays
// >= 1 under floating point.
CurvePoint binder_cumulant(const MeasurementSeries& series, int bins);
CurvePoint binder_cumulant(const SeriesSummary& summary);

// One system size's Binder cumulant curve with the per-bin data the
// crossing jackknife resamples from.
struct BinderCurve {
  int size = 0;
  int bins = 0;
  std::vector<double> temperatures;            // ascending
  std::vector<CurvePoint> points;              // one per temperature
  std::vector<std::vector<double>> bin_m2;     // [temperature][bin]
  std::vector<std::vector<double>> bin_abs_m;  // [temperature][bin]
};

BinderCurve binder_curve(std::span<const MeasurementSeries> series_list,
                         const AnalysisConfig& config);
BinderCurve binder_curve_from_summaries(std::span<const SeriesSummary> summaries,
                                        const AnalysisConfig& config);

struct Polynomial {
  std::vector<double> coeffs;  // ascending powers
  double operator()(double t) const;
};

// Fitted model of one Binder curve. The cubic kind is a least-squares
// cubic polynomial in T, weighted by 1/error^2 when every point error is
// positive and unweighted otherwise. The linear kind interpolates the
// points piecewise (a global weighted line pinned by the tiny error bars
// of the ordered phase need not intersect the other curve at all, so it
// cannot serve the crossing analysis).
class FittedCurve {
 public:
  static FittedCurve cubic(std::span<const CurvePoint> points);
  static FittedCurve piecewise_linear(std::span<const CurvePoint> points);

  double operator()(double t) const;
  FitKind kind() const { return kind_; }
  // cubic only: the fitted coefficients, ascending powers of T
  const Polynomial& polynomial() const;

 private:
  FitKind kind_ = FitKind::cubic;
  Polynomial poly_;
  std::vector<double> xs_, ys_;
};

FittedCurve fit_curve(std::span<const CurvePoint> points, FitKind kind);

// Crossing temperature of the fitted curves of sizes L and L/2, located by
// bisection after a sign-change scan of the overlapping temperature range.
// No sign change and multiple sign changes are both errors (the latter
// lists the candidate roots). zeta_L comes from a jackknife that refits
// both curves and relocates the root on every leave-one-out sample, bins
// paired by index across temperatures.
CrossingPoint find_crossing(const BinderCurve& curve_small, const BinderCurve& curve_large,
                            const AnalysisConfig& config);

// Weighted linear fit of the crossing temperatures against L^{-1/nu};
// tc_star is the intercept (the infinite-size extrapolation).
FssResult fss_extrapolate(std::span<const CrossingPoint> crossings,
                          const AnalysisConfig& config);

// ---- dataset + figure pipeline -------------------------------------------

// Summaries of every ising_*.dat run file in a directory, grouped by size,
// sorted by temperature. Mixed couplings are rejected.
struct Dataset {
  std::map<int, std::vector<SeriesSummary>> groups;
  double coupling = 1.0;
};

Dataset load_dataset(const std::filesystem::path& data_dir, int bins);

struct FigureBlock {
  std::string label;
  std::vector<CurvePoint> points;
};

// Writes out_dir/fig_<name>/fig_<name>.txt in the block format
//   # fig_<name> v1
//   # label: <label>
//   # columns: T value error
//   <T> <value> <error>
// with a blank line between blocks. Byte-identical for identical inputs.
std::filesystem::path emit_figure_data(const std::string& name,
                                       std::span<const FigureBlock> curves,
                                       const std::filesystem::path& out_dir);

// tc_estimate.txt: single line
//   Tc_star=<v> error=<v> A=<v> chi2=<v> nu=<v> fit_kind=<k> min_L=<v> max_L=<v>
std::filesystem::path write_tc_estimate(const FssResult& result,
                                        const std::filesystem::path& out_dir);
FssResult read_tc_estimate(const std::filesystem::path& file);

// The three evaluation entry points. Each returns what it wrote.
std::filesystem::path analyze_susceptibility(const Dataset& data,
                                             const AnalysisConfig& config,
                                             const std::filesystem::path& out_dir);

struct BinderAnalysis {
  std::vector<BinderCurve> curves;          // ascending size
  std::vector<CrossingPoint> crossings;     // all pairs found
  FssResult fss;
  std::filesystem::path binder_figure;
  std::filesystem::path sizescaling_figure;
  std::filesystem::path tc_file;
};

BinderAnalysis analyze_binder(const Dataset& data, const AnalysisConfig& config,
                              const std::filesystem::path& out_dir);

std::filesystem::path analyze_collapse(const Dataset& data, const AnalysisConfig& config,
                                       double tc, double nu,
                                       const std::filesystem::path& out_dir);

}  // namespace ising
