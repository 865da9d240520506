#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace ising {

struct ObservableEstimate {
  double value = 0.0;
  double error = 0.0;
  int bins = 0;
};

// Mean and standard error of the mean from a binning analysis: samples are
// partitioned into floor(n / bin_size) equal bins (tail remainder dropped),
// value is the mean over the used samples and the error is
// sqrt(var(bin means) / B) with the unbiased (B-1) variance. Requires at
// least two complete bins.
ObservableEstimate binning_error(std::span<const double> samples, std::size_t bin_size);

// Binning errors at bin sizes 1, 2, 4, ... until fewer than two bins remain
// or max_levels levels were produced. For correlated data the curve grows
// with bin size and plateaus at the true error of the mean.
std::vector<std::pair<std::size_t, double>> binning_curve(
    std::span<const double> samples, int max_levels);

// Leave-one-out jackknife over pre-binned data. `bins` holds one row per bin
// and one column per observable (all rows the same length); `statistic` maps
// column means to the estimate. The value is the statistic on the full
// sample and the error is sqrt((B-1)/B * sum_i (theta_i - theta_bar)^2)
// over the B leave-one-out evaluations.
ObservableEstimate jackknife(
    const std::vector<std::vector<double>>& bins,
    const std::function<double(std::span<const double>)>& statistic);

struct WeightedFit {
  double intercept = 0.0;
  double slope = 0.0;
  double intercept_error = 0.0;
  double slope_error = 0.0;
  double chi_squared = 0.0;
  int points_used = 0;
};

// Closed-form weighted least squares for y = intercept + slope * x with
// weights 1/sigma^2. Parameter errors come from the covariance of the
// weighted normal equations (no chi^2 rescaling); chi_squared is the
// minimized objective sum_i (y_i - a - b x_i)^2 / sigma_i^2.
WeightedFit weighted_linear_fit(std::span<const double> x, std::span<const double> y,
                                std::span<const double> sigma);

}  // namespace ising
