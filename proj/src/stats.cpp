#include "ising/stats.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ising {

ObservableEstimate binning_error(std::span<const double> samples, std::size_t bin_size) {
  if (bin_size == 0) throw std::invalid_argument("binning_error: bin_size must be >= 1");
  const std::size_t num_bins = samples.size() / bin_size;
  if (num_bins < 2) {
    throw std::invalid_argument("binning_error: need at least 2 complete bins, got " +
                                std::to_string(num_bins));
  }
  const std::size_t used = num_bins * bin_size;

  std::vector<double> bin_means(num_bins);
  double total = 0.0;
  for (std::size_t b = 0; b < num_bins; ++b) {
    double sum = 0.0;
    for (std::size_t i = b * bin_size; i < (b + 1) * bin_size; ++i) sum += samples[i];
    bin_means[b] = sum / static_cast<double>(bin_size);
    total += sum;
  }
  const double mean = total / static_cast<double>(used);

  double var = 0.0;
  for (double m : bin_means) var += (m - mean) * (m - mean);
  var /= static_cast<double>(num_bins - 1);

  return {mean, std::sqrt(var / static_cast<double>(num_bins)),
          static_cast<int>(num_bins)};
}

std::vector<std::pair<std::size_t, double>> binning_curve(
    std::span<const double> samples, int max_levels) {
  if (samples.size() < 4) {
    throw std::invalid_argument("binning_curve: need at least 4 samples");
  }
  std::vector<std::pair<std::size_t, double>> curve;
  std::size_t bin_size = 1;
  for (int level = 0; level < max_levels && samples.size() / bin_size >= 2; ++level) {
    curve.emplace_back(bin_size, binning_error(samples, bin_size).error);
    bin_size *= 2;
  }
  return curve;
}

ObservableEstimate jackknife(
    const std::vector<std::vector<double>>& bins,
    const std::function<double(std::span<const double>)>& statistic) {
  const std::size_t num_bins = bins.size();
  if (num_bins < 2) throw std::invalid_argument("jackknife: need at least 2 bins");
  const std::size_t cols = bins.front().size();
  for (const auto& row : bins) {
    if (row.size() != cols) {
      throw std::invalid_argument("jackknife: ragged bin rows");
    }
  }

  std::vector<double> col_sums(cols, 0.0);
  for (const auto& row : bins) {
    for (std::size_t c = 0; c < cols; ++c) col_sums[c] += row[c];
  }

  std::vector<double> means(cols);
  for (std::size_t c = 0; c < cols; ++c) {
    means[c] = col_sums[c] / static_cast<double>(num_bins);
  }
  const double full_value = statistic(means);

  std::vector<double> theta(num_bins);
  std::vector<double> loo(cols);
  double theta_bar = 0.0;
  for (std::size_t b = 0; b < num_bins; ++b) {
    for (std::size_t c = 0; c < cols; ++c) {
      loo[c] = (col_sums[c] - bins[b][c]) / static_cast<double>(num_bins - 1);
    }
    theta[b] = statistic(loo);
    theta_bar += theta[b];
  }
  theta_bar /= static_cast<double>(num_bins);

  double sum_sq = 0.0;
  for (double t : theta) sum_sq += (t - theta_bar) * (t - theta_bar);
  const double err = std::sqrt(sum_sq * static_cast<double>(num_bins - 1) /
                               static_cast<double>(num_bins));

  return {full_value, err, static_cast<int>(num_bins)};
}

WeightedFit weighted_linear_fit(std::span<const double> x, std::span<const double> y,
                                std::span<const double> sigma) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n || sigma.size() != n) {
    throw std::invalid_argument("weighted_linear_fit: need >= 2 points with matching sizes");
  }
  for (double s : sigma) {
    if (!(s > 0.0)) throw std::invalid_argument("weighted_linear_fit: sigma must be > 0");
  }

  long double sw = 0, swx = 0, swy = 0, swxx = 0, swxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const long double w = 1.0L / (static_cast<long double>(sigma[i]) * sigma[i]);
    sw += w;
    swx += w * x[i];
    swy += w * y[i];
    swxx += w * x[i] * x[i];
    swxy += w * x[i] * y[i];
  }
  const long double delta = sw * swxx - swx * swx;
  if (!(delta > 0) || !std::isfinite(static_cast<double>(delta))) {
    throw std::invalid_argument("weighted_linear_fit: degenerate design (all x equal?)");
  }

  WeightedFit fit;
  fit.intercept = static_cast<double>((swxx * swy - swx * swxy) / delta);
  fit.slope = static_cast<double>((sw * swxy - swx * swy) / delta);
  fit.intercept_error = static_cast<double>(std::sqrt(swxx / delta));
  fit.slope_error = static_cast<double>(std::sqrt(sw / delta));
  fit.points_used = static_cast<int>(n);

  long double chi2 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const long double r = (y[i] - fit.intercept - fit.slope * x[i]) / sigma[i];
    chi2 += r * r;
  }
  fit.chi_squared = static_cast<double>(chi2);
  return fit;
}

}  // namespace ising
