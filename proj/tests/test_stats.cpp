#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "ising/rng.hpp"
#include "ising/stats.hpp"

using ising::binning_curve;
using ising::binning_error;
using ising::jackknife;
using ising::ObservableEstimate;
using ising::RandomStream;
using ising::weighted_linear_fit;

namespace {

double normal(RandomStream& rng) {
  const double u1 = rng.next_unit_real();
  const double u2 = rng.next_unit_real();
  return std::sqrt(-2.0 * std::log(1.0 - u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::vector<std::vector<double>> as_rows(const std::vector<double>& values) {
  std::vector<std::vector<double>> rows;
  for (double v : values) rows.push_back({v});
  return rows;
}

const auto mean_statistic = [](std::span<const double> c) { return c[0]; };

}  // namespace

TEST_CASE("binning on a tiny hand-computed series") {
  const std::vector<double> samples{1.0, 2.0, 3.0, 4.0};

  const ObservableEstimate level0 = binning_error(samples, 1);
  CHECK(level0.value == doctest::Approx(2.5));
  CHECK(level0.error == doctest::Approx(std::sqrt((5.0 / 3.0) / 4.0)).epsilon(1e-12));
  CHECK(level0.bins == 4);

  const ObservableEstimate level1 = binning_error(samples, 2);
  CHECK(level1.value == doctest::Approx(2.5));
  CHECK(level1.error == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(level1.bins == 2);

  CHECK_THROWS_AS(binning_error(samples, 3), std::invalid_argument);  // < 2 complete bins
  CHECK_THROWS_AS(binning_error(samples, 0), std::invalid_argument);
}

TEST_CASE("constant samples have zero error") {
  const std::vector<double> samples(64, 3.25);
  CHECK(binning_error(samples, 4).error == 0.0);
  for (const auto& [bin_size, err] : binning_curve(samples, 5)) CHECK(err == 0.0);
}

TEST_CASE("bin size 1 equals the naive standard error of the mean") {
  RandomStream rng(11);
  std::vector<double> samples(1000);
  for (double& s : samples) s = normal(rng);

  double mean = 0.0;
  for (double s : samples) mean += s;
  mean /= samples.size();
  double var = 0.0;
  for (double s : samples) var += (s - mean) * (s - mean);
  var /= (samples.size() - 1);
  const double naive_sem = std::sqrt(var / samples.size());

  const ObservableEstimate est = binning_error(samples, 1);
  CHECK(est.value == doctest::Approx(mean).epsilon(1e-12));
  CHECK(est.error == doctest::Approx(naive_sem).epsilon(1e-12));
}

TEST_CASE("binning curve is flat for independent samples") {
  RandomStream rng(13);
  std::vector<double> samples(1 << 16);
  for (double& s : samples) s = normal(rng);

  const auto curve = binning_curve(samples, 9);  // bin sizes 1 .. 256
  REQUIRE(curve.size() == 9);
  const double base = curve.front().second;
  for (const auto& [bin_size, err] : curve) {
    CHECK(std::abs(err / base - 1.0) < 0.2);
  }
}

TEST_CASE("binning curve grows then plateaus for AR(1) data") {
  // x_t = phi x_{t-1} + e_t: the error of the mean is sqrt((1+phi)/(1-phi))
  // times the naive estimate, reached once bins exceed the correlation time
  const double phi = 0.8;
  const std::size_t n = 1 << 17;
  RandomStream rng(17);
  std::vector<double> samples(n);
  double x = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    x = phi * x + normal(rng);
    samples[i] = x;
  }

  const double var_x = 1.0 / (1.0 - phi * phi);
  const double true_sem = std::sqrt(var_x * (1.0 + phi) / (1.0 - phi) / n);
  const double naive_sem = std::sqrt(var_x / n);

  const auto curve = binning_curve(samples, 12);  // up to bin size 2048
  REQUIRE(curve.size() == 12);
  const double err1 = curve[0].second;
  const double err1024 = curve[10].second;
  const double err2048 = curve[11].second;

  CHECK(std::abs(err1 / naive_sem - 1.0) < 0.1);
  CHECK(std::abs(err1024 / true_sem - 1.0) < 0.25);
  CHECK(err1024 / err1 > 2.2);  // grew towards sqrt(9) = 3
  CHECK(std::abs(err2048 / err1024 - 1.0) < 0.25);  // plateau
}

TEST_CASE("jackknife of the mean on a tiny series") {
  const auto est = jackknife(as_rows({1.0, 2.0, 3.0}), mean_statistic);
  CHECK(est.value == doctest::Approx(2.0));
  // leave-one-out means {2.5, 2, 1.5}
  CHECK(est.error == doctest::Approx(std::sqrt(1.0 / 3.0)).epsilon(1e-12));
  CHECK(est.bins == 3);
}

TEST_CASE("jackknife edge cases") {
  CHECK(jackknife(as_rows({4.0, 4.0, 4.0, 4.0}), mean_statistic).error == 0.0);
  CHECK_THROWS_AS(jackknife(as_rows({1.0}), mean_statistic), std::invalid_argument);
  CHECK_THROWS_AS(jackknife({{1.0}, {1.0, 2.0}}, mean_statistic), std::invalid_argument);
}

TEST_CASE("jackknife of the mean reproduces the binning error exactly") {
  RandomStream rng(19);
  std::vector<double> samples(4096);
  for (double& s : samples) s = normal(rng) + 0.3;

  for (std::size_t bin_size : {16ul, 64ul, 128ul}) {
    const ObservableEstimate binned = binning_error(samples, bin_size);
    std::vector<double> bin_means;
    for (std::size_t b = 0; b < samples.size() / bin_size; ++b) {
      double sum = 0.0;
      for (std::size_t i = b * bin_size; i < (b + 1) * bin_size; ++i) sum += samples[i];
      bin_means.push_back(sum / bin_size);
    }
    const ObservableEstimate jack = jackknife(as_rows(bin_means), mean_statistic);
    CHECK(jack.value == doctest::Approx(binned.value).epsilon(1e-12));
    CHECK(jack.error == doctest::Approx(binned.error).epsilon(1e-12));
  }
}

TEST_CASE("weighted fit recovers an exact line") {
  const std::vector<double> x{1.0 / 16, 1.0 / 32, 1.0 / 64};
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = 2.269185 + 0.3 * x[i];
  const std::vector<double> sigma(x.size(), 0.01);

  const auto fit = weighted_linear_fit(x, y, sigma);
  CHECK(fit.intercept == doctest::Approx(2.269185).epsilon(1e-12));
  CHECK(fit.slope == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(fit.chi_squared == doctest::Approx(0.0).scale(1.0).epsilon(1e-18));
  CHECK(fit.points_used == 3);
}

TEST_CASE("uniform sigma rescaling leaves the minimizer alone") {
  const std::vector<double> x{0.1, 0.2, 0.3, 0.5};
  const std::vector<double> y{1.05, 0.98, 1.21, 1.40};
  std::vector<double> sigma{0.02, 0.05, 0.03, 0.04};

  const auto fit = weighted_linear_fit(x, y, sigma);
  for (double& s : sigma) s *= 10.0;
  const auto scaled = weighted_linear_fit(x, y, sigma);

  CHECK(scaled.intercept == doctest::Approx(fit.intercept).epsilon(1e-12));
  CHECK(scaled.slope == doctest::Approx(fit.slope).epsilon(1e-12));
  CHECK(scaled.intercept_error == doctest::Approx(10.0 * fit.intercept_error).epsilon(1e-12));
  CHECK(scaled.slope_error == doctest::Approx(10.0 * fit.slope_error).epsilon(1e-12));
  CHECK(scaled.chi_squared == doctest::Approx(fit.chi_squared / 100.0).epsilon(1e-12));
}

TEST_CASE("two points interpolate exactly, independent of weights") {
  const std::vector<double> x{1.0, 3.0};
  const std::vector<double> y{2.0, 8.0};
  const std::vector<double> sigma{0.1, 2.5};
  const auto fit = weighted_linear_fit(x, y, sigma);
  CHECK(fit.intercept == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(fit.slope == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(fit.chi_squared == doctest::Approx(0.0).scale(1.0).epsilon(1e-20));
}

TEST_CASE("degenerate fits are rejected") {
  const std::vector<double> same_x{1.0, 1.0, 1.0};
  const std::vector<double> y{1.0, 2.0, 3.0};
  const std::vector<double> sigma{0.1, 0.1, 0.1};
  CHECK_THROWS_AS(weighted_linear_fit(same_x, y, sigma), std::invalid_argument);

  const std::vector<double> x{1.0, 2.0, 3.0};
  const std::vector<double> bad_sigma{0.1, 0.0, 0.1};
  CHECK_THROWS_AS(weighted_linear_fit(x, y, bad_sigma), std::invalid_argument);
  CHECK_THROWS_AS(weighted_linear_fit(std::vector<double>{1.0}, std::vector<double>{1.0},
                                      std::vector<double>{0.1}),
                  std::invalid_argument);
}

TEST_CASE("reduced chi-squared averages to one for matching noise") {
  RandomStream rng(23);
  const std::vector<double> x{0.0, 1.0, 2.0, 3.0};
  const int trials = 2000;
  double chi2_sum = 0.0;
  for (int t = 0; t < trials; ++t) {
    std::vector<double> y(x.size());
    std::vector<double> sigma(x.size(), 1.0);
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = 0.7 + 0.4 * x[i] + normal(rng);
    chi2_sum += weighted_linear_fit(x, y, sigma).chi_squared / 2.0;  // dof = 2
  }
  CHECK(std::abs(chi2_sum / trials - 1.0) < 3.0 / std::sqrt(static_cast<double>(trials)));
}
