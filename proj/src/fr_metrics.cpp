#include "cootmv/fr_metrics.hpp"

#include <cmath>
#include <limits>

#include "cootmv/errors.hpp"

namespace cootmv {

namespace {

void require_same_shape(const GrayImage& a, const GrayImage& b) {
  if (a.empty() || b.empty()) throw MetricError("metric on an empty image");
  if (!a.same_shape(b)) throw MetricError("metric inputs have different dimensions");
}

}  // namespace

double ambe(const GrayImage& input, const GrayImage& output) {
  require_same_shape(input, output);
  return std::abs(image_mean(input) - image_mean(output));
}

double mse(const GrayImage& input, const GrayImage& output) {
  require_same_shape(input, output);
  auto a = input.pixels();
  auto b = output.pixels();
  std::uint64_t sum = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const int d = static_cast<int>(a[i]) - static_cast<int>(b[i]);
    sum += static_cast<std::uint64_t>(d * d);
  }
  return static_cast<double>(sum) / static_cast<double>(a.size());
}

double psnr(const GrayImage& input, const GrayImage& output, PsnrDenominator denom) {
  const double e = mse(input, output);
  if (e == 0.0) return std::numeric_limits<double>::infinity();
  constexpr double peak2 = 255.0 * 255.0;  // (2^8 - 1)^2
  return 10.0 * std::log10(peak2 / (denom == PsnrDenominator::kMse ? e : std::sqrt(e)));
}

double ssi(const GrayImage& input, const GrayImage& output, double c1, double c2) {
  require_same_shape(input, output);
  if (!(c1 > 0 && c2 > 0)) throw MetricError("SSI constants must be positive");
  auto a = input.pixels();
  auto b = output.pixels();
  const double n = static_cast<double>(a.size());
  const double mu_a = image_mean(input);
  const double mu_b = image_mean(output);
  double var_a = 0, var_b = 0, cov = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - mu_a;
    const double db = b[i] - mu_b;
    var_a += da * da;
    var_b += db * db;
    cov += da * db;
  }
  var_a /= n;
  var_b /= n;
  cov /= n;
  return ((2 * mu_a * mu_b + c1) * (2 * cov + c2)) / ((mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2));
}

MetricReport evaluate_pair(const GrayImage& input, const GrayImage& output) {
  return {ambe(input, output), psnr(input, output), ssi(input, output)};
}

}  // namespace cootmv
