#include "cootmv/nss.hpp"

#include <algorithm>
#include <cmath>

#include "cootmv/errors.hpp"

namespace cootmv::nss {

Plane Plane::crop(int x0, int y0, int w, int h) const {
  Plane out(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) out.at(x, y) = at(x0 + x, y0 + y);
  return out;
}

Plane to_plane(const GrayImage& img) {
  Plane p(img.width(), img.height());
  auto px = img.pixels();
  std::copy(px.begin(), px.end(), p.values.begin());
  return p;
}

std::vector<double> GaussianWindow::taps() const {
  if (size < 1 || size % 2 == 0 || !(sigma > 0)) throw ParameterError("Gaussian window needs odd size and sigma > 0");
  const int r = size / 2;
  std::vector<double> k(static_cast<std::size_t>(size));
  double sum = 0;
  for (int i = -r; i <= r; ++i) {
    k[i + r] = std::exp(-0.5 * i * i / (sigma * sigma));
    sum += k[i + r];
  }
  for (auto& v : k) v /= sum;
  return k;
}

namespace {

// Half-sample symmetric extension: ... c b a | a b c ... | c b a ...
int reflect(int i, int n) {
  const int period = 2 * n;
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - 1 - i;
}

struct GammaTable {
  std::vector<double> shapes;
  std::vector<double> ratios;  // strictly decreasing in shape

  GammaTable() {
    const int n = static_cast<int>(std::lround((kShapeMax - kShapeMin) / 0.001)) + 1;
    shapes.reserve(n);
    ratios.reserve(n);
    for (int i = 0; i < n; ++i) {
      const double b = kShapeMin + 0.001 * i;
      shapes.push_back(b);
      ratios.push_back(gamma_ratio(b));
    }
  }
};

const GammaTable& gamma_table() {
  static const GammaTable table;
  return table;
}

}  // namespace

double gamma_ratio(double shape) {
  return std::exp(std::lgamma(1.0 / shape) + std::lgamma(3.0 / shape) - 2.0 * std::lgamma(2.0 / shape));
}

double invert_gamma_ratio(double ratio) {
  const auto& t = gamma_table();
  // ratios decrease with shape; search the reversed order.
  auto it = std::lower_bound(t.ratios.begin(), t.ratios.end(), ratio, [](double a, double b) { return a > b; });
  if (it == t.ratios.begin()) return t.shapes.front();
  if (it == t.ratios.end()) return t.shapes.back();
  const auto hi = static_cast<std::size_t>(it - t.ratios.begin());
  const std::size_t lo = hi - 1;
  return std::abs(t.ratios[lo] - ratio) <= std::abs(t.ratios[hi] - ratio) ? t.shapes[lo] : t.shapes[hi];
}

MscnResult mscn_fields(const Plane& plane, double c, const GaussianWindow& window) {
  if (!(c > 0)) throw ParameterError("MSCN constant must be positive");
  const auto taps = window.taps();
  const int r = static_cast<int>(taps.size()) / 2;
  const int n = 2 * r + 1;
  const int w = plane.width, h = plane.height;
  const int pw = w + 2 * r;
  std::vector<double> padded(static_cast<std::size_t>(pw) * (h + 2 * r));
  for (int y = 0; y < h + 2 * r; ++y)
    for (int x = 0; x < pw; ++x)
      padded[static_cast<std::size_t>(y) * pw + x] = plane.at(reflect(x - r, w), reflect(y - r, h));
  std::vector<double> weights(static_cast<std::size_t>(n * n));
  for (int dy = 0; dy < n; ++dy)
    for (int dx = 0; dx < n; ++dx) weights[dy * n + dx] = taps[dy] * taps[dx];

  MscnResult out;
  out.mu = Plane(w, h);
  out.sigma = Plane(w, h);
  out.coefficients = Plane(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double center = plane.at(x, y);
      const double* base = padded.data() + static_cast<std::size_t>(y) * pw + x;
      // Offsets from the centre keep the mean of a flat neighbourhood exact.
      double shift = 0;
      for (int dy = 0; dy < n; ++dy) {
        const double* row = base + static_cast<std::size_t>(dy) * pw;
        const double* wr = weights.data() + dy * n;
        for (int dx = 0; dx < n; ++dx) shift += wr[dx] * (row[dx] - center);
      }
      const double mu = center + shift;
      double var = 0;
      for (int dy = 0; dy < n; ++dy) {
        const double* row = base + static_cast<std::size_t>(dy) * pw;
        const double* wr = weights.data() + dy * n;
        for (int dx = 0; dx < n; ++dx) {
          const double d = row[dx] - mu;
          var += wr[dx] * d * d;
        }
      }
      out.mu.at(x, y) = mu;
      out.sigma.at(x, y) = std::sqrt(var);
      out.coefficients.at(x, y) = -shift / (out.sigma.at(x, y) + c);
    }
  }
  return out;
}

MscnField mscn(const GrayImage& img, double c, const GaussianWindow& window) {
  return mscn_fields(to_plane(img), c, window).coefficients;
}

std::array<MscnField, 4> pairwise_products(const MscnField& f) {
  if (f.width < 2 || f.height < 2) throw MetricError("pairwise products need a field of at least 2x2");
  const int w = f.width, h = f.height;
  std::array<MscnField, 4> out{Plane(w - 1, h), Plane(w, h - 1), Plane(w - 1, h - 1), Plane(w - 1, h - 1)};
  for (int y = 0; y < h; ++y)
    for (int x = 0; x + 1 < w; ++x) out[0].at(x, y) = f.at(x, y) * f.at(x + 1, y);
  for (int y = 0; y + 1 < h; ++y)
    for (int x = 0; x < w; ++x) out[1].at(x, y) = f.at(x, y) * f.at(x, y + 1);
  for (int y = 0; y + 1 < h; ++y)
    for (int x = 0; x + 1 < w; ++x) out[2].at(x, y) = f.at(x, y) * f.at(x + 1, y + 1);
  for (int y = 0; y + 1 < h; ++y)
    for (int x = 1; x < w; ++x) out[3].at(x - 1, y) = f.at(x, y) * f.at(x - 1, y + 1);
  return out;
}

Plane downsample2(const Plane& p) {
  const int w = p.width / 2, h = p.height / 2;
  if (w < 1 || h < 1) throw MetricError("field too small to downsample");
  Plane out(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      out.at(x, y) = 0.25 * (p.at(2 * x, 2 * y) + p.at(2 * x + 1, 2 * y) + p.at(2 * x, 2 * y + 1) +
                             p.at(2 * x + 1, 2 * y + 1));
  return out;
}

GgdParams fit_ggd_unchecked(std::span<const double> samples) {
  if (samples.empty()) throw MetricError("GGD fit needs samples");
  double sum_abs = 0, sum_sq = 0;
  for (double x : samples) {
    sum_abs += std::abs(x);
    sum_sq += x * x;
  }
  const double n = static_cast<double>(samples.size());
  GgdParams g;
  g.variance = sum_sq / n;
  if (sum_sq == 0.0) {
    g.degenerate = true;
    return g;
  }
  const double mean_abs = sum_abs / n;
  g.shape = invert_gamma_ratio(g.variance / (mean_abs * mean_abs));
  return g;
}

AggdParams fit_aggd_unchecked(std::span<const double> samples) {
  if (samples.empty()) throw MetricError("AGGD fit needs samples");
  std::size_t n_left = 0, n_right = 0;
  double sq_left = 0, sq_right = 0, sum_abs = 0;
  for (double x : samples) {
    if (x < 0) {
      ++n_left;
      sq_left += x * x;
      sum_abs -= x;
    } else if (x > 0) {
      ++n_right;
      sq_right += x * x;
      sum_abs += x;
    }
  }
  AggdParams a;
  a.left_variance = n_left ? sq_left / static_cast<double>(n_left) : 0.0;
  a.right_variance = n_right ? sq_right / static_cast<double>(n_right) : 0.0;
  a.degenerate = n_left == 0 || n_right == 0;
  if (n_left == 0 && n_right == 0) return a;

  const double n = static_cast<double>(samples.size());
  const double left_sigma = std::sqrt(a.left_variance);
  const double right_sigma = std::sqrt(a.right_variance);
  // Symmetric in gamma <-> 1/gamma, so the smaller/larger ratio stays finite.
  const double g = std::min(left_sigma, right_sigma) / std::max(left_sigma, right_sigma);
  const double mean_abs = sum_abs / n;
  const double r_hat = mean_abs * mean_abs / ((sq_left + sq_right) / n);
  const double r_norm = r_hat * (g * g * g + 1) * (g + 1) / ((g * g + 1) * (g * g + 1));
  a.shape = invert_gamma_ratio(1.0 / r_norm);

  const double scale = std::sqrt(std::exp(std::lgamma(1.0 / a.shape) - std::lgamma(3.0 / a.shape)));
  a.mean = (right_sigma - left_sigma) * scale * std::exp(std::lgamma(2.0 / a.shape) - std::lgamma(1.0 / a.shape));
  return a;
}

GgdParams fit_ggd(std::span<const double> samples) {
  if (samples.size() < kMinFitSamples) throw MetricError("GGD fit needs at least 16 samples");
  return fit_ggd_unchecked(samples);
}

AggdParams fit_aggd(std::span<const double> samples) {
  if (samples.size() < kMinFitSamples) throw MetricError("AGGD fit needs at least 16 samples");
  return fit_aggd_unchecked(samples);
}

std::array<double, kFeaturesPerScale> scale_features(const MscnField& field, bool checked) {
  std::array<double, kFeaturesPerScale> f{};
  const GgdParams g = checked ? fit_ggd(field.values) : fit_ggd_unchecked(field.values);
  f[0] = g.shape;
  f[1] = g.variance;
  const auto products = pairwise_products(field);
  for (std::size_t o = 0; o < products.size(); ++o) {
    const AggdParams a = checked ? fit_aggd(products[o].values) : fit_aggd_unchecked(products[o].values);
    f[2 + 4 * o] = a.shape;
    f[3 + 4 * o] = a.mean;
    f[4 + 4 * o] = a.left_variance;
    f[5 + 4 * o] = a.right_variance;
  }
  return f;
}

}  // namespace cootmv::nss
