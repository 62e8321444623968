#pragma once

// Natural scene statistics shared by BRISQUE and NIQE: MSCN coefficients,
// pairwise products, and (A)GGD moment-matching fits.
//
// Feature order (36 entries, scale-major):
//   [0]  GGD shape            [1]  GGD variance           (MSCN)
//   [2..5]   H  product: AGGD shape, mean, left variance, right variance
//   [6..9]   V  product
//   [10..13] D1 product (i,j)*(i+1,j+1)
//   [14..17] D2 product (i,j)*(i+1,j-1)
//   [18..35] the same 18 at scale 2 (2x2 block mean, odd edges dropped)

#include <array>
#include <span>
#include <vector>

#include "cootmv/image.hpp"

namespace cootmv::nss {

inline constexpr int kFeatureCount = 36;
inline constexpr int kFeaturesPerScale = 18;
inline constexpr std::size_t kMinFitSamples = 16;
inline constexpr double kShapeMin = 0.2;
inline constexpr double kShapeMax = 10.0;

using FeatureVector = std::array<double, kFeatureCount>;

// Real-valued row-major field.
struct Plane {
  int width = 0;
  int height = 0;
  std::vector<double> values;

  Plane() = default;
  Plane(int w, int h, double fill = 0.0) : width(w), height(h), values(static_cast<std::size_t>(w) * h, fill) {}

  double at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
  double& at(int x, int y) { return values[static_cast<std::size_t>(y) * width + x]; }

  Plane crop(int x0, int y0, int w, int h) const;
};

using MscnField = Plane;

Plane to_plane(const GrayImage& img);

struct GaussianWindow {
  int size = 7;
  double sigma = 7.0 / 6.0;

  // Normalized 1-D taps; the 2-D window is their outer product.
  std::vector<double> taps() const;
};

inline constexpr double kDefaultC = 1.0;

struct MscnResult {
  MscnField coefficients;
  Plane mu;
  Plane sigma;
};

// (I - mu) / (sigma + c) with mu = GB * I and sigma^2 the window-weighted
// spread of the neighbourhood around that pixel's mu. Borders use
// half-sample symmetric extension.
MscnResult mscn_fields(const Plane& plane, double c = kDefaultC, const GaussianWindow& window = {});
MscnField mscn(const GrayImage& img, double c = kDefaultC, const GaussianWindow& window = {});

// H, V, D1, D2 products; output dims shrink by the shift.
std::array<MscnField, 4> pairwise_products(const MscnField& field);

Plane downsample2(const Plane& plane);

struct GgdParams {
  double shape = 2.0;
  double variance = 0.0;
  bool degenerate = false;
};

struct AggdParams {
  double shape = 2.0;
  double mean = 0.0;
  double left_variance = 0.0;
  double right_variance = 0.0;
  bool degenerate = false;
};

// Throw MetricError for fewer than kMinFitSamples samples.
GgdParams fit_ggd(std::span<const double> samples);
AggdParams fit_aggd(std::span<const double> samples);

// No sample-count floor (small NIQE patches at scale 2); at least 1 sample.
GgdParams fit_ggd_unchecked(std::span<const double> samples);
AggdParams fit_aggd_unchecked(std::span<const double> samples);

// Shape b in [0.2, 10] whose Gamma(1/b) Gamma(3/b) / Gamma(2/b)^2 is nearest
// to `ratio` on a 0.001 grid.
double invert_gamma_ratio(double ratio);
double gamma_ratio(double shape);

// 18 features from one scale's MSCN field.
std::array<double, kFeaturesPerScale> scale_features(const MscnField& field, bool checked = true);

}  // namespace cootmv::nss
