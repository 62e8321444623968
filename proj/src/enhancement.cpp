#include "cootmv/enhancement.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cootmv/errors.hpp"

namespace cootmv {

void Partition::validate() const {
  if (!(0 <= k_h1 && k_h1 < k_h2 && k_h2 < k_h3 && k_h3 <= 255)) {
    throw ParameterError("partition must satisfy 0 <= k_h1 < k_h2 < k_h3 <= 255, got (" + std::to_string(k_h1) +
                         ", " + std::to_string(k_h2) + ", " + std::to_string(k_h3) + ")");
  }
}

namespace {

// Class weights and means come from exact integer counts and moments.
double class_variance(std::uint64_t n, std::uint64_t moment, std::uint64_t n0, std::uint64_t m0) {
  const double total = static_cast<double>(n);
  const double mu_t = static_cast<double>(moment) / total;
  const std::uint64_t n1 = n - n0;
  const std::uint64_t m1 = moment - m0;
  double var = 0.0;
  if (n0 > 0) {
    const double mu0 = static_cast<double>(m0) / static_cast<double>(n0);
    var += static_cast<double>(n0) / total * (mu0 - mu_t) * (mu0 - mu_t);
  }
  if (n1 > 0) {
    const double mu1 = static_cast<double>(m1) / static_cast<double>(n1);
    var += static_cast<double>(n1) / total * (mu1 - mu_t) * (mu1 - mu_t);
  }
  return var;
}

}  // namespace

double between_class_variance(const Histogram& hist, int lo, int hi, int k) {
  std::uint64_t n = 0, moment = 0, n0 = 0, m0 = 0;
  for (int i = lo; i <= hi; ++i) {
    n += hist.counts[i];
    moment += static_cast<std::uint64_t>(i) * hist.counts[i];
    if (i <= k) {
      n0 += hist.counts[i];
      m0 += static_cast<std::uint64_t>(i) * hist.counts[i];
    }
  }
  return n == 0 ? 0.0 : class_variance(n, moment, n0, m0);
}

int variance_split(const Histogram& hist, int lo, int hi) {
  if (lo < 0 || hi > 255 || lo >= hi) {
    throw SegmentationError("variance split needs 0 <= lo < hi <= 255, got [" + std::to_string(lo) + ", " +
                            std::to_string(hi) + "]");
  }
  std::uint64_t n = 0, moment = 0;
  for (int i = lo; i <= hi; ++i) {
    n += hist.counts[i];
    moment += static_cast<std::uint64_t>(i) * hist.counts[i];
  }
  if (n == 0) {
    throw SegmentationError("empty histogram range [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }

  std::vector<double> sigma(static_cast<std::size_t>(hi - lo), 0.0);
  std::uint64_t n0 = 0, m0 = 0;
  for (int k = lo; k < hi; ++k) {
    n0 += hist.counts[k];
    m0 += static_cast<std::uint64_t>(k) * hist.counts[k];
    sigma[static_cast<std::size_t>(k - lo)] = class_variance(n, moment, n0, m0);
  }
  const double best = *std::max_element(sigma.begin(), sigma.end());
  const double floor = best - 1e-12 * best;
  for (std::size_t i = 0; i < sigma.size(); ++i)
    if (sigma[i] >= floor) return lo + static_cast<int>(i);
  return lo;
}

Partition mvsihe_partition(const Histogram& hist) {
  const int occupied = hist.occupied_bins();
  if (occupied < 4) {
    throw SegmentationError("histogram has " + std::to_string(occupied) +
                            " occupied bins; four segments need at least 4");
  }
  Partition p;
  p.k_h2 = variance_split(hist, 0, 255);
  if (p.k_h2 == 0) throw SegmentationError("lower half of the histogram collapses to a single level");
  p.k_h1 = variance_split(hist, 0, p.k_h2);
  p.k_h3 = p.k_h2 + 1 < 255 ? variance_split(hist, p.k_h2 + 1, 255) : 255;
  p.validate();
  return p;
}

Partition partition_from_reals(double k_h1, double k_h2, double k_h3) {
  if (!std::isfinite(k_h1) || !std::isfinite(k_h2) || !std::isfinite(k_h3))
    throw ParameterError("partition thresholds must be finite");
  Partition p{round_half_up(k_h1), round_half_up(k_h2), round_half_up(k_h3)};
  p.validate();
  return p;
}

double modify_pdf(double x) { return (std::exp(x) - std::exp(-x)) / (std::exp(x) + std::exp(-x)); }

std::array<SubHistogram, 4> build_sub_histograms(const Histogram& hist, const Partition& p) {
  p.validate();
  const std::array<int, 5> edges{-1, p.k_h1, p.k_h2, p.k_h3, 255};
  std::array<SubHistogram, 4> subs;
  for (int s = 0; s < 4; ++s) {
    SubHistogram& sub = subs[s];
    sub.lowb = edges[s] + 1;
    sub.upb = edges[s + 1];
    const int width = std::max(0, sub.upb - sub.lowb + 1);
    sub.pdf.assign(width, 0.0);
    sub.modified_pdf.assign(width, 0.0);
    sub.cdf.assign(width, 0.0);
    for (int v = sub.lowb; v <= sub.upb; ++v) sub.pixels += hist.counts[v];
    if (sub.pixels == 0) continue;
    double running = 0.0;
    for (int i = 0; i < width; ++i) {
      sub.pdf[i] = static_cast<double>(hist.counts[sub.lowb + i]) / static_cast<double>(sub.pixels);
      sub.modified_pdf[i] = modify_pdf(sub.pdf[i]);
      running += sub.modified_pdf[i];
      sub.cdf[i] = running;
    }
  }
  return subs;
}

TransferMap identity_map() {
  TransferMap map{};
  for (int v = 0; v < kLevels; ++v) map[v] = static_cast<std::uint8_t>(v);
  return map;
}

TransferMap build_transfer_map(const std::array<SubHistogram, 4>& subs) {
  TransferMap map = identity_map();
  for (const SubHistogram& sub : subs) {
    if (sub.empty()) continue;
    const double final_cdf = sub.cdf.back();
    const double span = sub.upb - sub.lowb;
    for (int v = sub.lowb; v <= sub.upb; ++v) {
      const double level = sub.lowb + span * (sub.cdf[v - sub.lowb] / final_cdf);
      map[v] = static_cast<std::uint8_t>(std::clamp(round_half_up(level), sub.lowb, sub.upb));
    }
  }
  return map;
}

GrayImage apply_map(const GrayImage& img, const TransferMap& map) {
  GrayImage out = img;
  for (auto& v : out.pixels()) v = map[v];
  return out;
}

GrayImage normalize_image(const GrayImage& img) {
  if (img.empty()) throw ParameterError("cannot normalize an empty image");
  const auto [lo_it, hi_it] = std::minmax_element(img.pixels().begin(), img.pixels().end());
  const std::uint32_t lo = *lo_it, hi = *hi_it;
  if (lo == hi) return img;
  const std::uint32_t range = hi - lo;
  GrayImage out = img;
  // (x - min) / (max - min) * 255, rounded half up in exact integer arithmetic.
  for (auto& v : out.pixels()) v = static_cast<std::uint8_t>((2u * 255u * (v - lo) + range) / (2u * range));
  return out;
}

GrayImage fuse(const GrayImage& normalized, const GrayImage& original, double delta) {
  if (!normalized.same_shape(original)) throw ParameterError("fuse: image dimensions differ");
  if (!(delta >= 0.0 && delta <= 1.0)) throw ParameterError("fuse: delta must lie in [0,1]");
  GrayImage out = original;
  auto n = normalized.pixels();
  auto o = out.pixels();
  for (std::size_t i = 0; i < o.size(); ++i) {
    const double v = delta * n[i] + (1.0 - delta) * o[i];
    o[i] = static_cast<std::uint8_t>(std::clamp(round_half_up(v), 0, 255));
  }
  return out;
}

GrayImage mvsihe_enhance(const GrayImage& img, const EnhancementParams& params) {
  if (img.empty()) throw ParameterError("cannot enhance an empty image");
  if (!(params.delta >= 0.0 && params.delta <= 1.0)) throw ParameterError("delta must lie in [0,1]");
  const Histogram hist = compute_histogram(img);
  const Partition partition = params.partition ? *params.partition : mvsihe_partition(hist);
  const auto subs = build_sub_histograms(hist, partition);
  const GrayImage equalized = apply_map(img, build_transfer_map(subs));
  return fuse(normalize_image(equalized), img, params.delta);
}

}  // namespace cootmv
