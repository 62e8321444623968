#include <cstdint>

#include "cootmv/enhancement.hpp"
#include "cootmv/errors.hpp"

namespace cootmv {

void equalize_range(const Histogram& hist, int lo, int hi, TransferMap& map) {
  if (lo > hi) return;
  std::uint64_t n = 0;
  int first = -1;
  for (int v = lo; v <= hi; ++v) {
    n += hist.counts[v];
    if (first < 0 && hist.counts[v] > 0) first = v;
  }
  if (first < 0 || hist.counts[first] == n) {
    for (int v = lo; v <= hi; ++v) map[v] = static_cast<std::uint8_t>(v);
    return;
  }
  const std::uint64_t c_min = hist.counts[first];
  const std::uint64_t denom = n - c_min;
  const std::uint64_t span = static_cast<std::uint64_t>(hi - lo);
  std::uint64_t cdf = 0;
  for (int v = lo; v <= hi; ++v) {
    cdf += hist.counts[v];
    const std::uint64_t above = cdf > c_min ? cdf - c_min : 0;
    // lo + round_half_up(span * above / denom), exact.
    map[v] = static_cast<std::uint8_t>(lo + (2 * span * above + denom) / (2 * denom));
  }
}

namespace {

GrayImage split_equalize(const GrayImage& img, const Histogram& hist, int split) {
  TransferMap map = identity_map();
  equalize_range(hist, 0, split, map);
  equalize_range(hist, split + 1, 255, map);
  return apply_map(img, map);
}

}  // namespace

GrayImage classic_he(const GrayImage& img) {
  if (img.empty()) throw ParameterError("cannot equalize an empty image");
  const Histogram hist = compute_histogram(img);
  TransferMap map = identity_map();
  equalize_range(hist, 0, 255, map);
  return apply_map(img, map);
}

GrayImage bbhe(const GrayImage& img) {
  if (img.empty()) throw ParameterError("cannot equalize an empty image");
  const int split = static_cast<int>(image_mean(img));
  return split_equalize(img, compute_histogram(img), split);
}

GrayImage dsihe(const GrayImage& img) {
  if (img.empty()) throw ParameterError("cannot equalize an empty image");
  const Histogram hist = compute_histogram(img);
  std::uint64_t cdf = 0;
  int median = 255;
  for (int v = 0; v < kLevels; ++v) {
    cdf += hist.counts[v];
    if (2 * cdf >= hist.total) {
      median = v;
      break;
    }
  }
  return split_equalize(img, hist, median);
}

}  // namespace cootmv
