#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <vector>

#include "cootmv/image.hpp"

namespace cootmv {

// Thresholds splitting [0,255] into [0,k1], [k1+1,k2], [k2+1,k3], [k3+1,255].
struct Partition {
  int k_h1 = 0;
  int k_h2 = 0;
  int k_h3 = 0;

  void validate() const;
  friend bool operator==(const Partition&, const Partition&) = default;
};

struct SubHistogram {
  int lowb = 0;
  int upb = -1;  // upb < lowb only for the zero-width segment left when k_h3 == 255
  std::uint64_t pixels = 0;
  std::vector<double> pdf;           // indexed from lowb
  std::vector<double> modified_pdf;  // tanh(pdf)
  std::vector<double> cdf;           // running sum of modified_pdf

  bool empty() const noexcept { return pixels == 0; }
};

using TransferMap = std::array<std::uint8_t, kLevels>;

struct EnhancementParams {
  double delta = 0.6;
  std::optional<Partition> partition;  // nullopt: derive by variance maximization
};

// Round half up; the only quantization rule used by the pipeline.
inline int round_half_up(double x) { return static_cast<int>(std::floor(x + 0.5)); }

// Between-class variance omega0 (mu0 - muT)^2 + omega1 (mu1 - muT)^2 for the
// split {lo..k} | {k+1..hi}. Empty classes contribute 0.
double between_class_variance(const Histogram& hist, int lo, int hi, int k);

// argmax over k in [lo, hi-1]; ties (relative 1e-12) resolve to the smallest k.
int variance_split(const Histogram& hist, int lo, int hi);

Partition mvsihe_partition(const Histogram& hist);

// Injected partitions arrive as reals from the optimizer.
Partition partition_from_reals(double k_h1, double k_h2, double k_h3);

double modify_pdf(double pdf_value);

std::array<SubHistogram, 4> build_sub_histograms(const Histogram& hist, const Partition& p);

TransferMap build_transfer_map(const std::array<SubHistogram, 4>& subs);

GrayImage apply_map(const GrayImage& img, const TransferMap& map);

GrayImage normalize_image(const GrayImage& img);

GrayImage fuse(const GrayImage& normalized, const GrayImage& original, double delta);

GrayImage mvsihe_enhance(const GrayImage& img, const EnhancementParams& params);

GrayImage classic_he(const GrayImage& img);
GrayImage bbhe(const GrayImage& img);
GrayImage dsihe(const GrayImage& img);

// Range-scoped equalization shared by the baselines: maps [lo,hi] onto itself
// using the segment CDF with its first occupied bin anchored at lo.
void equalize_range(const Histogram& hist, int lo, int hi, TransferMap& map);

TransferMap identity_map();

}  // namespace cootmv
