#pragma once

#include "cootmv/image.hpp"

namespace cootmv {

inline constexpr double kSsiC1 = (0.01 * 255) * (0.01 * 255);
inline constexpr double kSsiC2 = (0.03 * 255) * (0.03 * 255);

// kSqrtMse reproduces the printed variant 10 log10(peak^2 / sqrt(MSE)).
enum class PsnrDenominator { kMse, kSqrtMse };

struct MetricReport {
  double ambe = 0.0;
  double psnr = 0.0;  // +inf for identical images
  double ssi = 0.0;
};

double ambe(const GrayImage& input, const GrayImage& output);
double mse(const GrayImage& input, const GrayImage& output);
double psnr(const GrayImage& input, const GrayImage& output, PsnrDenominator denom = PsnrDenominator::kMse);
// Whole-image (not windowed) structural similarity.
double ssi(const GrayImage& input, const GrayImage& output, double c1 = kSsiC1, double c2 = kSsiC2);

MetricReport evaluate_pair(const GrayImage& input, const GrayImage& output);

}  // namespace cootmv
