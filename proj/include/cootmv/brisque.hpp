#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "cootmv/image.hpp"
#include "cootmv/nss.hpp"

namespace cootmv::brisque {

using nss::FeatureVector;

inline constexpr int kMinSide = 32;

// Pretrained epsilon-SVR with an RBF kernel. Features are min-max scaled to
// [-1, 1] per dimension before the kernel expansion.
struct SvrModel {
  double gamma = 0.0;
  double bias = 0.0;
  double score_lo = 0.0;
  double score_hi = 100.0;
  std::vector<std::array<double, 2>> scale;  // per feature (min, max)
  std::vector<FeatureVector> support_vectors;  // already in scaled space
  std::vector<double> coefficients;

  void validate() const;
};

// Text format:
//   svrmodel v1
//   gamma <g>
//   bias <b>
//   range <lo> <hi>
//   scale <min_0> <max_0> ... <min_35> <max_35>
//   <36 features> <coefficient>      (one line per support vector)
SvrModel load_svr_model(const std::filesystem::path& path);
SvrModel read_svr_model(std::istream& in);
void save_svr_model(const SvrModel& model, const std::filesystem::path& path);
void write_svr_model(const SvrModel& model, std::ostream& out);

FeatureVector brisque_features(const GrayImage& img);

// Model-space feature scaling, exposed for tests.
FeatureVector scale_features(const FeatureVector& features, const SvrModel& model);

double brisque_score(std::span<const double> features, const SvrModel& model);
double brisque_score(const GrayImage& img, const SvrModel& model);

}  // namespace cootmv::brisque
