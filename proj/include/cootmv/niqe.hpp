#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "cootmv/image.hpp"
#include "cootmv/nss.hpp"

namespace cootmv::niqe {

using nss::FeatureVector;

inline constexpr int kDefaultPatchSize = 96;
inline constexpr double kDefaultThreshold = 0.75;
inline constexpr int kMinPatchSize = 8;
inline constexpr std::size_t kMinTrainingVectors = nss::kFeatureCount + 1;
inline constexpr double kEigenFloor = 1e-10;

// Multivariate Gaussian fitted to pristine patch features.
struct NiqeModel {
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(nss::kFeatureCount);
  Eigen::MatrixXd covariance = Eigen::MatrixXd::Zero(nss::kFeatureCount, nss::kFeatureCount);
  int patch_size = kDefaultPatchSize;
  double threshold = kDefaultThreshold;
  std::size_t training_vectors = 0;  // not serialized

  void validate() const;
  bool degenerate() const { return covariance.isZero(0.0); }
};

struct Mvg {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
};

// Sample mean and covariance (n - 1 denominator, zero for n == 1), symmetrized.
Mvg estimate_mvg(const std::vector<FeatureVector>& features);

// Patch-local 36-d features of every non-overlapping patch whose summed local
// deviation reaches `threshold` times the image maximum. Sharpness uses the
// scale-1 sigma field; features come from the whole-image MSCN fields.
std::vector<FeatureVector> niqe_patch_features(const GrayImage& img, int patch_size, double threshold);

// Pristine model from pooled patch features; needs at least 37 vectors.
NiqeModel fit_mvg(const std::vector<FeatureVector>& features, int patch_size = kDefaultPatchSize,
                  double threshold = kDefaultThreshold);

// sqrt(d^T ((S1 + S2) / 2)^+ d), pseudo-inverse via eigendecomposition with
// eigenvalues at or below kEigenFloor dropped.
double mvg_distance(const Eigen::VectorXd& mean1, const Eigen::MatrixXd& cov1, const Eigen::VectorXd& mean2,
                    const Eigen::MatrixXd& cov2);

struct NiqeEvaluation {
  double score = 0.0;
  int patch_size = 0;
  bool patch_fallback = false;  // image smaller than the model patch
  std::size_t patches = 0;
};

// Test images use every patch (no sharpness selection), as in the reference
// NIQE; blank images are rejected.
NiqeEvaluation niqe_evaluate(const GrayImage& img, const NiqeModel& model);
double niqe_score(const GrayImage& img, const NiqeModel& model);

// Text format:
//   niqemodel v1
//   patch_size <p>
//   threshold <t>
//   mean <36 values>
//   covariance
//   <36 rows of 36 values>
NiqeModel load_niqe_model(const std::filesystem::path& path);
NiqeModel read_niqe_model(std::istream& in);
void save_niqe_model(const NiqeModel& model, const std::filesystem::path& path);
void write_niqe_model(const NiqeModel& model, std::ostream& out);

}  // namespace cootmv::niqe
