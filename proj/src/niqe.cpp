#include "cootmv/niqe.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "cootmv/errors.hpp"
#include "cootmv/text_io.hpp"

namespace cootmv::niqe {

void NiqeModel::validate() const {
  if (mean.size() != nss::kFeatureCount || covariance.rows() != nss::kFeatureCount ||
      covariance.cols() != nss::kFeatureCount)
    throw ModelError("NIQE model must hold a 36-d mean and a 36x36 covariance");
  if (patch_size < kMinPatchSize || patch_size % 2 != 0) throw ModelError("NIQE patch size must be even and >= 8");
  if (!(threshold >= 0.0 && threshold <= 1.0)) throw ModelError("NIQE threshold must lie in [0,1]");
  if (!mean.allFinite() || !covariance.allFinite()) throw ModelError("NIQE model has non-finite entries");
  if ((covariance - covariance.transpose()).cwiseAbs().maxCoeff() > 1e-9)
    throw ModelError("NIQE covariance is not symmetric");
}

Mvg estimate_mvg(const std::vector<FeatureVector>& features) {
  if (features.empty()) throw MetricError("cannot fit a Gaussian to zero feature vectors");
  const auto n = static_cast<Eigen::Index>(features.size());
  Eigen::MatrixXd x(n, nss::kFeatureCount);
  for (Eigen::Index i = 0; i < n; ++i)
    for (int d = 0; d < nss::kFeatureCount; ++d) x(i, d) = features[static_cast<std::size_t>(i)][d];
  Mvg mvg;
  mvg.mean = x.colwise().mean().transpose();
  const Eigen::MatrixXd centered = x.rowwise() - mvg.mean.transpose();
  if (n > 1) {
    mvg.covariance = centered.transpose() * centered / static_cast<double>(n - 1);
    mvg.covariance = 0.5 * (mvg.covariance + mvg.covariance.transpose()).eval();
  } else {
    mvg.covariance = Eigen::MatrixXd::Zero(nss::kFeatureCount, nss::kFeatureCount);
  }
  return mvg;
}

std::vector<FeatureVector> niqe_patch_features(const GrayImage& img, int patch_size, double threshold) {
  if (patch_size < kMinPatchSize || patch_size % 2 != 0) throw MetricError("NIQE patch size must be even and >= 8");
  if (img.width() < patch_size || img.height() < patch_size)
    throw MetricError("image smaller than one " + std::to_string(patch_size) + "px patch");
  const nss::Plane plane = nss::to_plane(img);
  const nss::MscnResult fine = nss::mscn_fields(plane);
  const nss::MscnResult coarse = nss::mscn_fields(nss::downsample2(plane));

  const int cols = img.width() / patch_size;
  const int rows = img.height() / patch_size;
  std::vector<double> sharpness;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      double s = 0;
      for (int y = r * patch_size; y < (r + 1) * patch_size; ++y)
        for (int x = c * patch_size; x < (c + 1) * patch_size; ++x) s += fine.sigma.at(x, y);
      sharpness.push_back(s);
    }
  }
  const double peak = *std::max_element(sharpness.begin(), sharpness.end());
  if (!(peak > 0)) throw MetricError("blank image: no patch has local deviation");

  std::vector<FeatureVector> out;
  const int half = patch_size / 2;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (sharpness[static_cast<std::size_t>(r * cols + c)] < threshold * peak) continue;
      FeatureVector f{};
      const auto s1 = nss::scale_features(
          fine.coefficients.crop(c * patch_size, r * patch_size, patch_size, patch_size), false);
      const auto s2 = nss::scale_features(coarse.coefficients.crop(c * half, r * half, half, half), false);
      std::copy(s1.begin(), s1.end(), f.begin());
      std::copy(s2.begin(), s2.end(), f.begin() + nss::kFeaturesPerScale);
      out.push_back(f);
    }
  }
  if (out.empty()) throw MetricError("no NIQE patch survived sharpness selection");
  return out;
}

NiqeModel fit_mvg(const std::vector<FeatureVector>& features, int patch_size, double threshold) {
  if (features.size() < kMinTrainingVectors) {
    throw TrainingError("NIQE training needs at least " + std::to_string(kMinTrainingVectors) +
                        " patch feature vectors, got " + std::to_string(features.size()) + " (short by " +
                        std::to_string(kMinTrainingVectors - features.size()) + ")");
  }
  const Mvg mvg = estimate_mvg(features);
  NiqeModel m;
  m.mean = mvg.mean;
  m.covariance = mvg.covariance;
  m.patch_size = patch_size;
  m.threshold = threshold;
  m.training_vectors = features.size();
  m.validate();
  return m;
}

double mvg_distance(const Eigen::VectorXd& mean1, const Eigen::MatrixXd& cov1, const Eigen::VectorXd& mean2,
                    const Eigen::MatrixXd& cov2) {
  const Eigen::MatrixXd pooled = 0.5 * (cov1 + cov2);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (pooled + pooled.transpose()));
  if (eig.info() != Eigen::Success) throw MetricError("eigendecomposition of pooled covariance failed");
  const Eigen::VectorXd diff = mean1 - mean2;
  const Eigen::VectorXd proj = eig.eigenvectors().transpose() * diff;
  double q = 0;
  for (Eigen::Index i = 0; i < proj.size(); ++i) {
    const double lambda = eig.eigenvalues()(i);
    if (lambda > kEigenFloor) q += proj(i) * proj(i) / lambda;
  }
  return std::sqrt(std::max(0.0, q));
}

NiqeEvaluation niqe_evaluate(const GrayImage& img, const NiqeModel& model) {
  model.validate();
  NiqeEvaluation ev;
  ev.patch_size = model.patch_size;
  const int side = std::min(img.width(), img.height());
  if (side < model.patch_size) {
    ev.patch_size = side / 8 * 8;
    ev.patch_fallback = true;
    if (ev.patch_size < kMinPatchSize) throw MetricError("image too small for NIQE (needs at least 8x8)");
  }
  const auto features = niqe_patch_features(img, ev.patch_size, 0.0);
  ev.patches = features.size();
  const Mvg mvg = estimate_mvg(features);
  ev.score = mvg_distance(model.mean, model.covariance, mvg.mean, mvg.covariance);
  return ev;
}

double niqe_score(const GrayImage& img, const NiqeModel& model) { return niqe_evaluate(img, model).score; }

NiqeModel read_niqe_model(std::istream& in) {
  text_io::LineReader reader(in, "niqe model");
  reader.expect_header("niqemodel v1");
  NiqeModel m;
  const double patch = reader.keyed_values("patch_size", 1)[0];
  if (patch != std::floor(patch)) reader.fail("patch_size must be an integer");
  m.patch_size = static_cast<int>(patch);
  m.threshold = reader.keyed_values("threshold", 1)[0];
  const auto mean = reader.keyed_values("mean", nss::kFeatureCount);
  for (int i = 0; i < nss::kFeatureCount; ++i) m.mean(i) = mean[i];
  reader.expect_keyword("covariance");
  std::vector<double> row;
  for (int r = 0; r < nss::kFeatureCount; ++r) {
    if (!reader.next_numbers(row)) reader.fail("covariance has only " + std::to_string(r) + " rows");
    if (row.size() != static_cast<std::size_t>(nss::kFeatureCount)) reader.fail("covariance row needs 36 values");
    for (int c = 0; c < nss::kFeatureCount; ++c) m.covariance(r, c) = row[c];
  }
  if (reader.next_numbers(row)) reader.fail("trailing data after covariance");
  m.validate();
  return m;
}

NiqeModel load_niqe_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ModelError("cannot open NIQE model " + path.string());
  return read_niqe_model(in);
}

void write_niqe_model(const NiqeModel& model, std::ostream& out) {
  model.validate();
  using text_io::format_double;
  out << "niqemodel v1\n";
  out << "patch_size " << model.patch_size << "\n";
  out << "threshold " << format_double(model.threshold) << "\n";
  out << "mean";
  for (int i = 0; i < nss::kFeatureCount; ++i) out << " " << format_double(model.mean(i));
  out << "\ncovariance\n";
  for (int r = 0; r < nss::kFeatureCount; ++r) {
    for (int c = 0; c < nss::kFeatureCount; ++c) out << (c ? " " : "") << format_double(model.covariance(r, c));
    out << "\n";
  }
}

void save_niqe_model(const NiqeModel& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  write_niqe_model(model, out);
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace cootmv::niqe
