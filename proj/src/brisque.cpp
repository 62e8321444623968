#include "cootmv/brisque.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "cootmv/errors.hpp"
#include "cootmv/text_io.hpp"

namespace cootmv::brisque {

void SvrModel::validate() const {
  if (!std::isfinite(gamma) || gamma < 0) throw ModelError("SVR gamma must be finite and non-negative");
  if (scale.size() != static_cast<std::size_t>(nss::kFeatureCount))
    throw ModelError("SVR scale table must have 36 (min, max) pairs");
  if (support_vectors.size() != coefficients.size())
    throw ModelError("SVR support vector / coefficient count mismatch");
  if (!(score_lo <= score_hi)) throw ModelError("SVR score range is inverted");
}

SvrModel read_svr_model(std::istream& in) {
  text_io::LineReader reader(in, "svr model");
  reader.expect_header("svrmodel v1");
  SvrModel m;
  m.gamma = reader.keyed_values("gamma", 1)[0];
  m.bias = reader.keyed_values("bias", 1)[0];
  const auto range = reader.keyed_values("range", 2);
  m.score_lo = range[0];
  m.score_hi = range[1];
  const auto scale = reader.keyed_values("scale", 2 * nss::kFeatureCount);
  for (int i = 0; i < nss::kFeatureCount; ++i) m.scale.push_back({scale[2 * i], scale[2 * i + 1]});
  std::vector<double> row;
  while (reader.next_numbers(row)) {
    if (row.size() != static_cast<std::size_t>(nss::kFeatureCount + 1))
      reader.fail("support vector line needs 37 values, got " + std::to_string(row.size()));
    FeatureVector sv{};
    std::copy(row.begin(), row.begin() + nss::kFeatureCount, sv.begin());
    m.support_vectors.push_back(sv);
    m.coefficients.push_back(row.back());
  }
  m.validate();
  return m;
}

SvrModel load_svr_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ModelError("cannot open SVR model " + path.string());
  return read_svr_model(in);
}

void write_svr_model(const SvrModel& model, std::ostream& out) {
  model.validate();
  using text_io::format_double;
  out << "svrmodel v1\n";
  out << "gamma " << format_double(model.gamma) << "\n";
  out << "bias " << format_double(model.bias) << "\n";
  out << "range " << format_double(model.score_lo) << " " << format_double(model.score_hi) << "\n";
  out << "scale";
  for (const auto& [lo, hi] : model.scale) out << " " << format_double(lo) << " " << format_double(hi);
  out << "\n";
  for (std::size_t i = 0; i < model.support_vectors.size(); ++i) {
    for (double v : model.support_vectors[i]) out << format_double(v) << " ";
    out << format_double(model.coefficients[i]) << "\n";
  }
}

void save_svr_model(const SvrModel& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  write_svr_model(model, out);
  if (!out) throw IoError("write failed: " + path.string());
}

FeatureVector brisque_features(const GrayImage& img) {
  if (img.width() < kMinSide || img.height() < kMinSide)
    throw MetricError("BRISQUE needs an image of at least 32x32");
  FeatureVector out{};
  nss::Plane plane = nss::to_plane(img);
  for (int scale = 0; scale < 2; ++scale) {
    if (scale == 1) plane = nss::downsample2(plane);
    const auto f = nss::scale_features(nss::mscn_fields(plane).coefficients);
    std::copy(f.begin(), f.end(), out.begin() + scale * nss::kFeaturesPerScale);
  }
  return out;
}

FeatureVector scale_features(const FeatureVector& features, const SvrModel& model) {
  FeatureVector out{};
  for (int i = 0; i < nss::kFeatureCount; ++i) {
    const auto [lo, hi] = model.scale[i];
    out[i] = hi > lo ? -1.0 + 2.0 * (features[i] - lo) / (hi - lo) : 0.0;
  }
  return out;
}

double brisque_score(std::span<const double> features, const SvrModel& model) {
  model.validate();
  if (features.size() != static_cast<std::size_t>(nss::kFeatureCount))
    throw ModelError("BRISQUE feature length " + std::to_string(features.size()) + " does not match model (36)");
  FeatureVector raw{};
  std::copy(features.begin(), features.end(), raw.begin());
  const FeatureVector x = scale_features(raw, model);
  double score = model.bias;
  for (std::size_t i = 0; i < model.support_vectors.size(); ++i) {
    double dist2 = 0;
    for (int d = 0; d < nss::kFeatureCount; ++d) {
      const double diff = x[d] - model.support_vectors[i][d];
      dist2 += diff * diff;
    }
    score += model.coefficients[i] * std::exp(-model.gamma * dist2);
  }
  return std::clamp(score, model.score_lo, model.score_hi);
}

double brisque_score(const GrayImage& img, const SvrModel& model) {
  return brisque_score(brisque_features(img), model);
}

}  // namespace cootmv::brisque
