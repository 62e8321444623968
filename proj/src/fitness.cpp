#include "cootmv/fitness.hpp"

#include "cootmv/errors.hpp"

namespace cootmv {

std::string to_string(FitnessMode mode) {
  return mode == FitnessMode::kNiqeOnly ? "niqe" : "brisque-niqe";
}

FitnessMode parse_fitness_mode(const std::string& text) {
  if (text == "niqe" || text == "niqe_only") return FitnessMode::kNiqeOnly;
  if (text == "brisque-niqe" || text == "brisque_niqe") return FitnessMode::kBrisqueNiqe;
  throw ConfigError("unknown fitness mode '" + text + "' (expected niqe or brisque-niqe)");
}

double fitness(const GrayImage& img, const brisque::SvrModel& svr, const niqe::NiqeModel& niqe) {
  return brisque::brisque_score(img, svr) * niqe::niqe_score(img, niqe);
}

QualityFitness::QualityFitness(niqe::NiqeModel niqe, std::optional<brisque::SvrModel> svr)
    : niqe_(std::move(niqe)), svr_(std::move(svr)) {
  niqe_.validate();
  if (svr_) svr_->validate();
}

double QualityFitness::operator()(const GrayImage& img) const {
  const double n = niqe::niqe_score(img, niqe_);
  if (!svr_) return n;
  return brisque::brisque_score(img, *svr_) * n;
}

}  // namespace cootmv
