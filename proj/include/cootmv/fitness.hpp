#pragma once

#include <optional>
#include <string>

#include "cootmv/brisque.hpp"
#include "cootmv/image.hpp"
#include "cootmv/niqe.hpp"

namespace cootmv {

enum class FitnessMode { kBrisqueNiqe, kNiqeOnly };

std::string to_string(FitnessMode mode);
FitnessMode parse_fitness_mode(const std::string& text);

// BRISQUE(I) * NIQE(I); lower is better.
double fitness(const GrayImage& img, const brisque::SvrModel& svr, const niqe::NiqeModel& niqe);

// Immutable scorer bundling the loaded models for one fitness mode.
class QualityFitness {
 public:
  QualityFitness(niqe::NiqeModel niqe, std::optional<brisque::SvrModel> svr);

  FitnessMode mode() const noexcept { return svr_ ? FitnessMode::kBrisqueNiqe : FitnessMode::kNiqeOnly; }
  double operator()(const GrayImage& img) const;

  const niqe::NiqeModel& niqe_model() const noexcept { return niqe_; }
  const std::optional<brisque::SvrModel>& svr_model() const noexcept { return svr_; }

 private:
  niqe::NiqeModel niqe_;
  std::optional<brisque::SvrModel> svr_;
};

}  // namespace cootmv
