#pragma once

// Coot optimization algorithm (COA) for box-constrained minimization.
//
// RNG stream order for one run, all draws from a single Rng seeded with
// CootConfig::seed:
//   init:       N x D uniforms for positions (population order, dims inner),
//               then N_L draws for a partial Fisher-Yates leader selection.
//   iteration:  1 draw for the vector/scalar choice (rand < P), then the
//               angle R in [-1,1], step R1 in [0,1] and scale R3 in [0,1]
//               (D draws each when vector-valued, else 1 each);
//               per coot: 1 movement draw, plus D draws for the random
//               target when the random movement is taken.
// Leader updates consume no extra draws.

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "cootmv/errors.hpp"
#include "cootmv/rng.hpp"

namespace cootmv::coot {

using Position = std::vector<double>;
using Fitness = std::function<double(std::span<const double>)>;

struct SearchSpace {
  std::vector<double> lower;
  std::vector<double> upper;

  std::size_t dims() const noexcept { return lower.size(); }
  void validate() const;
  Position clamp(Position p) const;
  bool contains(std::span<const double> p) const;
};

struct CootConfig {
  int population = 10;
  int max_iters = 10;
  double leader_fraction = 0.1;
  double probability_p = 0.5;
  std::uint64_t seed = 1;
  // +inf marks an infeasible candidate instead of aborting the run. NaN and
  // -inf always abort.
  bool accept_positive_infinity = false;

  int leaders() const;
  void validate() const;
};

struct OptimizerState {
  std::vector<Position> coot_positions;
  std::vector<double> coot_fitness;
  std::vector<Position> leader_positions;
  std::vector<double> leader_fitness;
  Position g_best;
  double g_best_fitness = 0.0;
  int iteration = 0;
};

struct ConvergenceTrace {
  std::vector<double> best_per_iteration;
};

struct RunResult {
  Position best_position;
  double best_fitness = 0.0;
  double initial_best_fitness = 0.0;
  ConvergenceTrace trace;
  std::size_t evaluations = 0;
};

class OptimizationError : public Error {
 public:
  OptimizationError(const std::string& what, Position position)
      : Error(ErrorKind::kInternal, what), position_(std::move(position)) {}
  const Position& position() const noexcept { return position_; }

 private:
  Position position_;
};

struct Coefficients {
  double a;
  double b;
};

// Per-iteration random factors. Each vector has length D; in scalar mode all
// entries are equal.
struct IterationDraws {
  std::vector<double> angle;  // R, uniform [-1, 1]
  std::vector<double> step;   // R1, uniform [0, 1]
  std::vector<double> scale;  // R3, uniform [0, 1]
  bool vector_valued = false;
};

OptimizerState init_population(const SearchSpace& space, const CootConfig& config, const Fitness& fitness,
                               Rng& rng);

Coefficients coefficients_ab(int iter, int max_iters);

IterationDraws draw_iteration(std::size_t dims, double probability_p, Rng& rng);

// pos + A * step .* (R - pos), R a fresh uniform point in the box.
Position random_movement(std::span<const double> pos, double a, std::span<const double> step,
                         const SearchSpace& space, Rng& rng);

Position chain_movement(std::span<const double> prev, std::span<const double> cur);

// 1-based, as in 1 + (i mod N_L).
std::size_t leader_index(std::size_t i, std::size_t n_leaders);

// B * R3 .* cos(2 pi R) .* (g_best - leader) + g_best, clamped.
Position leader_update(std::span<const double> leader, std::span<const double> g_best, double b,
                       const IterationDraws& draws, const SearchSpace& space);

// Same move anchored on the coot's assigned leader.
Position follow_leader(std::span<const double> coot, std::span<const double> leader, double b,
                       const IterationDraws& draws, const SearchSpace& space);

// One full sweep (coots then leaders). Returns the number of evaluations.
std::size_t step(OptimizerState& state, const SearchSpace& space, const CootConfig& config, const Fitness& fitness,
                 Rng& rng);

RunResult run(const Fitness& fitness, const SearchSpace& space, const CootConfig& config);

}  // namespace cootmv::coot
