#include "cootmv/coot.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

namespace cootmv::coot {

void SearchSpace::validate() const {
  if (lower.empty()) throw ParameterError("search space needs at least one dimension");
  if (lower.size() != upper.size()) throw ParameterError("lower/upper bound length mismatch");
  for (std::size_t d = 0; d < lower.size(); ++d) {
    if (!std::isfinite(lower[d]) || !std::isfinite(upper[d]) || lower[d] > upper[d]) {
      std::ostringstream os;
      os << "invalid bounds in dimension " << d << ": [" << lower[d] << ", " << upper[d] << "]";
      throw ParameterError(os.str());
    }
  }
}

Position SearchSpace::clamp(Position p) const {
  for (std::size_t d = 0; d < p.size(); ++d) p[d] = std::clamp(p[d], lower[d], upper[d]);
  return p;
}

bool SearchSpace::contains(std::span<const double> p) const {
  if (p.size() != dims()) return false;
  for (std::size_t d = 0; d < p.size(); ++d)
    if (!(p[d] >= lower[d] && p[d] <= upper[d])) return false;
  return true;
}

int CootConfig::leaders() const {
  // The small epsilon keeps 10 * 0.1 from rounding up to 2.
  return static_cast<int>(std::ceil(population * leader_fraction - 1e-9));
}

void CootConfig::validate() const {
  if (population < 2) throw ParameterError("population must be at least 2");
  if (max_iters < 1) throw ParameterError("max_iters must be at least 1");
  if (!(leader_fraction > 0.0 && leader_fraction < 1.0)) throw ParameterError("leader_fraction must lie in (0,1)");
  if (!(probability_p >= 0.0 && probability_p <= 1.0)) throw ParameterError("probability_p must lie in [0,1]");
  const int nl = leaders();
  if (nl < 1 || nl >= population) throw ParameterError("leader count must satisfy 1 <= N_L < N");
}

namespace {

double evaluate(const Fitness& fitness, const Position& pos, const CootConfig& config) {
  const double f = fitness(pos);
  if (std::isnan(f) || (std::isinf(f) && (f < 0 || !config.accept_positive_infinity))) {
    std::ostringstream os;
    os << "fitness returned non-finite value " << f << " at (";
    for (std::size_t d = 0; d < pos.size(); ++d) os << (d ? ", " : "") << pos[d];
    os << ")";
    throw OptimizationError(os.str(), pos);
  }
  return f;
}

std::vector<double> draw_vector(std::size_t dims, bool vector_valued, double lo, double hi, Rng& rng) {
  if (vector_valued) {
    std::vector<double> v(dims);
    for (auto& x : v) x = rng.uniform(lo, hi);
    return v;
  }
  return std::vector<double>(dims, rng.uniform(lo, hi));
}

Position anchored_move(std::span<const double> moving, std::span<const double> anchor, double b,
                       const IterationDraws& draws, const SearchSpace& space) {
  Position out(moving.size());
  for (std::size_t d = 0; d < out.size(); ++d) {
    out[d] = b * draws.scale[d] * std::cos(2.0 * std::numbers::pi * draws.angle[d]) * (anchor[d] - moving[d]) +
             anchor[d];
  }
  return space.clamp(std::move(out));
}

}  // namespace

OptimizerState init_population(const SearchSpace& space, const CootConfig& config, const Fitness& fitness,
                               Rng& rng) {
  space.validate();
  config.validate();
  const auto n = static_cast<std::size_t>(config.population);
  const auto n_leaders = static_cast<std::size_t>(config.leaders());
  const std::size_t dims = space.dims();

  std::vector<Position> pop(n, Position(dims));
  for (auto& p : pop)
    for (std::size_t d = 0; d < dims; ++d) p[d] = rng.uniform() * (space.upper[d] - space.lower[d]) + space.lower[d];

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t j = 0; j < n_leaders; ++j) std::swap(order[j], order[j + rng.index(n - j)]);
  std::vector<bool> is_leader(n, false);
  for (std::size_t j = 0; j < n_leaders; ++j) is_leader[order[j]] = true;

  std::vector<double> fit(n);
  for (std::size_t i = 0; i < n; ++i) fit[i] = evaluate(fitness, pop[i], config);

  OptimizerState state;
  for (std::size_t j = 0; j < n_leaders; ++j) {
    state.leader_positions.push_back(pop[order[j]]);
    state.leader_fitness.push_back(fit[order[j]]);
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (is_leader[i]) continue;
    state.coot_positions.push_back(pop[i]);
    state.coot_fitness.push_back(fit[i]);
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < n; ++i)
    if (fit[i] < fit[best]) best = i;
  state.g_best = pop[best];
  state.g_best_fitness = fit[best];
  return state;
}

Coefficients coefficients_ab(int iter, int max_iters) {
  if (max_iters < 1 || iter < 1 || iter > max_iters) throw ParameterError("iteration out of range");
  const double frac = static_cast<double>(iter) / static_cast<double>(max_iters);
  return {1.0 - frac, 2.0 - frac};
}

IterationDraws draw_iteration(std::size_t dims, double probability_p, Rng& rng) {
  IterationDraws draws;
  draws.vector_valued = rng.uniform() < probability_p;
  draws.angle = draw_vector(dims, draws.vector_valued, -1.0, 1.0, rng);
  draws.step = draw_vector(dims, draws.vector_valued, 0.0, 1.0, rng);
  draws.scale = draw_vector(dims, draws.vector_valued, 0.0, 1.0, rng);
  return draws;
}

Position random_movement(std::span<const double> pos, double a, std::span<const double> step,
                         const SearchSpace& space, Rng& rng) {
  Position out(pos.size());
  for (std::size_t d = 0; d < pos.size(); ++d) {
    const double target = rng.uniform() * (space.upper[d] - space.lower[d]) + space.lower[d];
    out[d] = pos[d] + a * step[d] * (target - pos[d]);
  }
  return space.clamp(std::move(out));
}

Position chain_movement(std::span<const double> prev, std::span<const double> cur) {
  Position out(cur.size());
  for (std::size_t d = 0; d < cur.size(); ++d) out[d] = 0.5 * (prev[d] + cur[d]);
  return out;
}

std::size_t leader_index(std::size_t i, std::size_t n_leaders) {
  if (n_leaders == 0) throw ParameterError("leader_index needs at least one leader");
  return 1 + (i % n_leaders);
}

Position leader_update(std::span<const double> leader, std::span<const double> g_best, double b,
                       const IterationDraws& draws, const SearchSpace& space) {
  return anchored_move(leader, g_best, b, draws, space);
}

Position follow_leader(std::span<const double> coot, std::span<const double> leader, double b,
                       const IterationDraws& draws, const SearchSpace& space) {
  return anchored_move(coot, leader, b, draws, space);
}

std::size_t step(OptimizerState& state, const SearchSpace& space, const CootConfig& config, const Fitness& fitness,
                 Rng& rng) {
  const std::size_t n_leaders = state.leader_positions.size();
  const std::size_t n_coots = state.coot_positions.size();
  std::size_t evals = 0;

  state.iteration += 1;
  const auto [a, b] = coefficients_ab(state.iteration, config.max_iters);
  const IterationDraws draws = draw_iteration(space.dims(), config.probability_p, rng);

  for (std::size_t i = 0; i < n_coots; ++i) {
    const std::size_t k = leader_index(i + 1, n_leaders) - 1;
    const double r = rng.uniform();
    Position next;
    if (r > 0.5) {
      next = follow_leader(state.coot_positions[i], state.leader_positions[k], b, draws, space);
    } else if (r < 0.5 && i != 0) {
      next = chain_movement(state.coot_positions[i - 1], state.coot_positions[i]);
    } else {
      next = random_movement(state.coot_positions[i], a, draws.step, space, rng);
    }
    state.coot_positions[i] = std::move(next);
    state.coot_fitness[i] = evaluate(fitness, state.coot_positions[i], config);
    ++evals;
    if (state.coot_fitness[i] < state.leader_fitness[k]) {
      std::swap(state.coot_positions[i], state.leader_positions[k]);
      std::swap(state.coot_fitness[i], state.leader_fitness[k]);
    }
  }

  // Global best over the current swarm, so improvements found by coots are
  // not lost when their leader slot is moved below.
  for (std::size_t j = 0; j < n_leaders; ++j) {
    if (state.leader_fitness[j] < state.g_best_fitness) {
      state.g_best = state.leader_positions[j];
      state.g_best_fitness = state.leader_fitness[j];
    }
  }
  for (std::size_t i = 0; i < n_coots; ++i) {
    if (state.coot_fitness[i] < state.g_best_fitness) {
      state.g_best = state.coot_positions[i];
      state.g_best_fitness = state.coot_fitness[i];
    }
  }

  for (std::size_t j = 0; j < n_leaders; ++j) {
    state.leader_positions[j] = leader_update(state.leader_positions[j], state.g_best, b, draws, space);
    state.leader_fitness[j] = evaluate(fitness, state.leader_positions[j], config);
    ++evals;
    if (state.leader_fitness[j] < state.g_best_fitness) {
      std::swap(state.g_best, state.leader_positions[j]);
      std::swap(state.g_best_fitness, state.leader_fitness[j]);
    }
  }
  return evals;
}

RunResult run(const Fitness& fitness, const SearchSpace& space, const CootConfig& config) {
  Rng rng(config.seed);
  OptimizerState state = init_population(space, config, fitness, rng);
  RunResult result;
  result.initial_best_fitness = state.g_best_fitness;
  result.evaluations = static_cast<std::size_t>(config.population);
  result.trace.best_per_iteration.reserve(static_cast<std::size_t>(config.max_iters));
  for (int t = 1; t <= config.max_iters; ++t) {
    result.evaluations += step(state, space, config, fitness, rng);
    result.trace.best_per_iteration.push_back(state.g_best_fitness);
  }
  result.best_position = state.g_best;
  result.best_fitness = state.g_best_fitness;
  return result;
}

}  // namespace cootmv::coot
