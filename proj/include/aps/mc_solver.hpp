#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "aps/game.hpp"
#include "aps/random.hpp"

namespace aps {

struct McConfig {
  std::uint64_t inner_samples = 1000;   // Q: per (d,a) attacker estimate
  std::uint64_t outer_samples = 10000;  // P: per d defender estimate
  std::uint64_t model_draws = 1000;     // J: attacker-model draws (ARA only)
};

struct McSolution {
  std::size_t optimal_defense = 0;  // index into the defense space
  double optimal_defense_code = 0.0;
  std::vector<std::size_t> best_response;          // complete info: per-d attack index
  std::vector<std::vector<double>> attack_table;   // ARA: per-d distribution over attacks
  std::vector<double> defender_eu;                 // per-d estimate
  std::vector<std::vector<double>> attacker_eu;    // per-(d,a) estimate (complete info)
  std::uint64_t draws = 0;                         // sampler draw count
  std::uint64_t seed = 0, stream = 0;
};

namespace detail {

inline void require_discrete(const DecisionSpace& space, const char* which) {
  if (!space.is_discrete())
    throw std::invalid_argument(std::string(which) +
                                " space is continuous; discretize it first (grid_discretize)");
}

/// Argmax with ties toward the smaller decision code.
template <typename Value>
std::size_t argmax_by_code(const std::vector<Value>& values, const DecisionSpace& space) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best] ||
        (values[i] == values[best] && space.code(i) < space.code(best)))
      best = i;
  }
  return best;
}

}  // namespace detail

/// Mean attacker utility over Q outcome draws at a fixed (d, a).
inline double estimate_attacker_eu(const CompleteInfoGame& game, std::size_t d_index,
                                   std::size_t a_index, std::uint64_t q, RandomSource& rs,
                                   std::uint64_t* draw_counter = nullptr) {
  if (q < 1) throw std::invalid_argument("estimate_attacker_eu: Q must be >= 1");
  const double d = game.defense_space.code(d_index);
  const double a = game.attack_space.code(a_index);
  double total = 0.0;
  for (std::uint64_t i = 0; i < q; ++i) {
    const double theta = game.attacker_outcomes.sampler(d, a, rs);
    total += game.attacker_utility(a, theta);
  }
  if (draw_counter) *draw_counter += q;
  return total / static_cast<double>(q);
}

/// Plain Monte Carlo solve of the complete-information game: estimate the
/// attacker's expected utility per (d, a), take best responses, then estimate
/// the defender's expected utility per d against them.
inline McSolution solve_complete_mc(const CompleteInfoGame& game, const McConfig& cfg,
                                    RandomSource& rs) {
  detail::require_discrete(game.defense_space, "defense");
  detail::require_discrete(game.attack_space, "attack");
  if (cfg.inner_samples < 1 || cfg.outer_samples < 1)
    throw std::invalid_argument("solve_complete_mc: Q and P must be >= 1");

  const std::size_t nd = game.defense_space.size();
  const std::size_t na = game.attack_space.size();
  McSolution out;
  out.seed = rs.seed();
  out.stream = rs.stream();
  out.attacker_eu.assign(nd, std::vector<double>(na, 0.0));
  out.best_response.assign(nd, 0);
  out.defender_eu.assign(nd, 0.0);

  for (std::size_t di = 0; di < nd; ++di) {
    for (std::size_t ai = 0; ai < na; ++ai)
      out.attacker_eu[di][ai] =
          estimate_attacker_eu(game, di, ai, cfg.inner_samples, rs, &out.draws);
    out.best_response[di] = detail::argmax_by_code(out.attacker_eu[di], game.attack_space);

    const double d = game.defense_space.code(di);
    const double a_star = game.attack_space.code(out.best_response[di]);
    double total = 0.0;
    for (std::uint64_t i = 0; i < cfg.outer_samples; ++i) {
      const double theta = game.defender_outcomes.sampler(d, a_star, rs);
      total += game.defender_utility(d, theta);
    }
    out.draws += cfg.outer_samples;
    out.defender_eu[di] = total / static_cast<double>(cfg.outer_samples);
  }
  out.optimal_defense = detail::argmax_by_code(out.defender_eu, game.defense_space);
  out.optimal_defense_code = game.defense_space.code(out.optimal_defense);
  return out;
}

/// Predictive attack distribution at one defense: J attacker-model draws,
/// each classified by an inner Monte Carlo argmax.
inline std::vector<double> attack_distribution_mc(const AraGame& game, std::size_t d_index,
                                                  std::uint64_t j, std::uint64_t q,
                                                  RandomSource& rs,
                                                  std::uint64_t* draw_counter = nullptr) {
  detail::require_discrete(game.attack_space, "attack");
  if (j < 1 || q < 1) throw std::invalid_argument("attack_distribution_mc: J and Q must be >= 1");
  const double d = game.defense_space.code(d_index);
  const std::size_t na = game.attack_space.size();
  std::vector<double> table(na, 0.0);
  std::uint64_t draws = 0;
  for (std::uint64_t i = 0; i < j; ++i) {
    auto [ua, pa] = game.attacker_model.draw(rs);
    draws += 2;
    std::vector<double> eu(na, 0.0);
    for (std::size_t ai = 0; ai < na; ++ai) {
      const double a = game.attack_space.code(ai);
      double total = 0.0;
      for (std::uint64_t k = 0; k < q; ++k) total += ua(a, pa.sampler(d, a, rs));
      draws += q;
      eu[ai] = total / static_cast<double>(q);
    }
    table[detail::argmax_by_code(eu, game.attack_space)] += 1.0;
  }
  for (double& p : table) p /= static_cast<double>(j);
  if (draw_counter) *draw_counter += draws;
  return table;
}

/// Monte Carlo ARA solve: tabulate the predictive attack distribution per
/// defense, then estimate the defender's expected utility by composition
/// draws (attack from the table, outcome from the conditional model).
inline McSolution solve_ara_mc(const AraGame& game, const McConfig& cfg, RandomSource& rs) {
  detail::require_discrete(game.defense_space, "defense");
  detail::require_discrete(game.attack_space, "attack");
  if (cfg.inner_samples < 1 || cfg.outer_samples < 1 || cfg.model_draws < 1)
    throw std::invalid_argument("solve_ara_mc: Q, P and J must be >= 1");

  const std::size_t nd = game.defense_space.size();
  const std::size_t na = game.attack_space.size();
  McSolution out;
  out.seed = rs.seed();
  out.stream = rs.stream();
  out.attack_table.assign(nd, {});
  out.defender_eu.assign(nd, 0.0);

  for (std::size_t di = 0; di < nd; ++di)
    out.attack_table[di] =
        attack_distribution_mc(game, di, cfg.model_draws, cfg.inner_samples, rs, &out.draws);

  for (std::size_t di = 0; di < nd; ++di) {
    const double d = game.defense_space.code(di);
    std::vector<double> cumulative(na, 0.0);
    double acc = 0.0;
    for (std::size_t ai = 0; ai < na; ++ai) {
      acc += out.attack_table[di][ai];
      cumulative[ai] = acc;
    }
    double total = 0.0;
    for (std::uint64_t i = 0; i < cfg.outer_samples; ++i) {
      const double u = rs.next_double() * acc;
      std::size_t ai = 0;
      while (ai + 1 < na && u > cumulative[ai]) ++ai;
      const double a = game.attack_space.code(ai);
      const double theta = game.defender_outcomes.sampler(d, a, rs);
      out.draws += 2;
      total += game.defender_utility(d, theta);
    }
    out.defender_eu[di] = total / static_cast<double>(cfg.outer_samples);
  }
  out.optimal_defense = detail::argmax_by_code(out.defender_eu, game.defense_space);
  out.optimal_defense_code = game.defense_space.code(out.optimal_defense);
  return out;
}

/// Pilot-variance sample-size bound: N = ceil(z^2 max(var) / eps^2), at
/// least 1.
inline std::uint64_t estimate_sample_size(const std::vector<double>& pilot_variances,
                                          double precision, double confidence_z) {
  if (pilot_variances.empty())
    throw std::invalid_argument("estimate_sample_size: need at least one pilot variance");
  if (!(precision > 0.0) || !(confidence_z > 0.0))
    throw std::invalid_argument("estimate_sample_size: precision and z must be > 0");
  double max_var = 0.0;
  for (double v : pilot_variances) {
    if (v < 0.0) throw std::invalid_argument("estimate_sample_size: negative variance");
    max_var = std::max(max_var, v);
  }
  const double n = std::ceil(confidence_z * confidence_z * max_var / (precision * precision));
  return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(n));
}

}  // namespace aps
