#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "aps/game.hpp"
#include "aps/mode.hpp"
#include "aps/proposals.hpp"
#include "aps/random.hpp"

namespace aps {

/// Augmentation-power schedule. A fixed schedule keeps H constant; a ladder
/// raises it by one every `block` iterations up to `max_power`, which turns
/// the chain into the annealed, mode-seeking variant.
struct AnnealSchedule {
  int initial = 1;
  std::uint64_t block = 0;  // 0 means fixed at `initial`
  int max_power = 1;

  static AnnealSchedule fixed(int h) {
    if (h < 1) throw std::invalid_argument("power must be >= 1");
    return {h, 0, h};
  }
  static AnnealSchedule ladder(int h0, std::uint64_t block, int hmax) {
    if (h0 < 1 || hmax < h0 || block < 1) throw std::invalid_argument("malformed anneal ladder");
    return {h0, block, hmax};
  }

  int at(std::uint64_t iteration) const {
    if (block == 0) return initial;
    const std::uint64_t step = iteration / block;
    const std::uint64_t h = static_cast<std::uint64_t>(initial) + step;
    return static_cast<int>(std::min<std::uint64_t>(h, static_cast<std::uint64_t>(max_power)));
  }
};

struct ApsConfig {
  std::uint64_t outer_iterations = 20000;  // N
  std::uint64_t inner_iterations = 2000;   // M
  std::uint64_t inner_burn_in = 500;       // K
  std::uint64_t outer_burn_in = 10000;     // R
  ProposalKernel defense_kernel = ProposalKernel::circular_neighbor();
  ProposalKernel attack_kernel = ProposalKernel::circular_neighbor();
  AnnealSchedule inner_power{};
  AnnealSchedule outer_power{};
  bool memoize_best_responses = true;
  std::optional<std::uint64_t> table_model_draws;  // J: pre-tabulate p(a|d) (ARA)
  bool record_trace = true;
  std::optional<std::size_t> start_defense;
  std::optional<std::size_t> start_attack;

  void check() const {
    if (outer_iterations < 1 || inner_iterations < 1)
      throw std::invalid_argument("chain lengths must be >= 1");
    if (inner_burn_in >= inner_iterations)
      throw std::invalid_argument("inner burn-in must be < inner chain length");
    if (outer_burn_in >= outer_iterations)
      throw std::invalid_argument("outer burn-in must be < outer chain length");
  }
};

struct ChainStep {
  std::uint64_t iteration;
  double decision;
  double attack;
  double outcome;
  bool accepted;
  int power;
};

struct ChainTrace {
  std::vector<ChainStep> steps;
  std::uint64_t burn_in = 0;
  std::uint64_t length = 0;
  std::uint64_t accepted = 0;

  double acceptance_rate() const {
    return length == 0 ? 0.0 : static_cast<double>(accepted) / static_cast<double>(length);
  }
};

struct ApsSolution {
  std::size_t optimal_defense = 0;
  double optimal_defense_code = 0.0;
  ModeEstimate mode;
  std::vector<std::uint64_t> histogram;  // post-burn-in counts per defense index
  ChainTrace outer_trace;
  std::vector<std::optional<std::size_t>> best_response;  // complete info cache
  std::vector<std::vector<double>> attack_table;          // ARA tabulated mode
  double outer_acceptance = 0.0;
  double inner_acceptance_mean = 0.0;
  std::uint64_t inner_runs = 0;
  std::uint64_t draws = 0;
  std::uint64_t seed = 0, stream = 0;
};

namespace detail {

inline double positive_log(const UtilityFunction& u, double decision, double theta) {
  const double value = u(decision, theta);
  if (!(value > 0.0))
    throw PreconditionError("utility must be positive on the augmented space (got " +
                            std::to_string(value) + ")");
  return std::log(value);
}

/// Mode over post-burn-in counts with the same tie rule as
/// estimate_mode_discrete: highest count, then smaller code.
inline ModeEstimate mode_from_histogram(const std::vector<std::uint64_t>& counts,
                                        const DecisionSpace& space) {
  std::uint64_t total = 0;
  std::size_t best = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    total += counts[i];
    if (counts[i] > counts[best] ||
        (counts[i] == counts[best] && space.code(i) < space.code(best)))
      best = i;
  }
  if (total == 0) throw std::invalid_argument("mode: no post-burn-in samples");
  return {space.code(best), static_cast<double>(counts[best]) / static_cast<double>(total),
          "discrete-frequency", false};
}

}  // namespace detail

/// MH acceptance probability for the power-augmented target:
/// min(1, prod_t u(proposed, theta_t) / u(current, theta_t)). Computed in log
/// space so large H stays stable.
inline double mh_acceptance(const UtilityFunction& u, double current_decision,
                            std::span<const double> current_outcomes, double proposed_decision,
                            std::span<const double> proposed_outcomes) {
  if (current_outcomes.size() != proposed_outcomes.size() || current_outcomes.empty())
    throw std::invalid_argument("mh_acceptance: outcome lists must be nonempty and equal-length");
  double log_ratio = 0.0;
  for (std::size_t t = 0; t < current_outcomes.size(); ++t) {
    log_ratio += detail::positive_log(u, proposed_decision, proposed_outcomes[t]);
    log_ratio -= detail::positive_log(u, current_decision, current_outcomes[t]);
  }
  return std::min(1.0, std::exp(log_ratio));
}

namespace detail {

struct AttackChainOutcome {
  std::size_t mode_index = 0;
  double acceptance_rate = 0.0;
  ChainTrace trace;
};

/// Inner augmented chain over (attack, outcome copies) for one defense. This
/// is the workhorse behind both the complete-information best response and
/// the ARA attack sampler.
inline AttackChainOutcome run_attacker_chain(const UtilityFunction& ua, const OutcomeModel& pa,
                                             const DecisionSpace& attacks, double d_code,
                                             const ApsConfig& cfg, RandomSource& rs,
                                             std::uint64_t& draws, bool record_trace) {
  const std::uint64_t m = cfg.inner_iterations;
  std::size_t a_cur = cfg.start_attack.value_or(
      static_cast<std::size_t>(rs.next_below(attacks.size())));
  double a_code = attacks.code(a_cur);

  int h_cur = cfg.inner_power.at(0);
  std::vector<double> thetas;
  thetas.reserve(static_cast<std::size_t>(cfg.inner_power.max_power));
  double log_sum = 0.0;
  for (int t = 0; t < h_cur; ++t) {
    thetas.push_back(pa.sampler(d_code, a_code, rs));
    ++draws;
    log_sum += positive_log(ua, a_code, thetas.back());
  }

  AttackChainOutcome out;
  out.trace.burn_in = cfg.inner_burn_in;
  out.trace.length = m;
  if (record_trace) out.trace.steps.reserve(m);

  std::vector<double> post_burn_codes;
  post_burn_codes.reserve(m - cfg.inner_burn_in);
  std::vector<double> prop_thetas;
  prop_thetas.reserve(thetas.capacity());

  for (std::uint64_t i = 1; i <= m; ++i) {
    const int h = cfg.inner_power.at(i);
    while (h_cur < h) {  // ladder went up: re-expand the current state
      thetas.push_back(pa.sampler(d_code, a_code, rs));
      ++draws;
      log_sum += positive_log(ua, a_code, thetas.back());
      ++h_cur;
    }

    const auto candidate = cfg.attack_kernel.propose_index(attacks, a_cur, rs);
    ++draws;
    bool accepted = false;
    if (candidate) {
      const double cand_code = attacks.code(*candidate);
      prop_thetas.clear();
      double prop_log_sum = 0.0;
      for (int t = 0; t < h_cur; ++t) {
        prop_thetas.push_back(pa.sampler(d_code, cand_code, rs));
        ++draws;
        prop_log_sum += positive_log(ua, cand_code, prop_thetas.back());
      }
      const double alpha = std::min(1.0, std::exp(prop_log_sum - log_sum));
      if (rs.next_double() < alpha) {
        a_cur = *candidate;
        a_code = cand_code;
        thetas = prop_thetas;
        log_sum = prop_log_sum;
        accepted = true;
      }
    }
    if (accepted) ++out.trace.accepted;
    if (record_trace)
      out.trace.steps.push_back({i, a_code, a_code, thetas.front(), accepted, h_cur});
    if (i > cfg.inner_burn_in) post_burn_codes.push_back(a_code);
  }

  const ModeEstimate mode = estimate_mode_discrete(post_burn_codes);
  for (std::size_t ai = 0; ai < attacks.size(); ++ai)
    if (attacks.code(ai) == mode.value) out.mode_index = ai;
  out.acceptance_rate = out.trace.acceptance_rate();
  return out;
}

}  // namespace detail

/// Best response at one defense, estimated as the mode of the inner augmented
/// chain's post-burn-in attack marginal.
inline std::pair<std::size_t, ChainTrace> inner_aps_attack(const CompleteInfoGame& game,
                                                           std::size_t d_index,
                                                           const ApsConfig& cfg,
                                                           RandomSource& rs) {
  cfg.check();
  if (!game.attacker_utility.declared_positive)
    throw PreconditionError("attacker utility must be declared positive for APS");
  std::uint64_t draws = 0;
  auto result = detail::run_attacker_chain(game.attacker_utility, game.attacker_outcomes,
                                           game.attack_space, game.defense_space.code(d_index),
                                           cfg, rs, draws, true);
  return {result.mode_index, std::move(result.trace)};
}

/// MH APS for the complete-information game: an outer augmented chain over
/// (defense, outcome copies), with best responses served by inner chains and
/// optionally frozen in a first-write-wins cache.
inline ApsSolution solve_complete_aps(const CompleteInfoGame& game, const ApsConfig& cfg,
                                      RandomSource& rs) {
  cfg.check();
  if (!game.defense_space.is_discrete() || !game.attack_space.is_discrete())
    throw std::invalid_argument("solve_complete_aps expects discrete spaces; use grid_discretize");
  if (!game.defender_utility.declared_positive || !game.attacker_utility.declared_positive)
    throw PreconditionError("APS requires positive-declared utilities on both sides");

  const std::size_t nd = game.defense_space.size();
  ApsSolution out;
  out.seed = rs.seed();
  out.stream = rs.stream();
  out.histogram.assign(nd, 0);
  out.best_response.assign(nd, std::nullopt);

  double inner_acceptance_total = 0.0;
  auto best_response = [&](std::size_t di) -> std::size_t {
    if (cfg.memoize_best_responses && out.best_response[di]) return *out.best_response[di];
    auto result = detail::run_attacker_chain(game.attacker_utility, game.attacker_outcomes,
                                             game.attack_space, game.defense_space.code(di), cfg,
                                             rs, out.draws, false);
    inner_acceptance_total += result.acceptance_rate;
    ++out.inner_runs;
    if (cfg.memoize_best_responses && !out.best_response[di])
      out.best_response[di] = result.mode_index;
    return result.mode_index;
  };

  std::size_t d_cur = cfg.start_defense.value_or(static_cast<std::size_t>(rs.next_below(nd)));
  std::size_t a_cur = best_response(d_cur);
  double d_code = game.defense_space.code(d_cur);
  double a_code = game.attack_space.code(a_cur);

  int h_cur = cfg.outer_power.at(0);
  std::vector<double> thetas;
  thetas.reserve(static_cast<std::size_t>(cfg.outer_power.max_power));
  double log_sum = 0.0;
  for (int t = 0; t < h_cur; ++t) {
    thetas.push_back(game.defender_outcomes.sampler(d_code, a_code, rs));
    ++out.draws;
    log_sum += detail::positive_log(game.defender_utility, d_code, thetas.back());
  }

  const std::uint64_t n = cfg.outer_iterations;
  out.outer_trace.burn_in = cfg.outer_burn_in;
  out.outer_trace.length = n;
  if (cfg.record_trace) out.outer_trace.steps.reserve(n);
  std::vector<double> prop_thetas;
  prop_thetas.reserve(thetas.capacity());

  for (std::uint64_t i = 1; i <= n; ++i) {
    const int h = cfg.outer_power.at(i);
    while (h_cur < h) {
      thetas.push_back(game.defender_outcomes.sampler(d_code, a_code, rs));
      ++out.draws;
      log_sum += detail::positive_log(game.defender_utility, d_code, thetas.back());
      ++h_cur;
    }

    const auto candidate = cfg.defense_kernel.propose_index(game.defense_space, d_cur, rs);
    ++out.draws;
    bool accepted = false;
    if (candidate) {
      const std::size_t cand_a = best_response(*candidate);
      const double cand_d_code = game.defense_space.code(*candidate);
      const double cand_a_code = game.attack_space.code(cand_a);
      prop_thetas.clear();
      double prop_log_sum = 0.0;
      for (int t = 0; t < h_cur; ++t) {
        prop_thetas.push_back(game.defender_outcomes.sampler(cand_d_code, cand_a_code, rs));
        ++out.draws;
        prop_log_sum += detail::positive_log(game.defender_utility, cand_d_code, prop_thetas.back());
      }
      const double alpha = std::min(1.0, std::exp(prop_log_sum - log_sum));
      if (rs.next_double() < alpha) {
        d_cur = *candidate;
        a_cur = cand_a;
        d_code = cand_d_code;
        a_code = cand_a_code;
        thetas = prop_thetas;
        log_sum = prop_log_sum;
        accepted = true;
      }
    }
    if (accepted) ++out.outer_trace.accepted;
    if (cfg.record_trace)
      out.outer_trace.steps.push_back({i, d_code, a_code, thetas.front(), accepted, h_cur});
    if (i > cfg.outer_burn_in) ++out.histogram[d_cur];
  }

  out.mode = detail::mode_from_histogram(out.histogram, game.defense_space);
  for (std::size_t di = 0; di < nd; ++di)
    if (game.defense_space.code(di) == out.mode.value) out.optimal_defense = di;
  out.optimal_defense_code = out.mode.value;
  out.outer_acceptance = out.outer_trace.acceptance_rate();
  out.inner_acceptance_mean =
      out.inner_runs == 0 ? 0.0 : inner_acceptance_total / static_cast<double>(out.inner_runs);
  return out;
}

namespace detail {

/// One draw from the predictive attack distribution: draw an attacker
/// hypothesis, run its inner chain, return the mode. Counts 2 (model) +
/// 1 (initial outcome) + 2M draws at unit inner power.
inline std::size_t sample_attack(const AraGame& game, std::size_t d_index, const ApsConfig& cfg,
                                 RandomSource& rs, std::uint64_t& draws,
                                 double* acceptance = nullptr) {
  auto [ua, pa] = game.attacker_model.draw(rs);
  draws += 2;
  if (!ua.declared_positive)
    throw PreconditionError("drawn attacker utility must be declared positive");
  auto result = run_attacker_chain(ua, pa, game.attack_space,
                                   game.defense_space.code(d_index), cfg, rs, draws, false);
  if (acceptance) *acceptance = result.acceptance_rate;
  return result.mode_index;
}

}  // namespace detail

/// Frequency table of J sample_attack draws at one defense.
inline std::vector<double> attack_distribution_aps(const AraGame& game, std::size_t d_index,
                                                   std::uint64_t j, const ApsConfig& cfg,
                                                   RandomSource& rs,
                                                   std::uint64_t* draw_counter = nullptr) {
  cfg.check();
  if (!game.attack_space.is_discrete())
    throw std::invalid_argument("attack_distribution_aps needs a discrete attack space");
  if (j < 1) throw std::invalid_argument("attack_distribution_aps: J must be >= 1");
  std::vector<double> table(game.attack_space.size(), 0.0);
  std::uint64_t draws = 0;
  for (std::uint64_t i = 0; i < j; ++i)
    table[detail::sample_attack(game, d_index, cfg, rs, draws)] += 1.0;
  for (double& p : table) p /= static_cast<double>(j);
  if (draw_counter) *draw_counter += draws;
  return table;
}

/// MH APS for the ARA game. The outer chain walks (defense, attack/outcome
/// pair copies); candidate attacks come from fresh sample_attack runs, or
/// from per-defense tables built by J repeated runs when table_model_draws is
/// set. Powers above 1 replicate the (attack, outcome) pair, which keeps the
/// defense marginal proportional to the H-th power of the expected utility.
inline ApsSolution solve_ara_aps(const AraGame& game, const ApsConfig& cfg, RandomSource& rs) {
  cfg.check();
  if (!game.defense_space.is_discrete() || !game.attack_space.is_discrete())
    throw std::invalid_argument("solve_ara_aps expects discrete spaces; use grid_discretize");
  if (!game.defender_utility.declared_positive)
    throw PreconditionError("APS requires a positive-declared defender utility");
  const bool tabulated = cfg.table_model_draws.has_value();
  if (!tabulated && cfg.outer_power.max_power > 1)
    throw CapabilityError(
        "ARA outer power > 1 needs tabulated attack draws; set table_model_draws");

  const std::size_t nd = game.defense_space.size();
  const std::size_t na = game.attack_space.size();
  ApsSolution out;
  out.seed = rs.seed();
  out.stream = rs.stream();
  out.histogram.assign(nd, 0);

  std::vector<std::vector<double>> cumulative;
  if (tabulated) {
    out.attack_table.assign(nd, {});
    cumulative.assign(nd, std::vector<double>(na, 0.0));
    for (std::size_t di = 0; di < nd; ++di) {
      out.attack_table[di] =
          attack_distribution_aps(game, di, *cfg.table_model_draws, cfg, rs, &out.draws);
      double acc = 0.0;
      for (std::size_t ai = 0; ai < na; ++ai) {
        acc += out.attack_table[di][ai];
        cumulative[di][ai] = acc;
      }
    }
  }

  double inner_acceptance_total = 0.0;
  auto draw_attack = [&](std::size_t di) -> std::size_t {
    if (tabulated) {
      const double u = rs.next_double();
      ++out.draws;
      const auto& row = cumulative[di];
      std::size_t ai = 0;
      while (ai + 1 < na && u > row[ai]) ++ai;
      return ai;
    }
    double acceptance = 0.0;
    const std::size_t ai = detail::sample_attack(game, di, cfg, rs, out.draws, &acceptance);
    inner_acceptance_total += acceptance;
    ++out.inner_runs;
    return ai;
  };

  std::size_t d_cur = cfg.start_defense.value_or(static_cast<std::size_t>(rs.next_below(nd)));
  double d_code = game.defense_space.code(d_cur);

  int h_cur = cfg.outer_power.at(0);
  std::vector<std::size_t> attacks;
  std::vector<double> thetas;
  attacks.reserve(static_cast<std::size_t>(cfg.outer_power.max_power));
  thetas.reserve(attacks.capacity());
  double log_sum = 0.0;
  auto append_pair = [&](std::size_t di, std::vector<std::size_t>& a_list,
                         std::vector<double>& t_list, double& lsum) {
    const std::size_t ai = draw_attack(di);
    const double theta =
        game.defender_outcomes.sampler(game.defense_space.code(di), game.attack_space.code(ai), rs);
    ++out.draws;
    a_list.push_back(ai);
    t_list.push_back(theta);
    lsum += detail::positive_log(game.defender_utility, game.defense_space.code(di), theta);
  };
  for (int t = 0; t < h_cur; ++t) append_pair(d_cur, attacks, thetas, log_sum);

  const std::uint64_t n = cfg.outer_iterations;
  out.outer_trace.burn_in = cfg.outer_burn_in;
  out.outer_trace.length = n;
  if (cfg.record_trace) out.outer_trace.steps.reserve(n);
  std::vector<std::size_t> prop_attacks;
  std::vector<double> prop_thetas;
  prop_attacks.reserve(attacks.capacity());
  prop_thetas.reserve(attacks.capacity());

  for (std::uint64_t i = 1; i <= n; ++i) {
    const int h = cfg.outer_power.at(i);
    while (h_cur < h) {
      append_pair(d_cur, attacks, thetas, log_sum);
      ++h_cur;
    }

    const auto candidate = cfg.defense_kernel.propose_index(game.defense_space, d_cur, rs);
    ++out.draws;
    bool accepted = false;
    if (candidate) {
      prop_attacks.clear();
      prop_thetas.clear();
      double prop_log_sum = 0.0;
      for (int t = 0; t < h_cur; ++t)
        append_pair(*candidate, prop_attacks, prop_thetas, prop_log_sum);
      const double alpha = std::min(1.0, std::exp(prop_log_sum - log_sum));
      if (rs.next_double() < alpha) {
        d_cur = *candidate;
        d_code = game.defense_space.code(d_cur);
        attacks = prop_attacks;
        thetas = prop_thetas;
        log_sum = prop_log_sum;
        accepted = true;
      }
    }
    if (accepted) ++out.outer_trace.accepted;
    if (cfg.record_trace)
      out.outer_trace.steps.push_back(
          {i, d_code, game.attack_space.code(attacks.front()), thetas.front(), accepted, h_cur});
    if (i > cfg.outer_burn_in) ++out.histogram[d_cur];
  }

  out.mode = detail::mode_from_histogram(out.histogram, game.defense_space);
  for (std::size_t di = 0; di < nd; ++di)
    if (game.defense_space.code(di) == out.mode.value) out.optimal_defense = di;
  out.optimal_defense_code = out.mode.value;
  out.outer_acceptance = out.outer_trace.acceptance_rate();
  out.inner_acceptance_mean =
      out.inner_runs == 0 ? 0.0 : inner_acceptance_total / static_cast<double>(out.inner_runs);
  return out;
}

}  // namespace aps
