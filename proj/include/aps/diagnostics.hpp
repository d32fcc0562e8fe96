#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <stdexcept>
#include <vector>

#include "aps/aps_solver.hpp"
#include "aps/game.hpp"
#include "aps/gibbs_solver.hpp"
#include "aps/mc_solver.hpp"
#include "aps/mode.hpp"
#include "aps/parallel.hpp"

namespace aps {

struct BgrResult {
  double r_hat = 1.0;
  bool degenerate = false;
};

/// Potential-scale-reduction factor from between/within-chain variances of a
/// scalar trace. Values near 1 indicate the chains are sampling the same
/// thing; constant chains make the statistic undefined and come back flagged.
inline BgrResult bgr_statistic(const std::vector<std::vector<double>>& chains) {
  if (chains.size() < 2) throw std::invalid_argument("bgr_statistic needs at least two chains");
  const std::size_t n = chains.front().size();
  if (n < 10) throw std::invalid_argument("bgr_statistic needs chains of length >= 10");
  for (const auto& c : chains)
    if (c.size() != n) throw std::invalid_argument("bgr_statistic needs equal-length chains");

  const double m = static_cast<double>(chains.size());
  const double dn = static_cast<double>(n);
  std::vector<double> means;
  means.reserve(chains.size());
  double within = 0.0;
  for (const auto& c : chains) {
    double mean = 0.0;
    for (double x : c) mean += x;
    mean /= dn;
    double var = 0.0;
    for (double x : c) var += (x - mean) * (x - mean);
    var /= (dn - 1.0);
    means.push_back(mean);
    within += var;
  }
  within /= m;

  double grand = 0.0;
  for (double mu : means) grand += mu;
  grand /= m;
  double between_over_n = 0.0;
  for (double mu : means) between_over_n += (mu - grand) * (mu - grand);
  between_over_n /= (m - 1.0);

  if (!(within > 0.0))
    return {std::numeric_limits<double>::quiet_NaN(), true};

  const double pooled = (dn - 1.0) / dn * within + (1.0 + 1.0 / m) * between_over_n;
  return {std::sqrt(pooled / within), false};
}

/// Scalar trace for convergence checks: the defender utility along the chain.
/// Decision codes on a circular space are not a metric, utilities are.
inline std::vector<double> utility_trace(const UtilityFunction& u, const ChainTrace& trace) {
  std::vector<double> values;
  values.reserve(trace.steps.size());
  for (const auto& s : trace.steps) values.push_back(u(s.decision, s.outcome));
  return values;
}

enum class SolverSelector { mc, aps, gibbs };

struct SensitivityOptions {
  std::uint64_t perturbations = 1000;  // R
  double threshold = 0.1;
  SolverSelector selector = SolverSelector::mc;
  bool early_stop = false;
  /// Subtracted from attained expected utility before the regret fraction is
  /// formed; set it to the catalog's positivity shift to report fractions on
  /// the game's native scale.
  double utility_offset = 0.0;
  unsigned threads = 1;
  std::uint64_t eu_samples = 20000;  // fallback when no exact evaluator exists
  McConfig mc{};
  ApsConfig aps{};
  std::uint64_t gibbs_n = 100000, gibbs_m = 20000, gibbs_k = 1000;
};

struct RegretRecord {
  std::uint64_t index = 0;
  double optimal_code = 0.0;
  double regret = 0.0;    // signed: attained minus perturbed-optimal
  double fraction = 0.0;  // |regret| / |attained - offset|
};

struct RegretReport {
  std::vector<RegretRecord> records;
  double max_abs_regret = 0.0;
  double max_fraction = 0.0;
  std::map<double, double> optimum_frequency;  // defense code -> share
  bool robust = true;
  bool early_stopped = false;
  std::uint64_t skipped = 0;
};

namespace detail {

/// Defender expected utility at one defense under a fixed response map,
/// evaluated with the defender's own nominal model. Exact by enumeration
/// when the model carries an evaluator over a finite support.
inline double defender_eu_under_map(const CompleteInfoGame& game, std::size_t d_index,
                                    std::size_t a_index, std::uint64_t fallback_samples,
                                    RandomSource& rs) {
  const double d = game.defense_space.code(d_index);
  const double a = game.attack_space.code(a_index);
  if (game.defender_outcomes.has_evaluator() && game.defender_outcomes.support.is_discrete()) {
    double eu = 0.0;
    for (double theta : game.defender_outcomes.support.values())
      eu += game.defender_utility(d, theta) * game.defender_outcomes.evaluator(d, a, theta);
    return eu;
  }
  double total = 0.0;
  for (std::uint64_t i = 0; i < fallback_samples; ++i)
    total += game.defender_utility(d, game.defender_outcomes.sampler(d, a, rs));
  return total / static_cast<double>(fallback_samples);
}

struct PerturbedSolve {
  std::size_t optimal = 0;
  std::vector<std::size_t> response_map;
};

inline PerturbedSolve solve_perturbed(const CompleteInfoGame& game, const SensitivityOptions& opt,
                                      RandomSource& rs) {
  PerturbedSolve result;
  switch (opt.selector) {
    case SolverSelector::mc: {
      const McSolution s = solve_complete_mc(game, opt.mc, rs);
      result.optimal = s.optimal_defense;
      result.response_map = s.best_response;
      return result;
    }
    case SolverSelector::aps: {
      ApsConfig cfg = opt.aps;
      cfg.memoize_best_responses = true;
      cfg.record_trace = false;
      const ApsSolution s = solve_complete_aps(game, cfg, rs);
      result.optimal = s.optimal_defense;
      result.response_map.assign(game.defense_space.size(), 0);
      for (std::size_t d = 0; d < game.defense_space.size(); ++d) {
        if (s.best_response[d]) {
          result.response_map[d] = *s.best_response[d];
        } else {
          result.response_map[d] = inner_aps_attack(game, d, cfg, rs).first;
        }
      }
      return result;
    }
    case SolverSelector::gibbs: {
      const FullConditionals conds = enumeration_conditionals(game);
      const ApsSolution s =
          solve_complete_gibbs(game, conds, opt.gibbs_n, opt.gibbs_m, opt.gibbs_k, rs, nullptr,
                               false);
      result.optimal = s.optimal_defense;
      result.response_map.assign(game.defense_space.size(), 0);
      for (std::size_t d = 0; d < game.defense_space.size(); ++d)
        result.response_map[d] = s.best_response[d].value_or(0);
      return result;
    }
  }
  throw std::logic_error("unknown solver selector");
}

}  // namespace detail

/// Robustness sweep over the attacker's utility and probability classes.
/// Each perturbation re-solves the game with the selected solver, and the
/// regret of keeping `proposed` is evaluated against the perturbed optimum
/// under the defender's own nominal model.
inline RegretReport sensitivity_analysis(
    const CompleteInfoGame& game, std::size_t proposed,
    const std::function<UtilityFunction(RandomSource&)>& utility_class,
    const std::function<OutcomeModel(RandomSource&)>& probability_class,
    const SensitivityOptions& opt, RandomSource& rs) {
  if (opt.perturbations < 1)
    throw std::invalid_argument("sensitivity_analysis: need at least one perturbation");
  if (proposed >= game.defense_space.size())
    throw std::invalid_argument("sensitivity_analysis: proposed defense outside space");

  const std::uint64_t r = opt.perturbations;
  std::vector<RegretRecord> records(r);
  std::vector<bool> valid(r, true);

  auto run_one = [&](std::size_t i) {
    RandomSource sub = rs.substream(i);
    const UtilityFunction ua = utility_class(sub);
    const OutcomeModel pa = probability_class(sub);

    // light validity probe on the drawn pair
    for (int probe = 0; probe < 8; ++probe) {
      const double d = detail::random_code(game.defense_space, sub);
      const double a = detail::random_code(game.attack_space, sub);
      const double theta = pa.sampler(d, a, sub);
      const double value = ua(a, theta);
      if (!std::isfinite(value) || value <= 0.0) {
        valid[i] = false;
        return;
      }
    }

    CompleteInfoGame perturbed = game;
    perturbed.attacker_utility = ua;
    perturbed.attacker_outcomes = pa;
    const detail::PerturbedSolve solved = detail::solve_perturbed(perturbed, opt, sub);

    const double attained =
        detail::defender_eu_under_map(game, proposed, solved.response_map[proposed],
                                      opt.eu_samples, sub);
    const double at_optimal = detail::defender_eu_under_map(
        game, solved.optimal, solved.response_map[solved.optimal], opt.eu_samples, sub);
    const double regret = attained - at_optimal;
    const double scale = std::fabs(attained - opt.utility_offset);
    records[i] = {i, game.defense_space.code(solved.optimal), regret,
                  scale > 0.0 ? std::fabs(regret) / scale : 0.0};
  };

  RegretReport report;
  if (opt.early_stop) {
    for (std::uint64_t i = 0; i < r; ++i) {
      run_one(i);
      if (!valid[i]) continue;
      if (std::fabs(records[i].regret) > opt.threshold) {
        report.early_stopped = true;
        records.resize(i + 1);
        valid.resize(i + 1);
        break;
      }
    }
  } else {
    parallel_for(r, opt.threads, run_one);
  }

  std::map<double, std::uint64_t> counts;
  std::uint64_t kept = 0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (!valid[i]) {
      ++report.skipped;
      continue;
    }
    ++kept;
    report.records.push_back(records[i]);
    ++counts[records[i].optimal_code];
    report.max_abs_regret = std::max(report.max_abs_regret, std::fabs(records[i].regret));
    report.max_fraction = std::max(report.max_fraction, records[i].fraction);
    if (std::fabs(records[i].regret) > opt.threshold) report.robust = false;
  }
  for (const auto& [code, count] : counts)
    report.optimum_frequency[code] = static_cast<double>(count) / static_cast<double>(kept);
  return report;
}

}  // namespace aps
