#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "aps/distributions.hpp"
#include "aps/game.hpp"
#include "aps/random.hpp"

namespace aps::catalog {

// ---------------------------------------------------------------------------
// Toy cyber game: ten protection levels against a binary attack with a binary
// outcome. Costs, success probabilities, attacker benefits and the ARA beta
// parameters are the published table values.
// ---------------------------------------------------------------------------

inline constexpr std::array<double, 10> kToySuccessProb = {0.50, 0.40, 0.35, 0.30, 0.25,
                                                           0.20, 0.15, 0.10, 0.05, 0.01};
inline constexpr std::array<double, 10> kToyBetaAlpha = {50, 40, 35, 30, 25, 20, 15, 10, 5, 1};
inline constexpr std::array<double, 10> kToyBetaBeta = {50, 60, 65, 70, 75, 80, 85, 90, 95, 99};
inline constexpr double kToyAttackGain = 1.97;    // attacker net benefit, successful attack
inline constexpr double kToyAttackLoss = -0.53;   // attacker net benefit, failed attack
inline constexpr double kToyCostBase = 0.05;      // defender cost at level 0, no breach
inline constexpr double kToyCostStep = 0.05;      // per protection level
inline constexpr double kToyBreachCost = 7.0;     // business value lost on success
inline constexpr double kToyRiskCoefficient = 0.4;

/// The defender's exponential disutility of cost is shipped shifted up by
/// this constant so it is strictly positive (max cost 7.50 gives
/// exp(3) < 21). Affine shifts do not move the argmax. The shift is exposed
/// so reports can be rescaled to the unshifted utility.
inline constexpr double kToyUtilityShift = 21.0;

struct ToyParams {
  double attacker_risk_coefficient = 1.0;  // e in exp(e * benefit)
  double utility_shift = kToyUtilityShift;
};

inline double toy_defender_cost(double d_code, double theta) {
  return kToyCostBase + kToyCostStep * d_code + kToyBreachCost * theta;
}

inline double toy_attacker_benefit(double a_code, double theta) {
  if (a_code < 0.5) return 0.0;
  return theta > 0.5 ? kToyAttackGain : kToyAttackLoss;
}

inline std::size_t toy_defense_index(double d_code) {
  const auto i = static_cast<long>(d_code + 0.5);
  if (i < 0 || i > 9) throw std::domain_error("toy game: defense code outside 0..9");
  return static_cast<std::size_t>(i);
}

namespace detail {

inline OutcomeModel toy_outcome_model(std::vector<double> success_prob) {
  auto probs = std::make_shared<const std::vector<double>>(std::move(success_prob));
  OutcomeModel model;
  model.support = OutcomeSupport::discrete({0.0, 1.0});
  model.sampler = [probs](double d, double a, RandomSource& rs) -> double {
    if (a < 0.5) return 0.0;  // no attack, no breach
    return static_cast<double>(sample_bernoulli((*probs)[toy_defense_index(d)], rs));
  };
  model.evaluator = [probs](double d, double a, double theta) -> double {
    const double p = a < 0.5 ? 0.0 : (*probs)[toy_defense_index(d)];
    return theta > 0.5 ? p : 1.0 - p;
  };
  return model;
}

}  // namespace detail

inline UtilityFunction toy_defender_utility(double shift = kToyUtilityShift) {
  UtilityFunction u;
  u.evaluator = [shift](double d, double theta) {
    return shift - std::exp(kToyRiskCoefficient * toy_defender_cost(d, theta));
  };
  u.declared_positive = shift > std::exp(kToyRiskCoefficient * toy_defender_cost(9.0, 1.0));
  return u;
}

inline UtilityFunction toy_attacker_utility(double risk_coefficient) {
  UtilityFunction u;
  u.evaluator = [risk_coefficient](double a, double theta) {
    return std::exp(risk_coefficient * toy_attacker_benefit(a, theta));
  };
  u.declared_positive = true;
  return u;
}

inline CompleteInfoGame toy_cyber(const ToyParams& params = {}) {
  CompleteInfoGame game;
  game.defense_space = DecisionSpace::coded({0, 1, 2, 3, 4, 5, 6, 7, 8, 9});
  game.attack_space = DecisionSpace::coded({0, 1});
  game.defender_utility = toy_defender_utility(params.utility_shift);
  game.attacker_utility = toy_attacker_utility(params.attacker_risk_coefficient);
  const std::vector<double> probs(kToySuccessProb.begin(), kToySuccessProb.end());
  game.defender_outcomes = detail::toy_outcome_model(probs);
  game.attacker_outcomes = detail::toy_outcome_model(probs);
  return game;
}

struct ToyAraParams {
  /// Both beta parameters are multiplied by this; 0.01 reproduces the
  /// widened-uncertainty robustness variant.
  double beta_scale = 1.0;
  double utility_shift = kToyUtilityShift;
};

inline AraGame toy_cyber_ara(const ToyAraParams& params = {}) {
  AraGame game;
  game.defense_space = DecisionSpace::coded({0, 1, 2, 3, 4, 5, 6, 7, 8, 9});
  game.attack_space = DecisionSpace::coded({0, 1});
  game.defender_utility = toy_defender_utility(params.utility_shift);
  const std::vector<double> probs(kToySuccessProb.begin(), kToySuccessProb.end());
  game.defender_outcomes = detail::toy_outcome_model(probs);
  const double scale = params.beta_scale;
  game.attacker_model.draw = [scale](RandomSource& rs) {
    const double e = sample_uniform(0.0, 2.0, rs);
    std::vector<double> q(10);
    for (std::size_t d = 0; d < 10; ++d)
      q[d] = sample_beta(kToyBetaAlpha[d] * scale, kToyBetaBeta[d] * scale, rs);
    return std::make_pair(toy_attacker_utility(e), detail::toy_outcome_model(std::move(q)));
  };
  return game;
}

/// Perturbation classes for the robustness sweep: the attacker's risk
/// coefficient resampled uniformly on (0,2), and per-defense success
/// probabilities resampled from beta laws moment-matched to the table values
/// with variance equal to 0.1% of each mean.
struct PerturbationClasses {
  std::function<UtilityFunction(RandomSource&)> utility_class;
  std::function<OutcomeModel(RandomSource&)> probability_class;
};

inline PerturbationClasses build_toy_perturbation_classes() {
  PerturbationClasses classes;
  classes.utility_class = [](RandomSource& rs) {
    return toy_attacker_utility(sample_uniform(0.0, 2.0, rs));
  };
  std::vector<Beta> laws;
  laws.reserve(10);
  for (double p : kToySuccessProb) laws.push_back(beta_from_mean_variance(p, 0.001 * p));
  classes.probability_class = [laws](RandomSource& rs) {
    std::vector<double> q(10);
    for (std::size_t d = 0; d < 10; ++d) q[d] = sample_beta(laws[d].alpha, laws[d].beta, rs);
    return detail::toy_outcome_model(std::move(q));
  };
  return classes;
}

// ---------------------------------------------------------------------------
// Resource-allocation game on [0,1]^2: both agents invest a fraction of
// their resources; the defender's loss fraction follows a beta law whose
// parameters rise with attack effort and fall with defense effort.
// ---------------------------------------------------------------------------

struct ResourceParams {
  double server_value = 10.0;       // s
  double defender_unit_cost = 1.0;  // c
  double attacker_unit_cost = 1.0;  // e
  double defender_risk = 0.5;       // h
  double attacker_risk = 0.5;       // k
  double defender_shift = 1.0;      // keeps 1 - exp(-h f) positive
  /// Concentration of each agent's own assessment of the loss law. Both
  /// share the mean curve; the attacker's assessment is much tighter so his
  /// best response is stable under estimation noise, which the paired
  /// MC-vs-APS agreement protocol needs at fine grids.
  double defender_concentration = 0.7;
  double attacker_concentration = 40000.0;
};

inline double resource_alpha(double d, double a, double concentration = 1.0) {
  return concentration * std::exp(1.0 + a - d);
}
inline double resource_beta(double d, double a, double concentration = 1.0) {
  return concentration * std::exp(1.0 + d - a);
}

inline CompleteInfoGame resource_game(const ResourceParams& p = {}) {
  CompleteInfoGame game;
  game.defense_space = DecisionSpace::box({0.0}, {1.0});
  game.attack_space = DecisionSpace::box({0.0}, {1.0});

  auto losses_with = [](double lambda) {
    OutcomeModel model;
    model.support = OutcomeSupport::interval(0.0, 1.0);
    model.sampler = [lambda](double d, double a, RandomSource& rs) {
      return sample_beta(resource_alpha(d, a, lambda), resource_beta(d, a, lambda), rs);
    };
    return model;
  };
  game.defender_outcomes = losses_with(p.defender_concentration);
  game.attacker_outcomes = losses_with(p.attacker_concentration);

  game.defender_utility.evaluator = [p](double d, double theta) {
    const double payoff = (1.0 - theta) * p.server_value - p.defender_unit_cost * d;
    return p.defender_shift + 1.0 - std::exp(-p.defender_risk * payoff);
  };
  game.defender_utility.declared_positive = true;
  game.attacker_utility.evaluator = [p](double a, double theta) {
    const double payoff = theta * p.server_value - p.attacker_unit_cost * a;
    return std::exp(-p.attacker_risk * payoff);
  };
  game.attacker_utility.declared_positive = true;
  return game;
}

/// Even lattice over a 1-D continuous box, endpoints included.
inline DecisionSpace grid_discretize(const DecisionSpace& space, double precision) {
  if (space.is_discrete())
    throw std::invalid_argument("grid_discretize expects a continuous space");
  if (!(precision > 0.0)) throw std::invalid_argument("grid_discretize: precision must be > 0");
  const auto& box = space.as_box();
  if (box.lower.size() != 1)
    throw CapabilityError("grid_discretize supports 1-D boxes; higher dimensions are not built");
  const double width = box.upper[0] - box.lower[0];
  const double ratio = width / precision;
  const double rounded = std::round(ratio);
  if (std::fabs(ratio - rounded) > 1e-9 * std::max(1.0, std::fabs(ratio)) || rounded < 1.0)
    throw std::invalid_argument("grid_discretize: precision must divide the box evenly");
  const auto count = static_cast<std::size_t>(rounded) + 1;
  std::vector<double> codes(count);
  for (std::size_t i = 0; i < count; ++i) codes[i] = box.lower[0] + precision * static_cast<double>(i);
  codes.back() = box.upper[0];
  return DecisionSpace::coded(std::move(codes));
}

inline CompleteInfoGame resource_grid(double precision, const ResourceParams& p = {}) {
  CompleteInfoGame game = resource_game(p);
  game.defense_space = grid_discretize(game.defense_space, precision);
  game.attack_space = grid_discretize(game.attack_space, precision);
  return game;
}

// ---------------------------------------------------------------------------
// DDoS case study: subscription level in gbps against attack days. The
// defender's outcome is the market loss; the attacker's outcome is his net
// gain, folding in detection risk and per-day cost.
// ---------------------------------------------------------------------------

struct DdosParams {
  double subscription_base = 300.0;  // euros/month at any nonzero level
  double subscription_slope = 60.0;  // euros per gbps; placeholder curve
  double market_cap = 1.5e6;
  double business_scale = 7e6;
  double attack_day_cost = 792.0;
  double detection_cost_mean = 2.43e6;
  double detection_cost_sd = 4e5;
};

inline double ddos_subscription_cost(double d_gbps, const DdosParams& p = {}) {
  return d_gbps <= 0.0 ? 0.0 : p.subscription_base + p.subscription_slope * d_gbps;
}

inline AraGame ddos(const DdosParams& p = {}) {
  AraGame game;
  std::vector<double> defenses;
  for (int d = 0; d <= 195; d += 5) defenses.push_back(d);
  std::vector<double> attacks;
  for (int a = 0; a <= 30; ++a) attacks.push_back(a);
  game.defense_space = DecisionSpace::coded(std::move(defenses));
  game.attack_space = DecisionSpace::coded(std::move(attacks));

  game.defender_outcomes.support = OutcomeSupport::interval(0.0, p.market_cap);
  game.defender_outcomes.sampler = [p](double d, double a, RandomSource& rs) {
    double hours = 0.0;
    const int days = static_cast<int>(a + 0.5);
    for (int jday = 0; jday < days; ++jday)
      if (sample_gamma(5.0, 1.0, rs) > d) hours += sample_gamma(4.0, 1.0, rs);
    const double rate = sample_uniform(0.0026, 0.00417, rs);
    return std::min(p.market_cap, 3e6 * hours * rate);
  };
  game.defender_utility.evaluator = [p](double d, double market_loss) {
    const double cost = market_loss + ddos_subscription_cost(d, p);
    return (std::exp(1.0 - cost / p.business_scale) - 1.0) / (std::exp(1.0) - 1.0);
  };
  game.defender_utility.declared_positive = true;

  game.attacker_model.draw = [p](RandomSource& rs) {
    // one attacker hypothesis: duration/gbps laws, market rate window,
    // detection propensity, risk proneness
    const double length_shape = sample_uniform(3.6, 4.8, rs);
    const double length_rate = sample_uniform(0.8, 1.2, rs);
    const double gbps_shape = sample_uniform(4.8, 5.6, rs);
    const double gbps_rate = sample_uniform(0.8, 1.2, rs);
    const double rate_lo = sample_uniform(0.0021, 0.0031, rs);
    const double rate_hi = sample_uniform(0.00367, 0.00467, rs);
    const double detect_p = sample_beta(2.0, 998.0, rs);
    const double proneness = sample_uniform(8.0, 10.0, rs);

    OutcomeModel gains;
    gains.support = OutcomeSupport::interval(-8e6, 1.6e6);
    gains.sampler = [=](double d, double a, RandomSource& rs2) {
      const int days = static_cast<int>(a + 0.5);
      double hours = 0.0;
      for (int jday = 0; jday < days; ++jday)
        if (sample_gamma(gbps_shape, gbps_rate, rs2) > d)
          hours += sample_gamma(length_shape, length_rate, rs2);
      const double market =
          std::min(p.market_cap, 3e6 * hours * sample_uniform(rate_lo, rate_hi, rs2));
      double detection_cost = 0.0;
      if (days > 0 && sample_binomial(days, detect_p, rs2) > 0)
        detection_cost = sample_normal(p.detection_cost_mean, p.detection_cost_sd, rs2);
      return market - detection_cost - p.attack_day_cost * days;
    };

    UtilityFunction ua;
    const double gain_min = -(p.detection_cost_mean + 4.0 * p.detection_cost_sd +
                              p.attack_day_cost * 30.0);
    const double gain_max = p.market_cap;
    ua.evaluator = [=](double /*a*/, double gain) {
      double scaled = (gain - gain_min) / (gain_max - gain_min);
      scaled = std::min(1.0, std::max(1e-9, scaled));
      return std::pow(scaled, proneness);
    };
    ua.declared_positive = true;
    return std::make_pair(ua, gains);
  };
  return game;
}

// ---------------------------------------------------------------------------
// Exact enumeration oracle for finite games with exact evaluators.
// ---------------------------------------------------------------------------

struct OracleSolution {
  std::vector<std::vector<double>> attacker_eu;  // per (d, a)
  std::vector<std::size_t> best_response;        // per d
  std::vector<double> defender_eu;               // per d at the best response
  std::size_t optimal_defense = 0;
  double optimal_defense_code = 0.0;
};

namespace detail {

inline void require_enumerable(const CompleteInfoGame& game) {
  if (!game.defense_space.is_discrete() || !game.attack_space.is_discrete())
    throw CapabilityError("brute_force_solve needs finite decision spaces");
  if (!game.defender_outcomes.has_evaluator() || !game.defender_outcomes.support.is_discrete() ||
      !game.attacker_outcomes.has_evaluator() || !game.attacker_outcomes.support.is_discrete())
    throw CapabilityError("brute_force_solve needs exact finite outcome models");
}

inline std::size_t argmax_code(const std::vector<double>& values, const DecisionSpace& space) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] > values[best] ||
        (values[i] == values[best] && space.code(i) < space.code(best)))
      best = i;
  return best;
}

}  // namespace detail

inline double exact_attacker_eu(const CompleteInfoGame& game, std::size_t d, std::size_t a) {
  const double dc = game.defense_space.code(d);
  const double ac = game.attack_space.code(a);
  double eu = 0.0;
  for (double theta : game.attacker_outcomes.support.values())
    eu += game.attacker_utility(ac, theta) * game.attacker_outcomes.evaluator(dc, ac, theta);
  return eu;
}

inline double exact_defender_eu(const CompleteInfoGame& game, std::size_t d, std::size_t a) {
  const double dc = game.defense_space.code(d);
  const double ac = game.attack_space.code(a);
  double eu = 0.0;
  for (double theta : game.defender_outcomes.support.values())
    eu += game.defender_utility(dc, theta) * game.defender_outcomes.evaluator(dc, ac, theta);
  return eu;
}

inline OracleSolution brute_force_solve(const CompleteInfoGame& game) {
  detail::require_enumerable(game);
  const std::size_t nd = game.defense_space.size();
  const std::size_t na = game.attack_space.size();
  OracleSolution out;
  out.attacker_eu.assign(nd, std::vector<double>(na, 0.0));
  out.best_response.assign(nd, 0);
  out.defender_eu.assign(nd, 0.0);
  for (std::size_t d = 0; d < nd; ++d) {
    for (std::size_t a = 0; a < na; ++a) out.attacker_eu[d][a] = exact_attacker_eu(game, d, a);
    out.best_response[d] = detail::argmax_code(out.attacker_eu[d], game.attack_space);
    out.defender_eu[d] = exact_defender_eu(game, d, out.best_response[d]);
  }
  out.optimal_defense = detail::argmax_code(out.defender_eu, game.defense_space);
  out.optimal_defense_code = game.defense_space.code(out.optimal_defense);
  return out;
}

/// Weighted attacker hypothesis for the finite-support ARA oracle.
struct WeightedAttacker {
  double weight;
  UtilityFunction utility;
  OutcomeModel outcomes;
};

struct AraOracleSolution {
  std::vector<std::vector<double>> attack_table;  // p_D(a | d)
  std::vector<double> defender_eu;
  std::size_t optimal_defense = 0;
  double optimal_defense_code = 0.0;
};

inline AraOracleSolution brute_force_solve_ara(const AraGame& game,
                                               const std::vector<WeightedAttacker>& support) {
  if (support.empty()) throw std::invalid_argument("ARA oracle needs a nonempty support");
  if (!game.defense_space.is_discrete() || !game.attack_space.is_discrete())
    throw CapabilityError("ARA oracle needs finite decision spaces");
  if (!game.defender_outcomes.has_evaluator() || !game.defender_outcomes.support.is_discrete())
    throw CapabilityError("ARA oracle needs an exact finite defender outcome model");
  const std::size_t nd = game.defense_space.size();
  const std::size_t na = game.attack_space.size();

  AraOracleSolution out;
  out.attack_table.assign(nd, std::vector<double>(na, 0.0));
  out.defender_eu.assign(nd, 0.0);

  double total_weight = 0.0;
  for (const auto& w : support) total_weight += w.weight;
  for (std::size_t d = 0; d < nd; ++d) {
    for (const auto& hypothesis : support) {
      if (!hypothesis.outcomes.has_evaluator() || !hypothesis.outcomes.support.is_discrete())
        throw CapabilityError("ARA oracle needs exact finite models in the support");
      std::vector<double> eu(na, 0.0);
      for (std::size_t a = 0; a < na; ++a) {
        const double dc = game.defense_space.code(d);
        const double ac = game.attack_space.code(a);
        for (double theta : hypothesis.outcomes.support.values())
          eu[a] += hypothesis.utility(ac, theta) * hypothesis.outcomes.evaluator(dc, ac, theta);
      }
      out.attack_table[d][detail::argmax_code(eu, game.attack_space)] +=
          hypothesis.weight / total_weight;
    }
    for (std::size_t a = 0; a < na; ++a) {
      double eu = 0.0;
      const double dc = game.defense_space.code(d);
      const double ac = game.attack_space.code(a);
      for (double theta : game.defender_outcomes.support.values())
        eu += game.defender_utility(dc, theta) * game.defender_outcomes.evaluator(dc, ac, theta);
      out.defender_eu[d] += out.attack_table[d][a] * eu;
    }
  }
  out.optimal_defense = detail::argmax_code(out.defender_eu, game.defense_space);
  out.optimal_defense_code = game.defense_space.code(out.optimal_defense);
  return out;
}

/// Monte Carlo over attacker-model draws with the inner argmax computed by
/// exact enumeration per draw. This is the reference estimate of p_D(a|d)
/// for model families with continuous support.
inline std::vector<double> ara_attack_distribution_oracle(const AraGame& game, std::size_t d_index,
                                                          std::uint64_t draws, RandomSource& rs) {
  if (!game.attack_space.is_discrete())
    throw CapabilityError("ARA oracle needs a finite attack space");
  const std::size_t na = game.attack_space.size();
  std::vector<double> table(na, 0.0);
  const double dc = game.defense_space.code(d_index);
  for (std::uint64_t i = 0; i < draws; ++i) {
    auto [ua, pa] = game.attacker_model.draw(rs);
    if (!pa.has_evaluator() || !pa.support.is_discrete())
      throw CapabilityError("per-draw enumeration oracle needs exact finite drawn models");
    std::vector<double> eu(na, 0.0);
    for (std::size_t a = 0; a < na; ++a) {
      const double ac = game.attack_space.code(a);
      for (double theta : pa.support.values())
        eu[a] += ua(ac, theta) * pa.evaluator(dc, ac, theta);
    }
    table[detail::argmax_code(eu, game.attack_space)] += 1.0;
  }
  for (double& p : table) p /= static_cast<double>(draws);
  return table;
}

/// ARA defender expected utilities from an attack-probability table, with
/// the defender side enumerated exactly.
inline std::vector<double> ara_defender_eu_from_table(
    const AraGame& game, const std::vector<std::vector<double>>& attack_table) {
  const std::size_t nd = game.defense_space.size();
  const std::size_t na = game.attack_space.size();
  std::vector<double> eu(nd, 0.0);
  for (std::size_t d = 0; d < nd; ++d)
    for (std::size_t a = 0; a < na; ++a) {
      const double dc = game.defense_space.code(d);
      const double ac = game.attack_space.code(a);
      double conditional = 0.0;
      for (double theta : game.defender_outcomes.support.values())
        conditional +=
            game.defender_utility(dc, theta) * game.defender_outcomes.evaluator(dc, ac, theta);
      eu[d] += attack_table[d][a] * conditional;
    }
  return eu;
}

}  // namespace aps::catalog
