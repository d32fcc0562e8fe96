#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "aps/random.hpp"

namespace aps {

/// Finite ordered set of decisions. The ordering is load-bearing: circular
/// proposal kernels walk it, and argmax ties break toward the smaller code.
struct DiscreteSpace {
  std::vector<std::string> labels;
  std::vector<double> codes;
};

/// Axis-aligned box of continuous decisions.
struct BoxSpace {
  std::vector<double> lower;
  std::vector<double> upper;
};

class DecisionSpace {
 public:
  static DecisionSpace discrete(std::vector<std::string> labels, std::vector<double> codes) {
    if (labels.empty()) throw std::invalid_argument("decision space: empty label set");
    if (labels.size() != codes.size())
      throw std::invalid_argument("decision space: labels and codes must align");
    std::set<std::string> unique(labels.begin(), labels.end());
    if (unique.size() != labels.size())
      throw std::invalid_argument("decision space: duplicate labels");
    DecisionSpace s;
    s.kind_ = DiscreteSpace{std::move(labels), std::move(codes)};
    return s;
  }

  /// Discrete space whose labels are the decimal forms of the codes.
  static DecisionSpace coded(std::vector<double> codes) {
    std::vector<std::string> labels;
    labels.reserve(codes.size());
    for (double c : codes) {
      std::string txt = std::to_string(c);
      txt.erase(txt.find_last_not_of('0') + 1);
      if (!txt.empty() && txt.back() == '.') txt.pop_back();
      labels.push_back(txt);
    }
    return discrete(std::move(labels), std::move(codes));
  }

  static DecisionSpace box(std::vector<double> lower, std::vector<double> upper) {
    if (lower.empty() || lower.size() != upper.size())
      throw std::invalid_argument("decision space: malformed box bounds");
    for (std::size_t i = 0; i < lower.size(); ++i)
      if (!(lower[i] < upper[i]))
        throw std::invalid_argument("decision space: box needs lower < upper per coordinate");
    DecisionSpace s;
    s.kind_ = BoxSpace{std::move(lower), std::move(upper)};
    return s;
  }

  bool is_discrete() const { return std::holds_alternative<DiscreteSpace>(kind_); }
  const DiscreteSpace& as_discrete() const { return std::get<DiscreteSpace>(kind_); }
  const BoxSpace& as_box() const { return std::get<BoxSpace>(kind_); }

  std::size_t size() const { return as_discrete().codes.size(); }
  double code(std::size_t index) const { return as_discrete().codes.at(index); }
  const std::string& label(std::size_t index) const { return as_discrete().labels.at(index); }

  std::size_t dimension() const {
    return is_discrete() ? 1 : as_box().lower.size();
  }

 private:
  std::variant<DiscreteSpace, BoxSpace> kind_;
};

/// Support descriptor for outcomes: a finite value set or an interval.
struct OutcomeSupport {
  struct Discrete {
    std::vector<double> values;
  };
  struct Interval {
    double lower, upper;
  };

  static OutcomeSupport discrete(std::vector<double> values) {
    OutcomeSupport s;
    s.kind = Discrete{std::move(values)};
    return s;
  }
  static OutcomeSupport interval(double lower, double upper) {
    OutcomeSupport s;
    s.kind = Interval{lower, upper};
    return s;
  }

  bool is_discrete() const { return std::holds_alternative<Discrete>(kind); }
  const std::vector<double>& values() const { return std::get<Discrete>(kind).values; }

  bool contains(double theta, double slack = 1e-9) const {
    if (is_discrete()) {
      for (double v : values())
        if (std::fabs(v - theta) <= slack) return true;
      return false;
    }
    const auto& iv = std::get<Interval>(kind);
    return theta >= iv.lower - slack && theta <= iv.upper + slack;
  }

  std::variant<Discrete, Interval> kind;
};

/// Conditional outcome model p(theta | d, a). The sampler is mandatory; the
/// exact evaluator is optional and unlocks the enumeration oracle and the
/// Gibbs conditionals.
struct OutcomeModel {
  std::function<double(double d_code, double a_code, RandomSource&)> sampler;
  OutcomeSupport support = OutcomeSupport::interval(-1e300, 1e300);
  std::function<double(double d_code, double a_code, double theta)> evaluator;

  bool has_evaluator() const { return static_cast<bool>(evaluator); }
};

struct UtilityFunction {
  std::function<double(double decision_code, double theta)> evaluator;
  bool declared_positive = false;

  double operator()(double decision_code, double theta) const {
    return evaluator(decision_code, theta);
  }
};

struct CompleteInfoGame {
  DecisionSpace defense_space;
  DecisionSpace attack_space;
  UtilityFunction defender_utility;
  UtilityFunction attacker_utility;
  OutcomeModel defender_outcomes;
  OutcomeModel attacker_outcomes;
};

/// One draw is one atomic attacker hypothesis: a concrete utility paired
/// with a concrete outcome model.
struct RandomAttackerModel {
  std::function<std::pair<UtilityFunction, OutcomeModel>(RandomSource&)> draw;
};

struct AraGame {
  DecisionSpace defense_space;
  DecisionSpace attack_space;
  UtilityFunction defender_utility;
  OutcomeModel defender_outcomes;
  RandomAttackerModel attacker_model;
};

struct ValidationIssue {
  std::string kind;
  std::string detail;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;
  std::uint64_t probes = 0;
  bool passed() const { return issues.empty(); }
};

namespace detail {

inline double random_code(const DecisionSpace& space, RandomSource& rs) {
  if (space.is_discrete())
    return space.code(static_cast<std::size_t>(rs.next_below(space.size())));
  const auto& b = space.as_box();
  return b.lower[0] + (b.upper[0] - b.lower[0]) * rs.next_double();
}

inline void probe_pair(const DecisionSpace& defs, const DecisionSpace& atks,
                       const UtilityFunction& ud, const UtilityFunction& ua,
                       const OutcomeModel& pd, const OutcomeModel& pa,
                       RandomSource& rs, ValidationReport& report) {
  const double d = random_code(defs, rs);
  const double a = random_code(atks, rs);
  const double theta_d = pd.sampler(d, a, rs);
  const double theta_a = pa.sampler(d, a, rs);
  if (!pd.support.contains(theta_d))
    report.issues.push_back({"outcome outside support",
                             "defender outcome " + std::to_string(theta_d) + " at (d=" +
                                 std::to_string(d) + ", a=" + std::to_string(a) + ")"});
  if (!pa.support.contains(theta_a))
    report.issues.push_back({"outcome outside support",
                             "attacker outcome " + std::to_string(theta_a) + " at (d=" +
                                 std::to_string(d) + ", a=" + std::to_string(a) + ")"});
  if (pd.has_evaluator() && pd.support.contains(theta_d) && !(pd.evaluator(d, a, theta_d) > 0.0))
    report.issues.push_back({"zero-probability sampled outcome",
                             "defender evaluator vanished at sampled theta"});
  if (pa.has_evaluator() && pa.support.contains(theta_a) && !(pa.evaluator(d, a, theta_a) > 0.0))
    report.issues.push_back({"zero-probability sampled outcome",
                             "attacker evaluator vanished at sampled theta"});
  if (ud.declared_positive && !(ud(d, theta_d) > 0.0))
    report.issues.push_back({"non-positive utility",
                             "defender utility at (d=" + std::to_string(d) +
                                 ", theta=" + std::to_string(theta_d) + ")"});
  if (ua.declared_positive && !(ua(a, theta_a) > 0.0))
    report.issues.push_back({"non-positive utility",
                             "attacker utility at (a=" + std::to_string(a) +
                                 ", theta=" + std::to_string(theta_a) + ")"});
}

inline void check_normalization(const DecisionSpace& defs, const DecisionSpace& atks,
                                const OutcomeModel& model, const char* side,
                                ValidationReport& report) {
  if (!model.has_evaluator() || !model.support.is_discrete()) return;
  if (!defs.is_discrete() || !atks.is_discrete()) return;
  for (std::size_t di = 0; di < defs.size(); ++di)
    for (std::size_t ai = 0; ai < atks.size(); ++ai) {
      double total = 0.0;
      for (double theta : model.support.values())
        total += model.evaluator(defs.code(di), atks.code(ai), theta);
      if (std::fabs(total - 1.0) > 1e-9)
        report.issues.push_back({"evaluator not normalized",
                                 std::string(side) + " probabilities sum to " +
                                     std::to_string(total) + " at (d=" + defs.label(di) +
                                     ", a=" + atks.label(ai) + ")"});
    }
}

}  // namespace detail

/// Checks positivity/support/normalization preconditions by randomized
/// probing. Violations are reported, never thrown; MH-based solvers require
/// a passing report before they will run.
inline ValidationReport validate_game(const CompleteInfoGame& game, std::uint64_t probes,
                                      RandomSource& rs) {
  if (probes < 1) throw std::invalid_argument("validate_game: probes must be >= 1");
  ValidationReport report;
  report.probes = probes;
  if (!game.defender_utility.declared_positive)
    report.issues.push_back({"utility not declared positive", "defender"});
  if (!game.attacker_utility.declared_positive)
    report.issues.push_back({"utility not declared positive", "attacker"});
  for (std::uint64_t i = 0; i < probes && report.issues.size() < 64; ++i)
    detail::probe_pair(game.defense_space, game.attack_space, game.defender_utility,
                       game.attacker_utility, game.defender_outcomes, game.attacker_outcomes, rs,
                       report);
  detail::check_normalization(game.defense_space, game.attack_space, game.defender_outcomes,
                              "defender", report);
  detail::check_normalization(game.defense_space, game.attack_space, game.attacker_outcomes,
                              "attacker", report);
  return report;
}

inline ValidationReport validate_game(const AraGame& game, std::uint64_t probes, RandomSource& rs) {
  if (probes < 1) throw std::invalid_argument("validate_game: probes must be >= 1");
  ValidationReport report;
  report.probes = probes;
  if (!game.defender_utility.declared_positive)
    report.issues.push_back({"utility not declared positive", "defender"});
  for (std::uint64_t i = 0; i < probes && report.issues.size() < 64; ++i) {
    auto [ua, pa] = game.attacker_model.draw(rs);
    if (!ua.declared_positive) {
      report.issues.push_back({"utility not declared positive", "drawn attacker utility"});
      continue;
    }
    detail::probe_pair(game.defense_space, game.attack_space, game.defender_utility, ua,
                       game.defender_outcomes, pa, rs, report);
  }
  detail::check_normalization(game.defense_space, game.attack_space, game.defender_outcomes,
                              "defender", report);
  return report;
}

/// Thrown when a solver's positivity or configuration preconditions fail.
class PreconditionError : public std::runtime_error {
 public:
  explicit PreconditionError(const std::string& what) : std::runtime_error(what) {}
};

/// Thrown when an operation needs a capability the game does not provide
/// (exact evaluators, finite spaces, tabulated attack draws).
class CapabilityError : public std::runtime_error {
 public:
  explicit CapabilityError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace aps
