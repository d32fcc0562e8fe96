#include <cmath>

#include "aps/catalog.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace aps;
using namespace aps::catalog;

TEST_CASE("toy oracle reproduces the published solution") {
  const auto oracle = brute_force_solve(toy_cyber());
  CHECK(oracle.optimal_defense_code == 8.0);
  for (std::size_t d = 0; d <= 7; ++d) CHECK(oracle.best_response[d] == 1);
  CHECK(oracle.best_response[8] == 0);
  CHECK(oracle.best_response[9] == 0);
}

TEST_CASE("toy attacker EU at level 7 matches the closed form") {
  const auto oracle = brute_force_solve(toy_cyber());
  const double expected = 0.10 * std::exp(1.97) + 0.90 * std::exp(-0.53);
  CHECK(oracle.attacker_eu[7][1] == doctest::Approx(expected).epsilon(1e-12));
  CHECK(oracle.attacker_eu[7][1] > 1.0);
  CHECK(oracle.attacker_eu[7][0] == doctest::Approx(1.0));
}

TEST_CASE("one-cell game has trivial tables") {
  CompleteInfoGame game = toy_cyber();
  game.defense_space = DecisionSpace::coded({4});
  game.attack_space = DecisionSpace::coded({1});
  const auto oracle = brute_force_solve(game);
  CHECK(oracle.optimal_defense == 0);
  CHECK(oracle.attacker_eu.size() == 1);
  CHECK(oracle.best_response[0] == 0);
}

TEST_CASE("oracle refuses continuous games") {
  CHECK_THROWS_AS(brute_force_solve(resource_game()), CapabilityError);
}

TEST_CASE("toy defender utility is positive after the shift") {
  const CompleteInfoGame game = toy_cyber();
  CHECK(game.defender_utility.declared_positive);
  CHECK(game.defender_utility(9.0, 1.0) > 0.0);
  CHECK(game.defender_utility(9.0, 1.0) == doctest::Approx(21.0 - std::exp(3.0)));
}

TEST_CASE("perturbation classes") {
  const auto classes = build_toy_perturbation_classes();
  RandomSource rs(9, 0);
  SUBCASE("risk coefficients cover (0,2) with mean about 1") {
    double total = 0.0;
    for (int i = 0; i < 10000; ++i) {
      const UtilityFunction u = classes.utility_class(rs);
      // recover e' from the utility at the success benefit
      const double e = std::log(u(1.0, 1.0)) / kToyAttackGain;
      CHECK(e > 0.0);
      CHECK(e < 2.0);
      total += e;
    }
    CHECK(total / 10000.0 == doctest::Approx(1.0).epsilon(0.02));
  }
  SUBCASE("perturbed success probability for the safe protocol keeps its mean") {
    double total = 0.0;
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
      const OutcomeModel p = classes.probability_class(rs);
      total += p.evaluator(9.0, 1.0, 1.0);
    }
    const double se = std::sqrt(0.001 * 0.01 / n);
    CHECK(std::fabs(total / n - 0.01) < 3.0 * se);
  }
  SUBCASE("the unit coefficient reproduces the nominal attacker utility") {
    const UtilityFunction nominal = toy_attacker_utility(1.0);
    UtilityFunction recovered = toy_attacker_utility(1.0);
    for (double a : {0.0, 1.0})
      for (double theta : {0.0, 1.0}) CHECK(nominal(a, theta) == recovered(a, theta));
  }
}

TEST_CASE("grid discretization") {
  const DecisionSpace unit = DecisionSpace::box({0.0}, {1.0});
  CHECK(grid_discretize(unit, 0.1).size() == 11);
  CHECK(grid_discretize(unit, 0.01).size() == 101);
  const DecisionSpace two = grid_discretize(unit, 1.0);
  CHECK(two.size() == 2);
  CHECK(two.code(0) == 0.0);
  CHECK(two.code(1) == 1.0);
  CHECK_THROWS_AS(grid_discretize(unit, 0.3), std::invalid_argument);
  CHECK_THROWS_AS(grid_discretize(DecisionSpace::coded({0, 1}), 0.1), std::invalid_argument);
}

TEST_CASE("resource game beta parameters are monotone on a grid") {
  for (int i = 0; i <= 20; ++i)
    for (int j = 0; j + 1 <= 20; ++j) {
      const double d = i / 20.0;
      const double a = j / 20.0;
      const double a_next = (j + 1) / 20.0;
      CHECK(resource_alpha(d, a_next) > resource_alpha(d, a));
      CHECK(resource_beta(d, a_next) < resource_beta(d, a));
      CHECK(resource_alpha(a, d) == resource_beta(d, a));  // symmetry of the pair
    }
}

TEST_CASE("resource utilities are positive on the box") {
  const CompleteInfoGame game = resource_game();
  RandomSource rs(3, 0);
  for (int i = 0; i < 2000; ++i) {
    const double d = rs.next_double(), a = rs.next_double(), theta = rs.next_double();
    CHECK(game.defender_utility(d, theta) > 0.0);
    CHECK(game.attacker_utility(a, theta) > 0.0);
  }
}

TEST_CASE("ddos per-attempt breach rate above 15 gbps protection") {
  // tail of the gbps law beyond 15, against the closed-form Poisson sum
  double analytic = 0.0;
  double term = std::exp(-15.0);
  for (int k = 0; k < 5; ++k) {
    analytic += term;
    term *= 15.0 / (k + 1);
  }
  CHECK(analytic < 1e-3);
  RandomSource rs(5, 0);
  std::uint64_t breaches = 0;
  const std::uint64_t n = 1000000;
  for (std::uint64_t i = 0; i < n; ++i) breaches += sample_gamma(5.0, 1.0, rs) > 15.0;
  const double freq = static_cast<double>(breaches) / static_cast<double>(n);
  CHECK(std::fabs(freq - analytic) < 3.0 * std::sqrt(analytic / static_cast<double>(n)));
  CHECK(freq < 1e-3);
}

TEST_CASE("ddos defender utility stays in (0,1] for costs under the scale") {
  const AraGame game = ddos();
  CHECK(game.defender_utility(195.0, 1.5e6) > 0.0);
  CHECK(game.defender_utility(0.0, 0.0) == doctest::Approx(1.0));
  RandomSource rs(6, 0);
  for (int i = 0; i < 200; ++i) {
    const double m = game.defender_outcomes.sampler(10.0, 30.0, rs);
    const double u = game.defender_utility(10.0, m);
    CHECK(u > 0.0);
    CHECK(u <= 1.0);
  }
}

TEST_CASE("ddos market loss is capped") {
  const AraGame game = ddos();
  RandomSource rs(7, 0);
  for (int i = 0; i < 500; ++i) {
    const double m = game.defender_outcomes.sampler(0.0, 30.0, rs);
    CHECK(m <= 1.5e6);
    CHECK(m >= 0.0);
  }
}

TEST_CASE("ddos spaces match the case-study description") {
  const AraGame game = ddos();
  CHECK(game.defense_space.size() == 40);
  CHECK(game.attack_space.size() == 31);
  CHECK(game.defense_space.code(3) == 15.0);
  CHECK(game.attack_space.code(30) == 30.0);
}

TEST_CASE("ddos subscription cost curve") {
  CHECK(ddos_subscription_cost(0.0) == 0.0);
  CHECK(ddos_subscription_cost(15.0) == doctest::Approx(300.0 + 60.0 * 15.0));
  CHECK(ddos_subscription_cost(20.0) > ddos_subscription_cost(15.0));
}

TEST_CASE("finite-support ara oracle agrees with the point-mass reduction") {
  const CompleteInfoGame base = toy_cyber();
  AraGame ara = toy_cyber_ara();
  std::vector<WeightedAttacker> support = {
      {1.0, base.attacker_utility, base.attacker_outcomes}};
  const AraOracleSolution s = brute_force_solve_ara(ara, support);
  const OracleSolution complete = brute_force_solve(base);
  CHECK(s.optimal_defense == complete.optimal_defense);
  for (std::size_t d = 0; d < 10; ++d)
    CHECK(s.attack_table[d][complete.best_response[d]] == doctest::Approx(1.0));
}
