#include <cmath>

#include "aps/catalog.hpp"
#include "aps/gibbs_solver.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace aps;

namespace {

CompleteInfoGame synthetic_game() {
  CompleteInfoGame game;
  game.defense_space = DecisionSpace::coded({0, 1, 2});
  game.attack_space = DecisionSpace::coded({0, 1});
  const auto p_success = [](double d, double a) {
    if (a < 0.5) return 0.2;
    return d < 0.5 ? 0.7 : (d < 1.5 ? 0.5 : 0.1);
  };
  OutcomeModel outcomes;
  outcomes.support = OutcomeSupport::discrete({0.0, 1.0});
  outcomes.sampler = [p_success](double d, double a, RandomSource& rs) {
    return static_cast<double>(sample_bernoulli(p_success(d, a), rs));
  };
  outcomes.evaluator = [p_success](double d, double a, double theta) {
    const double p = p_success(d, a);
    return theta > 0.5 ? p : 1.0 - p;
  };
  game.defender_outcomes = outcomes;
  game.attacker_outcomes = outcomes;
  game.defender_utility.evaluator = [](double d, double theta) {
    const double safe[3] = {5.0, 4.0, 3.5};
    const double hit[3] = {1.0, 1.5, 2.0};
    const auto i = static_cast<std::size_t>(d + 0.5);
    return theta > 0.5 ? hit[i] : safe[i];
  };
  game.defender_utility.declared_positive = true;
  game.attacker_utility.evaluator = [](double a, double theta) {
    if (a < 0.5) return theta > 0.5 ? 1.2 : 1.0;
    return theta > 0.5 ? 4.0 : 0.5;
  };
  game.attacker_utility.declared_positive = true;
  return game;
}

}  // namespace

TEST_CASE("enumeration conditionals are proportional to u*p on slices") {
  const CompleteInfoGame game = synthetic_game();
  const FullConditionals conds = enumeration_conditionals(game);
  REQUIRE(conds.exact);
  const auto& t = *conds.exact;
  for (std::size_t d = 0; d < t.nd; ++d)
    for (std::size_t a = 0; a < t.na; ++a)
      for (std::size_t k = 0; k < t.nt_atk; ++k) {
        const double dc = game.defense_space.code(d);
        const double ac = game.attack_space.code(a);
        const double theta = t.attacker_thetas[k];
        const double expected = game.attacker_utility(ac, theta) *
                                game.attacker_outcomes.evaluator(dc, ac, theta);
        CHECK(std::fabs(t.wa_at(d, a, k) - expected) < 1e-9);
      }
}

TEST_CASE("missing conditionals raise a capability error naming the piece") {
  const CompleteInfoGame game = synthetic_game();
  FullConditionals conds = enumeration_conditionals(game);
  conds.defender_defense = nullptr;
  RandomSource rs(1, 0);
  CHECK_THROWS_WITH_AS(solve_complete_gibbs(game, conds, 100, 10, 5, rs),
                       "missing full conditional: defender defense", CapabilityError);
}

TEST_CASE("games without exact evaluators cannot build conditionals") {
  CHECK_THROWS_AS(enumeration_conditionals(catalog::resource_game()), CapabilityError);
}

TEST_CASE("gibbs marginal matches the enumerated target") {
  const CompleteInfoGame game = synthetic_game();
  const auto oracle = catalog::brute_force_solve(game);
  const FullConditionals conds = enumeration_conditionals(game);
  RandomSource rs(3, 0);
  GibbsCounters counters;
  const ApsSolution s = solve_complete_gibbs(game, conds, 2200000, 20000, 200000, rs, &counters);
  CHECK(s.optimal_defense == oracle.optimal_defense);
  for (std::size_t d = 0; d < 3; ++d) CHECK(*s.best_response[d] == oracle.best_response[d]);
  // thinned post-burn-in frequencies vs the normalized defender EU
  std::vector<std::uint64_t> counts(3, 0);
  for (std::size_t i = 200000; i < s.outer_trace.steps.size(); i += 100)
    ++counts[static_cast<std::size_t>(s.outer_trace.steps[i].decision + 0.5)];
  double z = 0.0;
  std::vector<double> expected;
  for (double v : oracle.defender_eu) z += v;
  for (double v : oracle.defender_eu) expected.push_back(v / z);
  CHECK(test_helpers::chi_square(counts, expected) < test_helpers::kChi2_99_df2);
}

TEST_CASE("gibbs draw count matches 2(|D|M + N)") {
  const CompleteInfoGame game = synthetic_game();
  const FullConditionals conds = enumeration_conditionals(game);
  RandomSource rs(5, 0);
  const ApsSolution s = solve_complete_gibbs(game, conds, 101, 13, 7, rs);
  CHECK(s.draws == 2ull * (3 * 13 + 101));
}

TEST_CASE("singleton spaces give a degenerate chain") {
  CompleteInfoGame game = synthetic_game();
  game.defense_space = DecisionSpace::coded({2});
  game.attack_space = DecisionSpace::coded({1});
  // restrict the tables to the singleton slices
  const FullConditionals conds = enumeration_conditionals(game);
  RandomSource rs(7, 0);
  const ApsSolution s = solve_complete_gibbs(game, conds, 50, 10, 5, rs);
  CHECK(s.optimal_defense == 0);
  CHECK(s.mode.support_share == doctest::Approx(1.0));
}

TEST_CASE("ara gibbs solves the toy game to the safe protocol") {
  const AraGame ara = catalog::toy_cyber_ara();
  RandomSource rs(11, 0);
  GibbsCounters counters;
  const ApsSolution s = solve_ara_gibbs(ara, 2000000, 400, 1500, rs, &counters, false);
  CHECK(s.optimal_defense_code == 9.0);
  // rows of the tabulated attack distribution are distributions
  for (const auto& row : s.attack_table) {
    double total = 0.0;
    for (double p : row) total += p;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("ara gibbs attacker stage performs |D| J M sweep pairs") {
  const AraGame ara = catalog::toy_cyber_ara();
  RandomSource rs(13, 0);
  GibbsCounters counters;
  solve_ara_gibbs(ara, 50, 21, 17, rs, &counters, false);
  CHECK(counters.attacker_sweep_pairs == 10ull * 17 * 21);
}

TEST_CASE("point-mass attacker model reproduces the complete-information result") {
  // A degenerate model with a one-hot attack table makes the three-block
  // sweep reducible across best-response blocks, so the reduction is only
  // exact when the induced response map is constant. Use a dominant attack.
  CompleteInfoGame base = synthetic_game();
  base.attacker_utility.evaluator = [](double a, double theta) {
    if (a < 0.5) return 0.1;
    return theta > 0.5 ? 4.0 : 2.0;  // attacking dominates at every defense
  };
  AraGame ara;
  ara.defense_space = base.defense_space;
  ara.attack_space = base.attack_space;
  ara.defender_utility = base.defender_utility;
  ara.defender_outcomes = base.defender_outcomes;
  ara.attacker_model.draw = [&base](RandomSource&) {
    return std::make_pair(base.attacker_utility, base.attacker_outcomes);
  };
  RandomSource rs1(17, 0), rs2(17, 1);
  const ApsSolution via_ara = solve_ara_gibbs(ara, 400000, 2000, 40, rs1, nullptr, false);
  const FullConditionals conds = enumeration_conditionals(base);
  const ApsSolution via_complete =
      solve_complete_gibbs(base, conds, 400000, 20000, 1000, rs2, nullptr, false);
  for (std::size_t d = 0; d < 3; ++d)
    CHECK(via_ara.attack_table[d][*via_complete.best_response[d]] == doctest::Approx(1.0));
  CHECK(via_ara.optimal_defense == via_complete.optimal_defense);
}
