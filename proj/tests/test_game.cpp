#include <cmath>

#include "aps/catalog.hpp"
#include "aps/game.hpp"
#include "doctest.h"

using namespace aps;

TEST_CASE("decision space invariants") {
  CHECK_THROWS(DecisionSpace::discrete({}, {}));
  CHECK_THROWS(DecisionSpace::discrete({"a", "a"}, {0, 1}));
  CHECK_THROWS(DecisionSpace::box({0.0}, {0.0}));
  const DecisionSpace s = DecisionSpace::coded({0, 5, 10});
  CHECK(s.size() == 3);
  CHECK(s.code(1) == 5.0);
  CHECK(s.label(2) == "10");
}

TEST_CASE("toy game validates cleanly") {
  const CompleteInfoGame toy = catalog::toy_cyber();
  RandomSource rs(99, 0);
  const ValidationReport report = validate_game(toy, 10000, rs);
  CHECK(report.passed());
  CHECK(report.probes == 10000);
}

TEST_CASE("validation is deterministic given the seed") {
  const CompleteInfoGame toy = catalog::toy_cyber();
  RandomSource a(4, 2), b(4, 2);
  const auto ra = validate_game(toy, 500, a);
  const auto rb = validate_game(toy, 500, b);
  CHECK(ra.issues.size() == rb.issues.size());
}

TEST_CASE("a negative utility declared positive is flagged") {
  CompleteInfoGame game = catalog::toy_cyber();
  game.defender_utility.evaluator = [](double, double) { return -1.0; };
  game.defender_utility.declared_positive = true;
  RandomSource rs(1, 0);
  const auto report = validate_game(game, 200, rs);
  CHECK_FALSE(report.passed());
  bool found = false;
  for (const auto& issue : report.issues) found = found || issue.kind == "non-positive utility";
  CHECK(found);
}

TEST_CASE("an out-of-support sampler is flagged") {
  CompleteInfoGame game = catalog::toy_cyber();
  game.defender_outcomes.support = OutcomeSupport::interval(0.0, 1.0);
  game.defender_outcomes.sampler = [](double, double, RandomSource&) { return 2.0; };
  game.defender_outcomes.evaluator = nullptr;
  RandomSource rs(1, 0);
  const auto report = validate_game(game, 50, rs);
  CHECK_FALSE(report.passed());
  bool found = false;
  for (const auto& issue : report.issues) found = found || issue.kind == "outcome outside support";
  CHECK(found);
}

TEST_CASE("exact finite evaluators must sum to one") {
  CompleteInfoGame game = catalog::toy_cyber();
  game.attacker_outcomes.evaluator = [](double, double, double theta) {
    return theta > 0.5 ? 0.6 : 0.6;  // sums to 1.2
  };
  RandomSource rs(1, 0);
  const auto report = validate_game(game, 10, rs);
  bool found = false;
  for (const auto& issue : report.issues) found = found || issue.kind == "evaluator not normalized";
  CHECK(found);
}

TEST_CASE("ara validation draws and probes attacker hypotheses") {
  const AraGame ara = catalog::toy_cyber_ara();
  RandomSource rs(12, 0);
  CHECK(validate_game(ara, 2000, rs).passed());
}

TEST_CASE("probe count must be positive") {
  const CompleteInfoGame toy = catalog::toy_cyber();
  RandomSource rs(1, 0);
  CHECK_THROWS_AS(validate_game(toy, 0, rs), std::invalid_argument);
}
