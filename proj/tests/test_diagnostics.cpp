#include <cmath>
#include <vector>

#include "aps/catalog.hpp"
#include "aps/diagnostics.hpp"
#include "aps/mode.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace aps;

TEST_CASE("discrete mode estimation") {
  CHECK(estimate_mode_discrete({8, 8, 9, 8, 9}).value == 8.0);
  CHECK(estimate_mode_discrete({8, 8, 9, 8, 9}).support_share == doctest::Approx(0.6));
  CHECK(estimate_mode_discrete({1, 2}).value == 1.0);  // tie toward the smaller code
  CHECK_THROWS(estimate_mode_discrete({}));
}

TEST_CASE("discrete mode is permutation invariant") {
  std::vector<double> samples = {3, 1, 3, 2, 3, 1, 1, 3};
  const double forward = estimate_mode_discrete(samples).value;
  std::reverse(samples.begin(), samples.end());
  CHECK(estimate_mode_discrete(samples).value == forward);
}

TEST_CASE("discrete mode finds a unique mode with high probability") {
  int correct = 0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    RandomSource rs(seed, 0);
    std::vector<double> samples(10000);
    for (auto& s : samples) {
      const double u = rs.next_double();
      s = u < 0.55 ? 4.0 : (u < 0.80 ? 2.0 : 7.0);
    }
    correct += estimate_mode_discrete(samples).value == 4.0;
  }
  CHECK(correct == 40);
}

TEST_CASE("continuous mode estimation") {
  SUBCASE("beta(8,2) mode lands near 7/8") {
    RandomSource rs(5, 0);
    std::vector<double> samples(100000);
    for (auto& s : samples) s = sample_beta(8.0, 2.0, rs);
    const ModeEstimate m = estimate_mode_continuous(samples);
    CHECK(std::fabs(m.value - 7.0 / 8.0) < 0.03);
    CHECK_FALSE(m.low_contrast);
  }
  SUBCASE("constant samples return the constant") {
    CHECK(estimate_mode_continuous({2.5, 2.5, 2.5}).value == 2.5);
  }
  SUBCASE("uniform samples are flagged low contrast") {
    RandomSource rs(6, 0);
    std::vector<double> samples(50000);
    for (auto& s : samples) s = rs.next_double();
    CHECK(estimate_mode_continuous(samples).low_contrast);
  }
}

TEST_CASE("bgr statistic") {
  SUBCASE("identical chains sit at 1") {
    RandomSource rs(7, 0);
    std::vector<double> chain(10000);
    for (auto& x : chain) x = sample_normal(0.0, 1.0, rs);
    const BgrResult r = bgr_statistic({chain, chain});
    CHECK_FALSE(r.degenerate);
    CHECK(std::fabs(r.r_hat - 1.0) < 1e-3);
  }
  SUBCASE("independent same-target chains stay under 1.1") {
    RandomSource a(8, 0), b(8, 1);
    std::vector<double> c1(10000), c2(10000);
    for (auto& x : c1) x = sample_normal(0.0, 1.0, a);
    for (auto& x : c2) x = sample_normal(0.0, 1.0, b);
    CHECK(bgr_statistic({c1, c2}).r_hat < 1.1);
  }
  SUBCASE("shifted chains blow past 1.2") {
    RandomSource a(9, 0), b(9, 1);
    std::vector<double> c1(10000), c2(10000);
    for (auto& x : c1) x = sample_normal(0.0, 1.0, a);
    for (auto& x : c2) x = sample_normal(10.0, 1.0, b);
    CHECK(bgr_statistic({c1, c2}).r_hat > 1.2);
  }
  SUBCASE("constant chains come back flagged") {
    const std::vector<double> c(100, 3.0);
    CHECK(bgr_statistic({c, c}).degenerate);
  }
  SUBCASE("input contracts") {
    const std::vector<double> c(100, 3.0);
    CHECK_THROWS(bgr_statistic({c}));
    CHECK_THROWS(bgr_statistic({{1, 2, 3}, {1, 2, 3}}));
  }
}

TEST_CASE("r-hat trends toward 1 as same-target chains lengthen") {
  double previous = 1e9;
  for (std::size_t n : {100u, 1000u, 10000u}) {
    RandomSource a(10, 0), b(10, 1), c(10, 2);
    std::vector<double> c1(n), c2(n), c3(n);
    for (auto& x : c1) x = sample_gamma(3.0, 1.0, a);
    for (auto& x : c2) x = sample_gamma(3.0, 1.0, b);
    for (auto& x : c3) x = sample_gamma(3.0, 1.0, c);
    const double r = bgr_statistic({c1, c2, c3}).r_hat;
    CHECK(r < previous + 0.05);
    previous = r;
  }
  CHECK(previous < 1.02);
}

TEST_CASE("sensitivity with degenerate classes reports zero regret") {
  const CompleteInfoGame toy = catalog::toy_cyber();
  const auto oracle = catalog::brute_force_solve(toy);
  SensitivityOptions opt;
  opt.perturbations = 8;
  opt.threshold = 0.05;
  opt.mc = {.inner_samples = 10000, .outer_samples = 10000};
  RandomSource rs(11, 0);
  const RegretReport report = sensitivity_analysis(
      toy, oracle.optimal_defense,
      [&](RandomSource&) { return toy.attacker_utility; },
      [&](RandomSource&) { return toy.attacker_outcomes; }, opt, rs);
  CHECK(report.robust);
  for (const auto& rec : report.records) CHECK(std::fabs(rec.regret) < 1e-9);
  CHECK(report.optimum_frequency.at(8.0) == doctest::Approx(1.0));
}

TEST_CASE("regret of the nominal model against itself is zero within noise") {
  // same as above but with the Monte Carlo fallback path (no exact evaluator)
  CompleteInfoGame toy = catalog::toy_cyber();
  toy.defender_outcomes.evaluator = nullptr;
  SensitivityOptions opt;
  opt.perturbations = 4;
  opt.threshold = 0.2;
  opt.eu_samples = 40000;
  opt.mc = {.inner_samples = 2000, .outer_samples = 2000};
  RandomSource rs(12, 0);
  const RegretReport report = sensitivity_analysis(
      toy, 8, [&](RandomSource&) { return toy.attacker_utility; },
      [&](RandomSource&) { return toy.attacker_outcomes; }, opt, rs);
  for (const auto& rec : report.records) CHECK(std::fabs(rec.regret) < 0.05);
}

TEST_CASE("toy perturbation sweep reproduces the published frequencies") {
  const CompleteInfoGame toy = catalog::toy_cyber();
  const auto classes = catalog::build_toy_perturbation_classes();
  SensitivityOptions opt;
  opt.perturbations = 10000;
  opt.threshold = 0.05;
  opt.utility_offset = catalog::kToyUtilityShift;
  opt.mc = {.inner_samples = 500, .outer_samples = 500};
  opt.threads = 1;
  RandomSource rs(13, 0);
  const RegretReport report = sensitivity_analysis(toy, 8, classes.utility_class,
                                                   classes.probability_class, opt, rs);
  CHECK(report.optimum_frequency.at(9.0) == doctest::Approx(0.42).epsilon(0.25));
  CHECK(report.optimum_frequency.at(8.0) == doctest::Approx(0.25).epsilon(0.3));
  CHECK(report.optimum_frequency.at(7.0) == doctest::Approx(0.16).epsilon(0.35));
  CHECK(report.max_fraction == doctest::Approx(0.425).epsilon(0.1));
  CHECK_FALSE(report.robust);
}

TEST_CASE("early stop bails at the first violation") {
  const CompleteInfoGame toy = catalog::toy_cyber();
  const auto classes = catalog::build_toy_perturbation_classes();
  SensitivityOptions opt;
  opt.perturbations = 5000;
  opt.threshold = 0.0;  // strict: any nonzero regret violates
  opt.early_stop = true;
  opt.mc = {.inner_samples = 300, .outer_samples = 300};
  RandomSource rs(14, 0);
  const RegretReport report = sensitivity_analysis(toy, 8, classes.utility_class,
                                                   classes.probability_class, opt, rs);
  CHECK(report.early_stopped);
  CHECK_FALSE(report.robust);
  CHECK(report.records.size() < 5000);
}

TEST_CASE("invalid perturbation draws are skipped and counted") {
  const CompleteInfoGame toy = catalog::toy_cyber();
  SensitivityOptions opt;
  opt.perturbations = 10;
  opt.mc = {.inner_samples = 100, .outer_samples = 100};
  RandomSource rs(15, 0);
  int calls = 0;
  const RegretReport report = sensitivity_analysis(
      toy, 8,
      [&](RandomSource&) {
        UtilityFunction u;
        const bool bad = (calls++ % 2) == 0;
        u.evaluator = [bad](double a, double theta) {
          return bad ? -1.0 : std::exp(catalog::toy_attacker_benefit(a, theta));
        };
        u.declared_positive = true;
        return u;
      },
      [&](RandomSource&) { return toy.attacker_outcomes; }, opt, rs);
  CHECK(report.skipped > 0);
  CHECK(report.records.size() + report.skipped == 10);
}

TEST_CASE("sensitivity merge is identical across worker counts") {
  const CompleteInfoGame toy = catalog::toy_cyber();
  const auto classes = catalog::build_toy_perturbation_classes();
  SensitivityOptions opt;
  opt.perturbations = 64;
  opt.threshold = 0.05;
  opt.mc = {.inner_samples = 200, .outer_samples = 200};
  RandomSource rs1(16, 0), rs2(16, 0);
  opt.threads = 1;
  const RegretReport serial = sensitivity_analysis(toy, 8, classes.utility_class,
                                                   classes.probability_class, opt, rs1);
  opt.threads = 4;
  const RegretReport parallel = sensitivity_analysis(toy, 8, classes.utility_class,
                                                     classes.probability_class, opt, rs2);
  REQUIRE(serial.records.size() == parallel.records.size());
  for (std::size_t i = 0; i < serial.records.size(); ++i) {
    CHECK(serial.records[i].optimal_code == parallel.records[i].optimal_code);
    CHECK(serial.records[i].regret == parallel.records[i].regret);
  }
  CHECK(serial.max_fraction == parallel.max_fraction);
}
