// Scratch calibration runs; not part of the shipped build.
#include <cmath>
#include <cstdio>

#include "aps/aps_solver.hpp"
#include "aps/catalog.hpp"
#include "aps/gibbs_solver.hpp"
#include "aps/mc_solver.hpp"

using namespace aps;

int main() {
  const CompleteInfoGame toy = catalog::toy_cyber();
  const auto oracle = catalog::brute_force_solve(toy);
  std::printf("complete-info oracle: d*=%zu (code %.0f)\n", oracle.optimal_defense,
              oracle.optimal_defense_code);
  for (std::size_t d = 0; d < 10; ++d)
    std::printf("  d=%zu psiA=(%.6f, %.6f) a*=%zu psiD=%.6f\n", d, oracle.attacker_eu[d][0],
                oracle.attacker_eu[d][1], oracle.best_response[d], oracle.defender_eu[d]);

  // ARA attack probabilities via the per-draw enumeration oracle
  const AraGame ara = catalog::toy_cyber_ara();
  RandomSource rs(1234, 0);
  std::printf("ara p(attack|d), J=2e5 per d:\n");
  std::vector<std::vector<double>> table;
  for (std::size_t d = 0; d < 10; ++d) {
    table.push_back(catalog::ara_attack_distribution_oracle(ara, d, 200000, rs));
    std::printf("  d=%zu p1=%.4f\n", d, table.back()[1]);
  }
  const auto ara_eu = catalog::ara_defender_eu_from_table(ara, table);
  std::size_t best = 0;
  for (std::size_t d = 0; d < 10; ++d) {
    if (ara_eu[d] > ara_eu[best]) best = d;
    std::printf("  d=%zu psiD_ara=%.6f\n", d, ara_eu[d]);
  }
  std::printf("ara oracle argmax d*=%zu\n", best);

  // peaking mass predictions at H=50 from the exact EU tables
  auto mass_at_power = [](const std::vector<double>& eu, int h, std::size_t target) {
    double total = 0.0;
    double best_val = 0.0;
    for (double v : eu) best_val = std::max(best_val, v);
    std::vector<double> w(eu.size());
    for (std::size_t i = 0; i < eu.size(); ++i) {
      w[i] = std::exp(h * (std::log(eu[i]) - std::log(best_val)));
      total += w[i];
    }
    return w[target] / total;
  };
  std::printf("complete-info predicted mass(d=8) at H=50: %.4f\n",
              mass_at_power(oracle.defender_eu, 50, 8));
  std::printf("ara predicted mass(d=9) at H=50: %.4f\n", mass_at_power(ara_eu, 50, 9));

  // scaled-down beta variant (alpha, beta divided by 100)
  const AraGame ara100 = catalog::toy_cyber_ara({.beta_scale = 0.01});
  std::vector<std::vector<double>> table100;
  for (std::size_t d = 0; d < 10; ++d)
    table100.push_back(catalog::ara_attack_distribution_oracle(ara100, d, 100000, rs));
  const auto eu100 = catalog::ara_defender_eu_from_table(ara100, table100);
  std::size_t best100 = 0;
  for (std::size_t d = 0; d < 10; ++d)
    if (eu100[d] > eu100[best100]) best100 = d;
  std::printf("scaled-down variant: argmax d*=%zu p1(8)=%.4f p1(9)=%.4f gap(9-8)=%.5f\n", best100,
              table100[8][1], table100[9][1], eu100[9] - eu100[8]);

  return 0;
}
