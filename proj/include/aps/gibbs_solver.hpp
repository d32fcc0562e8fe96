#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

#include "aps/aps_solver.hpp"
#include "aps/game.hpp"
#include "aps/mode.hpp"
#include "aps/random.hpp"

namespace aps {

namespace detail {

/// Prenormalized categorical rows: row-major cumulative weights, one draw is
/// one uniform plus a short scan.
struct CumulativeRows {
  std::size_t width = 0;
  std::vector<double> cum;

  void init(std::size_t rows, std::size_t w) {
    width = w;
    cum.assign(rows * w, 0.0);
  }
  double* row(std::size_t r) { return cum.data() + r * width; }
  const double* row(std::size_t r) const { return cum.data() + r * width; }

  void finish_row(std::size_t r) {
    double* c = row(r);
    for (std::size_t i = 1; i < width; ++i) c[i] += c[i - 1];
    if (!(c[width - 1] > 0.0))
      throw PreconditionError("full conditional has zero total mass on a slice");
  }
  std::size_t draw(std::size_t r, RandomSource& rs) const {
    const double* c = row(r);
    const double u = rs.next_double() * c[width - 1];
    std::size_t lo = 0, hi = width - 1;
    while (lo < hi) {
      const std::size_t mid = (lo + hi) / 2;
      if (u > c[mid])
        lo = mid + 1;
      else
        hi = mid;
    }
    return lo;
  }
};

}  // namespace detail

/// Exact weight tensors u*p over the finite augmented grids. The Gibbs
/// sweeps draw from slices of these.
struct GibbsExactTables {
  std::size_t nd = 0, na = 0, nt_def = 0, nt_atk = 0;
  std::vector<double> defender_thetas;
  std::vector<double> attacker_thetas;
  std::vector<double> wa;  // [d][a][theta_atk]: u_A(a,th) p_A(th|d,a)
  std::vector<double> wd;  // [d][a][theta_def]: u_D(d,th) p_D(th|d,a)

  double& wa_at(std::size_t d, std::size_t a, std::size_t t) {
    return wa[(d * na + a) * nt_atk + t];
  }
  double& wd_at(std::size_t d, std::size_t a, std::size_t t) {
    return wd[(d * na + a) * nt_def + t];
  }
  double wa_at(std::size_t d, std::size_t a, std::size_t t) const {
    return wa[(d * na + a) * nt_atk + t];
  }
  double wd_at(std::size_t d, std::size_t a, std::size_t t) const {
    return wd[(d * na + a) * nt_def + t];
  }
};

/// Full-conditional samplers for the Gibbs APS sweeps. Games with finite
/// spaces and exact evaluators get these built automatically by
/// enumeration_conditionals; anything else must supply its own samplers.
struct FullConditionals {
  std::function<std::size_t(std::size_t d, std::size_t a, RandomSource&)> attacker_outcome;
  std::function<std::size_t(std::size_t d, std::size_t theta, RandomSource&)> attacker_attack;
  std::function<std::size_t(std::size_t d, std::span<const std::size_t> best_response,
                            RandomSource&)>
      defender_outcome;
  std::function<std::size_t(std::size_t theta, std::span<const std::size_t> best_response,
                            RandomSource&)>
      defender_defense;
  std::shared_ptr<const GibbsExactTables> exact;
};

inline GibbsExactTables build_exact_tables(const CompleteInfoGame& game) {
  if (!game.defense_space.is_discrete() || !game.attack_space.is_discrete())
    throw CapabilityError("enumeration conditionals need discrete decision spaces");
  if (!game.defender_outcomes.has_evaluator() || !game.defender_outcomes.support.is_discrete())
    throw CapabilityError("enumeration conditionals need an exact finite defender outcome model");
  if (!game.attacker_outcomes.has_evaluator() || !game.attacker_outcomes.support.is_discrete())
    throw CapabilityError("enumeration conditionals need an exact finite attacker outcome model");

  GibbsExactTables t;
  t.nd = game.defense_space.size();
  t.na = game.attack_space.size();
  t.defender_thetas = game.defender_outcomes.support.values();
  t.attacker_thetas = game.attacker_outcomes.support.values();
  t.nt_def = t.defender_thetas.size();
  t.nt_atk = t.attacker_thetas.size();
  t.wa.assign(t.nd * t.na * t.nt_atk, 0.0);
  t.wd.assign(t.nd * t.na * t.nt_def, 0.0);
  for (std::size_t d = 0; d < t.nd; ++d)
    for (std::size_t a = 0; a < t.na; ++a) {
      const double dc = game.defense_space.code(d);
      const double ac = game.attack_space.code(a);
      for (std::size_t k = 0; k < t.nt_atk; ++k) {
        const double th = t.attacker_thetas[k];
        t.wa_at(d, a, k) =
            game.attacker_utility(ac, th) * game.attacker_outcomes.evaluator(dc, ac, th);
      }
      for (std::size_t k = 0; k < t.nt_def; ++k) {
        const double th = t.defender_thetas[k];
        t.wd_at(d, a, k) =
            game.defender_utility(dc, th) * game.defender_outcomes.evaluator(dc, ac, th);
      }
    }
  return t;
}

/// Derives all four conditionals by enumerating u*p over the finite grids.
inline FullConditionals enumeration_conditionals(const CompleteInfoGame& game) {
  auto tables = std::make_shared<const GibbsExactTables>(build_exact_tables(game));
  FullConditionals c;
  c.exact = tables;
  c.attacker_outcome = [tables](std::size_t d, std::size_t a, RandomSource& rs) {
    double total = 0.0;
    const double u = rs.next_double();
    for (std::size_t k = 0; k < tables->nt_atk; ++k) total += tables->wa_at(d, a, k);
    double acc = 0.0;
    for (std::size_t k = 0; k < tables->nt_atk; ++k) {
      acc += tables->wa_at(d, a, k);
      if (u * total <= acc) return k;
    }
    return tables->nt_atk - 1;
  };
  c.attacker_attack = [tables](std::size_t d, std::size_t theta, RandomSource& rs) {
    double total = 0.0;
    const double u = rs.next_double();
    for (std::size_t a = 0; a < tables->na; ++a) total += tables->wa_at(d, a, theta);
    double acc = 0.0;
    for (std::size_t a = 0; a < tables->na; ++a) {
      acc += tables->wa_at(d, a, theta);
      if (u * total <= acc) return a;
    }
    return tables->na - 1;
  };
  c.defender_outcome = [tables](std::size_t d, std::span<const std::size_t> astar,
                                RandomSource& rs) {
    const std::size_t a = astar[d];
    double total = 0.0;
    const double u = rs.next_double();
    for (std::size_t k = 0; k < tables->nt_def; ++k) total += tables->wd_at(d, a, k);
    double acc = 0.0;
    for (std::size_t k = 0; k < tables->nt_def; ++k) {
      acc += tables->wd_at(d, a, k);
      if (u * total <= acc) return k;
    }
    return tables->nt_def - 1;
  };
  c.defender_defense = [tables](std::size_t theta, std::span<const std::size_t> astar,
                                RandomSource& rs) {
    double total = 0.0;
    const double u = rs.next_double();
    for (std::size_t d = 0; d < tables->nd; ++d) total += tables->wd_at(d, astar[d], theta);
    double acc = 0.0;
    for (std::size_t d = 0; d < tables->nd; ++d) {
      acc += tables->wd_at(d, astar[d], theta);
      if (u * total <= acc) return d;
    }
    return tables->nd - 1;
  };
  return c;
}

struct GibbsCounters {
  std::uint64_t attacker_sweep_pairs = 0;
  std::uint64_t defender_sweeps = 0;
  std::uint64_t model_draws = 0;
};

namespace detail {

inline void require_conditional(bool present, const char* name) {
  if (!present) throw CapabilityError(std::string("missing full conditional: ") + name);
}

}  // namespace detail

/// Gibbs APS for the complete-information game. The attacker stage sweeps
/// (outcome, attack) per defense and records the attack mode; the defender
/// stage sweeps (outcome, defense) against the frozen best-response map,
/// which is computed for every defense up front.
inline ApsSolution solve_complete_gibbs(const CompleteInfoGame& game,
                                        const FullConditionals& conds, std::uint64_t n,
                                        std::uint64_t m, std::uint64_t k, RandomSource& rs,
                                        GibbsCounters* counters = nullptr,
                                        bool record_trace = true) {
  detail::require_conditional(static_cast<bool>(conds.attacker_outcome), "attacker outcome");
  detail::require_conditional(static_cast<bool>(conds.attacker_attack), "attacker attack");
  detail::require_conditional(static_cast<bool>(conds.defender_outcome), "defender outcome");
  detail::require_conditional(static_cast<bool>(conds.defender_defense), "defender defense");
  if (n < 1 || m < 1 || k >= n)
    throw std::invalid_argument("solve_complete_gibbs needs n, m >= 1 and k < n");

  const std::size_t nd = game.defense_space.size();
  const std::size_t na = game.attack_space.size();
  ApsSolution out;
  out.seed = rs.seed();
  out.stream = rs.stream();
  out.histogram.assign(nd, 0);
  out.best_response.assign(nd, std::nullopt);

  // Attacker stage: best response per defense as the mode of m sweeps.
  std::vector<std::size_t> astar(nd, 0);
  for (std::size_t d = 0; d < nd; ++d) {
    std::size_t a = static_cast<std::size_t>(rs.next_below(na));
    std::vector<std::uint64_t> counts(na, 0);
    for (std::uint64_t i = 0; i < m; ++i) {
      const std::size_t theta = conds.attacker_outcome(d, a, rs);
      a = conds.attacker_attack(d, theta, rs);
      ++counts[a];
      out.draws += 2;
      if (counters) ++counters->attacker_sweep_pairs;
    }
    const double mode_code = detail::mode_from_histogram(counts, game.attack_space).value;
    for (std::size_t ai = 0; ai < na; ++ai)
      if (game.attack_space.code(ai) == mode_code) astar[d] = ai;
    out.best_response[d] = astar[d];
  }

  // Defender stage against the frozen map.
  std::size_t d_cur = static_cast<std::size_t>(rs.next_below(nd));
  const bool fast = static_cast<bool>(conds.exact);
  detail::CumulativeRows theta_rows, defense_rows;
  if (fast) {
    const auto& t = *conds.exact;
    theta_rows.init(nd, t.nt_def);
    for (std::size_t d = 0; d < nd; ++d) {
      for (std::size_t kk = 0; kk < t.nt_def; ++kk)
        theta_rows.row(d)[kk] = t.wd_at(d, astar[d], kk);
      theta_rows.finish_row(d);
    }
    defense_rows.init(t.nt_def, nd);
    for (std::size_t kk = 0; kk < t.nt_def; ++kk) {
      for (std::size_t d = 0; d < nd; ++d) defense_rows.row(kk)[d] = t.wd_at(d, astar[d], kk);
      defense_rows.finish_row(kk);
    }
  }

  out.outer_trace.burn_in = k;
  out.outer_trace.length = n;
  if (record_trace) out.outer_trace.steps.reserve(n);
  for (std::uint64_t i = 1; i <= n; ++i) {
    std::size_t theta;
    if (fast) {
      theta = theta_rows.draw(d_cur, rs);
      d_cur = defense_rows.draw(theta, rs);
    } else {
      theta = conds.defender_outcome(d_cur, astar, rs);
      d_cur = conds.defender_defense(theta, astar, rs);
    }
    out.draws += 2;
    if (counters) ++counters->defender_sweeps;
    if (record_trace) {
      const double theta_value =
          conds.exact ? conds.exact->defender_thetas[theta] : static_cast<double>(theta);
      out.outer_trace.steps.push_back({i, game.defense_space.code(d_cur),
                                       game.attack_space.code(astar[d_cur]), theta_value, true,
                                       1});
    }
    if (i > k) ++out.histogram[d_cur];
  }
  out.outer_trace.accepted = n;  // Gibbs sweeps always move

  out.mode = detail::mode_from_histogram(out.histogram, game.defense_space);
  for (std::size_t di = 0; di < nd; ++di)
    if (game.defense_space.code(di) == out.mode.value) out.optimal_defense = di;
  out.optimal_defense_code = out.mode.value;
  out.outer_acceptance = 1.0;
  return out;
}

/// Gibbs APS for the ARA game: a J-loop of per-model-draw attacker sweeps
/// tabulates the predictive attack distribution, then a three-block sweep
/// over (defense, outcome, attack) samples the defender's augmented target.
inline ApsSolution solve_ara_gibbs(const AraGame& game, std::uint64_t n, std::uint64_t m,
                                   std::uint64_t j, RandomSource& rs,
                                   GibbsCounters* counters = nullptr, bool record_trace = true) {
  if (!game.defense_space.is_discrete() || !game.attack_space.is_discrete())
    throw CapabilityError("solve_ara_gibbs needs discrete decision spaces");
  if (!game.defender_outcomes.has_evaluator() || !game.defender_outcomes.support.is_discrete())
    throw CapabilityError("solve_ara_gibbs needs an exact finite defender outcome model");
  if (n < 1 || m < 1 || j < 1)
    throw std::invalid_argument("solve_ara_gibbs needs n, m, j >= 1");

  const std::size_t nd = game.defense_space.size();
  const std::size_t na = game.attack_space.size();
  const std::vector<double> thetas = game.defender_outcomes.support.values();
  const std::size_t nt = thetas.size();

  ApsSolution out;
  out.seed = rs.seed();
  out.stream = rs.stream();
  out.histogram.assign(nd, 0);
  out.attack_table.assign(nd, std::vector<double>(na, 0.0));

  // Attacker stage: per defense, J model draws, each swept m times.
  for (std::size_t d = 0; d < nd; ++d) {
    const double dc = game.defense_space.code(d);
    for (std::uint64_t draw = 0; draw < j; ++draw) {
      auto [ua, pa] = game.attacker_model.draw(rs);
      out.draws += 2;
      if (counters) counters->model_draws += 2;
      if (!pa.has_evaluator() || !pa.support.is_discrete())
        throw CapabilityError(
            "solve_ara_gibbs needs exact finite outcome models from the attacker draw");
      const auto& atk_thetas = pa.support.values();
      const std::size_t nta = atk_thetas.size();
      // enumerate u*p for this drawn hypothesis at this defense
      std::vector<double> w(na * nta, 0.0);
      for (std::size_t a = 0; a < na; ++a)
        for (std::size_t t = 0; t < nta; ++t) {
          const double ac = game.attack_space.code(a);
          w[a * nta + t] = ua(ac, atk_thetas[t]) * pa.evaluator(dc, ac, atk_thetas[t]);
        }
      std::size_t a = static_cast<std::size_t>(rs.next_below(na));
      std::vector<std::uint64_t> counts(na, 0);
      for (std::uint64_t i = 0; i < m; ++i) {
        // theta | a then a | theta
        double total = 0.0;
        for (std::size_t t = 0; t < nta; ++t) total += w[a * nta + t];
        double u1 = rs.next_double() * total, acc = 0.0;
        std::size_t theta = nta - 1;
        for (std::size_t t = 0; t < nta; ++t) {
          acc += w[a * nta + t];
          if (u1 <= acc) {
            theta = t;
            break;
          }
        }
        total = 0.0;
        for (std::size_t aa = 0; aa < na; ++aa) total += w[aa * nta + theta];
        double u2 = rs.next_double() * total;
        acc = 0.0;
        for (std::size_t aa = 0; aa < na; ++aa) {
          acc += w[aa * nta + theta];
          if (u2 <= acc) {
            a = aa;
            break;
          }
        }
        ++counts[a];
        out.draws += 2;
        if (counters) ++counters->attacker_sweep_pairs;
      }
      const double mode_code = detail::mode_from_histogram(counts, game.attack_space).value;
      for (std::size_t ai = 0; ai < na; ++ai)
        if (game.attack_space.code(ai) == mode_code) out.attack_table[d][ai] += 1.0;
    }
    for (double& p : out.attack_table[d]) p /= static_cast<double>(j);
  }

  // Defender stage: three-block sweep of pi(d, a, theta) proportional to
  // u_D p_D phat.
  std::vector<double> w3(nd * na * nt, 0.0);
  for (std::size_t d = 0; d < nd; ++d)
    for (std::size_t a = 0; a < na; ++a)
      for (std::size_t t = 0; t < nt; ++t) {
        const double dc = game.defense_space.code(d);
        const double ac = game.attack_space.code(a);
        w3[(d * na + a) * nt + t] = game.defender_utility(dc, thetas[t]) *
                                    game.defender_outcomes.evaluator(dc, ac, thetas[t]) *
                                    out.attack_table[d][a];
      }
  auto w3_at = [&](std::size_t d, std::size_t a, std::size_t t) { return w3[(d * na + a) * nt + t]; };

  // Start from a state the target actually supports: defense uniform, attack
  // from its tabulated distribution, outcome from the conditional slice.
  std::size_t d_cur = static_cast<std::size_t>(rs.next_below(nd));
  std::size_t a_cur = 0;
  std::size_t t_cur = 0;
  {
    double u = rs.next_double(), acc = 0.0;
    for (std::size_t a = 0; a < na; ++a) {
      acc += out.attack_table[d_cur][a];
      if (u <= acc) {
        a_cur = a;
        break;
      }
    }
    double total = 0.0;
    for (std::size_t t = 0; t < nt; ++t) total += w3_at(d_cur, a_cur, t);
    u = rs.next_double() * total;
    acc = 0.0;
    for (std::size_t t = 0; t < nt; ++t) {
      acc += w3_at(d_cur, a_cur, t);
      if (u <= acc) {
        t_cur = t;
        break;
      }
    }
  }

  out.outer_trace.burn_in = 0;
  out.outer_trace.length = n;
  if (record_trace) out.outer_trace.steps.reserve(n);
  for (std::uint64_t i = 1; i <= n; ++i) {
    double total = 0.0, u, acc;
    // d | a, theta
    for (std::size_t d = 0; d < nd; ++d) total += w3_at(d, a_cur, t_cur);
    u = rs.next_double() * total;
    acc = 0.0;
    for (std::size_t d = 0; d < nd; ++d) {
      acc += w3_at(d, a_cur, t_cur);
      if (u <= acc) {
        d_cur = d;
        break;
      }
    }
    // theta | d, a
    total = 0.0;
    for (std::size_t t = 0; t < nt; ++t) total += w3_at(d_cur, a_cur, t);
    u = rs.next_double() * total;
    acc = 0.0;
    for (std::size_t t = 0; t < nt; ++t) {
      acc += w3_at(d_cur, a_cur, t);
      if (u <= acc) {
        t_cur = t;
        break;
      }
    }
    // a | d, theta
    total = 0.0;
    for (std::size_t a = 0; a < na; ++a) total += w3_at(d_cur, a, t_cur);
    u = rs.next_double() * total;
    acc = 0.0;
    for (std::size_t a = 0; a < na; ++a) {
      acc += w3_at(d_cur, a, t_cur);
      if (u <= acc) {
        a_cur = a;
        break;
      }
    }
    out.draws += 3;
    if (counters) ++counters->defender_sweeps;
    if (record_trace)
      out.outer_trace.steps.push_back({i, game.defense_space.code(d_cur),
                                       game.attack_space.code(a_cur), thetas[t_cur], true, 1});
    ++out.histogram[d_cur];
  }
  out.outer_trace.accepted = n;

  out.mode = detail::mode_from_histogram(out.histogram, game.defense_space);
  for (std::size_t di = 0; di < nd; ++di)
    if (game.defense_space.code(di) == out.mode.value) out.optimal_defense = di;
  out.optimal_defense_code = out.mode.value;
  out.outer_acceptance = 1.0;
  return out;
}

}  // namespace aps
