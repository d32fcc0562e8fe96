#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "aps/benchmark.hpp"
#include "aps/catalog.hpp"
#include "aps/diagnostics.hpp"
#include "aps/parallel.hpp"
#include "json.hpp"

namespace aps::run {

using ordered_json = nlohmann::ordered_json;

/// Thrown on malformed configuration; the CLI maps it to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// -- configuration ----------------------------------------------------------

struct PowerSpec {
  int h0 = 1;
  std::uint64_t block = 0;  // 0 = fixed
  int hmax = 1;

  AnnealSchedule schedule() const {
    if (block == 0) return AnnealSchedule::fixed(h0);
    return AnnealSchedule::ladder(h0, block, hmax);
  }
};

struct RunConfig {
  std::string game = "toy-cyber";
  std::string method = "aps";      // mc | aps | gibbs
  std::string info = "complete";   // complete | ara
  std::uint64_t seed = 1;
  unsigned reps = 1;
  unsigned threads = 1;
  std::string out_dir = "out";
  bool svg = false;

  // game parameter overrides
  double risk_coefficient = 1.0;           // toy attacker e
  double utility_shift = catalog::kToyUtilityShift;
  double beta_scale = 1.0;                 // toy-ara (alpha_d, beta_d) multiplier
  double precision = 0.1;                  // resource grid step
  catalog::ResourceParams resource{};
  catalog::DdosParams ddos{};

  // solver parameters
  std::uint64_t mc_q = 1000, mc_p = 10000, mc_j = 2000;
  std::uint64_t aps_n = 20000, aps_m = 2000, aps_k = 400, aps_r = 10000;
  PowerSpec inner_power{5, 0, 5};
  PowerSpec outer_power{1, 204, 50};
  bool memoize = true;
  bool record_trace = true;
  std::optional<std::uint64_t> table_j;
  double kernel_scale = 0.1, kernel_dof = 5.0;
  std::uint64_t gibbs_n = 2000000, gibbs_m = 200000, gibbs_k = 20000, gibbs_j = 2000;

  // attack-dist
  double defense_code = 0.0;
  bool defense_all = false;
  std::uint64_t dist_j = 2000;

  // sensitivity
  std::uint64_t sens_r = 1000;
  double threshold = 0.1;
  bool early_stop = false;
  std::string selector = "mc";
  std::optional<double> utility_offset;  // defaults to the toy shift for toy games

  // benchmark
  BenchmarkConfig benchmark{};
};

namespace detail {

inline void check_keys(const ordered_json& node, const std::set<std::string>& allowed,
                       const std::string& where) {
  for (const auto& [key, value] : node.items())
    if (!allowed.count(key))
      throw ConfigError("unknown key '" + key + "' in " + where);
}

template <typename T>
void read(const ordered_json& node, const char* key, T& into) {
  if (node.contains(key)) {
    try {
      into = node.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
      throw ConfigError(std::string("bad value type for '") + key + "'");
    }
  }
}

inline void read_power(const ordered_json& node, const char* key, PowerSpec& into) {
  if (!node.contains(key)) return;
  const auto& p = node.at(key);
  if (!p.is_object()) throw ConfigError(std::string("'") + key + "' must be an object");
  check_keys(p, {"h0", "block", "hmax"}, key);
  read(p, "h0", into.h0);
  read(p, "block", into.block);
  read(p, "hmax", into.hmax);
  if (into.block == 0) into.hmax = into.h0;
}

}  // namespace detail

/// Parses and validates a configuration document. Unknown keys anywhere are
/// rejected; value sanity is checked before any file is touched.
inline RunConfig parse_config(const ordered_json& doc) {
  RunConfig cfg;
  detail::check_keys(doc,
                     {"game", "method", "info", "seed", "reps", "threads", "out", "svg",
                      "game_params", "mc", "aps", "gibbs", "attack_dist", "sensitivity",
                      "benchmark"},
                     "config");
  detail::read(doc, "game", cfg.game);
  detail::read(doc, "method", cfg.method);
  detail::read(doc, "info", cfg.info);
  detail::read(doc, "seed", cfg.seed);
  detail::read(doc, "reps", cfg.reps);
  detail::read(doc, "threads", cfg.threads);
  detail::read(doc, "out", cfg.out_dir);
  detail::read(doc, "svg", cfg.svg);

  if (doc.contains("game_params")) {
    const auto& g = doc.at("game_params");
    detail::check_keys(g,
                       {"risk_coefficient", "utility_shift", "beta_scale", "precision",
                        "server_value", "defender_unit_cost", "attacker_unit_cost",
                        "defender_risk", "attacker_risk", "defender_concentration", "attacker_concentration",
                        "subscription_base", "subscription_slope"},
                       "game_params");
    detail::read(g, "risk_coefficient", cfg.risk_coefficient);
    detail::read(g, "utility_shift", cfg.utility_shift);
    detail::read(g, "beta_scale", cfg.beta_scale);
    detail::read(g, "precision", cfg.precision);
    detail::read(g, "server_value", cfg.resource.server_value);
    detail::read(g, "defender_unit_cost", cfg.resource.defender_unit_cost);
    detail::read(g, "attacker_unit_cost", cfg.resource.attacker_unit_cost);
    detail::read(g, "defender_risk", cfg.resource.defender_risk);
    detail::read(g, "attacker_risk", cfg.resource.attacker_risk);
    detail::read(g, "defender_concentration", cfg.resource.defender_concentration);
    detail::read(g, "attacker_concentration", cfg.resource.attacker_concentration);
    detail::read(g, "subscription_base", cfg.ddos.subscription_base);
    detail::read(g, "subscription_slope", cfg.ddos.subscription_slope);
  }
  if (doc.contains("mc")) {
    const auto& m = doc.at("mc");
    detail::check_keys(m, {"Q", "P", "J"}, "mc");
    long long q = static_cast<long long>(cfg.mc_q), p = static_cast<long long>(cfg.mc_p),
              j = static_cast<long long>(cfg.mc_j);
    detail::read(m, "Q", q);
    detail::read(m, "P", p);
    detail::read(m, "J", j);
    if (q < 1 || p < 1 || j < 1) throw ConfigError("mc sample counts must be >= 1");
    cfg.mc_q = static_cast<std::uint64_t>(q);
    cfg.mc_p = static_cast<std::uint64_t>(p);
    cfg.mc_j = static_cast<std::uint64_t>(j);
  }
  if (doc.contains("aps")) {
    const auto& a = doc.at("aps");
    detail::check_keys(a,
                       {"N", "M", "K", "R", "memoize", "record_trace", "table_J", "inner_power",
                        "outer_power", "kernel_scale", "kernel_dof"},
                       "aps");
    long long n = static_cast<long long>(cfg.aps_n), m = static_cast<long long>(cfg.aps_m),
              k = static_cast<long long>(cfg.aps_k), r = static_cast<long long>(cfg.aps_r);
    detail::read(a, "N", n);
    detail::read(a, "M", m);
    detail::read(a, "K", k);
    detail::read(a, "R", r);
    if (n < 1 || m < 1 || k < 0 || r < 0 || k >= m || r >= n)
      throw ConfigError("aps chain lengths need N,M >= 1, 0 <= K < M, 0 <= R < N");
    cfg.aps_n = static_cast<std::uint64_t>(n);
    cfg.aps_m = static_cast<std::uint64_t>(m);
    cfg.aps_k = static_cast<std::uint64_t>(k);
    cfg.aps_r = static_cast<std::uint64_t>(r);
    detail::read(a, "memoize", cfg.memoize);
    detail::read(a, "record_trace", cfg.record_trace);
    if (a.contains("table_J")) {
      long long j = 0;
      detail::read(a, "table_J", j);
      if (j < 1) throw ConfigError("aps.table_J must be >= 1");
      cfg.table_j = static_cast<std::uint64_t>(j);
    }
    detail::read_power(a, "inner_power", cfg.inner_power);
    detail::read_power(a, "outer_power", cfg.outer_power);
    detail::read(a, "kernel_scale", cfg.kernel_scale);
    detail::read(a, "kernel_dof", cfg.kernel_dof);
    if (cfg.inner_power.h0 < 1 || cfg.outer_power.h0 < 1)
      throw ConfigError("augmentation powers must be >= 1");
  }
  if (doc.contains("gibbs")) {
    const auto& g = doc.at("gibbs");
    detail::check_keys(g, {"N", "M", "K", "J"}, "gibbs");
    long long n = static_cast<long long>(cfg.gibbs_n), m = static_cast<long long>(cfg.gibbs_m),
              k = static_cast<long long>(cfg.gibbs_k), j = static_cast<long long>(cfg.gibbs_j);
    detail::read(g, "N", n);
    detail::read(g, "M", m);
    detail::read(g, "K", k);
    detail::read(g, "J", j);
    if (n < 1 || m < 1 || k < 0 || k >= n || j < 1)
      throw ConfigError("gibbs lengths need N,M,J >= 1 and 0 <= K < N");
    cfg.gibbs_n = static_cast<std::uint64_t>(n);
    cfg.gibbs_m = static_cast<std::uint64_t>(m);
    cfg.gibbs_k = static_cast<std::uint64_t>(k);
    cfg.gibbs_j = static_cast<std::uint64_t>(j);
  }
  if (doc.contains("attack_dist")) {
    const auto& d = doc.at("attack_dist");
    detail::check_keys(d, {"defense", "all", "J"}, "attack_dist");
    detail::read(d, "defense", cfg.defense_code);
    detail::read(d, "all", cfg.defense_all);
    long long j = static_cast<long long>(cfg.dist_j);
    detail::read(d, "J", j);
    if (j < 1) throw ConfigError("attack_dist.J must be >= 1");
    cfg.dist_j = static_cast<std::uint64_t>(j);
  }
  if (doc.contains("sensitivity")) {
    const auto& s = doc.at("sensitivity");
    detail::check_keys(s, {"R", "threshold", "early_stop", "selector", "utility_offset"},
                       "sensitivity");
    long long r = static_cast<long long>(cfg.sens_r);
    detail::read(s, "R", r);
    if (r < 1) throw ConfigError("sensitivity.R must be >= 1");
    cfg.sens_r = static_cast<std::uint64_t>(r);
    detail::read(s, "threshold", cfg.threshold);
    detail::read(s, "early_stop", cfg.early_stop);
    detail::read(s, "selector", cfg.selector);
    if (s.contains("utility_offset")) {
      double off = 0.0;
      detail::read(s, "utility_offset", off);
      cfg.utility_offset = off;
    }
    if (cfg.selector != "mc" && cfg.selector != "aps" && cfg.selector != "gibbs")
      throw ConfigError("sensitivity.selector must be one of mc|aps|gibbs");
  }
  if (doc.contains("benchmark")) {
    const auto& b = doc.at("benchmark");
    detail::check_keys(b,
                       {"precisions", "agreement", "replications", "inner", "aps_inner",
                        "outer_start", "outer_cap", "reference_inner", "reference_outer"},
                       "benchmark");
    detail::read(b, "precisions", cfg.benchmark.precisions);
    detail::read(b, "agreement", cfg.benchmark.agreement_target);
    detail::read(b, "replications", cfg.benchmark.replications);
    detail::read(b, "inner", cfg.benchmark.inner_samples);
    detail::read(b, "aps_inner", cfg.benchmark.aps_inner_samples);
    detail::read(b, "outer_start", cfg.benchmark.outer_start);
    detail::read(b, "outer_cap", cfg.benchmark.outer_cap);
    detail::read(b, "reference_inner", cfg.benchmark.reference_inner);
    detail::read(b, "reference_outer", cfg.benchmark.reference_outer);
    if (cfg.benchmark.precisions.empty() || cfg.benchmark.replications < 1 ||
        cfg.benchmark.agreement_target <= 0.0 || cfg.benchmark.agreement_target > 1.0)
      throw ConfigError("benchmark needs precisions, replications >= 1 and agreement in (0,1]");
  }

  if (cfg.method != "mc" && cfg.method != "aps" && cfg.method != "gibbs")
    throw ConfigError("method must be one of mc|aps|gibbs");
  if (cfg.info != "complete" && cfg.info != "ara")
    throw ConfigError("info must be complete|ara");
  if (cfg.reps < 1) throw ConfigError("reps must be >= 1");
  return cfg;
}

// -- catalog lookups ---------------------------------------------------------

struct GameEntry {
  std::string name;
  std::string kind;  // complete | ara | continuous
  std::string defense, attack;
};

inline std::vector<GameEntry> list_games() {
  return {
      {"toy-cyber", "complete", "10 protection levels (codes 0-9)", "2 (pass, attack)"},
      {"toy-cyber-ara", "ara", "10 protection levels (codes 0-9)", "2 (pass, attack)"},
      {"resource", "continuous", "[0,1] investment fraction", "[0,1] investment fraction"},
      {"resource-grid-<precision>", "complete", "lattice on [0,1]", "lattice on [0,1]"},
      {"ddos", "ara", "40 subscription levels (0-195 gbps)", "31 intensities (0-30 days)"},
  };
}

inline CompleteInfoGame make_complete_game(const RunConfig& cfg) {
  if (cfg.game == "toy-cyber")
    return catalog::toy_cyber({.attacker_risk_coefficient = cfg.risk_coefficient,
                               .utility_shift = cfg.utility_shift});
  if (cfg.game == "resource")
    throw ConfigError("'resource' is continuous; use resource-grid-<precision>");
  if (cfg.game.rfind("resource-grid-", 0) == 0) {
    const double precision = std::stod(cfg.game.substr(14));
    return catalog::resource_grid(precision, cfg.resource);
  }
  throw ConfigError("unknown complete-information game '" + cfg.game + "'");
}

inline AraGame make_ara_game(const RunConfig& cfg) {
  if (cfg.game == "toy-cyber-ara")
    return catalog::toy_cyber_ara({.beta_scale = cfg.beta_scale,
                                   .utility_shift = cfg.utility_shift});
  if (cfg.game == "ddos") return catalog::ddos(cfg.ddos);
  throw ConfigError("unknown ara game '" + cfg.game + "'");
}

inline ApsConfig make_aps_config(const RunConfig& cfg) {
  ApsConfig out;
  out.outer_iterations = cfg.aps_n;
  out.inner_iterations = cfg.aps_m;
  out.inner_burn_in = cfg.aps_k;
  out.outer_burn_in = cfg.aps_r;
  out.inner_power = cfg.inner_power.schedule();
  out.outer_power = cfg.outer_power.schedule();
  out.memoize_best_responses = cfg.memoize;
  out.record_trace = cfg.record_trace;
  out.table_model_draws = cfg.table_j;
  out.defense_kernel = ProposalKernel::circular_neighbor();
  out.attack_kernel = ProposalKernel::circular_neighbor();
  return out;
}

// -- output ------------------------------------------------------------------

namespace detail {

inline void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << contents;
}

inline std::string csv_number(double v) {
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

/// Minimal static bar-chart rendering of a histogram.
inline std::string histogram_svg(const std::vector<std::string>& labels,
                                 const std::vector<double>& shares) {
  const double bar_width = 36.0, gap = 8.0, height = 240.0, base = 260.0;
  const double width = 40.0 + (bar_width + gap) * static_cast<double>(shares.size());
  double peak = 1e-12;
  for (double s : shares) peak = std::max(peak, s);
  std::ostringstream svg;
  svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width << "' height='300'>\n";
  for (std::size_t i = 0; i < shares.size(); ++i) {
    const double h = height * shares[i] / peak;
    const double x = 20.0 + (bar_width + gap) * static_cast<double>(i);
    svg << "<rect x='" << x << "' y='" << base - h << "' width='" << bar_width << "' height='"
        << h << "' fill='#4878a8'/>\n";
    svg << "<text x='" << x + bar_width / 2 << "' y='278' font-size='11' text-anchor='middle'>"
        << labels[i] << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace detail

struct RunOutput {
  ordered_json summary;
  std::map<std::string, std::string> files;  // name -> contents
};

// -- solve -------------------------------------------------------------------

/// Executes a solve run: `reps` independent replications on derived
/// substreams, merged deterministically. Chain methods pool their
/// post-burn-in histograms; MC reports the replication vote.
inline RunOutput run_solve(const RunConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  RandomSource root(cfg.seed, 0);

  const bool ara = cfg.info == "ara";
  std::optional<CompleteInfoGame> complete;
  std::optional<AraGame> ara_game;
  DecisionSpace defense_space = DecisionSpace::coded({0});
  if (ara) {
    ara_game = make_ara_game(cfg);
    defense_space = ara_game->defense_space;
  } else {
    complete = make_complete_game(cfg);
    defense_space = complete->defense_space;
  }

  // validation gate before any chain runs
  {
    RandomSource probe_rs = root.substream(0xA11CE);
    const ValidationReport report = ara ? validate_game(*ara_game, 2000, probe_rs)
                                        : validate_game(*complete, 2000, probe_rs);
    if (cfg.method != "mc" && !report.passed()) {
      std::string detail = report.issues.front().kind + ": " + report.issues.front().detail;
      throw PreconditionError("validation failed (" + detail + ")");
    }
  }

  const std::size_t nd = defense_space.size();
  std::vector<double> per_rep_optimal(cfg.reps, 0.0);
  std::vector<std::vector<std::uint64_t>> histograms(cfg.reps);
  std::vector<std::vector<double>> utility_traces(cfg.reps);
  std::vector<double> acceptances(cfg.reps, 1.0);
  std::vector<std::uint64_t> draws(cfg.reps, 0);
  ChainTrace first_trace;
  std::vector<std::string> first_attack_labels;

  auto run_rep = [&](std::size_t rep) {
    RandomSource rs = root.substream(rep + 1);
    if (cfg.method == "mc") {
      const McSolution s = ara ? solve_ara_mc(*ara_game,
                                              {.inner_samples = cfg.mc_q,
                                               .outer_samples = cfg.mc_p,
                                               .model_draws = cfg.mc_j},
                                              rs)
                               : solve_complete_mc(*complete,
                                                   {.inner_samples = cfg.mc_q,
                                                    .outer_samples = cfg.mc_p},
                                                   rs);
      per_rep_optimal[rep] = s.optimal_defense_code;
      draws[rep] = s.draws;
      return;
    }
    if (cfg.method == "aps") {
      ApsConfig aps_cfg = make_aps_config(cfg);
      const ApsSolution s =
          ara ? solve_ara_aps(*ara_game, aps_cfg, rs) : solve_complete_aps(*complete, aps_cfg, rs);
      per_rep_optimal[rep] = s.optimal_defense_code;
      histograms[rep] = s.histogram;
      acceptances[rep] = s.outer_acceptance;
      draws[rep] = s.draws;
      if (cfg.record_trace) {
        const UtilityFunction& u =
            ara ? ara_game->defender_utility : complete->defender_utility;
        utility_traces[rep] = utility_trace(u, s.outer_trace);
        if (rep == 0) first_trace = s.outer_trace;
      }
      return;
    }
    // gibbs
    if (ara) {
      const ApsSolution s = solve_ara_gibbs(*ara_game, cfg.gibbs_n, cfg.gibbs_m, cfg.gibbs_j, rs,
                                            nullptr, cfg.record_trace);
      per_rep_optimal[rep] = s.optimal_defense_code;
      histograms[rep] = s.histogram;
      draws[rep] = s.draws;
      if (cfg.record_trace) {
        utility_traces[rep] = utility_trace(ara_game->defender_utility, s.outer_trace);
        if (rep == 0) first_trace = s.outer_trace;
      }
    } else {
      const FullConditionals conds = enumeration_conditionals(*complete);
      const ApsSolution s = solve_complete_gibbs(*complete, conds, cfg.gibbs_n, cfg.gibbs_m,
                                                 cfg.gibbs_k, rs, nullptr, cfg.record_trace);
      per_rep_optimal[rep] = s.optimal_defense_code;
      histograms[rep] = s.histogram;
      draws[rep] = s.draws;
      if (cfg.record_trace) {
        utility_traces[rep] = utility_trace(complete->defender_utility, s.outer_trace);
        if (rep == 0) first_trace = s.outer_trace;
      }
    }
  };
  parallel_for(cfg.reps, cfg.threads, run_rep);

  // merge
  std::vector<double> histogram_share(nd, 0.0);
  double optimal_code = 0.0;
  double mode_share = 0.0;
  if (cfg.method == "mc") {
    std::map<double, std::uint64_t> votes;
    for (double code : per_rep_optimal) ++votes[code];
    std::uint64_t best = 0;
    for (const auto& [code, count] : votes)
      if (count > best) {
        best = count;
        optimal_code = code;
      }
    mode_share = static_cast<double>(best) / cfg.reps;
    for (std::size_t d = 0; d < nd; ++d) {
      const double code = defense_space.code(d);
      histogram_share[d] =
          votes.count(code) ? static_cast<double>(votes[code]) / cfg.reps : 0.0;
    }
  } else {
    std::vector<std::uint64_t> pooled(nd, 0);
    std::uint64_t total = 0;
    for (const auto& h : histograms)
      for (std::size_t d = 0; d < nd; ++d) {
        pooled[d] += h[d];
        total += h[d];
      }
    std::size_t best = 0;
    for (std::size_t d = 0; d < nd; ++d) {
      if (pooled[d] > pooled[best] ||
          (pooled[d] == pooled[best] && defense_space.code(d) < defense_space.code(best)))
        best = d;
      histogram_share[d] = static_cast<double>(pooled[d]) / static_cast<double>(total);
    }
    optimal_code = defense_space.code(best);
    mode_share = histogram_share[best];
  }

  double acceptance_mean = 0.0;
  std::uint64_t draw_total = 0;
  for (unsigned rep = 0; rep < cfg.reps; ++rep) {
    acceptance_mean += acceptances[rep];
    draw_total += draws[rep];
  }
  acceptance_mean /= cfg.reps;

  ordered_json bgr = nullptr;
  if (cfg.reps >= 2 && cfg.method != "mc" && cfg.record_trace) {
    const BgrResult r = bgr_statistic(utility_traces);
    bgr = ordered_json{{"r_hat", r.r_hat}, {"degenerate", r.degenerate}};
  }

  RunOutput out;
  out.summary = ordered_json{
      {"config",
       {{"game", cfg.game},
        {"method", cfg.method},
        {"info", cfg.info},
        {"seed", cfg.seed},
        {"reps", cfg.reps}}},
      {"optimal_decision", optimal_code},
      {"mode_share", mode_share},
      {"acceptance_rate", cfg.method == "mc" ? ordered_json(nullptr) : ordered_json(acceptance_mean)},
      {"bgr", bgr},
      {"sample_draws", draw_total},
      {"per_rep_optimal", per_rep_optimal},
  };

  // histogram.csv
  {
    std::ostringstream csv;
    csv << "decision,frequency\n";
    for (std::size_t d = 0; d < nd; ++d)
      csv << defense_space.label(d) << "," << detail::csv_number(histogram_share[d]) << "\n";
    out.files["histogram.csv"] = csv.str();
  }
  // trace.csv (first replication, chain methods)
  if (cfg.method != "mc" && cfg.record_trace) {
    std::ostringstream csv;
    csv << "iteration,decision,attack,outcome,accepted,power\n";
    for (const auto& s : first_trace.steps)
      csv << s.iteration << "," << detail::csv_number(s.decision) << ","
          << detail::csv_number(s.attack) << "," << detail::csv_number(s.outcome) << ","
          << (s.accepted ? 1 : 0) << "," << s.power << "\n";
    out.files["trace.csv"] = csv.str();
  }
  if (cfg.svg) {
    std::vector<std::string> labels;
    for (std::size_t d = 0; d < nd; ++d) labels.push_back(defense_space.label(d));
    out.files["histogram.svg"] = detail::histogram_svg(labels, histogram_share);
  }
  out.summary["wall_time_s"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

// -- attack-dist --------------------------------------------------------------

inline RunOutput run_attack_dist(const RunConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  if (cfg.info != "ara") throw ConfigError("attack-dist needs an ara game");
  const AraGame game = make_ara_game(cfg);
  RandomSource root(cfg.seed, 0);

  std::vector<std::size_t> targets;
  if (cfg.defense_all) {
    for (std::size_t d = 0; d < game.defense_space.size(); ++d) targets.push_back(d);
  } else {
    bool found = false;
    for (std::size_t d = 0; d < game.defense_space.size(); ++d)
      if (game.defense_space.code(d) == cfg.defense_code) {
        targets.push_back(d);
        found = true;
      }
    if (!found) throw ConfigError("defense code not in the game's defense space");
  }

  std::vector<std::vector<double>> tables(targets.size());
  parallel_for(targets.size(), cfg.threads, [&](std::size_t i) {
    RandomSource rs = root.substream(targets[i] + 1);
    if (cfg.method == "mc") {
      tables[i] = attack_distribution_mc(game, targets[i], cfg.dist_j, cfg.mc_q, rs);
    } else {
      tables[i] = attack_distribution_aps(game, targets[i], cfg.dist_j, make_aps_config(cfg), rs);
    }
  });

  RunOutput out;
  std::ostringstream csv;
  csv << "defense,attack,probability\n";
  ordered_json rows = ordered_json::array();
  for (std::size_t i = 0; i < targets.size(); ++i) {
    double total = 0.0;
    std::size_t argmax = 0;
    for (std::size_t a = 0; a < game.attack_space.size(); ++a) {
      csv << game.defense_space.label(targets[i]) << "," << game.attack_space.label(a) << ","
          << detail::csv_number(tables[i][a]) << "\n";
      total += tables[i][a];
      if (tables[i][a] > tables[i][argmax]) argmax = a;
    }
    rows.push_back({{"defense", game.defense_space.code(targets[i])},
                    {"mode_attack", game.attack_space.code(argmax)},
                    {"total", total}});
  }
  out.files["attack_dist.csv"] = csv.str();
  out.summary = ordered_json{
      {"config", {{"game", cfg.game}, {"method", cfg.method}, {"seed", cfg.seed},
                  {"J", cfg.dist_j}}},
      {"tables", rows},
  };
  out.summary["wall_time_s"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

// -- sensitivity ---------------------------------------------------------------

inline RunOutput run_sensitivity(const RunConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  if (cfg.game != "toy-cyber")
    throw ConfigError("sensitivity perturbation classes are cataloged for toy-cyber");
  const CompleteInfoGame game = make_complete_game(cfg);
  const auto oracle = catalog::brute_force_solve(game);
  const auto classes = catalog::build_toy_perturbation_classes();

  SensitivityOptions opt;
  opt.perturbations = cfg.sens_r;
  opt.threshold = cfg.threshold;
  opt.early_stop = cfg.early_stop;
  opt.threads = cfg.threads;
  opt.utility_offset = cfg.utility_offset.value_or(cfg.utility_shift);
  opt.selector = cfg.selector == "mc"    ? SolverSelector::mc
                 : cfg.selector == "aps" ? SolverSelector::aps
                                         : SolverSelector::gibbs;
  opt.mc = {.inner_samples = cfg.mc_q, .outer_samples = cfg.mc_p};
  opt.aps = make_aps_config(cfg);
  opt.gibbs_n = cfg.gibbs_n;
  opt.gibbs_m = cfg.gibbs_m;
  opt.gibbs_k = cfg.gibbs_k;

  RandomSource rs(cfg.seed, 0);
  const RegretReport report = sensitivity_analysis(game, oracle.optimal_defense,
                                                   classes.utility_class,
                                                   classes.probability_class, opt, rs);

  RunOutput out;
  std::ostringstream csv;
  csv << "index,optimal_decision,regret,regret_fraction\n";
  for (const auto& rec : report.records)
    csv << rec.index << "," << detail::csv_number(rec.optimal_code) << ","
        << detail::csv_number(rec.regret) << "," << detail::csv_number(rec.fraction) << "\n";
  out.files["regret.csv"] = csv.str();

  ordered_json freq = ordered_json::object();
  for (const auto& [code, share] : report.optimum_frequency)
    freq[detail::csv_number(code)] = share;
  out.summary = ordered_json{
      {"config",
       {{"game", cfg.game}, {"selector", cfg.selector}, {"R", cfg.sens_r},
        {"threshold", cfg.threshold}, {"seed", cfg.seed}}},
      {"proposed_decision", oracle.optimal_defense_code},
      {"optimum_frequency", freq},
      {"max_abs_regret", report.max_abs_regret},
      {"max_regret_fraction", report.max_fraction},
      {"verdict", report.robust ? "robust" : "not satisfied"},
      {"early_stopped", report.early_stopped},
      {"skipped", report.skipped},
  };
  out.summary["wall_time_s"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

// -- benchmark ------------------------------------------------------------------

inline RunOutput run_benchmark_cmd(const RunConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  BenchmarkConfig bench = cfg.benchmark;
  bench.threads = cfg.threads;
  bench.game = cfg.resource;
  RandomSource rs(cfg.seed, 0);
  const BenchmarkReport report = run_benchmark(bench, rs);

  RunOutput out;
  std::ostringstream csv;
  csv << "precision,method,outer_samples,inner_samples,outer_power,inner_power,agreement,"
         "stage_time_s,search_time_s,converged\n";
  for (const auto& row : report.rows)
    csv << detail::csv_number(row.precision) << "," << row.method << "," << row.outer_samples
        << "," << row.inner_samples << "," << row.outer_power << "," << row.inner_power << ","
        << detail::csv_number(row.agreement) << "," << detail::csv_number(row.wall_seconds) << ","
        << detail::csv_number(row.search_seconds) << "," << (row.converged ? 1 : 0) << "\n";
  out.files["benchmark.csv"] = csv.str();

  ordered_json rows = ordered_json::array();
  for (const auto& row : report.rows)
    rows.push_back({{"precision", row.precision},
                    {"method", row.method},
                    {"outer_samples", row.outer_samples},
                    {"converged", row.converged},
                    {"stage_time_s", row.wall_seconds},
                    {"search_time_s", row.search_seconds}});
  out.summary = ordered_json{
      {"config", {{"seed", cfg.seed}, {"agreement", bench.agreement_target},
                  {"replications", bench.replications}}},
      {"reference_stable", report.reference_stable},
      {"rows", rows},
  };
  out.summary["wall_time_s"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

/// Writes the run outputs under the configured directory.
inline void emit(const RunConfig& cfg, const RunOutput& out) {
  const std::filesystem::path dir(cfg.out_dir);
  std::filesystem::create_directories(dir);
  detail::write_file(dir / "summary.json", out.summary.dump(2) + "\n");
  for (const auto& [name, contents] : out.files) detail::write_file(dir / name, contents);
}

}  // namespace aps::run
