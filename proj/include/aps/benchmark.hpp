#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "aps/aps_solver.hpp"
#include "aps/catalog.hpp"
#include "aps/mc_solver.hpp"
#include "aps/parallel.hpp"

namespace aps {

/// MC-versus-APS scaling harness on the resource game: per grid precision,
/// grow the outer sample count geometrically until the configured share of
/// replications lands on a reference optimum computed by a large MC run.
struct BenchmarkConfig {
  std::vector<double> precisions = {0.1, 0.01};
  double agreement_target = 0.9;
  unsigned replications = 20;
  std::uint64_t inner_samples = 100;      // Q for MC
  std::uint64_t aps_inner_samples = 400;  // M; inner chains are memoized, so
                                          // a bigger budget here is cheap and
                                          // keeps power amplification honest
  std::uint64_t outer_start = 250;        // first stage P / N
  std::uint64_t outer_cap = 1ull << 23;   // growth stops here
  // Reference runs share the replications' inner sample count so both sides
  // see the same best-response noise; only the outer count is grown.
  std::uint64_t reference_inner = 100;
  std::uint64_t reference_outer = 200000;
  int reference_retries = 2;
  unsigned threads = 1;
  catalog::ResourceParams game{};
  /// Called after every growth stage (including failed ones), for progress
  /// reporting on long runs.
  std::function<void(const struct BenchmarkRow&)> on_stage;
};

struct BenchmarkRow {
  double precision = 0.0;
  std::string method;
  std::uint64_t outer_samples = 0;
  std::uint64_t inner_samples = 0;
  int outer_power = 1;
  int inner_power = 1;
  double agreement = 0.0;
  double wall_seconds = 0.0;        // the converged stage alone
  double search_seconds = 0.0;      // cumulative time to reach the target
  bool converged = false;
  double reference_code = 0.0;
};

struct BenchmarkReport {
  std::vector<BenchmarkRow> rows;
  bool reference_stable = true;
};

namespace detail {

inline double elapsed_seconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace detail

inline BenchmarkReport run_benchmark(const BenchmarkConfig& cfg, RandomSource& rs) {
  if (cfg.precisions.empty()) throw std::invalid_argument("benchmark needs at least one precision");
  BenchmarkReport report;

  std::uint64_t precision_tag = 0;
  std::uint64_t mc_start = cfg.outer_start;
  std::uint64_t aps_start = cfg.outer_start;
  for (double precision : cfg.precisions) {
    const CompleteInfoGame game = catalog::resource_grid(precision, cfg.game);
    ++precision_tag;

    // Reference optimum: a large MC run, cross-checked on an independent
    // substream and regrown until the two agree.
    std::size_t reference = 0;
    bool stable = false;
    std::uint64_t ref_outer = cfg.reference_outer;
    for (int attempt = 0; attempt <= cfg.reference_retries && !stable; ++attempt) {
      RandomSource ra = rs.substream(precision_tag * 1000 + 2 * attempt);
      RandomSource rb = rs.substream(precision_tag * 1000 + 2 * attempt + 1);
      const McConfig ref_cfg{.inner_samples = cfg.reference_inner, .outer_samples = ref_outer};
      const std::size_t first = solve_complete_mc(game, ref_cfg, ra).optimal_defense;
      const std::size_t second = solve_complete_mc(game, ref_cfg, rb).optimal_defense;
      if (first == second) {
        reference = first;
        stable = true;
      } else {
        ref_outer *= 4;
      }
    }
    if (!stable) report.reference_stable = false;

    const double reference_code = game.defense_space.code(reference);
    const auto needed =
        static_cast<unsigned>(std::ceil(cfg.agreement_target * cfg.replications));

    // MC arm: double the outer sample count until enough replications agree.
    {
      BenchmarkRow row;
      row.precision = precision;
      row.method = "mc";
      row.inner_samples = cfg.inner_samples;
      row.reference_code = reference_code;
      for (std::uint64_t p = mc_start; p <= cfg.outer_cap; p *= 2) {
        std::vector<unsigned char> hits(cfg.replications, 0);
        const auto start = std::chrono::steady_clock::now();
        parallel_for(cfg.replications, cfg.threads, [&](std::size_t rep) {
          RandomSource sub = rs.substream(precision_tag * 1000000 + p * 64 + rep);
          const McSolution s =
              solve_complete_mc(game, {.inner_samples = cfg.inner_samples, .outer_samples = p}, sub);
          hits[rep] = stable && s.optimal_defense == reference;
        });
        unsigned agree = 0;
        for (auto h : hits) agree += h;
        row.outer_samples = p;
        row.agreement = static_cast<double>(agree) / cfg.replications;
        row.wall_seconds = detail::elapsed_seconds(start);
        row.search_seconds += row.wall_seconds;
        if (stable && agree >= needed) row.converged = true;
        if (cfg.on_stage) cfg.on_stage(row);
        if (row.converged) break;
      }
      // required samples grow with grid size, so the next precision resumes
      // here instead of rediscovering the coarse-grid stages
      if (row.converged) mc_start = row.outer_samples;
      report.rows.push_back(row);
    }

    // APS arm: same growth on the chain length, with the power caps scaled
    // to the grid so the mode stays resolvable as cells shrink.
    {
      BenchmarkRow row;
      row.precision = precision;
      row.method = "aps";
      row.inner_samples = cfg.aps_inner_samples;
      row.reference_code = reference_code;
      const int outer_power_cap = std::max(2, static_cast<int>(std::lround(60.0 / precision)));
      const int inner_power_cap = std::max(2, static_cast<int>(std::lround(5.0 / precision)));
      row.outer_power = outer_power_cap;
      row.inner_power = inner_power_cap;
      for (std::uint64_t n = aps_start; n <= cfg.outer_cap; n *= 2) {
        ApsConfig aps_cfg;
        aps_cfg.outer_iterations = n;
        aps_cfg.outer_burn_in = n / 2;
        aps_cfg.inner_iterations = cfg.aps_inner_samples;
        aps_cfg.inner_burn_in = cfg.aps_inner_samples / 5;
        aps_cfg.inner_power = AnnealSchedule::ladder(
            1, std::max<std::uint64_t>(1, cfg.aps_inner_samples / (2 * inner_power_cap) + 1),
            inner_power_cap);
        aps_cfg.outer_power = AnnealSchedule::ladder(
            1, std::max<std::uint64_t>(1, n / (2 * static_cast<std::uint64_t>(outer_power_cap))),
            outer_power_cap);
        aps_cfg.record_trace = false;
        std::vector<unsigned char> hits(cfg.replications, 0);
        const auto start = std::chrono::steady_clock::now();
        parallel_for(cfg.replications, cfg.threads, [&](std::size_t rep) {
          RandomSource sub = rs.substream(precision_tag * 2000000 + n * 64 + rep);
          const ApsSolution s = solve_complete_aps(game, aps_cfg, sub);
          hits[rep] = stable && s.optimal_defense == reference;
        });
        unsigned agree = 0;
        for (auto h : hits) agree += h;
        row.outer_samples = n;
        row.agreement = static_cast<double>(agree) / cfg.replications;
        row.wall_seconds = detail::elapsed_seconds(start);
        row.search_seconds += row.wall_seconds;
        if (stable && agree >= needed) row.converged = true;
        if (cfg.on_stage) cfg.on_stage(row);
        if (row.converged) break;
      }
      if (row.converged) aps_start = row.outer_samples;
      report.rows.push_back(row);
    }
  }
  return report;
}

}  // namespace aps
