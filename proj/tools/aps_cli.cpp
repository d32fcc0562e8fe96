// Command-line front end: game selection, solver configuration, reproducible
// runs, and file emission for plotting.
//
// Exit codes: 0 success, 2 configuration error, 3 solver precondition error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "aps/runner.hpp"

namespace {

using aps::run::ordered_json;

struct CliOverrides {
  std::string config_file;
  ordered_json doc = ordered_json::object();

  ordered_json& node(const std::string& section) {
    if (!doc.contains(section)) doc[section] = ordered_json::object();
    return doc[section];
  }
};

void add_common_flags(CLI::App* cmd, CliOverrides& o) {
  cmd->add_option("--config", o.config_file, "JSON configuration file");
  cmd->add_option_function<std::string>("--game", [&o](const std::string& v) { o.doc["game"] = v; },
                                        "catalog game name");
  cmd->add_option_function<std::string>(
      "--method", [&o](const std::string& v) { o.doc["method"] = v; }, "mc | aps | gibbs");
  cmd->add_option_function<std::string>(
      "--info", [&o](const std::string& v) { o.doc["info"] = v; }, "complete | ara");
  cmd->add_option_function<std::uint64_t>(
      "--seed", [&o](std::uint64_t v) { o.doc["seed"] = v; }, "master seed");
  cmd->add_option_function<unsigned>("--reps", [&o](unsigned v) { o.doc["reps"] = v; },
                                     "independent replications");
  cmd->add_option_function<unsigned>("--threads", [&o](unsigned v) { o.doc["threads"] = v; },
                                     "worker threads (results are thread-count invariant)");
  cmd->add_option_function<std::string>("--out", [&o](const std::string& v) { o.doc["out"] = v; },
                                        "output directory");
  cmd->add_flag_function("--svg",
                         [&o](std::int64_t) { o.doc["svg"] = true; },
                         "also emit a static histogram rendering");

  // game parameter overrides
  cmd->add_option_function<double>(
      "--risk-coefficient",
      [&o](double v) { o.node("game_params")["risk_coefficient"] = v; },
      "toy attacker risk coefficient");
  cmd->add_option_function<double>(
      "--utility-shift", [&o](double v) { o.node("game_params")["utility_shift"] = v; },
      "toy defender positivity shift");
  cmd->add_option_function<double>(
      "--beta-scale", [&o](double v) { o.node("game_params")["beta_scale"] = v; },
      "toy-ara beta parameter multiplier");
  cmd->add_option_function<double>(
      "--subscription-slope",
      [&o](double v) { o.node("game_params")["subscription_slope"] = v; },
      "ddos cost curve slope, euros per gbps");
  cmd->add_option_function<double>(
      "--subscription-base",
      [&o](double v) { o.node("game_params")["subscription_base"] = v; },
      "ddos cost curve base, euros");

  // mc
  cmd->add_option_function<long long>("--Q", [&o](long long v) { o.node("mc")["Q"] = v; },
                                      "mc inner sample count");
  cmd->add_option_function<long long>("--P", [&o](long long v) { o.node("mc")["P"] = v; },
                                      "mc outer sample count");
  cmd->add_option_function<long long>("--J", [&o](long long v) { o.node("mc")["J"] = v; },
                                      "mc attacker-model draw count");

  // aps
  cmd->add_option_function<long long>("--N", [&o](long long v) { o.node("aps")["N"] = v; },
                                      "aps outer chain length");
  cmd->add_option_function<long long>("--M", [&o](long long v) { o.node("aps")["M"] = v; },
                                      "aps inner chain length");
  cmd->add_option_function<long long>("--K", [&o](long long v) { o.node("aps")["K"] = v; },
                                      "aps inner burn-in");
  cmd->add_option_function<long long>("--R", [&o](long long v) { o.node("aps")["R"] = v; },
                                      "aps outer burn-in");
  cmd->add_option_function<long long>(
      "--table-J", [&o](long long v) { o.node("aps")["table_J"] = v; },
      "pre-tabulate the ara attack distribution with this many draws per defense");
  cmd->add_flag_function("--no-memoize",
                         [&o](std::int64_t) { o.node("aps")["memoize"] = false; },
                         "re-estimate best responses at every proposal");
  cmd->add_flag_function("--no-trace",
                         [&o](std::int64_t) { o.node("aps")["record_trace"] = false; },
                         "skip per-iteration trace recording");
  for (const char* side : {"inner", "outer"}) {
    const std::string s(side);
    cmd->add_option_function<int>(
        "--" + s + "-h0",
        [&o, s](int v) { o.node("aps")[s + "_power"]["h0"] = v; },
        s + " augmentation power at iteration 0");
    cmd->add_option_function<long long>(
        "--" + s + "-block",
        [&o, s](long long v) { o.node("aps")[s + "_power"]["block"] = v; },
        s + " anneal ladder block length (0 = fixed)");
    cmd->add_option_function<int>(
        "--" + s + "-hmax",
        [&o, s](int v) { o.node("aps")[s + "_power"]["hmax"] = v; },
        s + " anneal ladder cap");
  }

  // gibbs
  cmd->add_option_function<long long>(
      "--gibbs-N", [&o](long long v) { o.node("gibbs")["N"] = v; }, "gibbs defender sweeps");
  cmd->add_option_function<long long>(
      "--gibbs-M", [&o](long long v) { o.node("gibbs")["M"] = v; }, "gibbs attacker sweeps");
  cmd->add_option_function<long long>(
      "--gibbs-K", [&o](long long v) { o.node("gibbs")["K"] = v; }, "gibbs defender burn-in");
  cmd->add_option_function<long long>(
      "--gibbs-J", [&o](long long v) { o.node("gibbs")["J"] = v; },
      "gibbs attacker-model draws");
}

ordered_json load_config(const CliOverrides& o) {
  ordered_json doc = ordered_json::object();
  if (!o.config_file.empty()) {
    std::ifstream in(o.config_file);
    if (!in) throw aps::run::ConfigError("cannot open config file " + o.config_file);
    try {
      doc = ordered_json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw aps::run::ConfigError(std::string("config parse error: ") + e.what());
    }
  }
  // command-line overrides win, merged one level deep
  for (const auto& [key, value] : o.doc.items()) {
    if (value.is_object() && doc.contains(key) && doc[key].is_object()) {
      for (const auto& [inner_key, inner_value] : value.items()) doc[key][inner_key] = inner_value;
    } else {
      doc[key] = value;
    }
  }
  return doc;
}

int dispatch(const std::string& command, const CliOverrides& overrides) {
  const ordered_json doc = load_config(overrides);
  const aps::run::RunConfig cfg = aps::run::parse_config(doc);
  aps::run::RunOutput out;
  if (command == "solve")
    out = aps::run::run_solve(cfg);
  else if (command == "attack-dist")
    out = aps::run::run_attack_dist(cfg);
  else if (command == "sensitivity")
    out = aps::run::run_sensitivity(cfg);
  else if (command == "benchmark")
    out = aps::run::run_benchmark_cmd(cfg);
  aps::run::emit(cfg, out);
  std::printf("%s: wrote %s/summary.json", command.c_str(), cfg.out_dir.c_str());
  if (out.summary.contains("optimal_decision"))
    std::printf(" (optimal decision %s)", out.summary["optimal_decision"].dump().c_str());
  std::printf("\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulation solvers for sequential defend-attack games"};
  app.require_subcommand(1);

  CliOverrides overrides;
  std::string pending;
  for (const char* name : {"solve", "attack-dist", "sensitivity", "benchmark"}) {
    CLI::App* cmd = app.add_subcommand(name, name);
    add_common_flags(cmd, overrides);
    if (std::string(name) == "attack-dist") {
      cmd->add_option_function<double>(
          "--defense",
          [&overrides](double v) { overrides.node("attack_dist")["defense"] = v; },
          "defense code to tabulate");
      cmd->add_flag_function(
          "--all-defenses",
          [&overrides](std::int64_t) { overrides.node("attack_dist")["all"] = true; },
          "tabulate every defense");
      cmd->add_option_function<long long>(
          "--dist-J",
          [&overrides](long long v) { overrides.node("attack_dist")["J"] = v; },
          "attack draws per defense");
    }
    if (std::string(name) == "sensitivity") {
      cmd->add_option_function<long long>(
          "--sweep-R",
          [&overrides](long long v) { overrides.node("sensitivity")["R"] = v; },
          "number of perturbations");
      cmd->add_option_function<double>(
          "--threshold",
          [&overrides](double v) { overrides.node("sensitivity")["threshold"] = v; },
          "maximum acceptable |regret|");
      cmd->add_flag_function(
          "--early-stop",
          [&overrides](std::int64_t) { overrides.node("sensitivity")["early_stop"] = true; },
          "stop at the first violation");
      cmd->add_option_function<std::string>(
          "--selector",
          [&overrides](const std::string& v) { overrides.node("sensitivity")["selector"] = v; },
          "solver used per perturbation: mc | aps | gibbs");
      cmd->add_option_function<double>(
          "--utility-offset",
          [&overrides](double v) { overrides.node("sensitivity")["utility_offset"] = v; },
          "offset subtracted before regret fractions");
    }
    if (std::string(name) == "benchmark") {
      cmd->add_option_function<std::vector<double>>(
          "--precisions",
          [&overrides](const std::vector<double>& v) {
            overrides.node("benchmark")["precisions"] = v;
          },
          "grid precisions to benchmark");
      cmd->add_option_function<double>(
          "--agreement",
          [&overrides](double v) { overrides.node("benchmark")["agreement"] = v; },
          "required share of replications on the reference optimum");
      cmd->add_option_function<unsigned>(
          "--replications",
          [&overrides](unsigned v) { overrides.node("benchmark")["replications"] = v; },
          "replications per stage");
      cmd->add_option_function<long long>(
          "--outer-start",
          [&overrides](long long v) { overrides.node("benchmark")["outer_start"] = v; },
          "first-stage outer sample count");
      cmd->add_option_function<long long>(
          "--bench-inner",
          [&overrides](long long v) { overrides.node("benchmark")["inner"] = v; },
          "fixed inner sample count");
    }
    cmd->callback([&pending, name] { pending = name; });
  }
  CLI::App* list_cmd = app.add_subcommand("list-games", "list the game catalog");
  list_cmd->callback([&pending] { pending = "list-games"; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (pending == "list-games") {
    std::printf("%-26s %-11s %-38s %s\n", "name", "kind", "defense space", "attack space");
    for (const auto& g : aps::run::list_games())
      std::printf("%-26s %-11s %-38s %s\n", g.name.c_str(), g.kind.c_str(), g.defense.c_str(),
                  g.attack.c_str());
    return 0;
  }

  try {
    return dispatch(pending, overrides);
  } catch (const aps::run::ConfigError& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 2;
  } catch (const aps::PreconditionError& e) {
    std::fprintf(stderr, "solver precondition error: %s\n", e.what());
    return 3;
  } catch (const aps::CapabilityError& e) {
    std::fprintf(stderr, "capability error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
