#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "survplan/error.hpp"
#include "survplan/experiment.hpp"
#include "survplan/scenario.hpp"

using namespace survplan;

namespace {

Scenario load(const std::string& path) {
  return path.empty() ? parse_scenario(default_scenario_text(), "<built-in>") : load_scenario(path);
}

int cmd_check(const Scenario& s) {
  const OfflinePlan plan = prepare_offline(s);
  const auto& pr = plan.prepared;
  std::size_t acc = 0, sur = 0;
  for (std::size_t i = 0; i < pr.product.size(); ++i) {
    acc += pr.inf.accepting[i] != 0;
    sur += pr.inf.surveillance[i] != 0;
  }
  std::cout << "mission           " << s.mission << (s.mission_extended ? "  (G F conjunct appended)" : "")
            << "\nsystem            " << plan.ts.size() << " states, " << plan.ts.transition_count()
            << " transitions\nautomaton         " << plan.automaton.size() << " states, "
            << plan.automaton.accepting_count() << " accepting, " << plan.automaton.transition_count()
            << " transitions\nproduct           " << pr.untrimmed_size << " states, " << pr.product.size()
            << " after trimming\naccepting inf     " << acc << "\nsurveillance inf  " << sur
            << "\nlabel condition   " << (plan.label_condition ? "holds" : "fails")
            << "\noffline phase     " << plan.offline_seconds << " s\n";
  if (!plan.feasible()) {
    std::cout << kInfeasibleMessage << '\n';
    return 2;
  }
  std::cout << "feasible\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Receding-horizon surveillance planner"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> iterations, runs;
  std::optional<unsigned> threads;
  std::string pot, pref, out_dir = "out", trace_path;
  bool json = false;

  auto* check = app.add_subcommand("check", "Parse a scenario and run the offline phase");
  check->add_option("-s,--scenario", scenario_path, "Scenario file (built-in case study if omitted)");

  auto* run = app.add_subcommand("run", "Run the experiment batch and write traces and statistics");
  run->add_option("-s,--scenario", scenario_path, "Scenario file (built-in case study if omitted)");
  run->add_option("--seed", seed, "Override the base seed");
  run->add_option("-o,--out", out_dir, "Output directory")->capture_default_str();
  run->add_option("--pot", pot, "Potential function (pot1, pot2)");
  run->add_option("--pref", pref, "Preference function (pref1, pref2, pref3)");
  run->add_option("-n,--iterations", iterations, "Planner steps per run");
  run->add_option("-r,--runs", runs, "Number of runs");
  run->add_option("-j,--threads", threads, "Worker threads (0: all cores)");

  auto* stats = app.add_subcommand("stats", "Recompute statistics from a trace CSV");
  stats->add_option("trace", trace_path, "trace.csv written by run")->required();
  stats->add_flag("--json", json, "Print JSON instead of a table");

  app.add_subcommand("example", "Print the built-in scenario");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("example")) {
      std::cout << default_scenario_text();
      return 0;
    }
    if (check->parsed()) return cmd_check(load(scenario_path));
    if (run->parsed()) {
      Scenario s = load(scenario_path);
      if (seed) s.seed = *seed;
      if (!pot.empty()) s.potential = pot;
      if (!pref.empty()) s.preference = pref;
      if (iterations) s.iterations = *iterations;
      if (runs) s.runs = *runs;
      if (threads) s.threads = *threads;
      make_potential(s.potential, s.policy);
      make_preference(s.preference, s.policy);
      auto plan = std::make_shared<const OfflinePlan>(prepare_offline(s));
      if (!plan->feasible()) {
        std::cerr << kInfeasibleMessage << '\n';
        return 2;
      }
      const ExperimentResult result = run_experiment(s, plan);
      emit_outputs(result, s, out_dir);
      std::cout << stats_text(result.stats) << "outputs written to " << out_dir << '\n';
      return 0;
    }
    if (stats->parsed()) {
      const RunStats st = stats_from_trace_csv(trace_path);
      std::cout << (json ? stats_json(st) + "\n" : stats_text(st));
      return 0;
    }
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << " (at offset " << e.position() << ")\n";
    return 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
