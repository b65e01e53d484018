#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "survplan/planner.hpp"
#include "survplan/scenario.hpp"

namespace survplan {

struct RunTrace {
  std::size_t run = 0;
  std::uint64_t seed = 0;
  std::vector<StepRecord> steps;
  std::vector<double> rewards;        // collected on arrival, per step
  std::vector<double> since_survey;   // collected since the last survey, after the step
  std::vector<double> transmitted;    // handed over at a surveyed state, per step
};

struct Moments {
  std::size_t count = 0;
  double mean = 0.0;      // NaN when count == 0
  double variance = 0.0;  // population variance; NaN when count == 0
};

Moments moments(const std::vector<double>& xs);

struct RunSummary {
  std::size_t run = 0;
  Moments reward;    // per transition
  Moments interval;  // time between consecutive surveys
  std::vector<double> intervals;
};

/// Cross-run aggregate: mean of run means, coefficient of variation of the
/// run means in percent, and mean of run variances.
struct Aggregate {
  double avg = 0.0;
  double nu = 0.0;
  double var = 0.0;
};

struct RunStats {
  std::vector<RunSummary> runs;
  Aggregate reward;
  Aggregate interval;
};

/// Per-run summary from the reward per step and the survey times.
RunSummary summarize_run(std::size_t run, const std::vector<double>& rewards,
                         const std::vector<double>& survey_times);
RunStats aggregate(std::vector<RunSummary> runs);
RunStats compute_stats(const std::vector<RunTrace>& traces);

struct ExperimentResult {
  std::shared_ptr<const OfflinePlan> plan;
  std::vector<RunTrace> traces;
  RunStats stats;
};

/// One run: fresh field and dynamics, `iterations` planner steps.
RunTrace simulate_run(const Scenario& s, std::shared_ptr<const OfflinePlan> plan, std::size_t run);

/// Executes all runs of the scenario, in parallel when s.threads allows.
/// Throws ValidationError with the infeasibility message when the mission
/// cannot be accomplished.
ExperimentResult run_experiment(const Scenario& s, std::shared_ptr<const OfflinePlan> plan = nullptr);

/// Writes trace.csv, series_run<N>.csv, stats.txt and stats.json into `dir`.
void emit_outputs(const ExperimentResult& result, const Scenario& s, const std::filesystem::path& dir);

std::string trace_csv_header();
void write_trace_csv(std::ostream& out, const std::vector<RunTrace>& traces, const TransitionSystem& ts);
std::string stats_text(const RunStats& stats);
std::string stats_json(const RunStats& stats, int indent = 2);
RunStats stats_from_json(const std::string& text);

/// Recomputes the statistics from a trace CSV written by write_trace_csv.
RunStats stats_from_trace_csv(const std::filesystem::path& path);

}  // namespace survplan
