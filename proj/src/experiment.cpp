#include "survplan/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "survplan/error.hpp"

namespace survplan {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

nlohmann::json number_or_null(double x) { return std::isnan(x) ? nlohmann::json() : nlohmann::json(x); }
double number_from(const nlohmann::json& j) { return j.is_null() ? kNaN : j.get<double>(); }

}  // namespace

Moments moments(const std::vector<double>& xs) {
  Moments m;
  m.count = xs.size();
  if (xs.empty()) return {0, kNaN, kNaN};
  double sum = 0.0;
  for (double x : xs) sum += x;
  m.mean = sum / static_cast<double>(xs.size());
  double sq = 0.0;
  for (double x : xs) sq += (x - m.mean) * (x - m.mean);
  m.variance = sq / static_cast<double>(xs.size());
  return m;
}

RunSummary summarize_run(std::size_t run, const std::vector<double>& rewards,
                         const std::vector<double>& survey_times) {
  RunSummary s;
  s.run = run;
  s.reward = moments(rewards);
  for (std::size_t i = 1; i < survey_times.size(); ++i)
    s.intervals.push_back(survey_times[i] - survey_times[i - 1]);
  s.interval = moments(s.intervals);
  return s;
}

RunStats aggregate(std::vector<RunSummary> runs) {
  RunStats st;
  st.runs = std::move(runs);
  const auto agg = [&](auto member) {
    std::vector<double> means, vars;
    for (const auto& r : st.runs) {
      const Moments& m = r.*member;
      if (m.count == 0) continue;
      means.push_back(m.mean);
      vars.push_back(m.variance);
    }
    Aggregate a;
    const Moments mm = moments(means);
    a.avg = mm.mean;
    a.nu = mm.count == 0 ? kNaN : 100.0 * std::sqrt(mm.variance) / mm.mean;
    a.var = moments(vars).mean;
    return a;
  };
  st.reward = agg(&RunSummary::reward);
  st.interval = agg(&RunSummary::interval);
  return st;
}

RunStats compute_stats(const std::vector<RunTrace>& traces) {
  std::vector<RunSummary> runs;
  for (const auto& t : traces) {
    std::vector<double> surveys;
    for (const auto& s : t.steps)
      if (s.survey) surveys.push_back(s.time);
    runs.push_back(summarize_run(t.run, t.rewards, surveys));
  }
  return aggregate(std::move(runs));
}

RunTrace simulate_run(const Scenario& s, std::shared_ptr<const OfflinePlan> plan, std::size_t run) {
  RunTrace t;
  t.run = run;
  t.seed = Rng::derive(s.seed, run);
  CaseStudyParams dp = s.dynamics;
  dp.seed = Rng::derive(t.seed, 2);
  CaseStudyDynamics dynamics(dp);
  PlannerConfig cfg{.horizon = s.horizon,
                    .potential = make_potential(s.potential, s.policy),
                    .preference = make_preference(s.preference, s.policy)};
  Planner planner(plan, cfg, Rng::derive(t.seed, 1));

  RewardField field(plan->ts.size());
  dynamics.evolve(field, s.prefill);
  double since = 0.0;
  for (std::size_t i = 0; i < s.iterations; ++i) {
    StepRecord rec = planner.step(field);
    rec.candidates.clear();
    const double got = dynamics.on_collect(field, rec.ts_to);
    dynamics.evolve(field, rec.weight);
    since += got;
    double sent = 0.0;
    if (rec.survey) {
      sent = since;
      since = 0.0;
    }
    t.steps.push_back(std::move(rec));
    t.rewards.push_back(got);
    t.since_survey.push_back(since);
    t.transmitted.push_back(sent);
  }
  return t;
}

ExperimentResult run_experiment(const Scenario& s, std::shared_ptr<const OfflinePlan> plan) {
  ExperimentResult result;
  result.plan = plan ? std::move(plan) : std::make_shared<const OfflinePlan>(prepare_offline(s));
  if (!result.plan->feasible()) throw ValidationError(std::string(kInfeasibleMessage));
  result.traces.resize(s.runs);

  unsigned threads = s.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : s.threads;
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(s.runs, 1)));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto worker = [&] {
    for (std::size_t r; (r = next++) < s.runs;) {
      try {
        result.traces[r] = simulate_run(s, result.plan, r);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  result.stats = compute_stats(result.traces);
  return result;
}

std::string trace_csv_header() {
  return "run,step,time,state,ba_state,subgoal,attraction,cost,best_cost,reward,elapsed,survey,"
         "accepting_inf,collected_since_survey,tied";
}

void write_trace_csv(std::ostream& out, const std::vector<RunTrace>& traces, const TransitionSystem& ts) {
  out << trace_csv_header() << '\n' << std::setprecision(17);
  for (const auto& t : traces)
    for (std::size_t i = 0; i < t.steps.size(); ++i) {
      const StepRecord& r = t.steps[i];
      out << t.run << ',' << r.step << ',' << r.time << ',' << ts.name(r.ts_to) << ',' << r.ba_to << ','
          << to_string(r.subgoal_after) << ',' << r.attraction << ',' << r.cost << ',' << r.best_cost << ','
          << t.rewards[i] << ',' << r.elapsed_raw << ',' << int(r.survey) << ',' << int(r.accepting_inf)
          << ',' << t.since_survey[i] << ',' << r.tied << '\n';
    }
}

std::string stats_text(const RunStats& st) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(3);
  out << std::left << std::setw(6) << "run" << std::right << std::setw(12) << "r/T avg" << std::setw(12)
      << "r/T var" << std::setw(10) << "surveys" << std::setw(12) << "t avg" << std::setw(12) << "t var"
      << '\n';
  for (const auto& r : st.runs)
    out << std::left << std::setw(6) << r.run << std::right << std::setw(12) << r.reward.mean << std::setw(12)
        << r.reward.variance << std::setw(10) << r.intervals.size() + (r.interval.count ? 1 : 0)
        << std::setw(12) << r.interval.mean << std::setw(12) << r.interval.variance << '\n';
  out << '\n' << std::left << std::setw(6) << "" << std::right << std::setw(12) << "AVG" << std::setw(12)
      << "nu %" << std::setw(12) << "VAR" << '\n';
  const auto row = [&](const char* name, const Aggregate& a) {
    out << std::left << std::setw(6) << name << std::right << std::setw(12) << a.avg << std::setw(12) << a.nu
        << std::setw(12) << a.var << '\n';
  };
  row("r/T", st.reward);
  row("t", st.interval);
  return out.str();
}

std::string stats_json(const RunStats& st, int indent) {
  using nlohmann::json;
  const auto mom = [](const Moments& m) {
    return json{{"count", m.count}, {"mean", number_or_null(m.mean)}, {"variance", number_or_null(m.variance)}};
  };
  const auto agg = [](const Aggregate& a) {
    return json{{"avg", number_or_null(a.avg)}, {"nu", number_or_null(a.nu)}, {"var", number_or_null(a.var)}};
  };
  json runs = json::array();
  for (const auto& r : st.runs)
    runs.push_back({{"run", r.run},
                    {"reward_per_transition", mom(r.reward)},
                    {"inter_survey_time", mom(r.interval)},
                    {"intervals", r.intervals}});
  json j{{"runs", runs},
         {"reward_per_transition", agg(st.reward)},
         {"inter_survey_time", agg(st.interval)}};
  return j.dump(indent);
}

RunStats stats_from_json(const std::string& text) {
  using nlohmann::json;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed stats JSON: ") + e.what());
  }
  const auto mom = [](const json& m) {
    return Moments{m.at("count").get<std::size_t>(), number_from(m.at("mean")), number_from(m.at("variance"))};
  };
  const auto agg = [](const json& a) {
    return Aggregate{number_from(a.at("avg")), number_from(a.at("nu")), number_from(a.at("var"))};
  };
  RunStats st;
  for (const auto& r : j.at("runs"))
    st.runs.push_back({r.at("run").get<std::size_t>(), mom(r.at("reward_per_transition")),
                       mom(r.at("inter_survey_time")), r.at("intervals").get<std::vector<double>>()});
  st.reward = agg(j.at("reward_per_transition"));
  st.interval = agg(j.at("inter_survey_time"));
  return st;
}

namespace {

std::ofstream open_output(const std::filesystem::path& p) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw IoError("cannot write " + p.string());
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& p) {
  out.flush();
  if (!out) throw IoError("write failed: " + p.string());
}

}  // namespace

void emit_outputs(const ExperimentResult& result, const Scenario& s, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  {
    const auto p = dir / "trace.csv";
    auto out = open_output(p);
    write_trace_csv(out, result.traces, result.plan->ts);
    finish(out, p);
  }
  for (const auto& t : result.traces) {
    const auto p = dir / ("series_run" + std::to_string(t.run) + ".csv");
    auto out = open_output(p);
    out << "time,collected_since_survey,transmitted\n" << std::setprecision(17);
    for (std::size_t i = 0; i < t.steps.size(); ++i)
      out << t.steps[i].time << ',' << t.since_survey[i] << ',' << t.transmitted[i] << '\n';
    finish(out, p);
  }
  {
    const auto p = dir / "stats.txt";
    auto out = open_output(p);
    out << "potential " << s.potential << ", preference " << s.preference << ", " << s.runs << " runs x "
        << s.iterations << " iterations, seed " << s.seed << "\n\n"
        << stats_text(result.stats);
    finish(out, p);
  }
  {
    const auto p = dir / "stats.json";
    auto out = open_output(p);
    out << stats_json(result.stats) << '\n';
    finish(out, p);
  }
}

RunStats stats_from_trace_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open trace " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw ValidationError(path.string() + ": empty trace file");
  std::map<std::string, std::size_t> col;
  {
    std::istringstream h(line);
    std::size_t i = 0;
    for (std::string name; std::getline(h, name, ',');) col[name] = i++;
  }
  for (const char* need : {"run", "time", "reward", "survey"})
    if (!col.contains(need)) throw ValidationError(path.string() + ": missing column '" + need + "'");
  std::map<std::size_t, std::pair<std::vector<double>, std::vector<double>>> runs;
  std::size_t number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::istringstream row(line);
    for (std::string c; std::getline(row, c, ',');) cells.push_back(c);
    if (cells.size() != col.size())
      throw ValidationError(path.string() + ":" + std::to_string(number) + ": wrong number of columns");
    try {
      auto& [rewards, surveys] = runs[std::stoull(cells[col["run"]])];
      rewards.push_back(std::stod(cells[col["reward"]]));
      if (cells[col["survey"]] == "1") surveys.push_back(std::stod(cells[col["time"]]));
    } catch (const std::logic_error&) {
      throw ValidationError(path.string() + ":" + std::to_string(number) + ": malformed number");
    }
  }
  std::vector<RunSummary> out;
  for (const auto& [run, data] : runs) out.push_back(summarize_run(run, data.first, data.second));
  return aggregate(std::move(out));
}

}  // namespace survplan
