#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "survplan/buchi.hpp"
#include "survplan/error.hpp"
#include "survplan/experiment.hpp"
#include "survplan/scenario.hpp"

namespace py = pybind11;
using namespace survplan;

namespace {

// Same layout as stats.json.
py::dict stats_dict(const RunStats& s) {
  return py::module_::import("json").attr("loads")(stats_json(s, -1));
}

py::list steps_list(const RunTrace& t, const TransitionSystem& ts) {
  py::list out;
  for (std::size_t i = 0; i < t.steps.size(); ++i) {
    const auto& s = t.steps[i];
    py::dict d;
    d["step"] = s.step;
    d["time"] = s.time;
    d["state"] = ts.name(s.ts_to);
    d["ba_state"] = s.ba_to;
    d["subgoal"] = std::string(to_string(s.subgoal_after));
    d["attraction"] = s.attraction;
    d["cost"] = s.cost;
    d["best_cost"] = s.best_cost;
    d["reward"] = t.rewards[i];
    d["survey"] = s.survey;
    d["accepting_inf"] = s.accepting_inf;
    out.append(d);
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_survplan, m) {
  m.doc() = "Receding-horizon surveillance planning under LTL missions";

  auto error = py::register_exception<Error>(m, "Error");
  py::register_exception<ValidationError>(m, "ValidationError", error.ptr());
  py::register_exception<ParseError>(m, "ParseError", error.ptr());
  py::register_exception<ContractError>(m, "ContractError", error.ptr());
  py::register_exception<InternalError>(m, "InternalError", error.ptr());
  py::register_exception<IoError>(m, "IoError", error.ptr());

  m.attr("INFEASIBLE_MESSAGE") = std::string(kInfeasibleMessage);

  py::class_<Scenario>(m, "Scenario")
      .def_readonly("mission", &Scenario::mission)
      .def_readonly("surveillance", &Scenario::surveillance)
      .def_readwrite("visibility", &Scenario::visibility)
      .def_readwrite("horizon", &Scenario::horizon)
      .def_readwrite("potential", &Scenario::potential)
      .def_readwrite("preference", &Scenario::preference)
      .def_readwrite("prefill", &Scenario::prefill)
      .def_readwrite("seed", &Scenario::seed)
      .def_readwrite("iterations", &Scenario::iterations)
      .def_readwrite("runs", &Scenario::runs)
      .def_readwrite("threads", &Scenario::threads)
      .def_property_readonly("states", [](const Scenario& s) {
        std::vector<std::string> names;
        for (StateId q = 0; q < s.ts.size(); ++q) names.push_back(s.ts.name(q));
        return names;
      });

  m.def("parse_scenario", &parse_scenario, py::arg("text"), py::arg("origin") = "<scenario>");
  m.def("load_scenario", &load_scenario, py::arg("path"));
  m.def("default_scenario", [] { return parse_scenario(default_scenario_text(), "<built-in>"); });
  m.def("default_scenario_text", [] { return std::string(default_scenario_text()); });

  m.def(
      "check",
      [](const Scenario& s) {
        const OfflinePlan plan = prepare_offline(s);
        std::size_t acc = 0, sur = 0;
        for (std::size_t i = 0; i < plan.product().size(); ++i) {
          acc += plan.prepared.inf.accepting[i] != 0;
          sur += plan.prepared.inf.surveillance[i] != 0;
        }
        py::dict d;
        d["ts_states"] = plan.ts.size();
        d["automaton_states"] = plan.automaton.size();
        d["product_states"] = plan.prepared.untrimmed_size;
        d["trimmed_states"] = plan.product().size();
        d["accepting_inf"] = acc;
        d["surveillance_inf"] = sur;
        d["label_condition"] = plan.label_condition;
        d["feasible"] = plan.feasible();
        return d;
      },
      py::arg("scenario"), "Runs the offline phase and reports sizes.");

  m.def(
      "run",
      [](const Scenario& s, std::optional<std::filesystem::path> out_dir, bool traces) {
        ExperimentResult res;
        {
          py::gil_scoped_release release;
          res = run_experiment(s);
          if (out_dir) emit_outputs(res, s, *out_dir);
        }
        py::dict d = stats_dict(res.stats);
        if (traces) {
          py::list runs;
          for (const auto& t : res.traces) runs.append(steps_list(t, res.plan->ts));
          d["traces"] = runs;
        }
        return d;
      },
      py::arg("scenario"), py::arg("out_dir") = py::none(), py::arg("traces") = false,
      "Runs the experiment batch; returns statistics and optionally per-step traces.");

  m.def(
      "satisfied_on_lasso",
      [](const std::string& formula, const std::vector<std::string>& props, const std::vector<LabelSet>& stem,
         const std::vector<LabelSet>& loop) {
        PropositionTable table;
        for (const auto& p : props) table.add(p);
        return ltl::satisfied_on_lasso(ltl::parse(formula, table), stem, loop);
      },
      py::arg("formula"), py::arg("propositions"), py::arg("stem"), py::arg("loop"),
      "Evaluates a formula on stem.loop^omega; letters are bitmasks over `propositions`.");

  m.def(
      "automaton_accepts",
      [](const std::string& formula, const std::vector<std::string>& props, const std::vector<LabelSet>& stem,
         const std::vector<LabelSet>& loop) {
        PropositionTable table;
        for (const auto& p : props) table.add(p);
        return lasso_accepts(to_buchi(ltl::parse(formula, table), table.size()), stem, loop);
      },
      py::arg("formula"), py::arg("propositions"), py::arg("stem"), py::arg("loop"));

  m.def(
      "automaton_size",
      [](const std::string& formula, const std::vector<std::string>& props) {
        PropositionTable table;
        for (const auto& p : props) table.add(p);
        return to_buchi(ltl::parse(formula, table), table.size()).size();
      },
      py::arg("formula"), py::arg("propositions"));
}
