#include <doctest.h>

#include <set>

#include "survplan/error.hpp"
#include "survplan/planner.hpp"
#include "survplan/scenario.hpp"

using namespace survplan;

namespace {

// Offline plan around a hand-made automaton.
std::shared_ptr<const OfflinePlan> plan_with(TransitionSystem ts, const BuchiAutomaton& ba, double v) {
  auto plan = std::make_shared<OfflinePlan>();
  plan->surveillance = *ts.propositions().find("sur");
  plan->automaton = ba;
  plan->ts_distances = all_pairs_min_weight(ts);
  plan->visibility = VisibilityMap(ts, plan->ts_distances, v);
  plan->ts_to_survey.assign(ts.size(), kInfinity);
  for (StateId q = 0; q < ts.size(); ++q)
    for (StateId s : ts.states_with(plan->surveillance))
      plan->ts_to_survey[q] = std::min(plan->ts_to_survey[q], plan->ts_distances(q, s));
  plan->prepared = prepare_product(build_product(ts, ba, plan->surveillance));
  for (const auto& s : plan->prepared.product.states()) plan->projection.push_back(s.ts);
  plan->label_condition = check_accepting_label_condition(ba, plan->surveillance);
  plan->ts = std::move(ts);
  return plan;
}

std::shared_ptr<const OfflinePlan> plan_for(TransitionSystem ts, std::string_view mission, double v) {
  const auto f = ltl::parse(mission, ts.propositions());
  const auto sur = *ts.propositions().find("sur");
  return std::make_shared<const OfflinePlan>(prepare_offline(std::move(ts), f, sur, v));
}

// h <-> r, h -> s1 -> S -> h, all weights 1; S is surveyed.
TransitionSystem detour() {
  TransitionSystemBuilder b;
  b.add_proposition("sur");
  b.add_state("h");
  b.add_state("r");
  b.add_state("s1");
  b.add_state("S", {"sur"});
  b.add_transition("h", "r", 1);
  b.add_transition("r", "h", 1);
  b.add_transition("h", "s1", 1);
  b.add_transition("s1", "S", 1);
  b.add_transition("S", "h", 1);
  b.set_initial("h");
  return b.build();
}

PlannerConfig config(std::string_view pot, std::string_view pref, double h) {
  return {.horizon = h, .potential = make_potential(pot), .preference = make_preference(pref)};
}

}  // namespace

TEST_CASE("alpha_bar masking on hand prefixes") {
  using V = std::vector<char>;
  CHECK(alpha_bar_surveys(V{0, 0, 0, 0}, V{0, 1, 0, 1}) == V{0, 0, 0, 0});
  // accepting visit at 1, surveys at 2 and 4 with nothing accepting between
  CHECK(alpha_bar_surveys(V{0, 0, 1, 0, 1}, V{0, 1, 0, 0, 0}) == V{0, 0, 1, 0, 0});
  // an accepting visit separates the two surveys
  CHECK(alpha_bar_surveys(V{0, 0, 1, 0, 1}, V{0, 1, 0, 1, 0}) == V{0, 0, 1, 0, 1});
  // surveys before the first accepting visit are masked, position 0 excepted
  CHECK(alpha_bar_surveys(V{1, 1, 0, 1}, V{0, 0, 1, 0}) == V{1, 0, 0, 1});
  // a surveyed accepting state closes its own window
  CHECK(alpha_bar_surveys(V{0, 1, 0, 1}, V{0, 1, 0, 0}) == V{0, 0, 0, 0});
  CHECK_THROWS_AS(alpha_bar_surveys(V{0}, V{0, 1}), ContractError);
}

TEST_CASE("TS shortening indicator") {
  const auto ts = detour();
  const auto d = all_pairs_min_weight(ts);
  std::vector<double> to(ts.size(), kInfinity);
  for (StateId q = 0; q < ts.size(); ++q) to[q] = d(q, 3);
  CHECK(ts_shortening(to, 2, 3));   // into the surveyed state
  CHECK(ts_shortening(to, 0, 2));
  CHECK_FALSE(ts_shortening(to, 0, 1));
  CHECK_FALSE(ts_shortening(to, 3, 0));
}

TEST_CASE("TS shortening indicator matches a table scan on grids") {
  Rng rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    std::map<std::string, std::vector<Cell>> labels;
    for (int k = 0; k < 3; ++k) labels["sur"].push_back({rng.uniform_int(0, 5), rng.uniform_int(0, 6)});
    const auto ts = build_grid({.rows = 6, .cols = 7}, labels, {0, 0});
    const auto d = all_pairs_min_weight(ts);
    const auto sur = *ts.propositions().find("sur");
    std::vector<double> to(ts.size(), kInfinity);
    for (StateId q = 0; q < ts.size(); ++q)
      for (StateId s : ts.states_with(sur)) to[q] = std::min(to[q], d(q, s));
    for (StateId q = 0; q < ts.size(); ++q)
      for (const Arc& a : ts.successors(q)) {
        double from_q = kInfinity, from_next = kInfinity;
        for (StateId s = 0; s < ts.size(); ++s)
          if (ts.has(s, sur)) {
            from_q = std::min(from_q, d(q, s));
            from_next = std::min(from_next, d(a.to, s));
          }
        CHECK(ts_shortening(to, q, a.to) == (from_next < from_q));
      }
  }
}

TEST_CASE("rewards win until the preference takes over") {
  auto plan = plan_for(detour(), "G F sur", 2);
  Planner planner(plan, config("pot2", "pref1", 1), 1);
  RewardField field(4);
  field.set(1, 20);  // r
  field.set(2, 10);  // s1: half of r
  std::size_t steps = 0;
  while (planner.current_ts() != 2) {
    const double e = planner.elapsed_raw();
    const auto before = planner.current_ts();
    const auto rec = planner.step(field);
    ++steps;
    if (before == 0) {
      // from h: r while E <= 50, s1 once E > 50
      CHECK(rec.ts_to == (e > 50 ? 2u : 1u));
    }
    REQUIRE(steps < 100);
  }
  CHECK(planner.times().back() == 53);  // left h at t = 52, the first time E > 50
}

TEST_CASE("subgoal alternates between surveillance and mission") {
  auto plan = plan_for(detour(), "G F sur", 2);
  Planner planner(plan, config("pot1", "pref1", 1), 3);
  RewardField field(4);
  const auto& inf = plan->prepared.inf;
  Subgoal sg = planner.subgoal();
  CHECK(sg == Subgoal::Surveillance);
  for (int i = 0; i < 200; ++i) {
    const auto rec = planner.step(field);
    CHECK(rec.subgoal_before == sg);
    Subgoal want = sg;
    if (want == Subgoal::Surveillance && inf.surveillance[rec.to]) want = Subgoal::Mission;
    if (want == Subgoal::Mission && inf.accepting[rec.to]) want = Subgoal::Surveillance;
    CHECK(rec.subgoal_after == want);
    sg = rec.subgoal_after;
  }
}

TEST_CASE("simultaneous subgoal hit ends in surveillance") {
  BuchiAutomaton all(1);
  all.add_state(true);
  all.add_transition(0, 0, 0);
  all.add_transition(0, 1, 0);
  TransitionSystemBuilder b;
  b.add_proposition("sur");
  b.add_state("h");
  b.add_state("S", {"sur"});
  b.add_transition("h", "S", 1);
  b.add_transition("S", "h", 1);
  b.set_initial("h");
  auto plan = plan_with(b.build(), all, 1);
  Planner planner(plan, config("pot1", "pref1", 1), 0);
  const auto rec = planner.step(RewardField(2));
  CHECK(rec.surveillance_inf);
  CHECK(rec.accepting_inf);
  CHECK(rec.subgoal_before == Subgoal::Surveillance);
  CHECK(rec.subgoal_after == Subgoal::Surveillance);
}

TEST_CASE("single successor is taken regardless of attraction") {
  auto plan = plan_for(detour(), "G F sur", 2);
  Planner planner(plan, config("pot1", "pref1", 1), 0);
  RewardField field(4);
  field.set(1, 50);
  planner.step(field);  // h -> r (rewarding)
  REQUIRE(planner.current_ts() == 1);
  const auto rec = planner.step(field);
  CHECK(rec.candidates.size() == 1);
  CHECK(rec.ts_to == 0);
}

TEST_CASE("ties are broken at random but replay under a fixed seed") {
  // h has two symmetric successors x and y
  TransitionSystemBuilder b;
  b.add_proposition("sur");
  b.add_state("h", {"sur"});
  b.add_state("x");
  b.add_state("y");
  b.add_transition("h", "x", 1);
  b.add_transition("h", "y", 1);
  b.add_transition("x", "h", 1);
  b.add_transition("y", "h", 1);
  b.set_initial("h");
  auto plan = plan_for(b.build(), "G F sur", 1);
  const auto path = [&](std::uint64_t seed) {
    Planner p(plan, config("pot1", "pref1", 1), seed);
    std::vector<StateId> out;
    for (int i = 0; i < 40; ++i) out.push_back(p.step(RewardField(3)).ts_to);
    return out;
  };
  CHECK(path(5) == path(5));
  const auto run = path(5);
  CHECK(std::count(run.begin(), run.end(), 1u) > 0);
  CHECK(std::count(run.begin(), run.end(), 2u) > 0);
}

TEST_CASE("all-zero attractions fall back to shortening successors") {
  auto plan = plan_for(detour(), "G F sur", 2);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Planner planner(plan, config("pot2", "pref2", 1), seed);
    const auto rec = planner.step(RewardField(4));
    CHECK(rec.attraction == 0);
    CHECK(rec.ts_to == 2);
  }
}

TEST_CASE("attraction adds the preference only on shortening successors") {
  auto plan = plan_for(detour(), "G F sur", 2);
  Planner planner(plan, config("pot2", "pref3", 1), 0);
  RewardField field(4);
  field.set(1, 7);
  field.set(2, 3);
  for (int i = 0; i < 2; ++i) planner.step(field);  // back at h at t = 2 either way
  REQUIRE(planner.current_ts() == 0);
  const double pref = make_preference("pref3")->evaluate(planner.elapsed_raw(), 7);
  for (const auto& c : planner.candidates(field)) {
    const double pot = c.ts == 1 ? 7 : 3;
    CHECK(c.potential == pot);
    CHECK(c.attraction == doctest::Approx(c.shortening ? pot + pref : pot));
  }
  CHECK(planner.evaluate_cost(1, field) == 7);  // not shortening: pot alone
  CHECK(planner.evaluate_cost(2, field) == doctest::Approx(3 + pref));
  CHECK_THROWS_AS(planner.evaluate_cost(3, field), ContractError);
}

TEST_CASE("infeasible missions are refused") {
  TransitionSystemBuilder b;
  b.add_proposition("u");
  b.add_proposition("sur");
  b.add_state("x", {"u", "sur"});
  b.add_state("y");
  b.add_transition("x", "y", 1);
  b.add_transition("y", "x", 1);
  b.set_initial("y");
  auto plan = plan_for(b.build(), "G !u & G F sur", 1);
  CHECK_FALSE(plan->feasible());
  CHECK(plan->prepared.inf.empty());
  try {
    Planner p(plan, config("pot1", "pref1", 1), 0);
    FAIL("planner accepted an infeasible plan");
  } catch (const ContractError& e) {
    CHECK(std::string(e.what()) == kInfeasibleMessage);
  }
}

TEST_CASE("planner invariants along runs of the case study") {
  const auto s = parse_scenario(default_scenario_text());
  auto plan = std::make_shared<const OfflinePlan>(prepare_offline(s));
  REQUIRE(plan->feasible());
  const auto& prod = plan->product();
  for (const char* pref : {"pref1", "pref2", "pref3"}) {
    Planner planner(plan, config("pot1", pref, s.horizon), 42);
    CaseStudyDynamics dyn({.seed = 7});
    RewardField field(plan->ts.size());
    dyn.evolve(field, 20);
    for (int i = 0; i < 150; ++i) {
      const StateId qk = planner.current_ts();
      const double e = planner.elapsed_raw();
      const auto rec = planner.step(field);
      // prefix validity and the time law
      const auto succ = prod.successors(rec.from);
      CHECK(std::any_of(succ.begin(), succ.end(), [&](const Arc& a) { return a.to == rec.to; }));
      CHECK(rec.time - planner.times()[planner.times().size() - 2] == plan->ts.weight(qk, rec.ts_to));
      CHECK(rec.best_cost >= rec.cost);
      // the incremental mask agrees with the projection applied to the whole prefix
      std::vector<char> surveyed, acc;
      for (ProductId p : planner.prefix()) {
        surveyed.push_back(plan->ts.has(plan->projection[p], plan->surveillance));
        acc.push_back(plan->prepared.inf.accepting[p]);
      }
      const auto kept = alpha_bar_surveys(surveyed, acc);
      CHECK(planner.elapsed_masked() == elapsed_since_survey(planner.times(), kept));
      CHECK(planner.elapsed_raw() == elapsed_since_survey(planner.times(), surveyed));
      // once E > 50 the preference beats every successor potential
      double max_pot = 0;
      for (const auto& c : rec.candidates) max_pot = std::max(max_pot, c.potential);
      if (e > 50 && rec.subgoal_before == Subgoal::Surveillance && max_pot > 0)
        CHECK(rec.preference > max_pot);
      dyn.on_collect(field, rec.ts_to);
      dyn.evolve(field, rec.weight);
    }
  }
}
