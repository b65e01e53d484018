#include "survplan/planner.hpp"

#include <algorithm>
#include <chrono>

#include "survplan/error.hpp"

namespace survplan {

OfflinePlan prepare_offline(TransitionSystem ts, const ltl::Formula& mission, PropId surveillance,
                            double visibility) {
  const auto start = std::chrono::steady_clock::now();
  OfflinePlan plan;
  plan.ts = std::move(ts);
  plan.surveillance = surveillance;
  plan.mission = mission;
  if (surveillance >= plan.ts.propositions().size())
    throw ValidationError("surveillance proposition is not declared");
  if (!ltl::has_surveillance_conjunct(mission, surveillance))
    throw ValidationError("mission must contain G F " + plan.ts.propositions().name(surveillance));

  plan.automaton = to_buchi(mission, plan.ts.propositions().size());
  plan.label_condition = check_accepting_label_condition(plan.automaton, surveillance);
  plan.ts_distances = all_pairs_min_weight(plan.ts);
  plan.visibility = VisibilityMap(plan.ts, plan.ts_distances, visibility);

  plan.ts_to_survey.assign(plan.ts.size(), kInfinity);
  const auto surveyed = plan.ts.states_with(surveillance);
  for (StateId q = 0; q < plan.ts.size(); ++q)
    for (StateId s : surveyed) plan.ts_to_survey[q] = std::min(plan.ts_to_survey[q], plan.ts_distances(q, s));

  plan.prepared = prepare_product(build_product(plan.ts, plan.automaton, surveillance));
  for (const auto& s : plan.prepared.product.states()) plan.projection.push_back(s.ts);
  plan.offline_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return plan;
}

bool ts_shortening(std::span<const double> ts_to_survey, StateId q, StateId q2) {
  return ts_to_survey[q2] < ts_to_survey[q];
}

std::string_view to_string(Subgoal s) {
  return s == Subgoal::Surveillance ? "surveillance" : "mission";
}

std::vector<char> alpha_bar_surveys(std::span<const char> surveyed,
                                    std::span<const char> accepting_inf) {
  if (surveyed.size() != accepting_inf.size())
    throw ContractError("alpha_bar_surveys: mask lengths differ");
  std::vector<char> kept(surveyed.size(), 0);
  bool seen_accepting = false;
  bool clean = false;  // no survey since the latest accepting visit
  for (std::size_t i = 0; i < surveyed.size(); ++i) {
    kept[i] = surveyed[i] && (i == 0 || (seen_accepting && clean));
    if (accepting_inf[i]) {
      seen_accepting = true;
      clean = !surveyed[i];
    } else if (surveyed[i]) {
      clean = false;
    }
  }
  return kept;
}

Planner::Planner(std::shared_ptr<const OfflinePlan> plan, PlannerConfig config, std::uint64_t seed)
    : plan_(std::move(plan)), config_(std::move(config)), rng_(seed) {
  if (!plan_ || !plan_->feasible()) throw ContractError(std::string(kInfeasibleMessage));
  if (!config_.potential || !config_.preference)
    throw ContractError("planner needs a potential and a preference function");
  if (config_.horizon < plan_->ts.max_weight())
    throw ValidationError("horizon is shorter than the heaviest transition");
  record_position(plan_->product().initial(), 0.0);
}

void Planner::record_position(ProductId p, double time) {
  const auto& inf = plan_->prepared.inf;
  const bool surveyed = plan_->ts.has(plan_->projection[p], plan_->surveillance);
  const bool first = prefix_.empty();
  prefix_.push_back(p);
  times_.push_back(time);
  if (surveyed) {
    last_survey_ = time;
    if (first || (seen_accepting_ && window_clean_)) last_unmasked_survey_ = time;
  }
  if (inf.accepting[p]) {
    seen_accepting_ = true;
    window_clean_ = !surveyed;
  } else if (surveyed) {
    window_clean_ = false;
  }
}

LocalContext Planner::ts_context(const RewardField& field) const {
  const StateId q = current_ts();
  return {.graph = &plan_->ts.graph(),
          .projection = {},
          .current = q,
          .visible = plan_->visibility.visible_from(q),
          .rewards = field.values(),
          .horizon = config_.horizon};
}

LocalContext Planner::product_context(const RewardField& field) const {
  LocalContext ctx = ts_context(field);
  ctx.graph = &plan_->product().graph();
  ctx.projection = plan_->projection;
  return ctx;
}

double Planner::max_successor_potential(const RewardField& field) const {
  const LocalContext ctx = ts_context(field);
  double best = 0.0;
  for (const Arc& a : plan_->ts.successors(ctx.current))
    best = std::max(best, config_.potential->evaluate(ctx, a.to, a.weight));
  return best;
}

double Planner::evaluate_cost(StateId q, const RewardField& field) const {
  const LocalContext ctx = ts_context(field);
  const auto w = plan_->ts.weight(ctx.current, q);
  if (!w) throw ContractError("evaluate_cost: not a successor of the current state");
  double cost = config_.potential->evaluate(ctx, q, *w);
  if (ts_shortening(plan_->ts_to_survey, ctx.current, q))
    cost += config_.preference->evaluate(elapsed_raw(), max_successor_potential(field));
  return cost;
}

std::vector<Candidate> Planner::candidates(const RewardField& field) const {
  const LocalContext ctx = product_context(field);
  const ProductId p = current();
  const bool surveillance = subgoal_ == Subgoal::Surveillance;
  const double elapsed = surveillance ? elapsed_raw() : elapsed_masked();
  const double pref = config_.preference->evaluate(elapsed, max_successor_potential(field));
  const auto& ind = surveillance ? plan_->prepared.indicators.surveillance[p]
                                 : plan_->prepared.indicators.mission[p];
  std::vector<Candidate> out;
  const auto arcs = plan_->product().successors(p);
  for (std::size_t i = 0; i < arcs.size(); ++i) {
    Candidate c{.node = arcs[i].to,
                .ts = plan_->projection[arcs[i].to],
                .weight = arcs[i].weight,
                .potential = config_.potential->evaluate(ctx, arcs[i].to, arcs[i].weight),
                .shortening = ind[i] != 0,
                .attraction = 0.0};
    c.attraction = c.potential + (c.shortening ? pref : 0.0);
    out.push_back(c);
  }
  return out;
}

StepRecord Planner::step(const RewardField& field) {
  StepRecord r;
  r.from = current();
  r.ts_from = current_ts();
  r.subgoal_before = subgoal_;
  r.elapsed_raw = elapsed_raw();
  r.elapsed = subgoal_ == Subgoal::Surveillance ? elapsed_raw() : elapsed_masked();
  const double max_pot = max_successor_potential(field);
  r.preference = config_.preference->evaluate(r.elapsed, max_pot);
  r.candidates = candidates(field);
  if (r.candidates.empty()) throw InternalError("trimmed product state without successors");

  double best = 0.0;
  for (const auto& c : r.candidates) best = std::max(best, c.attraction);
  std::vector<std::size_t> ties;
  for (std::size_t i = 0; i < r.candidates.size(); ++i)
    if (r.candidates[i].attraction >= best - config_.tie_tolerance) ties.push_back(i);
  if (best == 0.0) {
    std::vector<std::size_t> shortening;
    for (std::size_t i : ties)
      if (r.candidates[i].shortening) shortening.push_back(i);
    if (!shortening.empty()) ties = std::move(shortening);
  }
  const Candidate& chosen =
      r.candidates[ties.size() == 1 ? ties[0] : ties[rng_.uniform_int(0, ties.size() - 1)]];
  r.tied = ties.size();

  // TS-level cost of every distinct TS successor, for post-hoc reporting
  {
    const LocalContext ctx = ts_context(field);
    const double pref_raw = config_.preference->evaluate(r.elapsed_raw, max_pot);
    r.best_cost = 0.0;
    for (const Arc& a : plan_->ts.successors(r.ts_from)) {
      double cost = config_.potential->evaluate(ctx, a.to, a.weight);
      if (ts_shortening(plan_->ts_to_survey, r.ts_from, a.to)) cost += pref_raw;
      r.best_cost = std::max(r.best_cost, cost);
      if (a.to == chosen.ts) r.cost = cost;
    }
  }

  r.to = chosen.node;
  r.ts_to = chosen.ts;
  r.ba_to = plan_->product().state(chosen.node).ba;
  r.weight = chosen.weight;
  r.attraction = chosen.attraction;
  r.time = times_.back() + chosen.weight;
  r.step = prefix_.size();
  record_position(chosen.node, r.time);

  const auto& inf = plan_->prepared.inf;
  r.survey = plan_->ts.has(chosen.ts, plan_->surveillance);
  r.accepting_inf = inf.accepting[chosen.node] != 0;
  r.surveillance_inf = inf.surveillance[chosen.node] != 0;
  if (subgoal_ == Subgoal::Surveillance && r.surveillance_inf) subgoal_ = Subgoal::Mission;
  if (subgoal_ == Subgoal::Mission && r.accepting_inf) subgoal_ = Subgoal::Surveillance;
  r.subgoal_after = subgoal_;
  return r;
}

}  // namespace survplan
