#include <doctest.h>

#include "../support/oracles.hpp"
#include "survplan/buchi.hpp"
#include "survplan/error.hpp"
#include "survplan/ltl.hpp"
#include "survplan/product.hpp"

using namespace survplan;

namespace {

// a -> b -> c -> a ring, sur on c, weights 1, 2, 3
TransitionSystem ring() {
  TransitionSystemBuilder b;
  b.add_proposition("p");
  b.add_proposition("sur");
  b.add_state("a", {"p"});
  b.add_state("b");
  b.add_state("c", {"sur"});
  b.add_transition("a", "b", 1);
  b.add_transition("b", "c", 2);
  b.add_transition("c", "a", 3);
  b.set_initial("a");
  return b.build();
}

}  // namespace

TEST_CASE("product transitions read the source label") {
  const auto ts = ring();
  // two-state automaton: state 0 moves to 1 only on letters containing p
  BuchiAutomaton ba(2);
  ba.add_state(false);
  ba.add_state(true);
  for (LabelSet l = 0; l < 4; ++l) {
    ba.add_transition(0, l, has_prop(l, 0) ? 1 : 0);
    ba.add_transition(1, l, 1);
  }
  const auto p = build_product(ts, ba, 1);
  // (a,0) -> (b,1) because L(a) contains p; (a,0) never reaches (b,0)
  REQUIRE(p.find({0, 0}) == ProductId{0});
  CHECK(p.find({1, 1}));
  CHECK_FALSE(p.find({1, 0}));
  CHECK(p.size() == 4);  // (a,0) (b,1) (c,1) (a,1)
  const auto b1 = *p.find({1, 1});
  REQUIRE(p.successors(b1).size() == 1);
  CHECK(p.successors(b1)[0].weight == 2.0);
  CHECK(p.accepting(b1));
  CHECK(p.surveillance(*p.find({2, 1})));
  CHECK_FALSE(p.surveillance(b1));
}

TEST_CASE("product rejects mismatched alphabets") {
  BuchiAutomaton ba(3);
  ba.add_state(true);
  CHECK_THROWS_AS(build_product(ring(), ba, 1), ContractError);
}

TEST_CASE("restriction keeps reachable kept states and renumbers") {
  Rng rng(3);
  const auto p = oracle::random_product(rng, 12, 0.2, 0.3, 0.3);
  std::vector<char> keep(p.size(), 1);
  keep[5] = 0;
  std::vector<ProductId> remap;
  const auto r = p.restrict_to(keep, &remap);
  CHECK(remap[5] == UINT32_MAX);
  CHECK(remap[0] == 0);
  for (ProductId x = 0; x < p.size(); ++x) {
    if (remap[x] == UINT32_MAX) continue;
    CHECK(r.state(remap[x]) == p.state(x));
    for (const Arc& a : p.successors(x)) {
      if (remap[a.to] == UINT32_MAX) continue;
      const auto succ = r.successors(remap[x]);
      CHECK(std::any_of(succ.begin(), succ.end(), [&](const Arc& b) { return b.to == remap[a.to]; }));
    }
  }
  keep.assign(p.size(), 1);
  keep[0] = 0;
  CHECK(p.restrict_to(keep).size() == 0);
}

TEST_CASE("infinity sets, distances and indicators agree with the oracles") {
  Rng rng(17);
  int feasible = 0;
  for (int trial = 0; trial < 120; ++trial) {
    const std::size_t n = 1 + rng.uniform_int(0, 39);
    const auto p = oracle::random_product(rng, n, 0.03 + 0.1 * rng.uniform01(), 0.2, 0.25);
    const auto d = oracle::all_pairs(p.graph());
    const auto want = oracle::inf_sets(p);
    const auto dist = dijkstra_all_pairs(p.graph());
    const auto inf = compute_inf_sets(p, dist);
    REQUIRE(inf.accepting == want.accepting);
    REQUIRE(inf.surveillance == want.surveillance);

    const auto wpi = surveillance_distances(dist, inf);
    const auto wphi = mission_distances(dist, inf, wpi);
    REQUIRE(wpi == oracle::w_pi(d, want.surveillance));
    REQUIRE(wphi == oracle::w_phi(d, want.accepting, want.surveillance));

    const auto prepared = prepare_product(p);
    if (!prepared.feasible()) {
      CHECK(prepared.product.size() == 0);
      continue;
    }
    ++feasible;
    const auto& t = prepared.product;
    const auto dt = oracle::all_pairs(t.graph());
    const auto tinf = oracle::inf_sets(t);
    CHECK(prepared.inf.accepting == tinf.accepting);
    CHECK(prepared.inf.surveillance == tinf.surveillance);
    const auto twpi = oracle::w_pi(dt, tinf.surveillance);
    const auto twphi = oracle::w_phi(dt, tinf.accepting, tinf.surveillance);
    CHECK(prepared.to_surveillance == twpi);
    CHECK(prepared.to_mission == twphi);
    for (ProductId x = 0; x < t.size(); ++x) {
      CHECK(twpi[x] != kInfinity);
      CHECK_FALSE(twphi[x].infinite());
      bool pi_step = false, phi_step = false;
      const auto succ = t.successors(x);
      for (std::size_t i = 0; i < succ.size(); ++i) {
        const bool ipi = twpi[succ[i].to] < twpi[x];
        const bool iphi = twphi[succ[i].to].u < twphi[x].u && twphi[succ[i].to].v < twphi[x].v;
        CHECK(prepared.indicators.surveillance[x][i] == ipi);
        CHECK(prepared.indicators.mission[x][i] == iphi);
        pi_step = pi_step || ipi;
        phi_step = phi_step || iphi;
      }
      if (!tinf.surveillance[x]) CHECK(pi_step);
      if (!tinf.accepting[x]) CHECK(phi_step);
    }
  }
  CHECK(feasible > 20);
}

TEST_CASE("distance pair order is strict in both components") {
  CHECK(strictly_less({1, 2}, {2, 3}));
  CHECK_FALSE(strictly_less({1, 3}, {2, 3}));
  CHECK_FALSE(strictly_less({1, 4}, {2, 3}));
  CHECK_FALSE(strictly_less({2, 3}, {2, 3}));
}

TEST_CASE("empty accepting infinity set means infeasible") {
  TransitionSystemBuilder b;
  b.add_proposition("u");
  b.add_proposition("sur");
  b.add_state("x", {"u", "sur"});
  b.add_state("y");
  b.add_transition("x", "y", 1);
  b.add_transition("y", "x", 1);
  b.set_initial("y");
  const auto ts = b.build();
  const auto f = ltl::parse("G !u & G F sur", ts.propositions());
  const auto prepared = prepare_product(build_product(ts, to_buchi(f, 2), 1));
  CHECK_FALSE(prepared.feasible());
  CHECK(prepared.inf.empty());
}

TEST_CASE("dump lists every state and transition") {
  const auto ts = ring();
  const auto f = ltl::parse("G F sur", ts.propositions());
  const auto prepared = prepare_product(build_product(ts, to_buchi(f, 2), 1));
  REQUIRE(prepared.feasible());
  const auto text = dump(prepared, ts);
  std::size_t lines = 0;
  for (char c : text) lines += c == '\n';
  CHECK(lines == 2 + prepared.product.size() + prepared.product.graph().arc_count());
}
