#include <doctest.h>

#include <cmath>

#include "../support/oracles.hpp"
#include "survplan/error.hpp"
#include "survplan/rewards.hpp"

using namespace survplan;

TEST_CASE("reward field basics") {
  RewardField f(3);
  f.set(1, 7);
  CHECK(f.value(1) == 7);
  CHECK(f.take(1) == 7);
  CHECK(f.value(1) == 0);
  CHECK_THROWS_AS(f.set(0, -1), ValidationError);
}

TEST_CASE("decay happens once per whole time unit crossed") {
  CaseStudyDynamics d({.spawn_probability = 0.0});
  RewardField f(2);
  f.set(0, 5);
  f.set(1, 0.5);
  d.evolve(f, 0.5);  // clock 0 -> 0.5: no boundary
  CHECK(f.value(0) == 5);
  d.evolve(f, 0.75);  // 0.5 -> 1.25: crosses 1
  CHECK(f.value(0) == 4);
  CHECK(f.value(1) == 0);  // floored at zero
  d.evolve(f, 3);  // 1.25 -> 4.25: crosses 2, 3, 4
  CHECK(f.value(0) == 1);
  CHECK(f.clock() == doctest::Approx(4.25));
  CHECK_THROWS_AS(d.evolve(f, -1), ContractError);
}

TEST_CASE("spawning only refills empty states") {
  CaseStudyDynamics d({.spawn_probability = 1.0, .seed = 4});
  RewardField f(50);
  f.set(0, 30);
  d.evolve(f, 1);
  CHECK(f.value(0) == 29);
  // every other state was 0 and spawned; fresh values lie in [0, 60]
  for (StateId q = 1; q < 50; ++q) CHECK(f.value(q) <= 60);
}

TEST_CASE("fresh reward sizes split evenly between the two ranges") {
  CaseStudyDynamics d({.seed = 99});
  const int n = 200000;
  int small = 0;
  std::vector<int> hist(61, 0);
  for (int i = 0; i < n; ++i) {
    const double v = d.draw_fresh();
    REQUIRE(v == std::floor(v));
    REQUIRE(v >= 0);
    REQUIRE(v <= 60);
    small += v <= 15;
    ++hist[static_cast<int>(v)];
  }
  CHECK(std::abs(double(small) / n - 0.5) < 0.01);
  // within a range every value is equally likely
  CHECK(std::abs(hist[3] / (n * 0.5 / 16) - 1) < 0.1);
  CHECK(std::abs(hist[40] / (n * 0.5 / 45) - 1) < 0.1);
}

TEST_CASE("dynamics parameters are validated") {
  CHECK_THROWS_AS(CaseStudyDynamics({.spawn_probability = 1.5}), ValidationError);
  CHECK_THROWS_AS(CaseStudyDynamics({.small_max = 20, .large_max = 20}), ValidationError);
}

TEST_CASE("preference functions at and around the threshold") {
  const StepPreference p1;
  const CubicPreference p2;
  const CubeRootPreference p3;
  for (double m : {0.0, 1.0, 17.5, 123.0}) {
    CHECK(p1.evaluate(50, m) == 0);
    CHECK(p1.evaluate(std::nextafter(50.0, 100.0), m) == m + 1);
    CHECK(p2.evaluate(50, m) == m);
    CHECK(p3.evaluate(50, m) == m);
  }
  CHECK(p2.evaluate(25, 80) == doctest::Approx(10));
  CHECK(p3.evaluate(400, 10) == doctest::Approx(20));
  CHECK(p1.evaluate(0, 5) == 0);
  CHECK(p2.evaluate(0, 5) == 0);
  CHECK(p3.evaluate(0, 5) == 0);
}

TEST_CASE("elapsed weight since the last survey") {
  const std::vector<double> t{0, 2, 5, 7, 10};
  CHECK(elapsed_since_survey(t, std::vector<char>{0, 0, 1, 0, 0}) == 5);
  CHECK(elapsed_since_survey(t, std::vector<char>{0, 0, 0, 0, 1}) == 0);
  CHECK(elapsed_since_survey(t, std::vector<char>{0, 0, 0, 0, 0}) == 10);
}

TEST_CASE("registry") {
  CHECK(make_potential("pot1")->name() == "pot1");
  CHECK(make_potential("pot2")->name() == "pot2");
  CHECK(make_preference("pref3")->name() == "pref3");
  CHECK_THROWS_AS(make_potential("pot9"), ValidationError);
  register_preference("zero", [](const PolicyParams&) {
    struct Zero final : PreferenceFunction {
      std::string name() const override { return "zero"; }
      double evaluate(double, double) const override { return 0; }
    };
    return std::make_shared<const Zero>();
  });
  CHECK(make_preference("zero")->evaluate(1000, 1000) == 0);
}

TEST_CASE("potentials on a hand example") {
  // line 0 - 1 - 2 - 3 with unit weights both ways
  WeightedDigraph g(4);
  for (std::uint32_t i = 0; i + 1 < 4; ++i) {
    g.add_arc(i, i + 1, 1);
    g.add_arc(i + 1, i, 1);
  }
  const std::vector<char> visible{1, 1, 1, 1};
  const std::vector<double> rewards{100, 10, 0, 30};
  const LocalContext ctx{.graph = &g, .current = 0, .visible = visible, .rewards = rewards, .horizon = 4};
  // budget 3 from node 1: best run 1,2,3,2 -> (10-0) + 15 + (30-2) + 15, the
  // empty node and the repeat both count as the fallback
  CHECK(SumPotential().evaluate(ctx, 1, 1) == 68);
  CHECK(SumPotential(0).evaluate(ctx, 1, 1) == 38);
  // largest single worth: 30 - 2 = 28
  CHECK(MaxPackagePotential().evaluate(ctx, 1, 1) == 28);
  // with no rewards every position is worth the fallback: four positions fit in budget 3
  const std::vector<double> empty(4, 0.0);
  const LocalContext bare{.graph = &g, .current = 0, .visible = visible, .rewards = empty, .horizon = 4};
  CHECK(SumPotential(15).evaluate(bare, 1, 1) == 60);
  CHECK(MaxPackagePotential().evaluate(bare, 1, 1) == 0);
  CHECK_THROWS_AS(SumPotential().evaluate(ctx, 1, 5), ContractError);
}

TEST_CASE("potentials equal the brute-force oracle on random fields") {
  Rng rng(2024);
  for (int trial = 0; trial < 80; ++trial) {
    const std::size_t n = 3 + rng.uniform_int(0, 9);
    WeightedDigraph g(n);
    for (std::uint32_t u = 0; u < n; ++u) {
      g.add_arc(u, static_cast<std::uint32_t>((u + 1) % n), double(rng.uniform_int(1, 3)));
      for (std::uint32_t v = 0; v < n; ++v)
        if (rng.bernoulli(0.25)) g.add_arc(u, v, double(rng.uniform_int(1, 3)));
    }
    std::vector<double> rewards(n);
    std::vector<char> visible(n);
    for (std::size_t q = 0; q < n; ++q) {
      rewards[q] = rng.bernoulli(0.3) ? 0.0 : double(rng.uniform_int(0, 60)) + 0.25 * double(rng.uniform_int(0, 3));
      visible[q] = rng.bernoulli(0.8);
    }
    const StateId qk = static_cast<StateId>(rng.uniform_int(0, n - 1));
    visible[qk] = 1;
    const double h = 3 + double(rng.uniform_int(0, 5));
    const LocalContext ctx{.graph = &g, .current = qk, .visible = visible, .rewards = rewards, .horizon = h};
    for (const Arc& a : g.successors(qk)) {
      const double fb = double(rng.uniform_int(0, 20));
      CHECK(SumPotential(fb).evaluate(ctx, a.to, a.weight) ==
            doctest::Approx(oracle::pot(true, fb, g, {}, qk, visible, rewards, h, a.to, a.weight)).epsilon(1e-12));
      CHECK(MaxPackagePotential().evaluate(ctx, a.to, a.weight) ==
            doctest::Approx(oracle::pot(false, 0, g, {}, qk, visible, rewards, h, a.to, a.weight)).epsilon(1e-12));
    }
  }
}
