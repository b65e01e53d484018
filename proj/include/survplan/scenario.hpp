#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "survplan/ltl.hpp"
#include "survplan/planner.hpp"
#include "survplan/rewards.hpp"
#include "survplan/ts.hpp"

namespace survplan {

struct Cell {
  std::size_t row = 0;
  std::size_t col = 0;

  friend auto operator<=>(const Cell&, const Cell&) = default;
};

struct GridSpec {
  std::size_t rows = 10;
  std::size_t cols = 10;
  double straight_weight = 2.0;  // horizontal and vertical moves
  double diagonal_weight = 3.0;
  bool self_loops = false;
};

/// "r{row}c{col}", the name of a grid cell's state.
std::string cell_name(Cell c);

/// Grid world with 8-neighbour moves. `labels` maps proposition names to
/// cells; `extra_props` declares propositions that label no cell.
/// Throws ValidationError for out-of-range cells or a 1x1 grid without
/// self-loops.
TransitionSystem build_grid(const GridSpec& spec, const std::map<std::string, std::vector<Cell>>& labels,
                            Cell initial, const std::vector<std::string>& extra_props = {});

struct Scenario {
  TransitionSystem ts;
  std::optional<GridSpec> grid;  // set when the system came from [grid]
  std::string surveillance = "sur";
  std::string mission;           // always ends with the G F conjunct
  bool mission_extended = false; // the conjunct was appended on load
  double visibility = 6.0;
  double horizon = 9.0;
  std::string potential = "pot1";
  std::string preference = "pref1";
  PolicyParams policy;
  CaseStudyParams dynamics;      // seed is replaced per run
  double prefill = 20.0;         // time units of reward evolution before the first step
  std::uint64_t seed = 1;
  std::size_t iterations = 100;
  std::size_t runs = 5;
  unsigned threads = 0;          // 0: one per hardware thread
};

/// Parses the sectioned key/value scenario format (see README). `origin` is
/// used in error messages.
Scenario parse_scenario(std::string_view text, std::string_view origin = "<scenario>");
Scenario load_scenario(const std::filesystem::path& path);

/// The built-in case-study scenario (10x10 grid, two transmitters).
std::string_view default_scenario_text();

ltl::Formula mission_formula(const Scenario& s);

/// Offline phase for a scenario.
OfflinePlan prepare_offline(const Scenario& s);

}  // namespace survplan
