#include "survplan/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "survplan/error.hpp"

namespace survplan {

namespace {

constexpr std::string_view kDefaultScenario =
#include "default_scenario.inc"
    ;

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_words(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream in{std::string(s)};
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

struct Line {
  std::size_t number;
  std::string_view text;
};

class Reader {
 public:
  explicit Reader(std::string_view origin) : origin_(origin) {}

  [[noreturn]] void fail(const Line& l, const std::string& msg) const {
    throw ValidationError(std::string(origin_) + ":" + std::to_string(l.number) + ": " + msg);
  }

  double number(const Line& l, std::string_view v) const {
    double x = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || ptr != v.data() + v.size()) fail(l, "expected a number, got '" + std::string(v) + "'");
    return x;
  }

  std::uint64_t integer(const Line& l, std::string_view v) const {
    std::uint64_t x = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || ptr != v.data() + v.size())
      fail(l, "expected a non-negative integer, got '" + std::string(v) + "'");
    return x;
  }

  Cell cell(const Line& l, std::string_view v) const {
    const auto comma = v.find(',');
    if (comma == std::string_view::npos) fail(l, "expected row,col, got '" + std::string(v) + "'");
    return {integer(l, trim(v.substr(0, comma))), integer(l, trim(v.substr(comma + 1)))};
  }

 private:
  std::string_view origin_;
};

bool split_key(std::string_view text, std::string_view& key, std::string_view& value) {
  const auto eq = text.find('=');
  if (eq == std::string_view::npos) return false;
  key = trim(text.substr(0, eq));
  value = trim(text.substr(eq + 1));
  return true;
}

}  // namespace

std::string cell_name(Cell c) { return "r" + std::to_string(c.row) + "c" + std::to_string(c.col); }

TransitionSystem build_grid(const GridSpec& spec, const std::map<std::string, std::vector<Cell>>& labels,
                            Cell initial, const std::vector<std::string>& extra_props) {
  if (spec.rows == 0 || spec.cols == 0) throw ValidationError("grid needs at least one row and column");
  const auto check = [&](Cell c) {
    if (c.row >= spec.rows || c.col >= spec.cols)
      throw ValidationError("cell " + std::to_string(c.row) + "," + std::to_string(c.col) +
                            " lies outside the " + std::to_string(spec.rows) + "x" +
                            std::to_string(spec.cols) + " grid");
  };
  check(initial);
  TransitionSystemBuilder b;
  for (const auto& [prop, cells] : labels) b.add_proposition(prop);
  for (const auto& p : extra_props) b.add_proposition(p);
  for (std::size_t r = 0; r < spec.rows; ++r)
    for (std::size_t c = 0; c < spec.cols; ++c) b.add_state(cell_name({r, c}));
  const auto id = [&](Cell c) { return static_cast<StateId>(c.row * spec.cols + c.col); };
  for (const auto& [prop, cells] : labels)
    for (Cell c : cells) {
      check(c);
      b.add_label(id(c), prop);
    }
  for (std::size_t r = 0; r < spec.rows; ++r)
    for (std::size_t c = 0; c < spec.cols; ++c) {
      if (spec.self_loops) b.add_transition(id({r, c}), id({r, c}), spec.straight_weight);
      for (int dr = -1; dr <= 1; ++dr)
        for (int dc = -1; dc <= 1; ++dc) {
          if (dr == 0 && dc == 0) continue;
          const auto nr = static_cast<long>(r) + dr;
          const auto nc = static_cast<long>(c) + dc;
          if (nr < 0 || nc < 0 || nr >= static_cast<long>(spec.rows) || nc >= static_cast<long>(spec.cols))
            continue;
          b.add_transition(id({r, c}), id({std::size_t(nr), std::size_t(nc)}),
                           dr != 0 && dc != 0 ? spec.diagonal_weight : spec.straight_weight);
        }
    }
  b.set_initial(id(initial));
  return b.build();
}

Scenario parse_scenario(std::string_view text, std::string_view origin) {
  Reader rd(origin);
  std::map<std::string, std::vector<Line>, std::less<>> sections;
  std::vector<std::string> order;
  {
    std::string current;
    std::size_t number = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      const auto nl = text.find('\n', pos);
      std::string_view raw = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
      pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
      ++number;
      if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
      const auto line = trim(raw);
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']') rd.fail({number, line}, "unterminated section header");
        current = std::string(trim(line.substr(1, line.size() - 2)));
        static const std::set<std::string, std::less<>> known{
            "grid", "states", "transitions", "labels", "mission", "planner", "dynamics", "experiment"};
        if (!known.contains(current)) rd.fail({number, line}, "unknown section [" + current + "]");
        if (sections.contains(current)) rd.fail({number, line}, "section [" + current + "] repeated");
        sections[current];
        continue;
      }
      if (current.empty()) rd.fail({number, line}, "content before the first section");
      sections[current].push_back({number, line});
    }
  }

  Scenario s;
  const auto each_key = [&](std::string_view section, auto&& handle) {
    auto it = sections.find(section);
    if (it == sections.end()) return;
    std::set<std::string, std::less<>> seen;
    for (const Line& l : it->second) {
      std::string_view key, value;
      if (!split_key(l.text, key, value)) rd.fail(l, "expected key = value");
      if (!seen.insert(std::string(key)).second) rd.fail(l, "key '" + std::string(key) + "' repeated");
      if (!handle(l, key, value))
        rd.fail(l, "unknown key '" + std::string(key) + "' in [" + std::string(section) + "]");
    }
  };

  std::string formula;
  std::vector<std::string> extra_props;
  each_key("mission", [&](const Line& l, std::string_view k, std::string_view v) {
    if (k == "formula") formula = v;
    else if (k == "surveillance") s.surveillance = v;
    else if (k == "propositions") extra_props = split_words(v);
    else return false;
    if (v.empty()) rd.fail(l, "empty value");
    return true;
  });

  const bool has_grid = sections.contains("grid");
  const bool has_explicit = sections.contains("states") || sections.contains("transitions");
  if (has_grid == has_explicit)
    throw ValidationError(std::string(origin) + ": give either [grid] or [states] with [transitions]");

  if (has_grid) {
    GridSpec g;
    Cell initial;
    bool initial_set = false;
    each_key("grid", [&](const Line& l, std::string_view k, std::string_view v) {
      if (k == "rows") g.rows = rd.integer(l, v);
      else if (k == "cols") g.cols = rd.integer(l, v);
      else if (k == "straight_weight") g.straight_weight = rd.number(l, v);
      else if (k == "diagonal_weight") g.diagonal_weight = rd.number(l, v);
      else if (k == "self_loops") g.self_loops = v == "true" || v == "1";
      else if (k == "initial") {
        initial = rd.cell(l, v);
        initial_set = true;
      } else return false;
      return true;
    });
    if (!initial_set) throw ValidationError(std::string(origin) + ": [grid] needs an initial cell");
    std::map<std::string, std::vector<Cell>> labels;
    each_key("labels", [&](const Line& l, std::string_view k, std::string_view v) {
      auto& cells = labels[std::string(k)];
      for (const auto& w : split_words(v)) cells.push_back(rd.cell(l, w));
      return true;
    });
    extra_props.push_back(s.surveillance);
    std::erase_if(extra_props, [&](const std::string& p) { return labels.contains(p); });
    std::sort(extra_props.begin(), extra_props.end());
    extra_props.erase(std::unique(extra_props.begin(), extra_props.end()), extra_props.end());
    s.ts = build_grid(g, labels, initial, extra_props);
    s.grid = g;
  } else {
    TransitionSystemBuilder b;
    std::optional<std::string> initial;
    if (auto it = sections.find("states"); it != sections.end())
      for (const Line& l : it->second) {
        std::string_view key, value;
        if (split_key(l.text, key, value)) {
          if (key != "initial") rd.fail(l, "unknown key '" + std::string(key) + "' in [states]");
          initial = std::string(value);
          continue;
        }
        const auto words = split_words(l.text);
        if (words.size() != 1) rd.fail(l, "expected one state name per line");
        if (b.find(words[0])) rd.fail(l, "state '" + words[0] + "' declared twice");
        b.add_state(words[0]);
      }
    std::vector<std::pair<std::string, std::vector<std::string>>> labels;
    each_key("labels", [&](const Line&, std::string_view k, std::string_view v) {
      labels.emplace_back(std::string(k), split_words(v));
      return true;
    });
    for (const auto& [prop, names] : labels) {
      b.add_proposition(prop);
      for (const auto& n : names) {
        const auto q = b.find(n);
        if (!q) throw ValidationError(std::string(origin) + ": label '" + prop + "' names unknown state '" + n + "'");
        b.add_label(*q, prop);
      }
    }
    for (const auto& p : extra_props) b.add_proposition(p);
    b.add_proposition(s.surveillance);
    if (auto it = sections.find("transitions"); it != sections.end())
      for (const Line& l : it->second) {
        const auto words = split_words(l.text);
        if (words.size() != 3) rd.fail(l, "expected: from to weight");
        if (!b.find(words[0]) || !b.find(words[1])) rd.fail(l, "transition names an unknown state");
        b.add_transition(words[0], words[1], rd.number(l, words[2]));
      }
    if (!initial) throw ValidationError(std::string(origin) + ": [states] needs initial = <state>");
    if (!b.find(*initial)) throw ValidationError(std::string(origin) + ": unknown initial state '" + *initial + "'");
    b.set_initial(*initial);
    s.ts = b.build();
  }

  each_key("planner", [&](const Line& l, std::string_view k, std::string_view v) {
    if (k == "visibility") s.visibility = rd.number(l, v);
    else if (k == "horizon") s.horizon = rd.number(l, v);
    else if (k == "potential") s.potential = v;
    else if (k == "preference") s.preference = v;
    else if (k == "revisit_value") s.policy.revisit_value = rd.number(l, v);
    else if (k == "pref_threshold") s.policy.pref_threshold = rd.number(l, v);
    else return false;
    return true;
  });
  each_key("dynamics", [&](const Line& l, std::string_view k, std::string_view v) {
    if (k == "spawn_probability") s.dynamics.spawn_probability = rd.number(l, v);
    else if (k == "small_max") s.dynamics.small_max = static_cast<std::uint32_t>(rd.integer(l, v));
    else if (k == "large_max") s.dynamics.large_max = static_cast<std::uint32_t>(rd.integer(l, v));
    else if (k == "small_share") s.dynamics.small_share = rd.number(l, v);
    else if (k == "decay") s.dynamics.decay_per_unit = rd.number(l, v);
    else if (k == "prefill") s.prefill = rd.number(l, v);
    else return false;
    return true;
  });
  each_key("experiment", [&](const Line& l, std::string_view k, std::string_view v) {
    if (k == "seed") s.seed = rd.integer(l, v);
    else if (k == "runs") s.runs = rd.integer(l, v);
    else if (k == "iterations") s.iterations = rd.integer(l, v);
    else if (k == "threads") s.threads = static_cast<unsigned>(rd.integer(l, v));
    else return false;
    return true;
  });

  if (s.horizon < s.ts.max_weight())
    throw ValidationError(std::string(origin) + ": horizon " + std::to_string(s.horizon) +
                          " is shorter than the heaviest transition");
  if (s.prefill < 0.0) throw ValidationError(std::string(origin) + ": prefill must be non-negative");
  if (s.dynamics.large_max <= s.dynamics.small_max)
    throw ValidationError(std::string(origin) + ": large_max must exceed small_max");
  make_potential(s.potential, s.policy);
  make_preference(s.preference, s.policy);

  if (formula.empty()) throw ValidationError(std::string(origin) + ": [mission] needs a formula");
  const auto sur = s.ts.propositions().at(s.surveillance);
  const auto parsed = ltl::parse(formula, s.ts.propositions());
  s.mission = formula;
  if (!ltl::has_surveillance_conjunct(parsed, sur)) {
    s.mission = "(" + formula + ") & G F " + s.surveillance;
    s.mission_extended = true;
  }
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open scenario file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), path.string());
}

std::string_view default_scenario_text() { return kDefaultScenario; }

ltl::Formula mission_formula(const Scenario& s) { return ltl::parse(s.mission, s.ts.propositions()); }

OfflinePlan prepare_offline(const Scenario& s) {
  return prepare_offline(s.ts, mission_formula(s), s.ts.propositions().at(s.surveillance), s.visibility);
}

}  // namespace survplan
