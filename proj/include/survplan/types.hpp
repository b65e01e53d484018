#pragma once

#include <cstdint>
#include <limits>

namespace survplan {

using StateId = std::uint32_t;
using PropId = std::uint32_t;

/// Set of atomic propositions encoded as a bit mask over proposition ids.
using LabelSet = std::uint32_t;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();
inline constexpr std::size_t kMaxPropositions = 16;

constexpr LabelSet prop_bit(PropId p) { return LabelSet{1} << p; }

constexpr bool has_prop(LabelSet set, PropId p) { return (set >> p) & 1U; }

}  // namespace survplan
