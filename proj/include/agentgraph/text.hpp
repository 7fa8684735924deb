#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace agentgraph {

// Orders ids naturally: two all-digit ids compare numerically, anything else
// falls back to plain byte order. Used for every deterministic tie-break.
bool id_less(std::string_view a, std::string_view b) noexcept;

struct IdLess {
    using is_transparent = void;
    bool operator()(std::string_view a, std::string_view b) const noexcept { return id_less(a, b); }
};

// Lowercases, turns every non-alphanumeric byte into a separator and splits.
std::vector<std::string> tokenize(std::string_view text);

// "Fetch Sunrise-Time!" -> "fetch_sunrise_time". Never returns an empty string
// for input that has at least one alphanumeric byte.
std::string slugify(std::string_view text);

std::string_view trim(std::string_view s) noexcept;

// Shortest decimal representation that round-trips to the same double.
std::string format_double(double value);

std::uint64_t fnv1a64(std::string_view bytes) noexcept;

} // namespace agentgraph
