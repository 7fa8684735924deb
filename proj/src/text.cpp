#include "agentgraph/text.hpp"
#include "agentgraph/errors.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdint>

namespace agentgraph {

CycleError::CycleError(std::vector<std::string> cycle)
    : Error([&] {
          std::string msg = "task graph contains a cycle:";
          for (const auto& id : cycle) msg += " " + id + " ->";
          if (!cycle.empty()) msg += " " + cycle.front();
          return msg;
      }()),
      cycle_(std::move(cycle)) {}

OrchestrationError::OrchestrationError(const std::string& last_failure, int attempts)
    : Error("no valid task graph after " + std::to_string(attempts) + " attempt(s): " + last_failure),
      last_failure_(last_failure),
      attempts_(attempts) {}

namespace {

bool all_digits(std::string_view s) noexcept {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c) != 0; });
}

std::string_view strip_leading_zeros(std::string_view s) noexcept {
    while (s.size() > 1 && s.front() == '0') s.remove_prefix(1);
    return s;
}

} // namespace

bool id_less(std::string_view a, std::string_view b) noexcept {
    if (all_digits(a) && all_digits(b)) {
        auto na = strip_leading_zeros(a);
        auto nb = strip_leading_zeros(b);
        if (na.size() != nb.size()) return na.size() < nb.size();
        if (na != nb) return na < nb;
        // "01" and "1" are distinct ids; keep the order total
        return a < b;
    }
    return a < b;
}

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    for (unsigned char c : text) {
        if (std::isalnum(c)) {
            current.push_back(static_cast<char>(std::tolower(c)));
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

std::string slugify(std::string_view text) {
    std::string out;
    for (const auto& tok : tokenize(text)) {
        if (!out.empty()) out.push_back('_');
        out += tok;
    }
    return out;
}

std::string_view trim(std::string_view s) noexcept {
    const auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
    while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    return s;
}

std::string format_double(double value) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
    if (ec != std::errc{}) return "nan";
    return std::string(buf, end);
}

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace agentgraph
