#ifndef SCMKIT_TARGET_POSITION_HPP
#define SCMKIT_TARGET_POSITION_HPP

#include <algorithm>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "scmkit/corpus.hpp"
#include "scmkit/error.hpp"
#include "scmkit/unicode.hpp"

namespace scmkit
{

namespace detail
{

// A word boundary sits between an alphabetic and a non-alphabetic code point
// (text edges count as non-alphabetic), like \b in a regex.
inline bool is_boundary(const std::u32string &t, std::size_t pos)
{
    const bool before = pos > 0 && unicode::is_alpha(t[pos - 1]);
    const bool after = pos < t.size() && unicode::is_alpha(t[pos]);
    return before != after;
}

} // namespace detail

// All whole-token, case-insensitive, non-overlapping occurrences of any form, left to
// right. At a given position the longest matching form wins.
inline std::vector<Span> find_occurrences(std::string_view text, const WordFormList &forms)
{
    if (forms.forms.empty()) {
        throw Error("word form list for '" + forms.word + "' is empty");
    }
    const auto lowered = unicode::to_lower(std::u32string_view(unicode::decode(text)));
    std::vector<std::u32string> needles;
    for (const auto &f : forms.forms) {
        auto n = unicode::to_lower(std::u32string_view(unicode::decode(f)));
        if (!n.empty()) {
            needles.push_back(std::move(n));
        }
    }
    std::sort(needles.begin(), needles.end(),
              [](const auto &a, const auto &b) { return a.size() != b.size() ? a.size() > b.size() : a < b; });

    std::vector<Span> found;
    std::size_t i = 0;
    while (i < lowered.size()) {
        std::size_t matched = 0;
        if (detail::is_boundary(lowered, i)) {
            for (const auto &n : needles) {
                if (lowered.compare(i, n.size(), n) == 0 && i + n.size() <= lowered.size() &&
                    detail::is_boundary(lowered, i + n.size())) {
                    matched = n.size();
                    break;
                }
            }
        }
        if (matched > 0) {
            found.push_back({i, i + matched});
            i += matched;
        } else {
            ++i;
        }
    }
    return found;
}

// Picks the occurrence to encode. One occurrence: itself. Two: the one whose shorter
// context side is longer (earlier one on ties). More: the second to last.
inline std::optional<Span> find_target_position(std::string_view text, const WordFormList &forms)
{
    const auto occ = find_occurrences(text, forms);
    if (occ.empty()) {
        return std::nullopt;
    }
    if (occ.size() == 1) {
        return occ.front();
    }
    if (occ.size() == 2) {
        const auto n = unicode::length(text);
        auto shorter_side = [n](const Span &s) { return std::min(s.start, n - s.end); };
        return shorter_side(occ[1]) > shorter_side(occ[0]) ? occ[1] : occ[0];
    }
    return occ[occ.size() - 2];
}

} // namespace scmkit

#endif
