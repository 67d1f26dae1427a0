#ifndef SCMKIT_UNICODE_HPP
#define SCMKIT_UNICODE_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "scmkit/error.hpp"

// Minimal UTF-8 and character-class support. Offsets everywhere in the toolkit are
// Unicode scalar-value indices, so text is decoded to UTF-32 before matching.
namespace scmkit::unicode
{

// Strict decoder: rejects overlong forms, surrogates and truncated sequences.
inline std::optional<std::u32string> try_decode(std::string_view s)
{
    std::u32string out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        const auto b0 = static_cast<unsigned char>(s[i]);
        if (b0 < 0x80) {
            out.push_back(b0);
            ++i;
            continue;
        }
        int len = 0;
        char32_t cp = 0;
        char32_t min = 0;
        if ((b0 & 0xE0) == 0xC0) {
            len = 2, cp = b0 & 0x1F, min = 0x80;
        } else if ((b0 & 0xF0) == 0xE0) {
            len = 3, cp = b0 & 0x0F, min = 0x800;
        } else if ((b0 & 0xF8) == 0xF0) {
            len = 4, cp = b0 & 0x07, min = 0x10000;
        } else {
            return std::nullopt;
        }
        if (i + len > s.size()) {
            return std::nullopt;
        }
        for (int k = 1; k < len; ++k) {
            const auto b = static_cast<unsigned char>(s[i + k]);
            if ((b & 0xC0) != 0x80) {
                return std::nullopt;
            }
            cp = (cp << 6) | (b & 0x3F);
        }
        if (cp < min || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
            return std::nullopt;
        }
        out.push_back(cp);
        i += len;
    }
    return out;
}

inline std::u32string decode(std::string_view s)
{
    auto r = try_decode(s);
    if (!r) {
        throw Error("invalid UTF-8 sequence");
    }
    return std::move(*r);
}

inline std::string encode(std::u32string_view s)
{
    std::string out;
    out.reserve(s.size());
    for (char32_t c : s) {
        if (c < 0x80) {
            out.push_back(static_cast<char>(c));
        } else if (c < 0x800) {
            out.push_back(static_cast<char>(0xC0 | (c >> 6)));
            out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
        } else if (c < 0x10000) {
            out.push_back(static_cast<char>(0xE0 | (c >> 12)));
            out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
        } else {
            out.push_back(static_cast<char>(0xF0 | (c >> 18)));
            out.push_back(static_cast<char>(0x80 | ((c >> 12) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
        }
    }
    return out;
}

inline std::size_t length(std::string_view s)
{
    return decode(s).size();
}

namespace detail
{

struct range {
    char32_t lo, hi;
};

// Letters and combining marks of the scripts we expect in historical corpora.
// Combining marks count as letters so that decomposed accents stay inside a word.
inline constexpr std::array<range, 40> alpha_ranges{{
    {0x0041, 0x005A}, {0x0061, 0x007A}, {0x00AA, 0x00AA}, {0x00B5, 0x00B5}, {0x00BA, 0x00BA},
    {0x00C0, 0x00D6}, {0x00D8, 0x00F6}, {0x00F8, 0x02C1}, {0x02C6, 0x02D1}, {0x02E0, 0x02E4},
    {0x0300, 0x0374}, {0x0376, 0x037D}, {0x037F, 0x0383}, {0x0386, 0x0386}, {0x0388, 0x03FF},
    {0x0400, 0x0481}, {0x0483, 0x052F}, {0x0531, 0x0556}, {0x0560, 0x0588}, {0x0591, 0x05C7},
    {0x05D0, 0x05EA}, {0x0610, 0x061A}, {0x0620, 0x065F}, {0x066E, 0x06D3}, {0x0900, 0x0963},
    {0x0971, 0x097F}, {0x10A0, 0x10FF}, {0x1DC0, 0x1DFF}, {0x1E00, 0x1FBC}, {0x1FC2, 0x1FFC},
    {0x2C60, 0x2C7F}, {0x2DE0, 0x2DFF}, {0x3041, 0x30FF}, {0x4E00, 0x9FFF}, {0xA640, 0xA69F},
    {0xA720, 0xA7FF}, {0xAC00, 0xD7A3}, {0xFB00, 0xFB06}, {0xFF21, 0xFF3A}, {0xFF41, 0xFF5A},
}};

} // namespace detail

inline bool is_alpha(char32_t c)
{
    for (const auto &r : detail::alpha_ranges) {
        if (c < r.lo) {
            return false;
        }
        if (c <= r.hi) {
            return true;
        }
    }
    return false;
}

// Simple one-to-one lowercase mapping (never changes string length, so offsets survive).
inline char32_t to_lower(char32_t c)
{
    if (c < 0x80) {
        return (c >= 'A' && c <= 'Z') ? c + 0x20 : c;
    }
    if (c >= 0xC0 && c <= 0xDE && c != 0xD7) {
        return c + 0x20;
    }
    if (c >= 0x100 && c <= 0x17F) {
        if (c == 0x130) {
            return 'i';
        }
        if (c == 0x178) {
            return 0xFF;
        }
        const bool odd_upper = (c >= 0x139 && c <= 0x148) || (c >= 0x179 && c <= 0x17E);
        if (odd_upper) {
            return (c % 2 == 1) ? c + 1 : c;
        }
        if (c <= 0x137 || (c >= 0x14A && c <= 0x177)) {
            return (c % 2 == 0) ? c + 1 : c;
        }
        return c;
    }
    if (c >= 0x370 && c <= 0x3FF) {
        if (c >= 0x391 && c <= 0x3AB && c != 0x3A2) {
            return c + 0x20;
        }
        if (c == 0x386) {
            return 0x3AC;
        }
        if (c >= 0x388 && c <= 0x38A) {
            return c + 0x25;
        }
        if (c == 0x38C) {
            return 0x3CC;
        }
        if (c == 0x38E || c == 0x38F) {
            return c + 0x3F;
        }
        if (c == 0x3C2) {
            return 0x3C3;
        }
        return c;
    }
    if (c >= 0x400 && c <= 0x52F) {
        if (c <= 0x40F) {
            return c + 0x50;
        }
        if (c <= 0x42F) {
            return c + 0x20;
        }
        if (c == 0x4C0) {
            return 0x4CF;
        }
        if ((c >= 0x460 && c <= 0x481) || (c >= 0x48A && c <= 0x4BF) || (c >= 0x4D0 && c <= 0x52F)) {
            return (c % 2 == 0) ? c + 1 : c;
        }
        if (c >= 0x4C1 && c <= 0x4CE) {
            return (c % 2 == 1) ? c + 1 : c;
        }
        return c;
    }
    if (c == 0x1E9E) {
        return 0xDF;
    }
    if ((c >= 0x1E00 && c <= 0x1E95) || (c >= 0x1EA0 && c <= 0x1EFF)) {
        return (c % 2 == 0) ? c + 1 : c;
    }
    if (c >= 0xFF21 && c <= 0xFF3A) {
        return c + 0x20;
    }
    return c;
}

inline std::u32string to_lower(std::u32string_view s)
{
    std::u32string out(s);
    for (auto &c : out) {
        c = to_lower(c);
    }
    return out;
}

inline std::string to_lower(std::string_view utf8)
{
    return encode(to_lower(std::u32string_view(decode(utf8))));
}

} // namespace scmkit::unicode

#endif
