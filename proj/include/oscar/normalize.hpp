#pragma once

#include <cctype>
#include <string>
#include <string_view>

namespace oscar {

namespace detail {

inline bool is_layout_byte(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

inline bool is_digit_byte(char c) { return c >= '0' && c <= '9'; }

// One scan: drop comments outside literals, drop layout bytes everywhere.
// Only ever removes bytes, so a pass that changes nothing is a fixpoint.
inline std::string normalize_pass(std::string_view in) {
    std::string out;
    out.reserve(in.size());
    const std::size_t n = in.size();
    std::size_t i = 0;
    while (i < n) {
        const char c = in[i];
        if (c == '/' && i + 1 < n && in[i + 1] == '*') {
            const auto close = in.find("*/", i + 2);
            i = close == std::string_view::npos ? n : close + 2;
            continue;
        }
        if (c == '/' && i + 1 < n && in[i + 1] == '/') {
            while (i < n && in[i] != '\n') ++i;
            continue;
        }
        // Digit separator (1'000) rather than a character literal.
        const bool separator = c == '\'' && i > 0 && i + 1 < n && is_digit_byte(in[i - 1]) &&
                               (is_digit_byte(in[i + 1]) || std::isxdigit(static_cast<unsigned char>(in[i + 1])));
        if ((c == '"' || c == '\'') && !separator) {
            out.push_back(c);
            ++i;
            while (i < n) {
                const char d = in[i];
                if (d == '\\' && i + 1 < n) {
                    out.push_back(d);
                    if (!is_layout_byte(in[i + 1])) out.push_back(in[i + 1]);
                    i += 2;
                    continue;
                }
                ++i;
                if (!is_layout_byte(d)) out.push_back(d);
                if (d == c) break;
            }
            continue;
        }
        if (!is_layout_byte(c)) out.push_back(c);
        ++i;
    }
    return out;
}

}  // namespace detail

/// Strips C/C++ comments and every space, tab, CR and LF byte. Comment
/// markers inside string and character literals are kept. Unterminated
/// comments run to the end of input; unterminated literals keep the rest.
///
/// Removing whitespace can fuse tokens into new comment openers ("a / /b"),
/// so the scan repeats until stable; the result is idempotent by construction.
inline std::string normalize(std::string_view body) {
    std::string current = detail::normalize_pass(body);
    for (;;) {
        std::string next = detail::normalize_pass(current);
        if (next.size() == current.size()) return current;
        current = std::move(next);
    }
}

}  // namespace oscar
