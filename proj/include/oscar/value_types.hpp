#pragma once

#include "oscar/error.hpp"

#include <chrono>
#include <compare>
#include <cstdint>
#include <cstdio>
#include <numeric>
#include <string>
#include <string_view>

namespace oscar {

/// Calendar date at day resolution (UTC).
class Date {
public:
    constexpr Date() = default;
    constexpr explicit Date(std::chrono::sys_days days) : days_(days) {}
    constexpr Date(int y, unsigned m, unsigned d)
        : days_(std::chrono::year_month_day{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}}) {}

    static constexpr Date epoch() { return Date(1970, 1, 1); }

    /// Parses "YYYY-MM-DD"; throws FormatError on anything else.
    static Date parse(std::string_view s) {
        auto bad = [&] { return FormatError("invalid date '" + std::string(s) + "' (expected YYYY-MM-DD)"); };
        if (s.size() != 10 || s[4] != '-' || s[7] != '-') throw bad();
        auto num = [&](std::size_t pos, std::size_t len) {
            int v = 0;
            for (std::size_t i = pos; i < pos + len; ++i) {
                if (s[i] < '0' || s[i] > '9') throw bad();
                v = v * 10 + (s[i] - '0');
            }
            return v;
        };
        const std::chrono::year_month_day ymd{std::chrono::year{num(0, 4)},
                                              std::chrono::month{static_cast<unsigned>(num(5, 2))},
                                              std::chrono::day{static_cast<unsigned>(num(8, 2))}};
        if (!ymd.ok()) throw bad();
        return Date(std::chrono::sys_days{ymd});
    }

    std::string str() const {
        const std::chrono::year_month_day ymd{days_};
        char buf[16];
        std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                      static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
        return buf;
    }

    constexpr std::chrono::sys_days days() const { return days_; }
    constexpr Date plus_days(int n) const { return Date(days_ + std::chrono::days{n}); }

    friend constexpr auto operator<=>(const Date&, const Date&) = default;

private:
    std::chrono::sys_days days_{};
};

/// Non-negative exact fraction; comparisons never round.
struct Ratio {
    std::uint64_t num = 0;
    std::uint64_t den = 1;

    constexpr Ratio() = default;
    constexpr Ratio(std::uint64_t n, std::uint64_t d) : num(n), den(d == 0 ? 1 : d) {}

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }

    Ratio reduced() const {
        const auto g = std::gcd(num, den);
        return g == 0 ? *this : Ratio(num / g, den / g);
    }

    std::string str() const {
        const Ratio r = reduced();
        return std::to_string(r.num) + "/" + std::to_string(r.den);
    }

    /// Accepts "a/b" or a plain decimal such as "0.1" (converted exactly).
    static Ratio parse(std::string_view s) {
        auto bad = [&] { return FormatError("invalid ratio '" + std::string(s) + "'"); };
        if (s.empty()) throw bad();
        auto digits = [&](std::string_view part) {
            if (part.empty() || part.size() > 18) throw bad();
            std::uint64_t v = 0;
            for (char c : part) {
                if (c < '0' || c > '9') throw bad();
                v = v * 10 + static_cast<std::uint64_t>(c - '0');
            }
            return v;
        };
        if (const auto slash = s.find('/'); slash != std::string_view::npos) {
            const auto d = digits(s.substr(slash + 1));
            if (d == 0) throw bad();
            return Ratio(digits(s.substr(0, slash)), d).reduced();
        }
        const auto dot = s.find('.');
        if (dot == std::string_view::npos) return Ratio(digits(s), 1);
        const auto whole = s.substr(0, dot);
        const auto frac = s.substr(dot + 1);
        if (frac.empty() && whole.empty()) throw bad();
        std::uint64_t den = 1;
        for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
        const std::uint64_t w = whole.empty() ? 0 : digits(whole);
        const std::uint64_t f = frac.empty() ? 0 : digits(frac);
        return Ratio(w * den + f, den).reduced();
    }

    friend std::strong_ordering operator<=>(const Ratio& a, const Ratio& b) {
        const auto lhs = static_cast<unsigned __int128>(a.num) * b.den;
        const auto rhs = static_cast<unsigned __int128>(b.num) * a.den;
        return lhs <=> rhs;
    }
    friend bool operator==(const Ratio& a, const Ratio& b) { return (a <=> b) == 0; }
};

}  // namespace oscar
