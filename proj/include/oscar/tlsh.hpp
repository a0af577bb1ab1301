#pragma once

// Trend Micro Locality Sensitive Hash, 128 buckets with a 1-byte checksum.
// Digests are bit-compatible with the reference implementation's "T1" form
// (the "T1" prefix is omitted; hex is lowercase) and distance() matches its
// diffxlen comparison.

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace oscar::tlsh {

inline constexpr std::size_t kMinDataLength = 50;
inline constexpr std::size_t kCodeSize = 32;      // 128 buckets * 2 bits
inline constexpr std::size_t kDigestHexLength = 70;

struct Digest {
    std::uint8_t checksum = 0;
    std::uint8_t lvalue = 0;
    std::uint8_t q1ratio = 0;  // 4 bits
    std::uint8_t q2ratio = 0;  // 4 bits
    std::array<std::uint8_t, kCodeSize> code{};

    /// The Q-ratio header byte, as it appears in the hex digest.
    std::uint8_t q_byte() const { return static_cast<std::uint8_t>(q1ratio << 4 | q2ratio); }

    friend bool operator==(const Digest&, const Digest&) = default;
};

namespace detail {

inline constexpr std::array<std::uint8_t, 256> kPearson = {
    1,   87,  49,  12,  176, 178, 102, 166, 121, 193, 6,   84,  249, 230, 44,  163,
    14,  197, 213, 181, 161, 85,  218, 80,  64,  239, 24,  226, 236, 142, 38,  200,
    110, 177, 104, 103, 141, 253, 255, 50,  77,  101, 81,  18,  45,  96,  31,  222,
    25,  107, 190, 70,  86,  237, 240, 34,  72,  242, 20,  214, 244, 227, 149, 235,
    97,  234, 57,  22,  60,  250, 82,  175, 208, 5,   127, 199, 111, 62,  135, 248,
    174, 169, 211, 58,  66,  154, 106, 195, 245, 171, 17,  187, 182, 179, 0,   243,
    132, 56,  148, 75,  128, 133, 158, 100, 130, 126, 91,  13,  153, 246, 216, 219,
    119, 68,  223, 78,  83,  88,  201, 99,  122, 11,  92,  32,  136, 114, 52,  10,
    138, 30,  48,  183, 156, 35,  61,  26,  143, 74,  251, 94,  129, 162, 63,  152,
    170, 7,   115, 167, 241, 206, 3,   150, 55,  59,  151, 220, 90,  53,  23,  131,
    125, 173, 15,  238, 79,  95,  89,  16,  105, 137, 225, 224, 217, 160, 37,  123,
    118, 73,  2,   157, 46,  116, 9,   145, 134, 228, 207, 212, 202, 215, 69,  229,
    27,  188, 67,  124, 168, 252, 42,  4,   29,  108, 21,  247, 19,  205, 39,  203,
    233, 40,  186, 147, 198, 192, 155, 33,  164, 191, 98,  204, 165, 180, 117, 76,
    140, 36,  210, 172, 41,  54,  159, 8,   185, 232, 113, 196, 231, 47,  146, 120,
    51,  65,  28,  144, 254, 221, 93,  189, 194, 139, 112, 43,  71,  109, 184, 209,
};

// Pearson hash of (salt, a, b, c); the first round is folded into the salt.
constexpr std::uint8_t mix(std::uint8_t folded_salt, std::uint8_t a, std::uint8_t b, std::uint8_t c) {
    return kPearson[kPearson[kPearson[folded_salt ^ a] ^ b] ^ c];
}

// Upper bounds of the log-scaled length buckets.
inline constexpr std::array<std::uint32_t, 170> kLengthTop = {
    1,          2,          3,          5,          7,          11,         17,         25,
    38,         57,         86,         129,        194,        291,        437,        656,
    854,        1110,       1443,       1876,       2439,       3171,       3475,       3823,
    4205,       4626,       5088,       5597,       6157,       6772,       7450,       8195,
    9014,       9916,       10907,      11998,      13198,      14518,      15970,      17567,
    19323,      21256,      23382,      25720,      28292,      31121,      34233,      37656,
    41422,      45564,      50121,      55133,      60646,      66711,      73382,      80721,
    88793,      97672,      107439,     118183,     130002,     143002,     157302,     173032,
    190335,     209369,     230306,     253337,     278670,     306538,     337191,     370911,
    408002,     448802,     493682,     543050,     597356,     657091,     722800,     795081,
    874589,     962048,     1058252,    1164078,    1280486,    1408534,    1549388,    1704327,
    1874759,    2062236,    2268459,    2495305,    2744836,    3019320,    3321252,    3653374,
    4018711,    4420582,    4862641,    5348905,    5883796,    6472176,    7119394,    7831333,
    8614467,    9475909,    10423501,   11465851,   12612437,   13873681,   15261050,   16787154,
    18465870,   20312458,   22343706,   24578077,   27035886,   29739474,   32713425,   35984770,
    39583245,   43541573,   47895730,   52685306,   57953837,   63749221,   70124148,   77136564,
    84850228,   93335252,   102668779,  112935659,  124229227,  136652151,  150317384,  165349128,
    181884040,  200072456,  220079703,  242087671,  266296456,  292926096,  322218735,  354440623,
    389884688,  428873168,  471760495,  518936559,  570830240,  627913311,  690704607,  759775136,
    835752671,  919327967,  1011260767, 1112386880, 1223623232, 1345985727, 1480584256, 1628642751,
    1791507135, 1970657856, 2167723648, 2384496256, 2622945920, 2885240448, 3173764736, 3491141248,
    3840255616, 4224281216,
};

inline std::uint8_t length_code(std::uint64_t len) {
    if (len <= kLengthTop[0]) return 0;
    auto it = std::lower_bound(kLengthTop.begin(), kLengthTop.end(), len);
    if (it == kLengthTop.end()) return static_cast<std::uint8_t>(kLengthTop.size() - 1);
    return static_cast<std::uint8_t>(it - kLengthTop.begin());
}

inline int mod_diff(int x, int y, int range) {
    int dl = x > y ? x - y : y - x;
    int dr = range - dl;
    return std::min(dl, dr);
}

constexpr int pair_penalty(int a, int b) {
    int d = a > b ? a - b : b - a;
    return d == 0 ? 0 : d == 1 ? 1 : d == 2 ? 2 : 6;
}

constexpr std::array<std::array<std::uint8_t, 256>, 256> make_byte_diff_table() {
    std::array<std::array<std::uint8_t, 256>, 256> t{};
    for (int x = 0; x < 256; ++x) {
        for (int y = 0; y < 256; ++y) {
            int sum = 0;
            for (int shift = 0; shift < 8; shift += 2) {
                sum += pair_penalty((x >> shift) & 3, (y >> shift) & 3);
            }
            t[x][y] = static_cast<std::uint8_t>(sum);
        }
    }
    return t;
}

inline constexpr auto kByteDiff = make_byte_diff_table();

inline int hex_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

inline std::uint8_t swap_nibbles(std::uint8_t b) { return static_cast<std::uint8_t>((b >> 4) | (b << 4)); }

}  // namespace detail

/// Computes the digest, or nullopt when the input is too short or its
/// bucket histogram is too flat (fewer than half the buckets populated).
inline std::optional<Digest> compute(std::span<const std::uint8_t> data) {
    if (data.size() < kMinDataLength) return std::nullopt;

    std::array<std::uint32_t, 256> buckets{};
    std::uint8_t checksum = 0;
    std::array<std::uint8_t, 5> window{};

    for (std::size_t i = 0; i < data.size(); ++i) {
        const std::size_t j = i % 5;
        window[j] = data[i];
        if (i < 4) continue;
        const std::uint8_t w0 = window[j];
        const std::uint8_t w1 = window[(j + 4) % 5];
        const std::uint8_t w2 = window[(j + 3) % 5];
        const std::uint8_t w3 = window[(j + 2) % 5];
        const std::uint8_t w4 = window[(j + 1) % 5];
        checksum = detail::mix(1, w0, w1, checksum);
        ++buckets[detail::mix(49, w0, w1, w2)];
        ++buckets[detail::mix(12, w0, w1, w3)];
        ++buckets[detail::mix(178, w0, w2, w3)];
        ++buckets[detail::mix(166, w0, w2, w4)];
        ++buckets[detail::mix(84, w0, w1, w4)];
        ++buckets[detail::mix(230, w0, w3, w4)];
    }

    constexpr std::size_t kEff = kCodeSize * 4;
    std::array<std::uint32_t, kEff> sorted{};
    std::copy_n(buckets.begin(), kEff, sorted.begin());
    std::sort(sorted.begin(), sorted.end());
    const std::uint32_t q1 = sorted[kEff / 4 - 1];
    const std::uint32_t q2 = sorted[kEff / 2 - 1];
    const std::uint32_t q3 = sorted[kEff - kEff / 4 - 1];
    if (q3 == 0) return std::nullopt;

    const auto nonzero = std::count_if(buckets.begin(), buckets.begin() + kEff, [](auto b) { return b > 0; });
    if (nonzero <= static_cast<long>(kEff / 2)) return std::nullopt;

    Digest d;
    for (std::size_t i = 0; i < kCodeSize; ++i) {
        std::uint8_t h = 0;
        for (std::size_t k = 0; k < 4; ++k) {
            const std::uint32_t v = buckets[4 * i + k];
            const unsigned level = q3 < v ? 3 : q2 < v ? 2 : q1 < v ? 1 : 0;
            h = static_cast<std::uint8_t>(h + (level << (k * 2)));
        }
        d.code[i] = h;
    }
    d.checksum = checksum;
    d.lvalue = detail::length_code(data.size());
    d.q1ratio = static_cast<std::uint8_t>((static_cast<std::uint64_t>(q1) * 100 / q3) % 16);
    d.q2ratio = static_cast<std::uint8_t>((static_cast<std::uint64_t>(q2) * 100 / q3) % 16);
    return d;
}

inline std::optional<Digest> compute(std::string_view text) {
    return compute(std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

/// 70 lowercase hex characters.
inline std::string to_hex(const Digest& d) {
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(kDigestHexLength);
    auto put = [&](std::uint8_t b) {
        out.push_back(kHex[b >> 4]);
        out.push_back(kHex[b & 15]);
    };
    put(detail::swap_nibbles(d.checksum));
    put(detail::swap_nibbles(d.lvalue));
    put(d.q_byte());
    for (std::size_t i = 0; i < kCodeSize; ++i) put(d.code[kCodeSize - 1 - i]);
    return out;
}

/// Accepts 70 hex characters, optionally prefixed with "T1".
inline std::optional<Digest> from_hex(std::string_view hex) {
    if (hex.size() == kDigestHexLength + 2 && hex[0] == 'T' && hex[1] == '1') hex.remove_prefix(2);
    if (hex.size() != kDigestHexLength) return std::nullopt;
    std::array<std::uint8_t, kDigestHexLength / 2> raw{};
    for (std::size_t i = 0; i < raw.size(); ++i) {
        const int hi = detail::hex_value(hex[2 * i]);
        const int lo = detail::hex_value(hex[2 * i + 1]);
        if (hi < 0 || lo < 0) return std::nullopt;
        raw[i] = static_cast<std::uint8_t>(hi << 4 | lo);
    }
    Digest d;
    d.checksum = detail::swap_nibbles(raw[0]);
    d.lvalue = detail::swap_nibbles(raw[1]);
    d.q1ratio = raw[2] >> 4;
    d.q2ratio = raw[2] & 15;
    for (std::size_t i = 0; i < kCodeSize; ++i) d.code[i] = raw[3 + kCodeSize - 1 - i];
    return d;
}

/// Contribution of the Q-ratio header alone; a lower bound on distance().
inline int header_distance(std::uint8_t q1a, std::uint8_t q2a, std::uint8_t q1b, std::uint8_t q2b) {
    auto term = [](int d) { return d <= 1 ? d : (d - 1) * 12; };
    return term(detail::mod_diff(q1a, q1b, 16)) + term(detail::mod_diff(q2a, q2b, 16));
}

/// Distance ignoring the length field (the reference "diffxlen").
inline int distance(const Digest& a, const Digest& b) {
    int diff = header_distance(a.q1ratio, a.q2ratio, b.q1ratio, b.q2ratio);
    if (a.checksum != b.checksum) ++diff;
    for (std::size_t i = 0; i < kCodeSize; ++i) diff += detail::kByteDiff[a.code[i]][b.code[i]];
    return diff;
}

}  // namespace oscar::tlsh
