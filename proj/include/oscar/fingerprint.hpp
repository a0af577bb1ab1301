#pragma once

#include "oscar/error.hpp"
#include "oscar/tlsh.hpp"

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <openssl/evp.h>

namespace oscar {

inline constexpr int kDefaultCutoff = 30;

/// Identifiers written to db_meta.json so a DB records how it was hashed.
inline constexpr std::string_view kLshSchemeId = "TLSH/128-buckets/1-byte-checksum/min-50/diffxlen";
inline constexpr std::string_view kExactSchemeId = "SHA-256";

enum class HashScheme { Lsh, Exact };

/// Hash of one normalized function body. Ordering matches the canonical
/// "scheme:hex" string ("sha256:" sorts before "tlsh:").
struct FuncHash {
    HashScheme scheme = HashScheme::Exact;
    std::string digest;  // lowercase hex; 70 chars for LSH, 64 for EXACT

    std::string str() const { return std::string(scheme == HashScheme::Lsh ? "tlsh:" : "sha256:") + digest; }

    static FuncHash parse(std::string_view s);

    friend std::strong_ordering operator<=>(const FuncHash& a, const FuncHash& b) {
        if (a.scheme != b.scheme) return a.scheme == HashScheme::Exact ? std::strong_ordering::less
                                                                       : std::strong_ordering::greater;
        return a.digest <=> b.digest;
    }
    friend bool operator==(const FuncHash&, const FuncHash&) = default;
};

inline FuncHash FuncHash::parse(std::string_view s) {
    auto bad = [&] { return FormatError("invalid function hash '" + std::string(s) + "'"); };
    const auto colon = s.find(':');
    if (colon == std::string_view::npos) throw bad();
    const auto scheme = s.substr(0, colon);
    const auto hex = s.substr(colon + 1);
    const bool lowercase_hex = !hex.empty() && hex.find_first_not_of("0123456789abcdef") == std::string_view::npos;
    if (!lowercase_hex) throw bad();
    if (scheme == "tlsh" && hex.size() == tlsh::kDigestHexLength) return {HashScheme::Lsh, std::string(hex)};
    if (scheme == "sha256" && hex.size() == 64) return {HashScheme::Exact, std::string(hex)};
    throw bad();
}

enum class Relation { Identical, Similar, Different };

inline std::string_view to_string(Relation r) {
    switch (r) {
        case Relation::Identical: return "IDENTICAL";
        case Relation::Similar: return "SIMILAR";
        case Relation::Different: return "DIFFERENT";
    }
    return "?";
}

struct RelationDecision {
    Relation kind;
    int distance;
};

inline std::string sha256_hex(std::string_view text) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    if (EVP_Digest(text.data(), text.size(), md.data(), &len, EVP_sha256(), nullptr) != 1) {
        throw Error("SHA-256 computation failed");
    }
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(len * 2);
    for (unsigned i = 0; i < len; ++i) {
        out.push_back(kHex[md[i] >> 4]);
        out.push_back(kHex[md[i] & 15]);
    }
    return out;
}

/// TLSH when the body is long and varied enough for a digest, SHA-256
/// otherwise. Throws on an empty body.
inline FuncHash hash_function(std::string_view normalized) {
    if (normalized.empty()) throw Error("empty function body");
    if (auto d = tlsh::compute(normalized)) return {HashScheme::Lsh, tlsh::to_hex(*d)};
    return {HashScheme::Exact, sha256_hex(normalized)};
}

/// diffxlen for two LSH hashes; otherwise 0 for equal digests and
/// cutoff + 1 for anything else, so EXACT hashes are never "similar".
inline int distance(const FuncHash& a, const FuncHash& b, int cutoff = kDefaultCutoff) {
    if (a.scheme == HashScheme::Lsh && b.scheme == HashScheme::Lsh) {
        if (a.digest == b.digest) return 0;
        const auto da = tlsh::from_hex(a.digest);
        const auto db = tlsh::from_hex(b.digest);
        if (!da || !db) throw FormatError("malformed TLSH digest");
        return tlsh::distance(*da, *db);
    }
    return a == b ? 0 : cutoff + 1;
}

inline Relation relation_for(int distance, int cutoff) {
    if (distance == 0) return Relation::Identical;
    return distance <= cutoff ? Relation::Similar : Relation::Different;
}

inline RelationDecision classify(const FuncHash& a, const FuncHash& b, int cutoff = kDefaultCutoff) {
    const int d = distance(a, b, cutoff);
    return {relation_for(d, cutoff), d};
}

}  // namespace oscar
