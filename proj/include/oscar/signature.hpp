#pragma once

// Redundancy-eliminated OSS signatures. Every distinct function hash of an
// OSS is stored once, with the set of versions (and paths per version) in
// which it occurs; an entry present in i versions belongs to bin i.

#include "oscar/error.hpp"
#include "oscar/extractor.hpp"
#include "oscar/fingerprint.hpp"
#include "oscar/normalize.hpp"
#include "oscar/value_types.hpp"

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

namespace oscar {

struct VersionMeta {
    std::string version_id;
    Date release_date;
    std::uint32_t ordinal = 0;

    friend bool operator==(const VersionMeta&, const VersionMeta&) = default;
};

struct SignatureEntry {
    FuncHash hash;
    /// version ordinal -> sorted, non-empty set of repo-relative paths
    std::map<std::uint32_t, std::vector<std::string>> occurrences;

    std::size_t bin() const { return occurrences.size(); }

    std::vector<std::uint32_t> versions() const {
        std::vector<std::uint32_t> v;
        v.reserve(occurrences.size());
        for (const auto& [ordinal, paths] : occurrences) v.push_back(ordinal);
        return v;
    }

    bool in_version(std::uint32_t ordinal) const { return occurrences.contains(ordinal); }

    friend bool operator==(const SignatureEntry&, const SignatureEntry&) = default;
};

struct OssSignature {
    std::string oss_id;
    std::vector<VersionMeta> versions;    // indexed by ordinal
    std::vector<SignatureEntry> entries;  // sorted by hash, hashes unique
    std::vector<std::size_t> app_entries; // sorted indices into entries; valid once segmented
    std::optional<bool> is_prime;         // unset until segmented

    std::size_t n_versions() const { return versions.size(); }
    bool segmented() const { return is_prime.has_value(); }

    const SignatureEntry* find(const FuncHash& h) const {
        auto it = std::lower_bound(entries.begin(), entries.end(), h,
                                   [](const SignatureEntry& e, const FuncHash& k) { return e.hash < k; });
        return it != entries.end() && it->hash == h ? &*it : nullptr;
    }

    std::optional<std::size_t> index_of(const FuncHash& h) const {
        const auto* e = find(h);
        if (!e) return std::nullopt;
        return static_cast<std::size_t>(e - entries.data());
    }

    std::uint64_t total_incidences() const {
        std::uint64_t n = 0;
        for (const auto& e : entries) n += e.bin();
        return n;
    }

    /// Latest version by ordinal (ordinals follow release order).
    const VersionMeta& latest_version() const { return versions.back(); }

    friend bool operator==(const OssSignature&, const OssSignature&) = default;
};

struct DbMeta {
    int format = 1;
    std::string hash_scheme{kLshSchemeId};
    std::string exact_scheme{kExactSchemeId};
    int cutoff = kDefaultCutoff;

    friend bool operator==(const DbMeta&, const DbMeta&) = default;
};

struct ComponentDb {
    DbMeta meta;
    std::map<std::string, OssSignature> signatures;

    friend bool operator==(const ComponentDb&, const ComponentDb&) = default;
};

/// Birth time: the release date of the earliest version containing the entry.
inline Date birth(const SignatureEntry& entry, const OssSignature& sig) {
    Date best = sig.versions.at(entry.occurrences.begin()->first).release_date;
    for (const auto& [ordinal, paths] : entry.occurrences) best = std::min(best, sig.versions.at(ordinal).release_date);
    return best;
}

/// entries / incidences; the fraction of the naive per-version table kept.
inline Ratio dedup_ratio(const OssSignature& sig) { return Ratio(sig.entries.size(), sig.total_incidences()); }

inline Ratio dedup_ratio(const ComponentDb& db) {
    std::uint64_t entries = 0;
    std::uint64_t incidences = 0;
    for (const auto& [id, sig] : db.signatures) {
        entries += sig.entries.size();
        incidences += sig.total_incidences();
    }
    return Ratio(entries, incidences);
}

/// oss ids double as directory names in the DB layout.
inline void validate_oss_id(const std::string& id) {
    const bool bad = id.empty() || id == "." || id == ".." ||
                     id.find_first_of("/\\\t\n\r") != std::string::npos || id.find('\0') != std::string::npos;
    if (bad) throw Error("invalid oss id '" + id + "'");
}

/// One version's input: its id, release date (if known) and hashed functions.
struct VersionFunctions {
    std::string version_id;
    std::optional<Date> release_date;
    /// (path, hash) per extracted function; duplicates are harmless.
    std::vector<std::pair<std::string, FuncHash>> functions;
};

/// Assigns ordinals by (release date, version id); missing dates become the
/// epoch and are reported through warnings.
inline std::vector<VersionMeta> order_versions(const std::string& oss_id, std::vector<VersionFunctions>& versions,
                                               std::vector<std::string>* warnings) {
    std::set<std::string> seen;
    for (const auto& v : versions) {
        if (v.version_id.empty() || v.version_id.find_first_of("\t\n\r") != std::string::npos) {
            throw Error(oss_id + ": invalid version id '" + v.version_id + "'");
        }
        if (!seen.insert(v.version_id).second) throw Error(oss_id + ": duplicate version id '" + v.version_id + "'");
    }
    for (auto& v : versions) {
        if (!v.release_date) {
            if (warnings) warnings->push_back(oss_id + ": no release date for " + v.version_id + ", using 1970-01-01");
            v.release_date = Date::epoch();
        }
    }
    std::stable_sort(versions.begin(), versions.end(), [](const VersionFunctions& a, const VersionFunctions& b) {
        return std::tie(*a.release_date, a.version_id) < std::tie(*b.release_date, b.version_id);
    });
    std::vector<VersionMeta> meta;
    for (std::uint32_t i = 0; i < versions.size(); ++i) meta.push_back({versions[i].version_id, *versions[i].release_date, i});
    return meta;
}

/// Merges identical hashes across versions into one entry each.
inline OssSignature build_signature_from_hashes(const std::string& oss_id, std::vector<VersionFunctions> versions,
                                                std::vector<std::string>* warnings = nullptr) {
    validate_oss_id(oss_id);
    if (versions.empty()) throw Error(oss_id + ": no versions");
    OssSignature sig;
    sig.oss_id = oss_id;
    sig.versions = order_versions(oss_id, versions, warnings);

    std::map<FuncHash, std::map<std::uint32_t, std::set<std::string>>> merged;
    for (std::uint32_t ord = 0; ord < versions.size(); ++ord) {
        for (const auto& [path, hash] : versions[ord].functions) merged[hash][ord].insert(path);
    }
    if (merged.empty()) throw Error(oss_id + ": empty OSS (no extractable functions in any version)");
    sig.entries.reserve(merged.size());
    for (auto& [hash, occ] : merged) {
        SignatureEntry e{hash, {}};
        for (auto& [ord, paths] : occ) e.occurrences.emplace(ord, std::vector<std::string>(paths.begin(), paths.end()));
        sig.entries.push_back(std::move(e));
    }
    return sig;
}

/// Normalizes and hashes extracted functions; bodies that normalize to
/// nothing are dropped.
inline std::vector<std::pair<std::string, FuncHash>> hash_functions(const std::vector<RawFunction>& fns) {
    std::vector<std::pair<std::string, FuncHash>> out;
    out.reserve(fns.size());
    for (const auto& fn : fns) {
        const std::string text = normalize(fn.body);
        if (text.empty()) continue;
        out.emplace_back(fn.file_path, hash_function(text));
    }
    return out;
}

struct VersionTree {
    std::string version_id;
    std::optional<Date> release_date;
    std::filesystem::path root;
};

inline OssSignature build_signature(const std::string& oss_id, const std::vector<VersionTree>& trees,
                                    const ExtractOptions& opts = {}, std::vector<std::string>* warnings = nullptr) {
    if (trees.empty()) throw Error(oss_id + ": no versions");
    std::vector<VersionFunctions> versions;
    versions.reserve(trees.size());
    for (const auto& t : trees) {
        versions.push_back({t.version_id, t.release_date, hash_functions(extract_functions(t.root, opts, warnings))});
    }
    return build_signature_from_hashes(oss_id, std::move(versions), warnings);
}

}  // namespace oscar
