#pragma once

// Component identification in a target codebase.
//
// Phi(T, S) = |T ∩ S_A| / |S_A| over S's application code; S is reported
// when Phi >= theta. The reused version is the one with the highest sum of
// W(f) = ln(n / |V(f)|) over the reused functions, and the reuse pattern is
// derived from the identified version's function set.

#include "oscar/error.hpp"
#include "oscar/extractor.hpp"
#include "oscar/matching.hpp"
#include "oscar/segmenter.hpp"
#include "oscar/signature.hpp"
#include "oscar/value_types.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace oscar {

struct TargetFunction {
    FuncHash hash;
    std::vector<std::string> paths;  // sorted, unique
};

struct TargetFingerprint {
    std::string target_id;
    std::vector<TargetFunction> functions;  // sorted by hash, hashes unique

    MatchIndex index() const {
        std::vector<FuncHash> hashes;
        hashes.reserve(functions.size());
        for (const auto& f : functions) hashes.push_back(f.hash);
        return MatchIndex(std::move(hashes));
    }
};

/// Collapses duplicate hashes into one record carrying every path.
inline TargetFingerprint make_target(std::string target_id, const std::vector<std::pair<std::string, FuncHash>>& fns) {
    std::map<FuncHash, std::set<std::string>> merged;
    for (const auto& [path, hash] : fns) merged[hash].insert(path);
    TargetFingerprint t{std::move(target_id), {}};
    t.functions.reserve(merged.size());
    for (auto& [hash, paths] : merged) t.functions.push_back({hash, {paths.begin(), paths.end()}});
    return t;
}

inline TargetFingerprint fingerprint_target(const std::filesystem::path& root, const ExtractOptions& opts = {},
                                            std::vector<std::string>* warnings = nullptr) {
    auto id = root.filename().string();
    if (id.empty()) id = root.parent_path().filename().string();
    return make_target(id, hash_functions(extract_functions(root, opts, warnings)));
}

struct DetectorConfig {
    Ratio theta = kDefaultTheta;
    int cutoff = kDefaultCutoff;
    /// Test hook: score against whole signatures instead of application code.
    bool use_segmentation = true;

    void validate() const {
        // 0 is allowed so that sweeps can start from the unfiltered baseline
        if (theta >= Ratio(1, 1)) throw Error("theta must be in [0, 1) (got " + theta.str() + ")");
        if (cutoff < 0) throw Error("cutoff must be non-negative");
    }
};

enum class ReusePattern { Exact, Partial, StructureChanged, CodeChanged };

inline std::string_view to_string(ReusePattern p) {
    switch (p) {
        case ReusePattern::Exact: return "E";
        case ReusePattern::Partial: return "P";
        case ReusePattern::StructureChanged: return "SC";
        case ReusePattern::CodeChanged: return "CC";
    }
    return "?";
}

struct ReuseCounts {
    std::uint64_t identical = 0;
    std::uint64_t modified = 0;
    std::uint64_t unused = 0;

    friend bool operator==(const ReuseCounts&, const ReuseCounts&) = default;
};

struct MatchEvidence {
    FuncHash digest;  // component entry
    Relation relation;
    int distance;
    std::vector<std::string> target_paths;
    std::vector<std::string> original_paths;  // in the identified version
};

struct VersionVote {
    std::uint32_t ordinal = 0;
    std::string version_id;
    std::vector<double> scores;  // by ordinal
    bool indistinct = false;
};

struct ComponentReport {
    std::string oss_id;
    Ratio phi;
    std::string version_id;
    std::map<std::string, double> version_scores;
    bool version_indistinct = false;
    std::vector<ReusePattern> patterns;  // in E, P, SC, CC order
    ReuseCounts counts;
    bool structure_changed = false;
    std::vector<MatchEvidence> evidence;
};

/// Relative tolerance under which two version scores count as tied.
inline constexpr double kScoreTieTolerance = 1e-9;

inline bool score_greater(double a, double b) {
    return a - b > kScoreTieTolerance * std::max({1.0, std::abs(a), std::abs(b)});
}

/// Sums W(f) = ln(n / |V(f)|) into every version containing f; the highest
/// score wins, ties going to the latest release (the highest ordinal, since
/// ordinals follow release date and then version id).
inline VersionVote identify_version(const std::vector<std::size_t>& matched_entries, const OssSignature& sig) {
    if (matched_entries.empty()) throw Error(sig.oss_id + ": version identification needs at least one match");
    const std::size_t n = sig.n_versions();
    VersionVote vote;
    vote.scores.assign(n, 0.0);
    bool any_weight = false;
    for (std::size_t idx : matched_entries) {
        const auto& e = sig.entries.at(idx);
        const double w = std::log(static_cast<double>(n) / static_cast<double>(e.bin()));
        any_weight = any_weight || e.bin() < n;
        for (const auto& [ordinal, paths] : e.occurrences) vote.scores[ordinal] += w;
    }
    std::uint32_t best = static_cast<std::uint32_t>(n - 1);
    if (any_weight) {
        for (std::uint32_t o = static_cast<std::uint32_t>(n); o-- > 0;) {
            if (score_greater(vote.scores[o], vote.scores[best])) best = o;
        }
    }
    vote.ordinal = best;
    vote.version_id = sig.versions[best].version_id;
    vote.indistinct = !any_weight;
    return vote;
}

/// Structural change between an original and a reused path: components are
/// compared right to left over the depth of the original path; extra
/// leading components of the target are ignored.
inline bool path_changed(std::string_view original_path, std::string_view target_path) {
    auto split = [](std::string_view p) {
        std::vector<std::string_view> parts;
        std::size_t start = 0;
        while (start <= p.size()) {
            auto slash = p.find('/', start);
            if (slash == std::string_view::npos) slash = p.size();
            if (slash > start) parts.push_back(p.substr(start, slash - start));
            start = slash + 1;
        }
        return parts;
    };
    const auto orig = split(original_path);
    const auto tgt = split(target_path);
    if (tgt.size() < orig.size()) return true;
    for (std::size_t k = 1; k <= orig.size(); ++k) {
        if (orig[orig.size() - k] != tgt[tgt.size() - k]) return true;
    }
    return false;
}

/// A function moved only if no (original, target) path pair lines up.
inline bool structure_moved(const std::vector<std::string>& original_paths, const std::vector<std::string>& target_paths) {
    for (const auto& o : original_paths) {
        for (const auto& t : target_paths) {
            if (!path_changed(o, t)) return false;
        }
    }
    return true;
}

struct PatternAnalysis {
    std::vector<ReusePattern> patterns;
    ReuseCounts counts;
    bool structure_changed = false;
    std::vector<MatchEvidence> evidence;
};

inline std::vector<ReusePattern> patterns_from(const ReuseCounts& c, bool structure_changed) {
    std::vector<ReusePattern> p;
    if (c.unused == 0 && c.modified == 0 && !structure_changed) return {ReusePattern::Exact};
    if (c.unused > 0) p.push_back(ReusePattern::Partial);
    if (structure_changed) p.push_back(ReusePattern::StructureChanged);
    if (c.modified > 0) p.push_back(ReusePattern::CodeChanged);
    return p;
}

/// Classifies every function of the identified version as reused as-is,
/// reused with changes, or unused, and checks reused paths for relocation.
inline PatternAnalysis analyze_reuse_pattern(const TargetFingerprint& t, const MatchIndex& t_index,
                                             const OssSignature& sig, std::uint32_t ordinal, int cutoff) {
    PatternAnalysis out;
    std::uint64_t version_size = 0;
    for (const auto& e : sig.entries) {
        const auto occ = e.occurrences.find(ordinal);
        if (occ == e.occurrences.end()) continue;
        ++version_size;
        const auto m = t_index.best(e.hash, cutoff);
        if (!m) continue;
        const Relation rel = relation_for(m->distance, cutoff);
        if (rel == Relation::Identical) ++out.counts.identical;
        else ++out.counts.modified;
        const auto& target_paths = t.functions[m->index].paths;
        if (structure_moved(occ->second, target_paths)) out.structure_changed = true;
        out.evidence.push_back({e.hash, rel, m->distance, target_paths, occ->second});
    }
    out.counts.unused = version_size - out.counts.identical - out.counts.modified;
    out.patterns = patterns_from(out.counts, out.structure_changed);
    return out;
}

/// Entries of `candidates` that some target function reuses: each target
/// function votes for its nearest candidate (identical digest first).
inline std::vector<std::size_t> reused_entries(const TargetFingerprint& t, const OssSignature& sig,
                                               const std::vector<std::size_t>& candidates, int cutoff) {
    std::vector<FuncHash> hashes;
    hashes.reserve(candidates.size());
    for (auto i : candidates) hashes.push_back(sig.entries[i].hash);
    const MatchIndex index(std::move(hashes));
    std::set<std::size_t> hit;
    for (const auto& f : t.functions) {
        if (auto m = index.best(f.hash, cutoff)) hit.insert(candidates[m->index]);
    }
    return {hit.begin(), hit.end()};
}

struct ComponentScore {
    std::uint64_t matched = 0;
    std::uint64_t app_size = 0;
    Ratio phi;
};

inline std::vector<std::size_t> scoring_entries(const OssSignature& sig, bool use_segmentation) {
    if (use_segmentation) return sig.app_entries;
    std::vector<std::size_t> all(sig.entries.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    return all;
}

/// Number of application-code entries with a counterpart in the target.
inline ComponentScore score_component(const MatchIndex& t_index, const OssSignature& sig,
                                      const std::vector<std::size_t>& app, int cutoff) {
    ComponentScore s;
    s.app_size = app.size();
    for (auto i : app) {
        if (t_index.best(sig.entries[i].hash, cutoff)) ++s.matched;
    }
    s.phi = Ratio(s.matched, s.app_size);
    return s;
}

/// Scores every signature against the target and reports the components
/// with Phi >= theta (and at least one match), by Phi descending then id.
inline std::vector<ComponentReport> identify_components(const TargetFingerprint& t, const ComponentDb& db,
                                                        const DetectorConfig& cfg,
                                                        std::vector<std::string>* warnings = nullptr) {
    cfg.validate();
    const MatchIndex t_index = t.index();
    std::vector<ComponentReport> reports;
    for (const auto& [id, sig] : db.signatures) {
        if (cfg.use_segmentation && !sig.segmented()) throw Error("run segmentation first (" + id + " is unsegmented)");
        const auto app = scoring_entries(sig, cfg.use_segmentation);
        if (app.empty()) {
            if (warnings) warnings->push_back(id + ": no application code after segmentation, skipped");
            continue;
        }
        const auto score = score_component(t_index, sig, app, cfg.cutoff);
        if (score.matched == 0 || score.phi < cfg.theta) continue;

        ComponentReport r;
        r.oss_id = id;
        r.phi = score.phi;
        const auto vote = identify_version(reused_entries(t, sig, app, cfg.cutoff), sig);
        r.version_id = vote.version_id;
        r.version_indistinct = vote.indistinct;
        for (std::uint32_t o = 0; o < vote.scores.size(); ++o) r.version_scores[sig.versions[o].version_id] = vote.scores[o];
        auto analysis = analyze_reuse_pattern(t, t_index, sig, vote.ordinal, cfg.cutoff);
        r.patterns = std::move(analysis.patterns);
        r.counts = analysis.counts;
        r.structure_changed = analysis.structure_changed;
        r.evidence = std::move(analysis.evidence);
        reports.push_back(std::move(r));
    }
    std::sort(reports.begin(), reports.end(), [](const ComponentReport& a, const ComponentReport& b) {
        if (a.phi != b.phi) return a.phi > b.phi;
        return a.oss_id < b.oss_id;
    });
    return reports;
}

}  // namespace oscar
