#pragma once

// Prime-OSS detection and code segmentation.
//
// phi(S, X) = |G| / |X| where G holds the functions S shares with X whose
// birth in X is no later than their birth in S. Every X with phi >= theta is
// a member (borrowed component) of S; S's application code is S minus every
// entry matched to an entry of any member.

#include "oscar/matching.hpp"
#include "oscar/signature.hpp"
#include "oscar/value_types.hpp"

#include <algorithm>
#include <future>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace oscar {

inline constexpr Ratio kDefaultTheta{1, 10};

struct EntryPair {
    std::size_t s_index;
    std::size_t x_index;
    int distance;
};

inline MatchIndex index_entries(const OssSignature& sig) {
    std::vector<FuncHash> hashes;
    hashes.reserve(sig.entries.size());
    for (const auto& e : sig.entries) hashes.push_back(e.hash);
    return MatchIndex(std::move(hashes));
}

/// Pairs each entry of s with at most one entry of x (identical digest
/// first, else the nearest within cutoff, ties to the smaller x hash).
inline std::vector<EntryPair> common_functions(const OssSignature& s, const MatchIndex& x_index, int cutoff) {
    std::vector<EntryPair> pairs;
    for (std::size_t i = 0; i < s.entries.size(); ++i) {
        if (auto m = x_index.best(s.entries[i].hash, cutoff)) pairs.push_back({i, m->index, m->distance});
    }
    return pairs;
}

inline std::vector<EntryPair> common_functions(const OssSignature& s, const OssSignature& x, int cutoff) {
    return common_functions(s, index_entries(x), cutoff);
}

struct PhiScore {
    std::string s_id;
    std::string x_id;
    std::uint64_t g_size = 0;
    std::uint64_t x_size = 0;
    Ratio phi;
};

// |G| counts distinct X entries, so several S variants paired with one X
// function count once and phi stays within [0, 1].
inline PhiScore compute_phi(const OssSignature& s, const OssSignature& x, const MatchIndex& x_index, int cutoff) {
    std::set<std::size_t> g;
    for (const auto& p : common_functions(s, x_index, cutoff)) {
        if (birth(x.entries[p.x_index], x) <= birth(s.entries[p.s_index], s)) g.insert(p.x_index);
    }
    PhiScore score{s.oss_id, x.oss_id, g.size(), x.entries.size(), Ratio(g.size(), x.entries.size())};
    return score;
}

inline PhiScore compute_phi(const OssSignature& s, const OssSignature& x, int cutoff) {
    return compute_phi(s, x, index_entries(x), cutoff);
}

/// Match indices over every signature of a DB, built once and shared.
class DbIndex {
public:
    explicit DbIndex(const ComponentDb& db) {
        for (const auto& [id, sig] : db.signatures) indices_.emplace(id, index_entries(sig));
    }
    const MatchIndex& at(const std::string& id) const { return indices_.at(id); }

private:
    std::map<std::string, MatchIndex> indices_;
};

struct PrimeCheck {
    bool is_prime = true;
    std::set<std::string> members;
};

// A member needs phi >= theta and at least one shared function, so theta = 0
// does not turn every unrelated project into a member.
inline PrimeCheck check_prime(const OssSignature& s, const ComponentDb& db, const DbIndex& index, Ratio theta,
                              int cutoff) {
    PrimeCheck out;
    for (const auto& [id, x] : db.signatures) {
        if (id == s.oss_id) continue;
        const auto score = compute_phi(s, x, index.at(id), cutoff);
        if (score.g_size > 0 && score.phi >= theta) out.members.insert(id);
    }
    out.is_prime = out.members.empty();
    return out;
}

inline PrimeCheck check_prime(const OssSignature& s, const ComponentDb& db, Ratio theta = kDefaultTheta,
                              int cutoff = kDefaultCutoff) {
    return check_prime(s, db, DbIndex(db), theta, cutoff);
}

struct SegmentationResult {
    std::string oss_id;
    bool is_prime = true;
    std::set<std::string> members;
    std::vector<std::size_t> app_entries;  // sorted indices into the signature's entries

    std::vector<FuncHash> app_hashes(const OssSignature& sig) const {
        std::vector<FuncHash> out;
        for (auto i : app_entries) out.push_back(sig.entries[i].hash);
        return out;
    }
};

inline SegmentationResult segment(const OssSignature& s, const ComponentDb& db, const DbIndex& index, Ratio theta,
                                  int cutoff) {
    auto check = check_prime(s, db, index, theta, cutoff);
    SegmentationResult r{s.oss_id, check.is_prime, std::move(check.members), {}};
    std::vector<bool> borrowed(s.entries.size(), false);
    for (const auto& member : r.members) {
        for (const auto& p : common_functions(s, index.at(member), cutoff)) borrowed[p.s_index] = true;
    }
    for (std::size_t i = 0; i < s.entries.size(); ++i) {
        if (!borrowed[i]) r.app_entries.push_back(i);
    }
    return r;
}

inline SegmentationResult segment(const OssSignature& s, const ComponentDb& db, Ratio theta = kDefaultTheta,
                                  int cutoff = kDefaultCutoff) {
    return segment(s, db, DbIndex(db), theta, cutoff);
}

/// Segments every signature against the unsegmented originals of all others.
inline std::map<std::string, SegmentationResult> segment_all(const ComponentDb& db, Ratio theta = kDefaultTheta,
                                                             int cutoff = kDefaultCutoff, unsigned jobs = 1) {
    const DbIndex index(db);
    std::vector<const OssSignature*> sigs;
    for (const auto& [id, sig] : db.signatures) sigs.push_back(&sig);
    std::vector<SegmentationResult> results(sigs.size());
    jobs = std::max(1u, jobs);
    if (jobs == 1) {
        for (std::size_t i = 0; i < sigs.size(); ++i) results[i] = segment(*sigs[i], db, index, theta, cutoff);
    } else {
        std::vector<std::future<void>> workers;
        for (unsigned w = 0; w < jobs; ++w) {
            workers.push_back(std::async(std::launch::async, [&, w] {
                for (std::size_t i = w; i < sigs.size(); i += jobs) results[i] = segment(*sigs[i], db, index, theta, cutoff);
            }));
        }
        for (auto& f : workers) f.get();
    }
    std::map<std::string, SegmentationResult> out;
    for (auto& r : results) out.emplace(r.oss_id, std::move(r));
    return out;
}

inline void apply_segmentation(ComponentDb& db, const std::map<std::string, SegmentationResult>& results) {
    for (const auto& [id, r] : results) {
        auto& sig = db.signatures.at(id);
        sig.is_prime = r.is_prime;
        sig.app_entries = r.app_entries;
    }
}

}  // namespace oscar
