#pragma once

#include "oscar/fingerprint.hpp"
#include "oscar/tlsh.hpp"

#include <array>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace oscar {

struct Match {
    std::size_t index;  // position in the indexed list
    int distance;
};

/// Nearest-neighbour lookup over a fixed list of hashes.
///
/// Identical digests are found by hash lookup. LSH candidates are grouped by
/// their Q-ratio header byte; a bucket is scanned only when the header term
/// of the distance alone does not already exceed the cutoff, which is a
/// lower bound, so pruning never loses a match. Below full_scan_below items
/// every LSH item is scanned.
class MatchIndex {
public:
    static constexpr std::size_t kDefaultFullScanBelow = 64;

    MatchIndex() = default;

    explicit MatchIndex(std::vector<FuncHash> hashes, std::size_t full_scan_below = kDefaultFullScanBelow)
        : hashes_(std::move(hashes)), full_scan_(hashes_.size() < full_scan_below) {
        exact_.reserve(hashes_.size());
        for (std::size_t i = 0; i < hashes_.size(); ++i) {
            exact_.emplace(hashes_[i].str(), i);
            if (hashes_[i].scheme != HashScheme::Lsh) continue;
            auto d = tlsh::from_hex(hashes_[i].digest);
            if (!d) continue;
            lsh_.push_back({i, *d});
            buckets_[d->q_byte()].push_back(lsh_.size() - 1);
        }
    }

    std::size_t size() const { return hashes_.size(); }
    const FuncHash& hash(std::size_t i) const { return hashes_[i]; }

    /// Identical digest first; otherwise the minimum-distance LSH item within
    /// cutoff, ties broken by the smaller hash.
    std::optional<Match> best(const FuncHash& query, int cutoff) const {
        if (auto it = exact_.find(query.str()); it != exact_.end()) return Match{it->second, 0};
        if (query.scheme != HashScheme::Lsh) return std::nullopt;
        const auto q = tlsh::from_hex(query.digest);
        if (!q) return std::nullopt;
        return best_lsh(*q, cutoff);
    }

private:
    struct LshItem {
        std::size_t index;
        tlsh::Digest digest;
    };

    void consider(const LshItem& item, const tlsh::Digest& q, int cutoff, std::optional<Match>& best) const {
        const int d = tlsh::distance(q, item.digest);
        if (d > cutoff) return;
        if (!best || d < best->distance || (d == best->distance && hashes_[item.index] < hashes_[best->index])) {
            best = Match{item.index, d};
        }
    }

    std::optional<Match> best_lsh(const tlsh::Digest& q, int cutoff) const {
        std::optional<Match> best;
        if (full_scan_) {
            for (const auto& item : lsh_) consider(item, q, cutoff, best);
            return best;
        }
        for (int b = 0; b < 256; ++b) {
            if (buckets_[b].empty()) continue;
            const auto q1 = static_cast<std::uint8_t>(b >> 4);
            const auto q2 = static_cast<std::uint8_t>(b & 15);
            if (tlsh::header_distance(q.q1ratio, q.q2ratio, q1, q2) > cutoff) continue;
            for (std::size_t li : buckets_[b]) consider(lsh_[li], q, cutoff, best);
        }
        return best;
    }

    std::vector<FuncHash> hashes_;
    bool full_scan_ = true;
    std::unordered_map<std::string, std::size_t> exact_;
    std::vector<LshItem> lsh_;
    std::array<std::vector<std::size_t>, 256> buckets_;
};

}  // namespace oscar
