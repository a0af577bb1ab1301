#pragma once

#include "oscar/corpus.hpp"
#include "oscar/db_io.hpp"
#include "oscar/detector.hpp"
#include "oscar/evalkit.hpp"
#include "oscar/report.hpp"
#include "oscar/segmenter.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace oscar {

struct TargetEntry {
    std::string target_id;
    std::filesystem::path root;
};

/// "target_id<TAB>path" lines; relative paths resolve against the file's directory.
inline std::vector<TargetEntry> read_targets(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw Error("cannot read targets manifest " + file.string());
    std::vector<TargetEntry> out;
    std::string line;
    for (std::size_t no = 1; std::getline(in, line); ++no) {
        line = detail::strip_cr(line);
        if (line.empty() || line[0] == '#') continue;
        const auto parts = detail::split_tab_line(line);
        if (parts.size() != 2 || parts[0].empty() || parts[1].empty()) {
            throw FormatError(file.string() + ":" + std::to_string(no) + ": expected target_id<TAB>path");
        }
        std::filesystem::path root = parts[1];
        if (root.is_relative()) root = file.parent_path() / root;
        out.push_back({parts[0], root});
    }
    return out;
}

/// Every S with at least one matched application-code entry, scored; the
/// reports for any theta are the prefix with phi >= theta.
struct ScoredComponent {
    std::string oss_id;
    Ratio phi;
};

inline std::vector<ScoredComponent> score_all(const TargetFingerprint& t, const ComponentDb& db, int cutoff,
                                              bool use_segmentation = true) {
    const auto index = t.index();
    std::vector<ScoredComponent> out;
    for (const auto& [id, sig] : db.signatures) {
        if (use_segmentation && !sig.segmented()) throw Error("run segmentation first (" + id + " is unsegmented)");
        const auto app = scoring_entries(sig, use_segmentation);
        if (app.empty()) continue;
        const auto s = score_component(index, sig, app, cutoff);
        if (s.matched > 0) out.push_back({id, s.phi});
    }
    return out;
}

struct SweepRow {
    Ratio theta;
    std::uint64_t detections = 0;
    std::optional<std::uint64_t> correct;  // with ground truth only
    std::optional<std::uint64_t> expected;
};

inline std::vector<SweepRow> theta_sweep(const std::vector<TargetFingerprint>& targets, const ComponentDb& db,
                                         const std::vector<Ratio>& grid, int cutoff,
                                         const evalkit::GroundTruth* truth = nullptr) {
    std::vector<std::vector<ScoredComponent>> scored;
    for (const auto& t : targets) scored.push_back(score_all(t, db, cutoff));
    std::vector<SweepRow> rows;
    for (const auto& theta : grid) {
        SweepRow row{theta, 0, std::nullopt, std::nullopt};
        if (truth) row.correct = 0, row.expected = 0;
        for (std::size_t i = 0; i < targets.size(); ++i) {
            const std::map<std::string, evalkit::TruthRecord>* expected = nullptr;
            if (truth) {
                auto it = truth->find(targets[i].target_id);
                if (it != truth->end()) expected = &it->second;
                if (expected) *row.expected += expected->size();
            }
            for (const auto& s : scored[i]) {
                if (s.phi < theta) continue;
                ++row.detections;
                if (expected && expected->contains(s.oss_id)) ++*row.correct;
            }
        }
        rows.push_back(row);
    }
    return rows;
}

inline std::vector<Ratio> parse_grid(const std::string& spec) {
    std::vector<Ratio> grid;
    std::size_t start = 0;
    while (start <= spec.size()) {
        auto comma = spec.find(',', start);
        if (comma == std::string::npos) comma = spec.size();
        auto item = spec.substr(start, comma - start);
        while (!item.empty() && item.front() == ' ') item.erase(item.begin());
        while (!item.empty() && item.back() == ' ') item.pop_back();
        if (item.empty()) throw FormatError("empty value in theta grid '" + spec + "'");
        grid.push_back(Ratio::parse(item));
        start = comma + 1;
    }
    return grid;
}

inline std::string render_sweep(const std::vector<SweepRow>& rows) {
    const bool with_truth = !rows.empty() && rows[0].correct.has_value();
    std::string out = with_truth ? "theta\tdetections\tcorrect\texpected\tprecision\trecall\n" : "theta\tdetections\n";
    for (const auto& r : rows) {
        out += format_fixed(r.theta.value(), 4) + '\t' + std::to_string(r.detections);
        if (with_truth) {
            const double precision = r.detections ? static_cast<double>(*r.correct) / static_cast<double>(r.detections) : 1.0;
            const double recall = *r.expected ? static_cast<double>(*r.correct) / static_cast<double>(*r.expected) : 1.0;
            out += '\t' + std::to_string(*r.correct) + '\t' + std::to_string(*r.expected) + '\t' + format_fixed(precision, 4) +
                   '\t' + format_fixed(recall, 4);
        }
        out += '\n';
    }
    return out;
}

}  // namespace oscar
