#pragma once

#include "oscar/detector.hpp"
#include "oscar/error.hpp"

#include <algorithm>
#include <cstdio>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace oscar {

enum class ReportFormat { Json, Tsv, Table };

inline ReportFormat parse_report_format(std::string_view s) {
    if (s == "json") return ReportFormat::Json;
    if (s == "tsv") return ReportFormat::Tsv;
    if (s == "table") return ReportFormat::Table;
    throw Error("unknown report format '" + std::string(s) + "' (json, tsv or table)");
}

inline std::string join_patterns(const std::vector<ReusePattern>& patterns, std::string_view sep) {
    std::string out;
    for (const auto p : patterns) {
        if (!out.empty()) out += sep;
        out += to_string(p);
    }
    return out;
}

inline std::string format_fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

inline nlohmann::ordered_json report_json(const std::string& target, const DetectorConfig& cfg,
                                          const std::vector<ComponentReport>& reports) {
    using json = nlohmann::ordered_json;
    json doc;
    doc["target"] = target;
    doc["config"] = {{"theta", cfg.theta.value()}, {"cutoff", cfg.cutoff}};
    auto& comps = doc["components"] = json::array();
    for (const auto& r : reports) {
        json c;
        c["oss"] = r.oss_id;
        c["phi"] = r.phi.value();
        c["phi_exact"] = r.phi.str();
        c["version"] = r.version_id;
        c["version_indistinct"] = r.version_indistinct;
        c["version_scores"] = json::object();
        for (const auto& [v, s] : r.version_scores) c["version_scores"][v] = s;
        auto& pats = c["patterns"] = json::array();
        for (const auto p : r.patterns) pats.push_back(std::string(to_string(p)));
        c["counts"] = {{"identical", r.counts.identical}, {"modified", r.counts.modified}, {"unused", r.counts.unused}};
        c["structure_changed"] = r.structure_changed;
        auto& ev = c["evidence"] = json::array();
        for (const auto& e : r.evidence) {
            ev.push_back({{"digest", e.digest.str()},
                          {"relation", std::string(to_string(e.relation))},
                          {"distance", e.distance},
                          {"target_paths", e.target_paths},
                          {"original_paths", e.original_paths}});
        }
        comps.push_back(std::move(c));
    }
    return doc;
}

/// Deterministic bytes for a given report list.
inline std::string render_report(const std::string& target, const DetectorConfig& cfg,
                                 const std::vector<ComponentReport>& reports, ReportFormat format) {
    switch (format) {
        case ReportFormat::Json: return report_json(target, cfg, reports).dump(2) + '\n';
        case ReportFormat::Tsv: {
            std::string out = "oss\tversion\tphi\tpatterns\tidentical\tmodified\tunused\tstructure_changed\n";
            for (const auto& r : reports) {
                out += r.oss_id + '\t' + r.version_id + '\t' + r.phi.str() + '\t' + join_patterns(r.patterns, ",") + '\t' +
                       std::to_string(r.counts.identical) + '\t' + std::to_string(r.counts.modified) + '\t' +
                       std::to_string(r.counts.unused) + '\t' + (r.structure_changed ? "true" : "false") + '\n';
            }
            return out;
        }
        case ReportFormat::Table: {
            std::vector<std::vector<std::string>> rows{{"OSS", "VERSION", "PHI", "PATTERNS", "IDENTICAL", "MODIFIED", "UNUSED"}};
            for (const auto& r : reports) {
                rows.push_back({r.oss_id, r.version_id + (r.version_indistinct ? "*" : ""), format_fixed(r.phi.value(), 3),
                                join_patterns(r.patterns, " & "), std::to_string(r.counts.identical),
                                std::to_string(r.counts.modified), std::to_string(r.counts.unused)});
            }
            std::vector<std::size_t> width(rows[0].size(), 0);
            for (const auto& row : rows)
                for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
            std::string out = "target: " + target + "  theta=" + cfg.theta.str() + "  cutoff=" + std::to_string(cfg.cutoff) + '\n';
            for (const auto& row : rows) {
                std::string line;
                for (std::size_t i = 0; i < row.size(); ++i) {
                    line += row[i];
                    if (i + 1 < row.size()) line += std::string(width[i] - row[i].size() + 2, ' ');
                }
                out += line + '\n';
            }
            if (reports.empty()) out += "(no components found)\n";
            if (std::any_of(reports.begin(), reports.end(), [](const auto& r) { return r.version_indistinct; })) {
                out += "* version indistinct: every matched function occurs in all versions\n";
            }
            return out;
        }
    }
    return {};
}

}  // namespace oscar
