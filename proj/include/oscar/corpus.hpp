#pragma once

// Corpus input: a manifest of OSS projects, each in the version layout
//
//   <oss dir>/<version_id>/...   one source tree per version
//   <oss dir>/meta.tsv           "version_id<TAB>YYYY-MM-DD" per line
//                                ("ordinal<TAB>version_id<TAB>date" also read)
//
// Version directories absent from meta.tsv still count, dated 1970-01-01.

#include "oscar/error.hpp"
#include "oscar/extractor.hpp"
#include "oscar/signature.hpp"
#include "oscar/value_types.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace oscar {

struct CorpusEntry {
    std::string oss_id;
    std::filesystem::path dir;
};

using CorpusManifest = std::vector<CorpusEntry>;

namespace detail {

inline std::vector<std::string> split_tab_line(const std::string& line) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    for (;;) {
        const auto tab = line.find('\t', start);
        parts.push_back(line.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
        if (tab == std::string::npos) return parts;
        start = tab + 1;
    }
}

inline std::string strip_cr(std::string s) {
    if (!s.empty() && s.back() == '\r') s.pop_back();
    return s;
}

}  // namespace detail

/// Reads "oss_id<TAB>path" lines; relative paths resolve against the
/// manifest's directory. Blank lines and '#' comments are skipped.
inline CorpusManifest read_manifest(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw Error("cannot read manifest " + file.string());
    CorpusManifest m;
    std::set<std::string> seen;
    std::string line;
    for (std::size_t no = 1; std::getline(in, line); ++no) {
        line = detail::strip_cr(line);
        if (line.empty() || line[0] == '#') continue;
        const auto parts = detail::split_tab_line(line);
        const auto where = file.string() + ":" + std::to_string(no);
        if (parts.size() != 2 || parts[0].empty() || parts[1].empty()) throw FormatError(where + ": expected oss_id<TAB>path");
        validate_oss_id(parts[0]);
        if (!seen.insert(parts[0]).second) throw FormatError(where + ": duplicate oss id '" + parts[0] + "'");
        std::filesystem::path dir = parts[1];
        if (dir.is_relative()) dir = file.parent_path() / dir;
        if (!std::filesystem::is_directory(dir)) throw Error(where + ": no such directory " + dir.string());
        m.push_back({parts[0], dir});
    }
    return m;
}

/// A manifest file, a directory holding manifest.tsv, or a directory whose
/// subdirectories are the OSS projects (named by their ids).
inline CorpusManifest resolve_corpus(const std::filesystem::path& p) {
    namespace fs = std::filesystem;
    if (fs::is_regular_file(p)) return read_manifest(p);
    if (!fs::is_directory(p)) throw Error("corpus not found: " + p.string());
    if (fs::is_regular_file(p / "manifest.tsv")) return read_manifest(p / "manifest.tsv");
    CorpusManifest m;
    for (const auto& entry : fs::directory_iterator(p)) {
        if (entry.is_directory()) m.push_back({entry.path().filename().string(), entry.path()});
    }
    std::sort(m.begin(), m.end(), [](const auto& a, const auto& b) { return a.oss_id < b.oss_id; });
    return m;
}

/// Version id -> release date from meta.tsv (empty when the file is absent).
inline std::map<std::string, Date> read_version_dates(const std::filesystem::path& oss_dir) {
    std::map<std::string, Date> dates;
    const auto file = oss_dir / "meta.tsv";
    std::ifstream in(file, std::ios::binary);
    if (!in) return dates;
    std::string line;
    for (std::size_t no = 1; std::getline(in, line); ++no) {
        line = detail::strip_cr(line);
        if (line.empty() || line[0] == '#') continue;
        const auto parts = detail::split_tab_line(line);
        const auto where = file.string() + ":" + std::to_string(no);
        std::string id;
        std::string date;
        if (parts.size() == 2) {
            id = parts[0];
            date = parts[1];
        } else if (parts.size() == 3) {
            id = parts[1];
            date = parts[2];
        } else {
            throw FormatError(where + ": expected version_id<TAB>YYYY-MM-DD");
        }
        try {
            if (!dates.emplace(id, Date::parse(date)).second) throw FormatError("duplicate version '" + id + "'");
        } catch (const FormatError& e) {
            throw FormatError(where + ": " + e.what());
        }
    }
    return dates;
}

inline std::vector<VersionTree> list_versions(const std::filesystem::path& oss_dir) {
    const auto dates = read_version_dates(oss_dir);
    std::vector<VersionTree> trees;
    for (const auto& entry : std::filesystem::directory_iterator(oss_dir)) {
        if (!entry.is_directory()) continue;
        const auto id = entry.path().filename().string();
        if (id.starts_with(".")) continue;
        std::optional<Date> date;
        if (auto it = dates.find(id); it != dates.end()) date = it->second;
        trees.push_back({id, date, entry.path()});
    }
    std::sort(trees.begin(), trees.end(), [](const auto& a, const auto& b) { return a.version_id < b.version_id; });
    return trees;
}

struct PreprocessOutcome {
    ComponentDb db;
    std::map<std::string, std::string> errors;  // oss id -> message
    std::vector<std::string> warnings;
};

/// Builds every signature; a failing OSS is recorded and the rest continue.
/// Output is independent of jobs.
inline PreprocessOutcome preprocess_corpus(const CorpusManifest& manifest, const ExtractOptions& opts = {}, unsigned jobs = 1) {
    struct Slot {
        std::optional<OssSignature> sig;
        std::string error;
        std::vector<std::string> warnings;
    };
    std::vector<Slot> slots(manifest.size());
    auto work = [&](std::size_t i) {
        auto& slot = slots[i];
        try {
            ExtractOptions o = opts;
            o.jobs = 1;
            slot.sig = build_signature(manifest[i].oss_id, list_versions(manifest[i].dir), o, &slot.warnings);
        } catch (const std::exception& e) {
            slot.error = e.what();
        }
    };
    jobs = std::max(1u, jobs);
    if (jobs == 1) {
        for (std::size_t i = 0; i < slots.size(); ++i) work(i);
    } else {
        std::vector<std::future<void>> workers;
        for (unsigned w = 0; w < jobs; ++w) {
            workers.push_back(std::async(std::launch::async, [&, w] {
                for (std::size_t i = w; i < slots.size(); i += jobs) work(i);
            }));
        }
        for (auto& f : workers) f.get();
    }
    PreprocessOutcome out;
    for (std::size_t i = 0; i < slots.size(); ++i) {
        auto& slot = slots[i];
        out.warnings.insert(out.warnings.end(), slot.warnings.begin(), slot.warnings.end());
        if (slot.sig) out.db.signatures.emplace(manifest[i].oss_id, std::move(*slot.sig));
        else out.errors.emplace(manifest[i].oss_id, slot.error);
    }
    return out;
}

}  // namespace oscar
