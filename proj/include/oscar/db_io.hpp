#pragma once

// On-disk component DB. Layout under the DB root (UTF-8, LF endings):
//
//   db_meta.json        {"format":1,"hash":"...","exact":"...","cutoff":30}
//   <oss>/meta.tsv      ordinal \t version_id \t YYYY-MM-DD, ordinal ascending
//   <oss>/sig.jsonl     {"h":"<scheme>:<hex>","v":[{"o":0,"p":["path",...]},...]}
//                       one entry per line, sorted by "h"
//   <oss>/app.txt       after segmentation: "prime:true|false", then the
//                       application-code entry hashes, sorted

#include "oscar/error.hpp"
#include "oscar/signature.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace oscar {

inline constexpr int kDbFormatVersion = 1;

namespace detail {

inline void write_text_file(const std::filesystem::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + p.string());
    out << content;
    if (!out) throw Error("write failed for " + p.string());
}

inline std::vector<std::string> read_lines(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw FormatError("cannot read " + p.string());
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    return lines;
}

inline std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    for (;;) {
        const auto tab = line.find('\t', start);
        parts.push_back(line.substr(start, tab - start));
        if (tab == std::string::npos) return parts;
        start = tab + 1;
    }
}

}  // namespace detail

inline std::string render_meta_tsv(const OssSignature& sig) {
    std::string out;
    for (const auto& v : sig.versions) {
        out += std::to_string(v.ordinal) + '\t' + v.version_id + '\t' + v.release_date.str() + '\n';
    }
    return out;
}

inline std::string render_sig_jsonl(const OssSignature& sig) {
    std::string out;
    for (const auto& e : sig.entries) {
        nlohmann::ordered_json line;
        line["h"] = e.hash.str();
        auto& versions = line["v"] = nlohmann::ordered_json::array();
        for (const auto& [ordinal, paths] : e.occurrences) {
            nlohmann::ordered_json v;
            v["o"] = ordinal;
            v["p"] = paths;
            versions.push_back(std::move(v));
        }
        out += line.dump() + '\n';
    }
    return out;
}

inline std::string render_app_txt(const OssSignature& sig) {
    std::string out = std::string("prime:") + (sig.is_prime.value_or(false) ? "true" : "false") + '\n';
    for (std::size_t idx : sig.app_entries) out += sig.entries[idx].hash.str() + '\n';
    return out;
}

inline std::string render_db_meta(const DbMeta& meta) {
    nlohmann::ordered_json j;
    j["format"] = meta.format;
    j["hash"] = meta.hash_scheme;
    j["exact"] = meta.exact_scheme;
    j["cutoff"] = meta.cutoff;
    return j.dump() + '\n';
}

/// Writes (or removes, when unsegmented) one signature's app.txt.
inline void save_app_file(const OssSignature& sig, const std::filesystem::path& root) {
    const auto p = root / sig.oss_id / "app.txt";
    if (sig.segmented()) {
        detail::write_text_file(p, render_app_txt(sig));
    } else {
        std::error_code ec;
        std::filesystem::remove(p, ec);
    }
}

/// Writes the whole DB. Stale signature directories under root (ones with a
/// sig.jsonl whose id is not in db) are removed.
inline void save_db(const ComponentDb& db, const std::filesystem::path& root) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(root, ec);
    if (ec || !fs::is_directory(root)) throw Error("cannot create DB directory " + root.string());
    for (const auto& entry : fs::directory_iterator(root)) {
        if (entry.is_directory() && fs::exists(entry.path() / "sig.jsonl") &&
            !db.signatures.contains(entry.path().filename().string())) {
            fs::remove_all(entry.path());
        }
    }
    detail::write_text_file(root / "db_meta.json", render_db_meta(db.meta));
    for (const auto& [id, sig] : db.signatures) {
        validate_oss_id(id);
        fs::create_directories(root / id);
        detail::write_text_file(root / id / "meta.tsv", render_meta_tsv(sig));
        detail::write_text_file(root / id / "sig.jsonl", render_sig_jsonl(sig));
        save_app_file(sig, root);
    }
}

inline DbMeta load_db_meta(const std::filesystem::path& root) {
    const auto p = root / "db_meta.json";
    std::ifstream in(p, std::ios::binary);
    if (!in) throw FormatError("not a component DB (missing " + p.string() + ")");
    std::stringstream ss;
    ss << in.rdbuf();
    const auto j = nlohmann::json::parse(ss.str(), nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw FormatError(p.string() + ": malformed JSON");
    DbMeta meta;
    try {
        meta.format = j.at("format").get<int>();
        if (meta.format != kDbFormatVersion) {
            throw FormatError(p.string() + ": format version mismatch (DB has " + std::to_string(meta.format) +
                              ", this build reads " + std::to_string(kDbFormatVersion) + ")");
        }
        meta.hash_scheme = j.at("hash").get<std::string>();
        meta.exact_scheme = j.at("exact").get<std::string>();
        meta.cutoff = j.at("cutoff").get<int>();
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(p.string() + ": " + e.what());
    }
    if (meta.hash_scheme != kLshSchemeId || meta.exact_scheme != kExactSchemeId) {
        throw FormatError(p.string() + ": hash scheme mismatch (DB has '" + meta.hash_scheme + "' / '" +
                          meta.exact_scheme + "', this build uses '" + std::string(kLshSchemeId) + "' / '" +
                          std::string(kExactSchemeId) + "')");
    }
    if (meta.cutoff < 0) throw FormatError(p.string() + ": negative cutoff");
    return meta;
}

inline OssSignature load_signature(const std::filesystem::path& dir) {
    OssSignature sig;
    sig.oss_id = dir.filename().string();
    auto fail = [](const std::filesystem::path& file, std::size_t line, const std::string& what) {
        return FormatError(file.string() + ":" + std::to_string(line) + ": " + what);
    };

    const auto meta_path = dir / "meta.tsv";
    const auto meta_lines = detail::read_lines(meta_path);
    for (std::size_t i = 0; i < meta_lines.size(); ++i) {
        const auto parts = detail::split_tabs(meta_lines[i]);
        if (parts.size() != 3) throw fail(meta_path, i + 1, "expected ordinal<TAB>version<TAB>date");
        if (parts[0] != std::to_string(i)) throw fail(meta_path, i + 1, "ordinal out of sequence");
        try {
            sig.versions.push_back({parts[1], Date::parse(parts[2]), static_cast<std::uint32_t>(i)});
        } catch (const FormatError& e) {
            throw fail(meta_path, i + 1, e.what());
        }
    }
    if (sig.versions.empty()) throw fail(meta_path, 1, "no versions");

    const auto sig_path = dir / "sig.jsonl";
    const auto sig_lines = detail::read_lines(sig_path);
    sig.entries.reserve(sig_lines.size());
    for (std::size_t i = 0; i < sig_lines.size(); ++i) {
        const auto j = nlohmann::json::parse(sig_lines[i], nullptr, false);
        if (j.is_discarded() || !j.is_object()) throw fail(sig_path, i + 1, "malformed JSON");
        try {
            SignatureEntry e{FuncHash::parse(j.at("h").get<std::string>()), {}};
            for (const auto& v : j.at("v")) {
                const auto ord = v.at("o").get<std::uint32_t>();
                if (ord >= sig.versions.size()) throw fail(sig_path, i + 1, "unknown version ordinal");
                auto paths = v.at("p").get<std::vector<std::string>>();
                if (paths.empty()) throw fail(sig_path, i + 1, "empty path list");
                if (!e.occurrences.emplace(ord, std::move(paths)).second) throw fail(sig_path, i + 1, "duplicate ordinal");
            }
            if (e.occurrences.empty()) throw fail(sig_path, i + 1, "entry without versions");
            if (!sig.entries.empty() && !(sig.entries.back().hash < e.hash)) {
                throw fail(sig_path, i + 1, "entries not sorted by hash");
            }
            sig.entries.push_back(std::move(e));
        } catch (const nlohmann::json::exception& ex) {
            throw fail(sig_path, i + 1, ex.what());
        } catch (const FormatError& ex) {
            if (std::string(ex.what()).starts_with(sig_path.string())) throw;
            throw fail(sig_path, i + 1, ex.what());
        }
    }

    const auto app_path = dir / "app.txt";
    if (std::filesystem::exists(app_path)) {
        const auto lines = detail::read_lines(app_path);
        if (lines.empty() || (lines[0] != "prime:true" && lines[0] != "prime:false")) {
            throw fail(app_path, 1, "expected prime:true|false");
        }
        sig.is_prime = lines[0] == "prime:true";
        for (std::size_t i = 1; i < lines.size(); ++i) {
            FuncHash h;
            try {
                h = FuncHash::parse(lines[i]);
            } catch (const FormatError& e) {
                throw fail(app_path, i + 1, e.what());
            }
            const auto idx = sig.index_of(h);
            if (!idx) throw fail(app_path, i + 1, "hash not present in sig.jsonl");
            if (!sig.app_entries.empty() && sig.app_entries.back() >= *idx) throw fail(app_path, i + 1, "not sorted");
            sig.app_entries.push_back(*idx);
        }
    }
    return sig;
}

inline ComponentDb load_db(const std::filesystem::path& root) {
    ComponentDb db;
    db.meta = load_db_meta(root);
    std::vector<std::filesystem::path> dirs;
    for (const auto& entry : std::filesystem::directory_iterator(root)) {
        if (entry.is_directory() && std::filesystem::exists(entry.path() / "sig.jsonl")) dirs.push_back(entry.path());
    }
    std::sort(dirs.begin(), dirs.end());
    for (const auto& d : dirs) {
        auto sig = load_signature(d);
        db.signatures.emplace(sig.oss_id, std::move(sig));
    }
    return db;
}

}  // namespace oscar
