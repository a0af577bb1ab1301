#pragma once

// Optional helper: turns a git repository's tags into the version layout
// read by corpus.hpp. Requires the git executable on PATH.

#include "oscar/error.hpp"
#include "oscar/extractor.hpp"
#include "oscar/value_types.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace oscar {

struct CollectedTag {
    std::string tag;
    std::string version_id;  // tag with '/' and other unsafe characters replaced
    Date date;
};

namespace detail {

inline std::string run_capture(const std::string& cmd, int* status) {
    std::string out;
    FILE* pipe = ::popen(cmd.c_str(), "r");
    if (!pipe) throw Error("cannot run: " + cmd);
    char buf[4096];
    std::size_t n;
    while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, n);
    *status = ::pclose(pipe);
    return out;
}

inline void run_checked(const std::string& cmd) {
    int status = 0;
    run_capture(cmd + " 2>&1", &status);
    if (status != 0) throw Error("command failed: " + cmd);
}

inline std::string safe_version_id(const std::string& tag) {
    std::string id = tag;
    for (char& c : id) {
        if (c == '/' || c == '\\' || c == '\t' || c == '\n' || c == '\r' || c == ':') c = '_';
    }
    if (id == "." || id == "..") id = "_" + id;
    return id;
}

}  // namespace detail

inline bool git_available() {
    int status = 0;
    detail::run_capture("git --version 2>/dev/null", &status);
    return status == 0;
}

/// Clones url, exports every tag's tree to out/<version_id>/ and writes
/// out/meta.tsv from the tag dates. Returns the collected tags.
inline std::vector<CollectedTag> collect_git(const std::string& url, const std::filesystem::path& out,
                                            std::size_t min_tag_count = 1) {
    namespace fs = std::filesystem;
    using detail::shell_quote;
    if (!git_available()) throw Error("git is not installed or not on PATH; collect needs it");
    fs::create_directories(out);
    const fs::path clone = out / ".oscar-clone";
    fs::remove_all(clone);
    detail::run_checked("git clone --quiet --bare " + shell_quote(url) + " " + shell_quote(clone.string()));

    int status = 0;
    const auto listing = detail::run_capture("git --git-dir=" + shell_quote(clone.string()) +
                                                 " for-each-ref --format='%(refname:short)%09%(creatordate:short)' refs/tags",
                                             &status);
    if (status != 0) throw Error("cannot list tags of " + url);

    std::vector<CollectedTag> tags;
    std::size_t start = 0;
    while (start < listing.size()) {
        auto nl = listing.find('\n', start);
        if (nl == std::string::npos) nl = listing.size();
        const auto line = listing.substr(start, nl - start);
        start = nl + 1;
        const auto tab = line.find('\t');
        if (tab == std::string::npos) continue;
        const auto tag = line.substr(0, tab);
        tags.push_back({tag, detail::safe_version_id(tag), Date::parse(line.substr(tab + 1))});
    }
    if (tags.size() < min_tag_count) {
        fs::remove_all(clone);
        throw Error(url + ": found " + std::to_string(tags.size()) + " tags, need at least " + std::to_string(min_tag_count));
    }

    std::string meta;
    for (const auto& t : tags) {
        const auto dir = out / t.version_id;
        fs::remove_all(dir);
        fs::create_directories(dir);
        detail::run_checked("git --git-dir=" + shell_quote(clone.string()) + " archive --format=tar " +
                            shell_quote("refs/tags/" + t.tag) + " | tar -x -C " + shell_quote(dir.string()));
        meta += t.version_id + '\t' + t.date.str() + '\n';
    }
    std::ofstream(out / "meta.tsv", std::ios::binary | std::ios::trunc) << meta;
    fs::remove_all(clone);
    return tags;
}

}  // namespace oscar
