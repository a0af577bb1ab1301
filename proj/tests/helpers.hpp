#pragma once

#include "oscar/oscar.hpp"

#include <atomic>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <unistd.h>

namespace testutil {

namespace fs = std::filesystem;

class TempDir {
public:
    TempDir() {
        static std::atomic<int> counter{0};
        path_ = fs::temp_directory_path() /
                ("oscar-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const fs::path& path() const { return path_; }
    fs::path operator/(const std::string& rel) const { return path_ / rel; }

private:
    fs::path path_;
};

inline void write_file(const fs::path& p, const std::string& content) {
    fs::create_directories(p.parent_path());
    std::ofstream(p, std::ios::binary | std::ios::trunc) << content;
}

inline std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Every regular file under root, relative path -> bytes.
inline std::map<std::string, std::string> snapshot(const fs::path& root) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(root)) {
        if (e.is_regular_file()) out[e.path().lexically_relative(root).generic_string()] = read_file(e.path());
    }
    return out;
}

inline oscar::FuncHash exact(const std::string& tag) { return oscar::hash_function(tag); }

/// Random code-like text; two independent draws are far apart under TLSH.
inline std::string random_text(std::mt19937_64& rng, std::size_t n = 400) {
    static constexpr std::string_view kAlphabet = "abcdefghijklmnopqrstuvwxyz0123456789_(){};=+-*/<>!&|^%,.[]";
    std::string s;
    for (std::size_t i = 0; i < n; ++i) s += kAlphabet[rng() % kAlphabet.size()];
    return s;
}

/// Overwrites k positions; small k keeps the text within a few TLSH units.
inline std::string tweak(std::string s, std::mt19937_64& rng, int k) {
    for (int i = 0; i < k; ++i) s[rng() % s.size()] = static_cast<char>('a' + rng() % 26);
    return s;
}

inline oscar::FuncHash lsh(const std::string& text) {
    auto h = oscar::hash_function(text);
    if (h.scheme != oscar::HashScheme::Lsh) throw std::logic_error("expected an LSH-hashable text");
    return h;
}

}  // namespace testutil
