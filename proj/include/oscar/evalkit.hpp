#pragma once

// Synthetic corpus generator with planted ground truth, and the automated
// verification checks (path / header / metadata) used to grade detections.
//
// Projects are C-like code from a seeded grammar. Every function belongs to
// a lineage; a lineage's variants (one per modification) stay within the
// LSH cutoff of each other and beyond it from every other lineage, which is
// checked against the real fingerprint while generating. Nesting chains
// c0 < c1 < c2 < c3 embed each level under third_party/<id>/ with dates
// staged three years apart, so births increase along the chain.

#include "oscar/detector.hpp"
#include "oscar/error.hpp"
#include "oscar/extractor.hpp"
#include "oscar/fingerprint.hpp"
#include "oscar/normalize.hpp"
#include "oscar/tlsh.hpp"
#include "oscar/value_types.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace oscar::evalkit {

using FileMap = std::map<std::string, std::string>;

/// mt19937_64 output is fixed by the standard; the bounded draws below are
/// written out so that corpora are identical across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next() { return eng_(); }

    std::uint64_t below(std::uint64_t n) {
        if (n <= 1) return 0;
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do x = eng_();
        while (x >= limit);
        return x % n;
    }

    int range(int lo, int hi) { return lo + static_cast<int>(below(static_cast<std::uint64_t>(hi - lo) + 1)); }
    bool chance(std::uint64_t num, std::uint64_t den) { return below(den) < num; }
    double unit() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    template <class T>
    const T& pick(const std::vector<T>& v) { return v[below(v.size())]; }

    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
    }

    Rng fork() { return Rng(next()); }

private:
    std::mt19937_64 eng_;
};

inline std::string syllables(Rng& rng, int lo, int hi) {
    static constexpr std::string_view kOnset = "bcdfghjklmnprstvwz";
    static constexpr std::string_view kVowel = "aeiou";
    std::string s;
    const int n = rng.range(lo, hi);
    for (int i = 0; i < n; ++i) {
        s += kOnset[rng.below(kOnset.size())];
        s += kVowel[rng.below(kVowel.size())];
        if (rng.chance(1, 4)) s += kOnset[rng.below(kOnset.size())];
    }
    return s;
}

// ---------------------------------------------------------------------------
// Function grammar

struct FnShape {
    std::string ret_type;
    std::string name;
    std::vector<std::pair<std::string, std::string>> params;  // (type, name)
    std::vector<std::string> decls;
    std::vector<std::string> stmts;  // indented, may span lines
    std::string ret;
    bool short_form = false;

    std::string text() const {
        std::string out = "static " + ret_type + " " + name + "(";
        if (params.empty()) out += "void";
        for (std::size_t i = 0; i < params.size(); ++i) {
            if (i) out += ", ";
            const auto& [type, pname] = params[i];
            out += type + (type.back() == '*' ? "" : " ") + pname;
        }
        out += ")\n{\n";
        for (const auto& d : decls) out += "    " + d + "\n";
        for (const auto& s : stmts) out += s + "\n";
        out += "    return " + ret + ";\n}\n";
        return out;
    }

    std::string prototype() const {
        std::string out = ret_type + " " + name + "(";
        if (params.empty()) out += "void";
        for (std::size_t i = 0; i < params.size(); ++i) {
            if (i) out += ", ";
            out += params[i].first;
        }
        return out + ");";
    }
};

class Grammar {
public:
    Grammar(Rng& rng, std::vector<std::string> callees) : rng_(rng), callees_(std::move(callees)) {}

    std::string ident() { return syllables(rng_, 2, 3); }

    std::string number() {
        if (rng_.chance(1, 3)) {
            char buf[24];
            std::snprintf(buf, sizeof buf, "0x%llxu", static_cast<unsigned long long>(rng_.below(0xfffff) + 16));
            return buf;
        }
        return std::to_string(rng_.below(99999) + 2);
    }

    FnShape function(const std::string& name, std::size_t min_len, std::size_t max_len) {
        static const std::vector<std::string> kRet = {"int", "long", "unsigned", "size_t", "uint32_t"};
        static const std::vector<std::string> kScalar = {"int", "long", "unsigned", "size_t"};
        FnShape f;
        f.name = name;
        f.ret_type = rng_.pick(kRet);
        std::set<std::string> used{name};
        auto fresh = [&] {
            for (;;) {
                auto s = ident();
                if (used.insert(s).second) return s;
            }
        };
        buf_ = fresh();
        f.params.push_back({rng_.chance(1, 2) ? "const char *" : "const unsigned char *", buf_});
        len_ = fresh();
        f.params.push_back({"size_t", len_});
        vars_.clear();
        const int extra = rng_.range(0, 2);
        for (int i = 0; i < extra; ++i) {
            auto p = fresh();
            f.params.push_back({rng_.pick(kScalar), p});
            vars_.push_back(p);
        }
        idx_ = fresh();
        f.decls.push_back("size_t " + idx_ + ";");
        const int locals = rng_.range(2, 4);
        for (int i = 0; i < locals; ++i) {
            auto v = fresh();
            f.decls.push_back(rng_.pick(kScalar) + " " + v + " = " + number() + ";");
            vars_.push_back(v);
        }
        f.ret = vars_[vars_.size() - 1];
        const auto target = min_len + rng_.below(max_len - min_len + 1);
        while (f.text().size() < target) f.stmts.push_back(statement(1));
        return f;
    }

    FnShape short_function(const std::string& name) {
        FnShape f;
        f.name = name;
        f.ret_type = "int";
        f.ret = std::to_string(rng_.below(900) + 100);
        f.short_form = true;
        return f;
    }

    /// Locals of an existing shape, for statement insertion during mutation.
    void bind(const FnShape& f) {
        buf_ = f.params.at(0).second;
        len_ = f.params.at(1).second;
        vars_.clear();
        for (std::size_t i = 2; i < f.params.size(); ++i) vars_.push_back(f.params[i].second);
        idx_.clear();
        for (const auto& d : f.decls) {
            const auto eq = d.find(" = ");
            const auto sp = d.rfind(' ', eq == std::string::npos ? d.size() - 2 : eq - 1);
            const auto name = d.substr(sp + 1, (eq == std::string::npos ? d.size() - 1 : eq) - sp - 1);
            if (d.starts_with("size_t ") && eq == std::string::npos) idx_ = name;
            else vars_.push_back(name);
        }
    }

    std::string statement(int depth) {
        const std::string pad(static_cast<std::size_t>(depth) * 4, ' ');
        const auto kind = depth >= 3 ? rng_.below(3) : rng_.below(8);
        switch (kind) {
            case 0: return pad + var() + " = " + expr(2) + ";";
            case 1: return pad + var() + " " + rng_.pick(compound_ops()) + " " + expr(1) + ";";
            case 2: return pad + var() + " = " + rng_.pick(callees_) + "(" + expr(1) + ", " + atom() + ");";
            case 3: {
                std::string s = pad + "if (" + cond() + ") {\n" + statement(depth + 1) + "\n";
                if (rng_.chance(1, 2)) s += pad + "} else {\n" + statement(depth + 1) + "\n";
                return s + pad + "}";
            }
            case 4:
                return pad + "for (" + idx_ + " = 0; " + idx_ + " < " + len_ + "; " + idx_ + "++) {\n" +
                       statement(depth + 1) + "\n" + statement(depth + 1) + "\n" + pad + "}";
            case 5: {
                const auto v = var();
                return pad + "while (" + v + " > " + number() + ") {\n" + pad + "    " + v + " >>= " +
                       std::to_string(rng_.range(1, 7)) + ";\n" + statement(depth + 1) + "\n" + pad + "}";
            }
            case 6:
                return pad + "if (" + buf_ + "[" + idx_ + " % " + len_ + "] == '" +
                       static_cast<char>('a' + rng_.below(26)) + "') {\n" + statement(depth + 1) + "\n" + pad + "}";
            default: {
                const auto v = var();
                std::string s = pad + "switch (" + v + " & " + std::to_string(rng_.range(3, 15)) + ") {\n";
                const int cases = rng_.range(2, 3);
                for (int c = 0; c < cases; ++c) {
                    s += pad + "case " + std::to_string(c) + ":\n" + statement(depth + 1) + "\n" + pad + "    break;\n";
                }
                return s + pad + "default:\n" + statement(depth + 1) + "\n" + pad + "}";
            }
        }
    }

private:
    static const std::vector<std::string>& compound_ops() {
        static const std::vector<std::string> ops = {"+=", "-=", "^=", "|=", "*="};
        return ops;
    }

    std::string var() { return rng_.pick(vars_); }

    std::string atom() {
        switch (rng_.below(5)) {
            case 0:
            case 1: return var();
            case 2: return number();
            case 3: return idx_.empty() ? var() : idx_;
            default: return "(unsigned char)" + buf_ + "[" + (idx_.empty() ? "0" : idx_ + " % " + len_) + "]";
        }
    }

    std::string expr(int depth) {
        if (depth == 0 || rng_.chance(1, 3)) return atom();
        static const std::vector<std::string> ops = {"+", "-", "*", "^", "&", "|", "<<", ">>", "%"};
        const auto& op = rng_.pick(ops);
        const auto rhs = (op == "%" || op == "<<" || op == ">>") ? std::to_string(rng_.range(1, 13)) : expr(depth - 1);
        return "(" + expr(depth - 1) + " " + op + " " + rhs + ")";
    }

    std::string cond() {
        static const std::vector<std::string> rel = {"<", ">", "==", "!=", "<=", ">="};
        return expr(1) + " " + rng_.pick(rel) + " " + number();
    }

    Rng& rng_;
    std::vector<std::string> callees_;
    std::string buf_, len_, idx_;
    std::vector<std::string> vars_;
};

inline std::string replace_word(const std::string& text, const std::string& from, const std::string& to) {
    auto is_id = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; };
    std::string out;
    std::size_t i = 0;
    while (i < text.size()) {
        if (text.compare(i, from.size(), from) == 0 && (i == 0 || !is_id(text[i - 1])) &&
            (i + from.size() >= text.size() || !is_id(text[i + from.size()]))) {
            out += to;
            i += from.size();
        } else {
            out += text[i++];
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Fingerprint registry: enforces the distance structure between lineages.

struct Fingerprinted {
    FuncHash hash;
    std::optional<tlsh::Digest> digest;
};

inline Fingerprinted fingerprint_text(const std::string& text) {
    Fingerprinted f{hash_function(normalize(text)), std::nullopt};
    if (f.hash.scheme == HashScheme::Lsh) f.digest = tlsh::from_hex(f.hash.digest);
    return f;
}

class Registry {
public:
    explicit Registry(int cutoff) : cutoff_(cutoff) {}

    /// No body of another lineage within cutoff (nor sharing an exact hash).
    bool distinct(const Fingerprinted& f, std::uint64_t lineage) const {
        if (!f.digest) {
            auto it = exact_.find(f.hash.digest);
            return it == exact_.end() || it->second == lineage;
        }
        for (int b = 0; b < 256; ++b) {
            if (buckets_[b].empty()) continue;
            if (tlsh::header_distance(f.digest->q1ratio, f.digest->q2ratio, static_cast<std::uint8_t>(b >> 4),
                                      static_cast<std::uint8_t>(b & 15)) > cutoff_) {
                continue;
            }
            for (auto i : buckets_[b]) {
                if (items_[i].lineage != lineage && tlsh::distance(*f.digest, items_[i].digest) <= cutoff_) return false;
            }
        }
        return true;
    }

    void add(const Fingerprinted& f, std::uint64_t lineage) {
        if (!f.digest) {
            exact_.emplace(f.hash.digest, lineage);
            return;
        }
        items_.push_back({lineage, *f.digest});
        buckets_[f.digest->q_byte()].push_back(items_.size() - 1);
    }

    int cutoff() const { return cutoff_; }

private:
    struct Item {
        std::uint64_t lineage;
        tlsh::Digest digest;
    };
    int cutoff_;
    std::vector<Item> items_;
    std::array<std::vector<std::size_t>, 256> buckets_;
    std::map<std::string, std::uint64_t> exact_;
};

// ---------------------------------------------------------------------------
// Corpus model

struct GenLineage {
    std::uint64_t gid = 0;
    std::string file;
    std::vector<FnShape> variants;
    std::vector<Fingerprinted> prints;
    bool generic = false;
};

struct GenVersion {
    std::string id;
    Date date;
    std::vector<std::pair<std::size_t, std::size_t>> live;  // (lineage, variant), lineage ascending
    std::optional<std::size_t> embedded_version;             // version of the embedded project
};

struct GenProject {
    std::string id;
    int level = 0;
    std::vector<std::string> files;  // own source files, render order
    std::vector<GenLineage> lineages;
    std::vector<GenVersion> versions;
    std::optional<std::size_t> embeds;  // project index of the embedded component
    std::string license;
    std::optional<std::size_t> chain;   // chain number, when part of one
    int chain_pos = -1;
};

enum class PlantMode { Exact, Partial, StructChanged, CodeChanged, Nested };

inline std::string_view to_string(PlantMode m) {
    switch (m) {
        case PlantMode::Exact: return "EXACT";
        case PlantMode::Partial: return "PARTIAL";
        case PlantMode::StructChanged: return "STRUCT_CHANGED";
        case PlantMode::CodeChanged: return "CODE_CHANGED";
        case PlantMode::Nested: return "NESTED";
    }
    return "?";
}

struct PlantSpec {
    std::string oss_id;
    PlantMode mode = PlantMode::Exact;
    std::size_t version = 0;  // source version index (CODE_CHANGED mixes version and version+1)
    double keep_ratio = 1.0;     // PARTIAL
    bool amalgamate = false;     // STRUCT_CHANGED: single file instead of relocated files
    double mutation_rate = 0.0;  // CODE_CHANGED
    int depth = 0;               // NESTED

    void validate() const {
        if (mode == PlantMode::Partial && !(keep_ratio > 0.0 && keep_ratio <= 1.0)) throw Error("keep_ratio must be in (0, 1]");
        if (mode == PlantMode::CodeChanged && !(mutation_rate > 0.0 && mutation_rate <= 1.0)) {
            throw Error("mutation rate must be in (0, 1]");
        }
        if (mode == PlantMode::Nested && depth < 1) throw Error("nesting depth must be >= 1");
    }
};

struct TruthComponent {
    std::string oss_id;
    std::vector<std::string> versions;  // any of these counts as correct
    std::vector<ReusePattern> patterns;  // required
    bool partial_allowed = false;        // P may co-occur (CODE_CHANGED)
    std::string via;                     // planted component that implies this one, if nested
};

struct GenTarget {
    std::string id;
    FileMap files;
    std::vector<PlantSpec> plants;
    std::vector<TruthComponent> truth;

    std::set<std::string> truth_ids() const {
        std::set<std::string> s;
        for (const auto& t : truth) s.insert(t.oss_id);
        return s;
    }
    const TruthComponent* find(const std::string& id) const {
        for (const auto& t : truth)
            if (t.oss_id == id) return &t;
        return nullptr;
    }
};

struct GenParams {
    std::uint64_t seed = 1;
    int standalone = 36;
    int chains = 4;
    int chain_length = 4;
    int min_versions = 3;
    int max_versions = 5;
    int min_functions = 40;
    int max_functions = 60;
    std::size_t min_body = 420;
    std::size_t max_body = 900;
    int generic_pool = 30;
    int max_generics = 3;
    int short_functions = 1;
    bool modifications_only = false;
    int targets = 24;
    int cutoff = kDefaultCutoff;
};

class Generator {
public:
    explicit Generator(GenParams p) : p_(p), rng_(p.seed), registry_(p.cutoff) {
        if (p_.min_versions < 2 || p_.max_versions < p_.min_versions) throw Error("need at least 2 versions per project");
        if (p_.min_functions < 4 || p_.max_functions < p_.min_functions) throw Error("bad function count range");
        if (p_.chains > 0 && p_.chain_length < 2) throw Error("chains need at least 2 levels");
    }

    const GenParams& params() const { return p_; }
    const std::vector<GenProject>& projects() const { return projects_; }
    const std::vector<GenTarget>& targets() const { return targets_; }
    Rng& rng() { return rng_; }

    std::size_t project_index(const std::string& id) const {
        for (std::size_t i = 0; i < projects_.size(); ++i)
            if (projects_[i].id == id) return i;
        throw Error("unknown synthetic project " + id);
    }
    const GenProject& project(const std::string& id) const { return projects_[project_index(id)]; }

    /// Generates every project, then the targets.
    void generate() {
        make_generic_pool();
        for (int c = 0; c < p_.chains; ++c) {
            std::optional<std::size_t> below;
            for (int lvl = 0; lvl < p_.chain_length; ++lvl) {
                below = make_project(lvl, below, static_cast<std::size_t>(c), lvl);
            }
        }
        for (int s = 0; s < p_.standalone; ++s) make_project(0, std::nullopt, std::nullopt, -1);
        std::sort(projects_.begin(), projects_.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
        fix_indices();
        make_targets();
    }

    /// Files of one version, including embedded components under third_party/.
    FileMap render_version(std::size_t pi, std::size_t vi) const {
        const auto& proj = projects_.at(pi);
        const auto& ver = proj.versions.at(vi);
        FileMap files;
        std::map<std::string, std::vector<const FnShape*>> by_file;
        for (const auto& [li, vi2] : ver.live) by_file[proj.lineages[li].file].push_back(&proj.lineages[li].variants[vi2]);
        std::string header = "#ifndef " + upper(proj.id) + "_H\n#define " + upper(proj.id) + "_H\n\n#include <stddef.h>\n#include <stdint.h>\n\n";
        for (const auto& file : proj.files) {
            auto it = by_file.find(file);
            if (it == by_file.end()) continue;
            std::string body = "/* " + file + " */\n#include <stddef.h>\n#include <stdint.h>\n#include \"" + proj.id + ".h\"\n";
            for (const auto* fn : it->second) {
                body += "\n" + fn->text();
                header += fn->prototype() + "\n";
            }
            files[file] = body;
        }
        files["include/" + proj.id + ".h"] = header + "\n#endif\n";
        files["README"] = proj.id + " " + ver.id + "\n\nReleased " + ver.date.str() + ".\n";
        files["LICENSE"] = proj.license;
        if (proj.embeds) {
            const auto sub = render_version(*proj.embeds, *ver.embedded_version);
            const auto prefix = "third_party/" + projects_[*proj.embeds].id + "/";
            for (const auto& [path, content] : sub) files[prefix + path] = content;
        }
        return files;
    }

    /// Realizes one plant; appends the truth it implies.
    FileMap plant(const PlantSpec& spec, std::vector<TruthComponent>& truth) {
        spec.validate();
        const auto pi = project_index(spec.oss_id);
        const auto& proj = projects_[pi];
        if (spec.version >= proj.versions.size()) throw Error("no such version");
        FileMap out;
        const auto& ver = proj.versions[spec.version];
        switch (spec.mode) {
            case PlantMode::Exact:
            case PlantMode::Nested: {
                if (spec.mode == PlantMode::Nested && proj.chain_pos != spec.depth) throw Error("nesting depth mismatch");
                const auto prefix = "third_party/" + proj.id + "-" + ver.id + "/";
                for (const auto& [path, content] : render_version(pi, spec.version)) out[prefix + path] = content;
                add_nested_truth(pi, spec.version, "", truth);
                break;
            }
            case PlantMode::Partial: {
                std::vector<std::size_t> order(ver.live.size());
                for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
                rng_.shuffle(order);
                const auto keep = std::max<std::size_t>(1, keep_count(spec.keep_ratio, order.size()));
                order.resize(keep);
                std::sort(order.begin(), order.end());
                std::map<std::string, std::string> by_file;
                for (auto i : order) {
                    const auto& [li, vi] = ver.live[i];
                    by_file[proj.lineages[li].file] += "\n" + proj.lineages[li].variants[vi].text();
                }
                for (const auto& [file, body] : by_file) out["third_party/" + proj.id + "/" + file] = "#include <stddef.h>\n" + body;
                out["third_party/" + proj.id + "/LICENSE"] = proj.license;
                truth.push_back({proj.id, {ver.id}, {ReusePattern::Partial}, false, ""});
                break;
            }
            case PlantMode::StructChanged: {
                const auto src = render_version(pi, spec.version);
                if (spec.amalgamate) {
                    std::string all = "#include <stddef.h>\n#include <stdint.h>\n";
                    for (const auto& [li, vi] : ver.live) all += "\n" + proj.lineages[li].variants[vi].text();
                    out["src/core/u-" + syllables(rng_, 1, 2) + ".c"] = all;
                } else {
                    const auto root = "ext/" + syllables(rng_, 1, 2) + "/";
                    for (const auto& file : proj.files) {
                        auto it = src.find(file);
                        if (it == src.end()) continue;
                        const auto base = std::filesystem::path(file).filename().string();
                        out[root + syllables(rng_, 1, 1) + "_" + base] = it->second;
                    }
                }
                truth.push_back({proj.id, {ver.id}, {ReusePattern::StructureChanged}, false, ""});
                break;
            }
            case PlantMode::CodeChanged: {
                if (spec.version + 1 >= proj.versions.size()) throw Error("CODE_CHANGED needs a following version");
                const auto& next = proj.versions[spec.version + 1];
                std::map<std::size_t, std::vector<std::size_t>> choices;  // lineage -> candidate variants
                for (const auto& [li, vi] : ver.live) choices[li].push_back(vi);
                for (const auto& [li, vi] : next.live) {
                    auto& c = choices[li];
                    if (std::find(c.begin(), c.end(), vi) == c.end()) c.push_back(vi);
                }
                std::map<std::string, std::string> by_file;
                for (const auto& [li, cand] : choices) {
                    const bool in_both = std::any_of(ver.live.begin(), ver.live.end(), [&](auto& l) { return l.first == li; }) &&
                                         std::any_of(next.live.begin(), next.live.end(), [&](auto& l) { return l.first == li; });
                    if (!in_both && rng_.chance(1, 2)) continue;  // added or deleted between the two versions
                    const auto& lin = proj.lineages[li];
                    const auto vi = cand[rng_.below(cand.size())];
                    std::string text = lin.variants[vi].text();
                    if (!lin.variants[vi].short_form && rng_.unit() < spec.mutation_rate) {
                        if (auto m = mutate_for_target(lin, vi)) text = m->text();
                    }
                    by_file[lin.file] += "\n" + text;
                }
                for (const auto& [file, body] : by_file) out["third_party/" + proj.id + "/" + file] = "#include <stddef.h>\n" + body;
                out["third_party/" + proj.id + "/LICENSE"] = proj.license;
                truth.push_back({proj.id, {ver.id, next.id}, {ReusePattern::CodeChanged}, true, ""});
                break;
            }
        }
        return out;
    }

    /// Target-owned code: fresh lineages plus a few generic functions.
    FileMap own_code(int functions) {
        FileMap out;
        Grammar g(rng_, callee_pool());
        const int nfiles = rng_.range(2, 4);
        std::vector<std::string> names;
        for (int i = 0; i < nfiles; ++i) names.push_back("src/app/" + safe_word() + ".c");
        std::map<std::string, std::string> bodies;
        for (int i = 0; i < functions; ++i) {
            GenLineage lin = new_lineage(g, "app_" + syllables(rng_, 2, 3), "");
            bodies[names[rng_.below(names.size())]] += "\n" + lin.variants[0].text();
        }
        const int generics = rng_.range(0, p_.max_generics);
        for (int i = 0; i < generics; ++i) bodies["src/app/shared.c"] += "\n" + generic_pool_[rng_.below(generic_pool_.size())].variants[0].text();
        for (auto& [file, body] : bodies) out[file] = "#include <stddef.h>\n#include <stdint.h>\n" + body;
        return out;
    }

    GenTarget make_target(const std::string& id, const std::vector<PlantSpec>& plants, int own_functions) {
        GenTarget t{id, own_code(own_functions), plants, {}};
        for (const auto& spec : plants) {
            for (auto& [path, content] : plant(spec, t.truth)) t.files[path] = content;
        }
        return t;
    }

    /// Writes corpus/, targets/, targets.tsv and ground_truth.json under out.
    void write(const std::filesystem::path& out) const {
        namespace fs = std::filesystem;
        fs::create_directories(out);
        std::string manifest;
        for (std::size_t pi = 0; pi < projects_.size(); ++pi) {
            const auto& proj = projects_[pi];
            const auto dir = out / "corpus" / proj.id;
            std::string meta;
            for (std::size_t vi = 0; vi < proj.versions.size(); ++vi) {
                write_tree(dir / proj.versions[vi].id, render_version(pi, vi));
                meta += proj.versions[vi].id + '\t' + proj.versions[vi].date.str() + '\n';
            }
            write_file(dir / "meta.tsv", meta);
            manifest += proj.id + '\t' + proj.id + '\n';
        }
        write_file(out / "corpus" / "manifest.tsv", manifest);
        std::string targets;
        for (const auto& t : targets_) {
            write_tree(out / "targets" / t.id, t.files);
            targets += t.id + "\ttargets/" + t.id + '\n';
        }
        write_file(out / "targets.tsv", targets);
        write_file(out / "ground_truth.json", truth_json().dump(2) + '\n');
    }

    nlohmann::ordered_json truth_json() const {
        using json = nlohmann::ordered_json;
        json doc;
        doc["seed"] = p_.seed;
        doc["targets"] = json::array();
        for (const auto& t : targets_) {
            json jt;
            jt["target"] = t.id;
            jt["plants"] = json::array();
            for (const auto& p : t.plants) {
                json jp{{"oss", p.oss_id}, {"mode", std::string(to_string(p.mode))},
                        {"version", project(p.oss_id).versions[p.version].id}};
                if (p.mode == PlantMode::Partial) jp["keep_ratio"] = p.keep_ratio;
                if (p.mode == PlantMode::StructChanged) jp["amalgamate"] = p.amalgamate;
                if (p.mode == PlantMode::CodeChanged) jp["mutation_rate"] = p.mutation_rate;
                if (p.mode == PlantMode::Nested) jp["depth"] = p.depth;
                jt["plants"].push_back(jp);
            }
            jt["components"] = json::array();
            for (const auto& c : t.truth) {
                json jc{{"oss", c.oss_id}, {"versions", c.versions}};
                jc["patterns"] = json::array();
                for (auto pat : c.patterns) jc["patterns"].push_back(std::string(oscar::to_string(pat)));
                jc["partial_allowed"] = c.partial_allowed;
                if (!c.via.empty()) jc["via"] = c.via;
                jt["components"].push_back(jc);
            }
            doc["targets"].push_back(jt);
        }
        return doc;
    }

private:
    static std::string upper(std::string s) {
        for (auto& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        return s;
    }

    static std::size_t keep_count(double ratio, std::size_t n) {
        return static_cast<std::size_t>(ratio * static_cast<double>(n) + 0.5);
    }

    static void write_file(const std::filesystem::path& p, const std::string& content) {
        std::filesystem::create_directories(p.parent_path());
        std::ofstream out(p, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + p.string());
        out << content;
    }

    static void write_tree(const std::filesystem::path& root, const FileMap& files) {
        for (const auto& [path, content] : files) write_file(root / path, content);
    }

    std::vector<std::string> callee_pool() {
        std::vector<std::string> v;
        for (int i = 0; i < 6; ++i) v.push_back(syllables(rng_, 1, 2) + "_" + syllables(rng_, 1, 2));
        return v;
    }

    std::string safe_word() {
        for (;;) {
            auto w = syllables(rng_, 2, 3);
            if (std::none_of(ids_.begin(), ids_.end(), [&](const std::string& id) {
                    return w.find(id) != std::string::npos || id.find(w) != std::string::npos;
                })) {
                return w;
            }
        }
    }

    std::string new_project_id() {
        static const std::vector<std::string> reserved = {"third_party", "src", "include", "util", "common", "core",
                                                          "app", "lib", "readme", "license", "targets", "shared", "ext"};
        for (;;) {
            auto id = syllables(rng_, 3, 3);
            if (id.size() < 6) continue;
            bool clash = std::any_of(ids_.begin(), ids_.end(), [&](const std::string& o) {
                return o.find(id) != std::string::npos || id.find(o) != std::string::npos;
            });
            clash = clash || std::any_of(reserved.begin(), reserved.end(), [&](const std::string& r) {
                        return r.find(id) != std::string::npos || id.find(r) != std::string::npos;
                    });
            if (!clash) {
                ids_.push_back(id);
                return id;
            }
        }
    }

    /// A fresh function whose fingerprint is beyond cutoff of everything so far.
    GenLineage new_lineage(Grammar& g, const std::string& name, const std::string& file, bool short_form = false) {
        GenLineage lin;
        lin.gid = next_gid_++;
        lin.file = file;
        for (;;) {
            FnShape f = short_form ? g.short_function(name + "_" + syllables(rng_, 1, 2))
                                   : g.function(name, p_.min_body, p_.max_body);
            auto fp = fingerprint_text(f.text());
            if (!registry_.distinct(fp, lin.gid)) continue;
            registry_.add(fp, lin.gid);
            lin.variants.push_back(std::move(f));
            lin.prints.push_back(std::move(fp));
            return lin;
        }
    }

    /// One edit: rename a local, insert a statement, or change a constant.
    FnShape mutate_once(const FnShape& src) {
        FnShape f = src;
        Grammar g(rng_, {"mix_" + syllables(rng_, 1, 2)});
        g.bind(f);
        switch (rng_.below(3)) {
            case 0: {
                std::vector<std::string> locals;
                for (const auto& d : f.decls) {
                    const auto eq = d.find(" = ");
                    if (eq == std::string::npos) continue;
                    locals.push_back(d.substr(d.rfind(' ', eq - 1) + 1, eq - d.rfind(' ', eq - 1) - 1));
                }
                if (locals.empty()) break;
                const auto from = rng_.pick(locals);
                const auto to = syllables(rng_, 2, 3) + "_" + std::to_string(rng_.below(10));
                for (auto& d : f.decls) d = replace_word(d, from, to);
                for (auto& s : f.stmts) s = replace_word(s, from, to);
                f.ret = replace_word(f.ret, from, to);
                return f;
            }
            case 1: {
                const auto pos = rng_.below(f.stmts.size() + 1);
                f.stmts.insert(f.stmts.begin() + static_cast<std::ptrdiff_t>(pos), g.statement(1));
                return f;
            }
            default: break;
        }
        for (auto& d : f.decls) {
            const auto eq = d.find(" = ");
            if (eq != std::string::npos && rng_.chance(1, 2)) {
                d = d.substr(0, eq + 3) + g.number() + ";";
                return f;
            }
        }
        f.decls.back() = f.decls.back().substr(0, f.decls.back().find(" = ") + 3) + g.number() + ";";
        return f;
    }

    /// A variant within cutoff of every earlier variant of the lineage.
    std::optional<FnShape> evolve(GenLineage& lin) {
        for (int attempt = 0; attempt < 60; ++attempt) {
            FnShape f = mutate_once(lin.variants.back());
            if (attempt >= 20 && rng_.chance(1, 2)) f = mutate_once(lin.variants.back());
            auto fp = fingerprint_text(f.text());
            if (!fp.digest) continue;
            bool ok = true;
            for (const auto& prev : lin.prints) {
                const int d = prev.digest ? tlsh::distance(*fp.digest, *prev.digest) : 0;
                if (d < 1 || d > p_.cutoff) {
                    ok = false;
                    break;
                }
            }
            if (!ok || !registry_.distinct(fp, lin.gid)) continue;
            registry_.add(fp, lin.gid);
            lin.variants.push_back(std::move(f));
            lin.prints.push_back(std::move(fp));
            return lin.variants.back();
        }
        return std::nullopt;
    }

    /// A target-side modification of one variant, within cutoff of it.
    std::optional<FnShape> mutate_for_target(const GenLineage& lin, std::size_t vi) {
        for (int attempt = 0; attempt < 40; ++attempt) {
            FnShape f = mutate_once(lin.variants[vi]);
            auto fp = fingerprint_text(f.text());
            if (!fp.digest) continue;
            const int d = tlsh::distance(*fp.digest, *lin.prints[vi].digest);
            if (d < 1 || d > p_.cutoff || !registry_.distinct(fp, lin.gid)) continue;
            registry_.add(fp, lin.gid);
            return f;
        }
        return std::nullopt;
    }

    void make_generic_pool() {
        Grammar g(rng_, {"mem_copy", "str_len", "crc_update"});
        for (int i = 0; i < p_.generic_pool; ++i) {
            auto lin = new_lineage(g, "util_" + syllables(rng_, 2, 3), "src/util/common.c");
            lin.generic = true;
            generic_pool_.push_back(std::move(lin));
        }
    }

    std::string next_version_id(int& major, int& minor, int& patch) {
        const auto r = rng_.below(20);
        if (r < 10) ++patch;
        else if (r < 17) { ++minor; patch = 0; }
        else { ++major; minor = 0; patch = 0; }
        return std::to_string(major) + "." + std::to_string(minor) + "." + std::to_string(patch);
    }

    std::size_t make_project(int level, std::optional<std::size_t> embeds, std::optional<std::size_t> chain, int chain_pos) {
        GenProject proj;
        proj.id = new_project_id();
        proj.level = level;
        proj.embeds = embeds;
        proj.chain = chain;
        proj.chain_pos = chain_pos;
        proj.license = "Copyright (c) " + std::to_string(2000 + level * 3) + " The " + proj.id +
                       " authors.\nPermission is granted to use, copy and modify this software.\n";
        Grammar g(rng_, callee_pool());
        const auto pfx = proj.id.substr(0, 3) + "_";
        const int nmods = rng_.range(2, 4);
        for (int m = 0; m < nmods; ++m) {
            const auto mod = safe_word();
            const int nf = rng_.range(1, 3);
            for (int f = 0; f < nf; ++f) proj.files.push_back("src/" + mod + "/" + safe_word() + ".c");
        }
        const int nfun = rng_.range(p_.min_functions, p_.max_functions);
        for (int i = 0; i < nfun; ++i) {
            proj.lineages.push_back(new_lineage(g, pfx + syllables(rng_, 2, 3), proj.files[rng_.below(proj.files.size())]));
        }
        for (int i = 0; i < p_.short_functions; ++i) {
            proj.lineages.push_back(new_lineage(g, pfx + "get", proj.files[rng_.below(proj.files.size())], true));
        }
        const int ngen = rng_.range(0, p_.max_generics);
        std::set<std::size_t> picked;
        for (int i = 0; i < ngen; ++i) picked.insert(rng_.below(generic_pool_.size()));
        if (!picked.empty()) proj.files.push_back("src/util/common.c");
        for (auto gi : picked) proj.lineages.push_back(generic_pool_[gi]);

        const int nver = rng_.range(p_.min_versions, p_.max_versions);
        int major = 1, minor = 0, patch = 0;
        Date date = Date::parse("2000-01-01").plus_days(level * 1095 + rng_.range(0, 150));
        std::map<std::size_t, std::size_t> live;  // lineage -> current variant
        for (std::size_t li = 0; li < proj.lineages.size(); ++li) live[li] = 0;
        for (int v = 0; v < nver; ++v) {
            GenVersion ver;
            if (v == 0) {
                ver.id = "1.0.0";
            } else {
                ver.id = next_version_id(major, minor, patch);
                date = date.plus_days(rng_.range(60, 200));
                evolve_step(proj, live, g, pfx);
            }
            ver.date = date;
            for (const auto& [li, vi] : live) ver.live.emplace_back(li, vi);
            if (embeds) {
                const auto nsub = static_cast<int>(projects_[*embeds].versions.size());
                ver.embedded_version = static_cast<std::size_t>(std::clamp(nsub - nver + v, 0, nsub - 1));
            }
            proj.versions.push_back(std::move(ver));
        }
        projects_.push_back(std::move(proj));
        return projects_.size() - 1;
    }

    void evolve_step(GenProject& proj, std::map<std::size_t, std::size_t>& live, Grammar& g, const std::string& pfx) {
        std::vector<std::size_t> mutable_lineages;
        for (const auto& [li, vi] : live) {
            const auto& lin = proj.lineages[li];
            if (!lin.generic && !lin.variants[0].short_form) mutable_lineages.push_back(li);
        }
        rng_.shuffle(mutable_lineages);
        const int nmod = rng_.range(1, 3);
        int done = 0;
        std::set<std::size_t> touched;
        for (auto li : mutable_lineages) {
            if (done == nmod) break;
            if (evolve(proj.lineages[li])) {
                live[li] = proj.lineages[li].variants.size() - 1;
                touched.insert(li);
                ++done;
            }
        }
        if (done == 0) throw Error("generator could not evolve " + proj.id);
        if (p_.modifications_only) return;
        if (rng_.chance(1, 3)) {
            for (auto li : mutable_lineages) {
                if (!touched.contains(li)) {
                    live.erase(li);
                    break;
                }
            }
        }
        const int adds = rng_.range(0, 2);
        for (int i = 0; i < adds; ++i) {
            proj.lineages.push_back(new_lineage(g, pfx + syllables(rng_, 2, 3), proj.files[rng_.below(proj.files.size())]));
            live[proj.lineages.size() - 1] = 0;
        }
    }

    void fix_indices() {
        // projects were sorted by id; remap embeds
        std::map<std::pair<std::size_t, int>, std::size_t> chain_index;
        for (std::size_t i = 0; i < projects_.size(); ++i) {
            if (projects_[i].chain) chain_index[{*projects_[i].chain, projects_[i].chain_pos}] = i;
        }
        for (auto& proj : projects_) {
            if (proj.chain && proj.chain_pos > 0) proj.embeds = chain_index.at({*proj.chain, proj.chain_pos - 1});
            else proj.embeds.reset();
        }
    }

    void add_nested_truth(std::size_t pi, std::size_t vi, const std::string& via, std::vector<TruthComponent>& truth) const {
        const auto& proj = projects_[pi];
        truth.push_back({proj.id, {proj.versions[vi].id}, {ReusePattern::Exact}, false, via});
        if (proj.embeds) add_nested_truth(*proj.embeds, *proj.versions[vi].embedded_version, via.empty() ? proj.id : via, truth);
    }

    std::vector<std::size_t> standalone_indices() const {
        std::vector<std::size_t> v;
        for (std::size_t i = 0; i < projects_.size(); ++i)
            if (!projects_[i].chain) v.push_back(i);
        return v;
    }

    PlantSpec random_plant(PlantMode mode, std::size_t pi) {
        const auto& proj = projects_[pi];
        PlantSpec s;
        s.oss_id = proj.id;
        s.mode = mode;
        const auto nv = proj.versions.size();
        switch (mode) {
            case PlantMode::Exact: s.version = rng_.below(nv); break;
            case PlantMode::Nested:
                s.version = rng_.below(nv);
                s.depth = proj.chain_pos;
                break;
            case PlantMode::Partial:
                s.version = nv - 1;
                s.keep_ratio = 0.4 + 0.1 * static_cast<double>(rng_.below(5));
                break;
            case PlantMode::StructChanged:
                s.version = rng_.below(nv);
                s.amalgamate = rng_.chance(1, 2);
                break;
            case PlantMode::CodeChanged:
                s.version = rng_.below(nv - 1);
                s.mutation_rate = 0.1 + 0.05 * static_cast<double>(rng_.below(5));
                break;
        }
        return s;
    }

    void make_targets() {
        static const std::array<PlantMode, 5> cycle = {PlantMode::Exact, PlantMode::Partial, PlantMode::StructChanged,
                                                       PlantMode::CodeChanged, PlantMode::Nested};
        auto standalone = standalone_indices();
        std::map<std::pair<std::size_t, int>, std::size_t> by_pos;
        std::vector<std::size_t> chain_top;
        for (std::size_t i = 0; i < projects_.size(); ++i) {
            const auto& pr = projects_[i];
            if (!pr.chain) continue;
            by_pos[{*pr.chain, pr.chain_pos}] = i;
            if (pr.chain_pos == p_.chain_length - 1) chain_top.push_back(i);
        }
        // nested plants alternate between the deepest middle element and depth 1
        std::vector<std::size_t> chain_mid;
        for (int c = 0; c < p_.chains && p_.chain_length >= 3; ++c) {
            const int pos = c % 2 == 0 ? p_.chain_length - 2 : 1;
            chain_mid.push_back(by_pos.at({static_cast<std::size_t>(c), pos}));
        }
        std::size_t sa_cursor = 0, mid_cursor = 0, top_cursor = 0;
        rng_.shuffle(standalone);
        auto next_standalone = [&] { return standalone[sa_cursor++ % standalone.size()]; };
        for (int t = 0; t < p_.targets; ++t) {
            char idbuf[16];
            std::snprintf(idbuf, sizeof idbuf, "t%02d", t);
            auto mode = cycle[static_cast<std::size_t>(t) % cycle.size()];
            std::vector<PlantSpec> plants;
            if (mode == PlantMode::Nested && chain_mid.empty()) mode = PlantMode::Exact;
            if (mode == PlantMode::Nested) {
                plants.push_back(random_plant(mode, chain_mid[mid_cursor++ % chain_mid.size()]));
            } else if (mode == PlantMode::Exact && !chain_top.empty() && t % 2 == 0) {
                plants.push_back(random_plant(mode, chain_top[top_cursor++ % chain_top.size()]));
            } else {
                plants.push_back(random_plant(mode, next_standalone()));
            }
            if (t % 3 == 2 && !standalone.empty()) {
                const auto second = cycle[static_cast<std::size_t>(t / 3) % 4];
                auto pi = next_standalone();
                if (projects_[pi].id == plants[0].oss_id) pi = next_standalone();
                plants.push_back(random_plant(second, pi));
            }
            targets_.push_back(make_target(idbuf, plants, rng_.range(20, 35)));
        }
    }

    GenParams p_;
    Rng rng_;
    Registry registry_;
    std::vector<GenProject> projects_;
    std::vector<GenLineage> generic_pool_;
    std::vector<std::string> ids_;
    std::uint64_t next_gid_ = 1;
    std::vector<GenTarget> targets_;
};

// ---------------------------------------------------------------------------
// Ground truth and verification

struct TruthRecord {
    std::string oss_id;
    std::set<std::string> versions;
    std::set<std::string> patterns;
    bool partial_allowed = false;

    friend bool operator==(const TruthRecord&, const TruthRecord&) = default;
};

using GroundTruth = std::map<std::string, std::map<std::string, TruthRecord>>;  // target -> oss -> record

inline GroundTruth read_ground_truth(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw Error("cannot read ground truth " + file.string());
    const auto j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded()) throw FormatError(file.string() + ": malformed JSON");
    GroundTruth gt;
    try {
        for (const auto& t : j.at("targets")) {
            auto& m = gt[t.at("target").get<std::string>()];
            for (const auto& c : t.at("components")) {
                TruthRecord r;
                r.oss_id = c.at("oss").get<std::string>();
                for (const auto& v : c.at("versions")) r.versions.insert(v.get<std::string>());
                for (const auto& p : c.at("patterns")) r.patterns.insert(p.get<std::string>());
                r.partial_allowed = c.value("partial_allowed", false);
                m[r.oss_id] = std::move(r);
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(file.string() + ": " + e.what());
    }
    return gt;
}

inline GroundTruth to_ground_truth(const std::vector<GenTarget>& targets) {
    GroundTruth gt;
    for (const auto& t : targets) {
        auto& m = gt[t.id];
        for (const auto& c : t.truth) {
            TruthRecord r{c.oss_id, {c.versions.begin(), c.versions.end()}, {}, c.partial_allowed};
            for (auto p : c.patterns) r.patterns.insert(std::string(oscar::to_string(p)));
            m[c.oss_id] = std::move(r);
        }
    }
    return gt;
}

struct ComponentMeta {
    std::string oss_id;
    std::set<std::string> metadata_files;  // contents of top-level README / LICENSE / COPYING
};

inline bool is_metadata_name(const std::string& filename) {
    std::string up;
    for (char c : filename) up += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return up.starts_with("README") || up.starts_with("LICENSE") || up.starts_with("COPYING");
}

/// Top-level metadata files of every version directory of every project.
inline std::map<std::string, ComponentMeta> load_component_meta(
    const std::vector<std::pair<std::string, std::filesystem::path>>& projects) {
    namespace fs = std::filesystem;
    std::map<std::string, ComponentMeta> out;
    for (const auto& [id, dir] : projects) {
        auto& meta = out[id];
        meta.oss_id = id;
        for (const auto& ver : fs::directory_iterator(dir)) {
            if (!ver.is_directory()) continue;
            for (const auto& f : fs::directory_iterator(ver.path())) {
                if (!f.is_regular_file() || !is_metadata_name(f.path().filename().string())) continue;
                std::ifstream in(f.path(), std::ios::binary);
                meta.metadata_files.insert(std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>()));
            }
        }
    }
    return out;
}

struct Verdict {
    std::string oss_id;
    bool path_verified = false;
    bool header_verified = false;
    bool metadata_verified = false;

    bool unverified() const { return !path_verified && !header_verified && !metadata_verified; }
};

inline std::string lower(std::string s) {
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

inline std::vector<Verdict> verify_detection(const std::vector<ComponentReport>& reports,
                                             const std::filesystem::path& target_root,
                                             const std::map<std::string, ComponentMeta>& meta) {
    namespace fs = std::filesystem;
    std::vector<std::string> headers;
    std::set<std::string> metadata_contents;
    for (const auto& entry : fs::recursive_directory_iterator(target_root)) {
        if (!entry.is_regular_file()) continue;
        const auto name = entry.path().filename().string();
        const auto ext = lower(entry.path().extension().string());
        if (ext == ".h" || ext == ".hpp" || ext == ".hh" || ext == ".hxx") headers.push_back(lower(entry.path().stem().string()));
        if (is_metadata_name(name)) {
            std::ifstream in(entry.path(), std::ios::binary);
            metadata_contents.insert(std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>()));
        }
    }
    std::vector<Verdict> out;
    for (const auto& r : reports) {
        Verdict v{r.oss_id};
        const auto id = lower(r.oss_id);
        for (const auto& e : r.evidence) {
            for (const auto& p : e.target_paths) {
                if (lower(p).find(id) != std::string::npos) v.path_verified = true;
            }
        }
        v.header_verified = std::find(headers.begin(), headers.end(), id) != headers.end();
        if (auto it = meta.find(r.oss_id); it != meta.end()) {
            for (const auto& content : it->second.metadata_files) {
                if (metadata_contents.contains(content)) v.metadata_verified = true;
            }
        }
        out.push_back(std::move(v));
    }
    return out;
}

// In-memory fingerprinting of a generated file map (no disk round trip).
inline TargetFingerprint fingerprint_files(const std::string& id, const FileMap& files) {
    std::vector<RawFunction> fns;
    for (const auto& [path, content] : files) {
        const auto ext = std::filesystem::path(path).extension().string();
        if (!default_extensions().contains(ext)) continue;
        auto part = extract_from_source(content, path);
        std::move(part.begin(), part.end(), std::back_inserter(fns));
    }
    return make_target(id, hash_functions(fns));
}

/// Signatures of every generated project, built in memory and unsegmented.
inline ComponentDb build_db(const Generator& gen) {
    ComponentDb db;
    for (std::size_t pi = 0; pi < gen.projects().size(); ++pi) {
        const auto& proj = gen.projects()[pi];
        std::vector<VersionFunctions> versions;
        for (std::size_t vi = 0; vi < proj.versions.size(); ++vi) {
            const auto t = fingerprint_files(proj.id, gen.render_version(pi, vi));
            VersionFunctions v{proj.versions[vi].id, proj.versions[vi].date, {}};
            for (const auto& f : t.functions) {
                for (const auto& p : f.paths) v.functions.emplace_back(p, f.hash);
            }
            versions.push_back(std::move(v));
        }
        db.signatures.emplace(proj.id, build_signature_from_hashes(proj.id, std::move(versions)));
    }
    return db;
}

}  // namespace oscar::evalkit
