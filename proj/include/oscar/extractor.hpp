#pragma once

// Function extraction from C/C++ source trees.
//
// The built-in backend is a lexer plus a brace-balance scanner, not a C++
// parser. What it reports as a function:
//
//   * a definition at file scope, or inside namespace / extern "C" /
//     class / struct / union bodies (inline member functions count);
//   * name = identifier (optionally qualified, destructor or operator)
//     immediately before the last parameter list of the declaration head;
//     after that list only cv/ref qualifiers, noexcept/throw(...),
//     override/final, attributes, ALL-CAPS macros, a trailing return type,
//     or a constructor initializer list may appear before the '{';
//   * K&R definitions `int f(a, b) int a; int b; { ... }` are captured when
//     the parameter list holds bare identifiers and every declaration
//     between ')' and '{' consists of plain declarator tokens;
//   * the body text runs from the first token of the declaration head
//     (return type, template header, storage class) through the closing
//     brace, verbatim, including any preprocessor lines inside it.
//
// Not reported: prototypes, macro invocations without braces, lambdas,
// functions nested inside function bodies, enum and aggregate initializers.
// Preprocessor directives are invisible to the scanner, so conditional
// blocks that unbalance braces yield best-effort results.

#include "oscar/error.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <iterator>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace oscar {

struct RawFunction {
    std::string file_path;  // repo-relative, '/'-separated
    std::string name;
    std::string body;
    int line_start = 0;  // 1-based, inclusive
    int line_end = 0;

    friend bool operator==(const RawFunction&, const RawFunction&) = default;
};

inline const std::set<std::string>& default_extensions() {
    static const std::set<std::string> kDefault = {".c", ".cc", ".cpp", ".cxx", ".h", ".hh", ".hpp"};
    return kDefault;
}

namespace scan {

enum class TokenKind { Ident, Punct, String, Char, Number };

struct Token {
    TokenKind kind;
    std::string_view text;
    std::size_t begin;
    std::size_t end;
    int line;

    bool is(std::string_view p) const { return text == p && (kind == TokenKind::Punct || kind == TokenKind::Ident); }
};

inline bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$'; }
inline bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$'; }

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        while (pos_ < src_.size()) {
            const char c = src_[pos_];
            if (c == '\n') {
                ++line_;
                ++pos_;
                at_line_start_ = true;
                continue;
            }
            if (c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v') {
                ++pos_;
                continue;
            }
            if (c == '/' && peek(1) == '/') {
                skip_line_comment();
                continue;
            }
            if (c == '/' && peek(1) == '*') {
                skip_block_comment();
                continue;
            }
            if (c == '#' && at_line_start_) {
                skip_directive();
                continue;
            }
            at_line_start_ = false;
            const std::size_t begin = pos_;
            const int line = line_;
            TokenKind kind;
            if (ident_start(c)) {
                while (pos_ < src_.size() && ident_char(src_[pos_])) ++pos_;
                const auto word = src_.substr(begin, pos_ - begin);
                if (peek(0) == '"' && is_raw_prefix(word)) {
                    skip_raw_string();
                    kind = TokenKind::String;
                } else {
                    kind = TokenKind::Ident;
                }
            } else if (std::isdigit(static_cast<unsigned char>(c)) ||
                       (c == '.' && std::isdigit(static_cast<unsigned char>(peek(1))))) {
                skip_number();
                kind = TokenKind::Number;
            } else if (c == '"' || c == '\'') {
                skip_quoted(c);
                kind = c == '"' ? TokenKind::String : TokenKind::Char;
            } else {
                kind = TokenKind::Punct;
                const auto two = src_.substr(pos_, 2);
                pos_ += (two == "::" || two == "->" || two == "&&") ? 2 : 1;
            }
            out.push_back(Token{kind, src_.substr(begin, pos_ - begin), begin, pos_, line});
        }
        return out;
    }

private:
    char peek(std::size_t k) const { return pos_ + k < src_.size() ? src_[pos_ + k] : '\0'; }

    static bool is_raw_prefix(std::string_view w) {
        return w == "R" || w == "LR" || w == "uR" || w == "UR" || w == "u8R";
    }

    void advance() {
        if (src_[pos_] == '\n') ++line_;
        ++pos_;
    }

    void skip_line_comment() {
        while (pos_ < src_.size() && src_[pos_] != '\n') {
            if (src_[pos_] == '\\' && peek(1) == '\n') advance();
            advance();
        }
    }

    void skip_block_comment() {
        pos_ += 2;
        while (pos_ < src_.size() && !(src_[pos_] == '*' && peek(1) == '/')) advance();
        pos_ = std::min(src_.size(), pos_ + 2);
    }

    void skip_directive() {
        while (pos_ < src_.size() && src_[pos_] != '\n') {
            if (src_[pos_] == '\\' && (peek(1) == '\n' || (peek(1) == '\r' && peek(2) == '\n'))) {
                advance();
                if (src_[pos_] == '\r') advance();
                advance();
                continue;
            }
            if (src_[pos_] == '/' && peek(1) == '*') {
                skip_block_comment();
                continue;
            }
            if (src_[pos_] == '/' && peek(1) == '/') {
                skip_line_comment();
                continue;
            }
            advance();
        }
    }

    void skip_number() {
        while (pos_ < src_.size()) {
            const char c = src_[pos_];
            if (ident_char(c) || c == '.') {
                ++pos_;
            } else if (c == '\'' && std::isxdigit(static_cast<unsigned char>(peek(1)))) {
                ++pos_;
            } else if ((c == '+' || c == '-') && pos_ > 0 &&
                       (src_[pos_ - 1] == 'e' || src_[pos_ - 1] == 'E' || src_[pos_ - 1] == 'p' ||
                        src_[pos_ - 1] == 'P')) {
                ++pos_;
            } else {
                break;
            }
        }
    }

    void skip_quoted(char quote) {
        ++pos_;
        while (pos_ < src_.size()) {
            const char c = src_[pos_];
            if (c == '\\' && pos_ + 1 < src_.size()) {
                ++pos_;
                advance();
                continue;
            }
            if (c == '\n') return;  // unterminated on this line
            ++pos_;
            if (c == quote) return;
        }
    }

    void skip_raw_string() {
        ++pos_;  // opening quote
        const auto paren = src_.find('(', pos_);
        if (paren == std::string_view::npos) {
            pos_ = src_.size();
            return;
        }
        const std::string terminator = ")" + std::string(src_.substr(pos_, paren - pos_)) + "\"";
        const auto close = src_.find(terminator, paren + 1);
        const std::size_t stop = close == std::string_view::npos ? src_.size() : close + terminator.size();
        while (pos_ < stop) advance();
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    int line_ = 1;
    bool at_line_start_ = true;
};

inline bool is_open(const Token& t) { return t.kind == TokenKind::Punct && (t.text == "(" || t.text == "[" || t.text == "{"); }
inline bool is_close(const Token& t) { return t.kind == TokenKind::Punct && (t.text == ")" || t.text == "]" || t.text == "}"); }

// Names that may precede '(' without introducing a parameter list.
inline bool is_non_name_keyword(std::string_view w) {
    static constexpr std::array<std::string_view, 28> kWords = {
        "if",         "while",     "for",         "switch",      "return",     "sizeof",   "alignof",
        "decltype",   "__attribute__", "__declspec", "alignas",  "catch",      "do",       "else",
        "case",       "new",       "delete",      "typeid",      "static_assert", "noexcept", "throw",
        "co_await",   "__typeof__", "typeof",     "asm",         "__asm__",    "_Alignas", "_Static_assert"};
    return std::find(kWords.begin(), kWords.end(), w) != kWords.end();
}

inline bool is_macro_like(std::string_view w) {
    bool has_alpha = false;
    for (char c : w) {
        if (std::islower(static_cast<unsigned char>(c))) return false;
        has_alpha = has_alpha || std::isupper(static_cast<unsigned char>(c));
    }
    return has_alpha;
}

class Scanner {
public:
    Scanner(std::string_view src, std::string path, std::vector<RawFunction>& out)
        : src_(src), toks_(Lexer(src).run()), path_(std::move(path)), out_(out) {}

    void run() {
        std::size_t i = 0;
        while (i < toks_.size()) i = parse_scope(i, false);
    }

private:
    struct Candidate {
        std::string name;
        bool ctor_init = false;
    };

    // Index one past the group opened at i (or end of input when unbalanced).
    std::size_t skip_group(std::size_t i) const {
        int depth = 0;
        for (; i < toks_.size(); ++i) {
            if (is_open(toks_[i])) ++depth;
            else if (is_close(toks_[i]) && --depth == 0) return i + 1;
        }
        return toks_.size();
    }

    bool head_has(std::size_t s, std::size_t e, std::string_view word) const {
        for (std::size_t k = s; k < e; ++k)
            if (toks_[k].kind == TokenKind::Ident && toks_[k].text == word) return true;
        return false;
    }

    bool head_has_top_level_assign(std::size_t s, std::size_t e) const {
        for (std::size_t k = s; k < e;) {
            if (is_open(toks_[k])) {
                k = skip_group(k);
                continue;
            }
            if (toks_[k].is("=") && !(k > s && toks_[k - 1].is("operator"))) return true;
            ++k;
        }
        return false;
    }

    std::optional<std::string> name_before(std::size_t open, std::size_t s) const {
        if (open == s) return std::nullopt;
        std::size_t k = open - 1;
        const Token& t = toks_[k];
        std::string name;
        std::size_t first;
        if (t.kind == TokenKind::Ident) {
            if (is_non_name_keyword(t.text)) return std::nullopt;
            name = std::string(t.text);
            first = k;
            if (t.text == "operator") return std::nullopt;  // operator() handled below
        } else {
            // operator symbol: walk back to the `operator` keyword.
            std::size_t op = k;
            int budget = 3;
            while (op > s && budget-- > 0 && !toks_[op].is("operator")) --op;
            if (!toks_[op].is("operator")) return std::nullopt;
            for (std::size_t q = op; q <= k; ++q) name += toks_[q].text;
            first = op;
        }
        while (first >= s + 2 && toks_[first - 1].is("::")) {
            const Token& scope = toks_[first - 2];
            if (scope.kind != TokenKind::Ident) break;
            name = std::string(scope.text) + "::" + name;
            first -= 2;
        }
        if (first > s && toks_[first - 1].is("~")) name = "~" + name;
        return name;
    }

    // Tail between ')' and '{'; returns nullopt when it cannot follow a
    // parameter list, otherwise whether a constructor initializer started.
    std::optional<bool> tail_kind(std::size_t k, std::size_t e) const {
        while (k < e) {
            const Token& t = toks_[k];
            if (t.is(":")) return true;
            if (t.is("->")) return false;
            if (t.is("&") || t.is("&&")) {
                ++k;
                continue;
            }
            if (t.is("[")) {
                k = skip_group(k);
                continue;
            }
            if (t.kind == TokenKind::Ident) {
                static constexpr std::array<std::string_view, 12> kQualifiers = {
                    "const", "volatile", "noexcept", "throw", "override", "final", "mutable",
                    "try", "__attribute__", "__declspec", "requires", "restrict"};
                const bool known =
                    std::find(kQualifiers.begin(), kQualifiers.end(), t.text) != kQualifiers.end();
                if (!known && !is_macro_like(t.text)) return std::nullopt;
                if (t.text == "requires") return false;  // constraint expression follows
                ++k;
                if (k < e && toks_[k].is("(")) k = skip_group(k);
                continue;
            }
            return std::nullopt;
        }
        return false;
    }

    std::optional<Candidate> match_function(std::size_t s, std::size_t e) const {
        std::vector<std::pair<std::size_t, std::size_t>> groups;  // '(' index, one past ')'
        for (std::size_t k = s; k < e;) {
            if (toks_[k].is("(")) {
                const std::size_t close = skip_group(k);
                groups.emplace_back(k, close);
                k = close;
            } else if (is_open(toks_[k])) {
                k = skip_group(k);
            } else {
                ++k;
            }
        }
        for (auto it = groups.rbegin(); it != groups.rend(); ++it) {
            const auto [open, close] = *it;
            if (close > e) continue;
            auto name = name_before(open, s);
            // operator(): the first group is part of the name.
            if (!name && open > s && toks_[open - 1].is(")") && open >= s + 3 && toks_[open - 2].is("(") &&
                toks_[open - 3].is("operator")) {
                name = "operator()";
            }
            if (!name) continue;
            const auto tail = tail_kind(close, e);
            if (!tail) continue;
            return Candidate{*name, *tail};
        }
        return std::nullopt;
    }

    // K&R head ending at the ';' at index e: returns the name when the last
    // parameter list holds bare identifiers and is followed by declarations.
    std::optional<std::string> knr_head(std::size_t s, std::size_t e) const {
        for (std::size_t k = s; k < e; ++k) {
            if (!toks_[k].is("(")) continue;
            const std::size_t close = skip_group(k);
            if (close >= e) return std::nullopt;
            bool idents_only = close > k + 2;
            for (std::size_t q = k + 1; q + 1 < close && idents_only; ++q) {
                const bool want_ident = (q - k) % 2 == 1;
                idents_only = want_ident ? toks_[q].kind == TokenKind::Ident && !is_non_name_keyword(toks_[q].text)
                                         : toks_[q].is(",");
            }
            if (!idents_only) return std::nullopt;
            auto name = name_before(k, s);
            if (!name || !declarator_only(close, e)) return std::nullopt;
            return name;
        }
        return std::nullopt;
    }

    bool declarator_only(std::size_t s, std::size_t e) const {
        if (s >= e) return false;
        for (std::size_t k = s; k < e; ++k) {
            const Token& t = toks_[k];
            const bool ok = t.kind == TokenKind::Ident || t.kind == TokenKind::Number || t.is("*") ||
                            t.is(",") || t.is("[") || t.is("]") || t.is("(") || t.is(")");
            if (!ok) return false;
        }
        return true;
    }

    void emit(std::size_t s, std::size_t body_end, std::string name) {
        const Token& first = toks_[s];
        const Token& last = toks_[body_end - 1];
        RawFunction fn;
        fn.file_path = path_;
        fn.name = std::move(name);
        fn.body = std::string(src_.substr(first.begin, last.end - first.begin));
        fn.line_start = first.line;
        fn.line_end = last.line;
        if (!fn.body.empty()) out_.push_back(std::move(fn));
    }

    // Parses declarations until the closing '}' of a nested scope (returns
    // the index after it) or, at file scope, for a single declaration run.
    std::size_t parse_scope(std::size_t i, bool nested) {
        std::size_t stmt = i;
        while (i < toks_.size()) {
            const Token& t = toks_[i];
            if (t.is("}")) {
                if (nested) return i + 1;
                stmt = ++i;
                continue;
            }
            if (t.is(";")) {
                if (auto name = knr_head(stmt, i)) {
                    if (auto end = try_knr_body(i)) {
                        emit(stmt, *end, *name);
                        i = stmt = *end;
                        continue;
                    }
                }
                stmt = ++i;
                continue;
            }
            if ((t.is("public") || t.is("private") || t.is("protected")) && i + 1 < toks_.size() &&
                toks_[i + 1].is(":")) {
                stmt = i += 2;
                continue;
            }
            if (t.is("(") || t.is("[")) {
                i = skip_group(i);
                continue;
            }
            if (!t.is("{")) {
                ++i;
                continue;
            }
            if (head_has(stmt, i, "enum")) {
                i = skip_group(i);
                continue;
            }
            if (auto fn = match_function(stmt, i)) {
                const bool brace_init = fn->ctor_init && i > stmt &&
                                        (toks_[i - 1].kind == TokenKind::Ident || toks_[i - 1].is(">"));
                if (brace_init) {
                    i = skip_group(i);
                    continue;
                }
                const std::size_t end = skip_group(i);
                emit(stmt, end, std::move(fn->name));
                i = stmt = end;
                continue;
            }
            const bool linkage = head_has(stmt, i, "extern") &&
                                 std::any_of(toks_.begin() + static_cast<long>(stmt), toks_.begin() + static_cast<long>(i),
                                             [](const Token& x) { return x.kind == TokenKind::String; });
            if (head_has(stmt, i, "namespace") || linkage) {
                i = stmt = parse_scope(i + 1, true);
                continue;
            }
            if ((head_has(stmt, i, "class") || head_has(stmt, i, "struct") || head_has(stmt, i, "union")) &&
                !head_has_top_level_assign(stmt, i)) {
                i = parse_scope(i + 1, true);
                continue;
            }
            i = skip_group(i);
        }
        return i;
    }

    // After the ';' at index semi: further declarations, then the body.
    std::optional<std::size_t> try_knr_body(std::size_t semi) const {
        std::size_t seg = semi + 1;
        for (std::size_t k = seg; k < toks_.size(); ++k) {
            if (toks_[k].is(";")) {
                if (!declarator_only(seg, k)) return std::nullopt;
                seg = k + 1;
                continue;
            }
            if (toks_[k].is("{")) {
                if (k != seg) return std::nullopt;
                return skip_group(k);
            }
            if (toks_[k].is("}") || toks_[k].is("=")) return std::nullopt;
        }
        return std::nullopt;
    }

    std::string_view src_;
    std::vector<Token> toks_;
    std::string path_;
    std::vector<RawFunction>& out_;
};

}  // namespace scan

/// Extracts every function definition from one file's contents.
inline std::vector<RawFunction> extract_from_source(std::string_view source, const std::string& file_path) {
    std::vector<RawFunction> out;
    scan::Scanner(source, file_path, out).run();
    std::stable_sort(out.begin(), out.end(),
                     [](const RawFunction& a, const RawFunction& b) { return a.line_start < b.line_start; });
    return out;
}

enum class ParserBackend { Builtin, Ctags };

struct ExtractOptions {
    std::set<std::string> extensions = default_extensions();
    ParserBackend backend = ParserBackend::Builtin;
    std::string ctags_program = "ctags";
    unsigned jobs = 1;
};

namespace detail {

inline std::string lower_extension(const std::filesystem::path& p) {
    std::string ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    return ext;
}

inline std::optional<std::string> read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) return std::nullopt;
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) return std::nullopt;
    return data;
}

/// Regular files under root matching the filter, as sorted relative paths.
inline std::vector<std::string> list_source_files(const std::filesystem::path& root,
                                                  const std::set<std::string>& extensions,
                                                  std::vector<std::string>* warnings) {
    namespace fs = std::filesystem;
    std::vector<std::string> files;
    std::error_code ec;
    fs::recursive_directory_iterator it(root, fs::directory_options::skip_permission_denied, ec);
    if (ec) throw Error("cannot read source tree " + root.string() + ": " + ec.message());
    for (; it != fs::recursive_directory_iterator(); it.increment(ec)) {
        if (ec) {
            if (warnings) warnings->push_back("traversal error under " + root.string() + ": " + ec.message());
            break;
        }
        const auto& entry = *it;
        if (entry.is_symlink(ec)) {
            if (entry.is_directory(ec)) it.disable_recursion_pending();
            continue;
        }
        if (!entry.is_regular_file(ec)) continue;
        if (!extensions.contains(lower_extension(entry.path()))) continue;
        files.push_back(entry.path().lexically_relative(root).generic_string());
    }
    std::sort(files.begin(), files.end());
    return files;
}

struct FileResult {
    std::vector<RawFunction> functions;
    std::optional<std::string> warning;
};

inline FileResult extract_file(const std::filesystem::path& root, const std::string& rel) {
    FileResult r;
    auto data = read_file(root / rel);
    if (!data) {
        r.warning = "skipped unreadable file " + rel;
        return r;
    }
    if (data->find('\0') != std::string::npos) {
        r.warning = "skipped binary file " + rel;
        return r;
    }
    r.functions = extract_from_source(*data, rel);
    return r;
}

inline std::string shell_quote(const std::string& s) {
    std::string out = "'";
    for (char c : s) out += c == '\'' ? std::string("'\\''") : std::string(1, c);
    return out + "'";
}

}  // namespace detail

/// Converts universal-ctags JSON output (one object per line, requires the
/// `line` and `end` fields) into functions whose bodies are sliced from the
/// files under root.
inline std::vector<RawFunction> parse_ctags_json(std::string_view output, const std::filesystem::path& root,
                                                 const std::set<std::string>& extensions) {
    std::vector<RawFunction> out;
    std::map<std::string, std::vector<std::string>> line_cache;
    std::size_t pos = 0;
    while (pos < output.size()) {
        auto nl = output.find('\n', pos);
        if (nl == std::string_view::npos) nl = output.size();
        const auto line = output.substr(pos, nl - pos);
        pos = nl + 1;
        if (line.empty()) continue;
        auto tag = nlohmann::json::parse(line, nullptr, false);
        if (tag.is_discarded() || tag.value("_type", "") != "tag") continue;
        const std::string kind = tag.value("kind", "");
        if (kind != "function" && kind != "f") continue;
        if (!tag.contains("end") || !tag.contains("line")) continue;
        std::filesystem::path file = tag.value("path", "");
        if (file.is_absolute()) file = file.lexically_relative(root);
        const std::string rel = file.lexically_normal().generic_string();
        if (!extensions.contains(detail::lower_extension(file))) continue;
        auto& lines = line_cache[rel];
        if (lines.empty()) {
            auto data = detail::read_file(root / rel);
            if (!data || data->find('\0') != std::string::npos) continue;
            std::size_t p = 0;
            while (p <= data->size()) {
                auto e = data->find('\n', p);
                if (e == std::string::npos) e = data->size();
                lines.push_back(data->substr(p, e - p));
                p = e + 1;
            }
        }
        const int start = tag["line"].get<int>();
        const int end = tag["end"].get<int>();
        if (start < 1 || end < start || static_cast<std::size_t>(end) > lines.size()) continue;
        RawFunction fn{rel, tag.value("name", ""), "", start, end};
        for (int l = start; l <= end; ++l) {
            fn.body += lines[static_cast<std::size_t>(l - 1)];
            if (l != end) fn.body += '\n';
        }
        if (!fn.body.empty()) out.push_back(std::move(fn));
    }
    std::sort(out.begin(), out.end(), [](const RawFunction& a, const RawFunction& b) {
        return std::tie(a.file_path, a.line_start, a.name) < std::tie(b.file_path, b.line_start, b.name);
    });
    return out;
}

inline std::vector<RawFunction> extract_with_ctags(const std::filesystem::path& root, const ExtractOptions& opts) {
    const std::string cmd = detail::shell_quote(opts.ctags_program) +
                            " --output-format=json --fields=+ne --kinds-C=f --kinds-C++=f -R -o - " +
                            detail::shell_quote(root.string()) + " 2>/dev/null";
    FILE* pipe = ::popen(cmd.c_str(), "r");
    if (!pipe) throw Error("cannot start ctags backend '" + opts.ctags_program + "'");
    std::string output;
    std::array<char, 65536> buf{};
    std::size_t n;
    while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) output.append(buf.data(), n);
    const int status = ::pclose(pipe);
    if (status != 0) {
        throw Error("ctags backend '" + opts.ctags_program +
                    "' failed (exit status " + std::to_string(status) + "); is universal-ctags installed?");
    }
    return parse_ctags_json(output, root, opts.extensions);
}

/// Every function definition in matching files under root, ordered by path
/// then start line. Unreadable and binary files are skipped with a warning.
inline std::vector<RawFunction> extract_functions(const std::filesystem::path& root, const ExtractOptions& opts,
                                                  std::vector<std::string>* warnings = nullptr) {
    if (!std::filesystem::is_directory(root)) throw Error("source tree does not exist: " + root.string());
    if (opts.backend == ParserBackend::Ctags) return extract_with_ctags(root, opts);

    const auto files = detail::list_source_files(root, opts.extensions, warnings);
    std::vector<detail::FileResult> results(files.size());
    const unsigned jobs = std::max(1u, opts.jobs);
    if (jobs == 1 || files.size() < 2) {
        for (std::size_t i = 0; i < files.size(); ++i) results[i] = detail::extract_file(root, files[i]);
    } else {
        std::vector<std::future<void>> workers;
        for (unsigned w = 0; w < jobs; ++w) {
            workers.push_back(std::async(std::launch::async, [&, w] {
                for (std::size_t i = w; i < files.size(); i += jobs) results[i] = detail::extract_file(root, files[i]);
            }));
        }
        for (auto& f : workers) f.get();
    }
    std::vector<RawFunction> out;
    for (auto& r : results) {
        if (r.warning && warnings) warnings->push_back(*r.warning);
        std::move(r.functions.begin(), r.functions.end(), std::back_inserter(out));
    }
    return out;
}

inline std::vector<RawFunction> extract_functions(const std::filesystem::path& root,
                                                  const std::set<std::string>& language_filter,
                                                  std::vector<std::string>* warnings = nullptr) {
    ExtractOptions opts;
    opts.extensions = language_filter;
    return extract_functions(root, opts, warnings);
}

}  // namespace oscar
