// oscar: component detection over a preprocessed OSS signature DB.
//
//   oscar preprocess  --corpus DIR --db DIR [--jobs N] [--parser builtin|ctags]
//   oscar segment     --db DIR [--theta R] [--cutoff K] [--jobs N]
//   oscar detect      --db DIR --target DIR [--theta R] [--cutoff K] --format json|tsv|table [--out FILE]
//   oscar theta-sweep --db DIR --targets FILE --grid LIST [--truth FILE] [--cutoff K]
//   oscar collect     --git URL --out DIR [--min-tag-count N]
//   oscar synth       --out DIR [--seed N] [--standalone N] [--chains N] [--targets N]

#include "oscar/oscar.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

namespace {

using namespace oscar;

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kPartialFailure = 2;

void print_warnings(const std::vector<std::string>& warnings) {
    for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

ExtractOptions extract_options(const std::string& parser, unsigned jobs) {
    ExtractOptions opts;
    if (parser == "ctags") opts.backend = ParserBackend::Ctags;
    else if (parser != "builtin") throw Error("unknown parser '" + parser + "' (builtin or ctags)");
    opts.jobs = jobs;
    return opts;
}

int cmd_preprocess(const std::string& corpus, const std::string& db_dir, unsigned jobs, const std::string& parser) {
    const auto manifest = resolve_corpus(corpus);
    if (manifest.empty()) throw Error("corpus " + corpus + " lists no OSS projects");
    auto outcome = preprocess_corpus(manifest, extract_options(parser, 1), jobs);
    print_warnings(outcome.warnings);
    // a rebuilt DB is unsegmented until `segment` runs again
    save_db(outcome.db, db_dir);
    for (const auto& [id, sig] : outcome.db.signatures) {
        std::cout << id << "\tversions=" << sig.n_versions() << "\tentries=" << sig.entries.size()
                  << "\tincidences=" << sig.total_incidences() << "\tdedup=" << format_fixed(dedup_ratio(sig).value(), 4)
                  << '\n';
    }
    for (const auto& [id, err] : outcome.errors) std::cerr << "error: " << id << ": " << err << '\n';
    const auto total = dedup_ratio(outcome.db);
    std::cout << "total\tsignatures=" << outcome.db.signatures.size() << "\tdedup=" << total.str() << " ("
              << format_fixed(total.value() * 100.0, 2) << "%)\n";
    return outcome.errors.empty() ? kOk : kPartialFailure;
}

int cmd_segment(const std::string& db_dir, const std::string& theta, int cutoff, unsigned jobs) {
    auto db = load_db(db_dir);
    const auto th = Ratio::parse(theta);
    DetectorConfig{th, cutoff}.validate();
    const auto results = segment_all(db, th, cutoff, jobs);
    apply_segmentation(db, results);
    std::size_t prime = 0;
    for (const auto& [id, r] : results) {
        save_app_file(db.signatures.at(id), db_dir);
        if (r.is_prime) {
            ++prime;
            continue;
        }
        std::cout << id << "\tnon-prime\tmembers=";
        bool first = true;
        for (const auto& m : r.members) {
            std::cout << (first ? "" : ",") << m;
            first = false;
        }
        std::cout << "\tapp=" << r.app_entries.size() << '/' << db.signatures.at(id).entries.size() << '\n';
    }
    std::cout << "prime=" << prime << "\tnon-prime=" << results.size() - prime << '\n';
    return kOk;
}

int cmd_detect(const std::string& db_dir, const std::string& target, const std::string& theta, int cutoff,
               const std::string& format, const std::string& out, const std::string& parser) {
    const auto fmt = parse_report_format(format);
    DetectorConfig cfg{Ratio::parse(theta), cutoff};
    cfg.validate();
    const auto db = load_db(db_dir);
    std::vector<std::string> warnings;
    const auto t = fingerprint_target(target, extract_options(parser, 1), &warnings);
    const auto reports = identify_components(t, db, cfg, &warnings);
    print_warnings(warnings);
    const auto text = render_report(t.target_id, cfg, reports, fmt);
    if (out.empty()) {
        std::cout << text;
    } else {
        std::ofstream f(out, std::ios::binary | std::ios::trunc);
        if (!f || !(f << text)) throw Error("cannot write " + out);
    }
    return kOk;
}

int cmd_theta_sweep(const std::string& db_dir, const std::string& targets_file, const std::string& grid,
                    const std::string& truth_file, int cutoff) {
    const auto db = load_db(db_dir);
    const auto theta_grid = parse_grid(grid);
    std::vector<TargetFingerprint> targets;
    std::vector<std::string> warnings;
    for (const auto& te : read_targets(targets_file)) {
        auto t = fingerprint_target(te.root, {}, &warnings);
        t.target_id = te.target_id;
        targets.push_back(std::move(t));
    }
    print_warnings(warnings);
    std::optional<evalkit::GroundTruth> truth;
    if (!truth_file.empty()) truth = evalkit::read_ground_truth(truth_file);
    std::cout << render_sweep(theta_sweep(targets, db, theta_grid, cutoff, truth ? &*truth : nullptr));
    return kOk;
}

int cmd_collect(const std::string& url, const std::string& out, std::size_t min_tags) {
    const auto tags = collect_git(url, out, min_tags);
    for (const auto& t : tags) std::cout << t.version_id << '\t' << t.date.str() << '\n';
    std::cout << "collected " << tags.size() << " versions into " << out << '\n';
    return kOk;
}

int cmd_synth(const std::string& out, const evalkit::GenParams& params) {
    evalkit::Generator gen(params);
    gen.generate();
    gen.write(out);
    std::cout << "projects=" << gen.projects().size() << "\ttargets=" << gen.targets().size() << '\n'
              << "corpus:       " << (std::filesystem::path(out) / "corpus").string() << '\n'
              << "targets:      " << (std::filesystem::path(out) / "targets.tsv").string() << '\n'
              << "ground truth: " << (std::filesystem::path(out) / "ground_truth.json").string() << '\n';
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Detect reused open-source components in C/C++ code"};
    app.require_subcommand(1);

    std::string corpus, db_dir, target, targets, out, format = "table", theta = "0.1", grid = "0,0.05,0.1,0.15,0.2";
    std::string truth, url, parser = "builtin";
    int cutoff = kDefaultCutoff;
    unsigned jobs = 1;
    std::size_t min_tags = 1;
    evalkit::GenParams gen;

    auto* pre = app.add_subcommand("preprocess", "Build signatures for every OSS in a corpus");
    pre->add_option("--corpus", corpus, "Manifest TSV or corpus directory")->required();
    pre->add_option("--db", db_dir, "Output DB directory")->required();
    pre->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
    pre->add_option("--parser", parser, "Function extractor: builtin or ctags");

    auto* seg = app.add_subcommand("segment", "Find prime OSS and strip borrowed code");
    seg->add_option("--db", db_dir, "DB directory")->required();
    seg->add_option("--theta", theta, "Member threshold (decimal or a/b)");
    seg->add_option("--cutoff", cutoff, "LSH distance cutoff")->check(CLI::NonNegativeNumber);
    seg->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);

    auto* det = app.add_subcommand("detect", "Identify components reused in a target tree");
    det->add_option("--db", db_dir, "Segmented DB directory")->required();
    det->add_option("--target", target, "Target source tree")->required();
    det->add_option("--theta", theta, "Detection threshold (decimal or a/b)");
    det->add_option("--cutoff", cutoff, "LSH distance cutoff")->check(CLI::NonNegativeNumber);
    det->add_option("--format", format, "json, tsv or table");
    det->add_option("--out", out, "Write the report here instead of stdout");
    det->add_option("--parser", parser, "Function extractor: builtin or ctags");

    auto* sweep = app.add_subcommand("theta-sweep", "Detection counts across a theta grid");
    sweep->add_option("--db", db_dir, "Segmented DB directory")->required();
    sweep->add_option("--targets", targets, "TSV of target_id<TAB>path")->required();
    sweep->add_option("--grid", grid, "Comma-separated theta values");
    sweep->add_option("--truth", truth, "Ground-truth JSON from synth");
    sweep->add_option("--cutoff", cutoff, "LSH distance cutoff")->check(CLI::NonNegativeNumber);

    auto* col = app.add_subcommand("collect", "Export a git repository's tags as versions");
    col->add_option("--git", url, "Repository URL or path")->required();
    col->add_option("--out", out, "Output OSS directory")->required();
    col->add_option("--min-tag-count", min_tags, "Fail below this many tags");

    auto* syn = app.add_subcommand("synth", "Generate a synthetic corpus with planted reuse");
    syn->add_option("--out", out, "Output directory")->required();
    syn->add_option("--seed", gen.seed, "Generator seed");
    syn->add_option("--standalone", gen.standalone, "Projects outside nesting chains");
    syn->add_option("--chains", gen.chains, "Nesting chains");
    syn->add_option("--chain-length", gen.chain_length, "Projects per chain");
    syn->add_option("--targets", gen.targets, "Target trees");
    syn->add_option("--generics", gen.generic_pool, "Size of the shared generic-function pool");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kFailure;
    }

    try {
        if (*pre) return cmd_preprocess(corpus, db_dir, jobs, parser);
        if (*seg) return cmd_segment(db_dir, theta, cutoff, jobs);
        if (*det) return cmd_detect(db_dir, target, theta, cutoff, format, out, parser);
        if (*sweep) return cmd_theta_sweep(db_dir, targets, grid, truth, cutoff);
        if (*col) return cmd_collect(url, out, min_tags);
        if (*syn) return cmd_synth(out, gen);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kFailure;
    }
    return kFailure;
}
