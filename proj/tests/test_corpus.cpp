#include "helpers.hpp"

#include <gtest/gtest.h>

#include <cstdlib>

using namespace oscar;
using testutil::TempDir;
using testutil::write_file;

namespace {

void make_oss(const std::filesystem::path& dir, const std::string& meta) {
    write_file(dir / "1.0/a.c", "int one(int x) { return x + 1; }\n");
    write_file(dir / "1.1/a.c", "int one(int x) { return x + 1; }\nint two(int y) { return y * 2; }\n");
    write_file(dir / "meta.tsv", meta);
}

}  // namespace

TEST(Corpus, ManifestResolution) {
    TempDir tmp;
    make_oss(tmp / "oss/a", "1.0\t2020-01-01\n1.1\t2020-06-01\n");
    make_oss(tmp / "oss/b", "0\t1.0\t2020-01-01\n1\t1.1\t2020-06-01\n");
    write_file(tmp / "manifest.tsv", "# comment\nalpha\toss/a\r\n\nbeta\t" + (tmp / "oss/b").string() + "\n");
    const auto m = read_manifest(tmp / "manifest.tsv");
    ASSERT_EQ(m.size(), 2u);
    EXPECT_EQ(m[0].oss_id, "alpha");
    EXPECT_EQ(m[0].dir, tmp / "oss/a");
    EXPECT_EQ(resolve_corpus(tmp.path()).size(), 2u);

    const auto dirs = resolve_corpus(tmp / "oss");
    ASSERT_EQ(dirs.size(), 2u);
    EXPECT_EQ(dirs[0].oss_id, "a");
    EXPECT_EQ(dirs[1].oss_id, "b");
}

TEST(Corpus, ManifestErrors) {
    TempDir tmp;
    make_oss(tmp / "a", "");
    write_file(tmp / "dup.tsv", "x\ta\nx\ta\n");
    EXPECT_THROW(read_manifest(tmp / "dup.tsv"), FormatError);
    write_file(tmp / "missing.tsv", "x\tnope\n");
    EXPECT_THROW(read_manifest(tmp / "missing.tsv"), Error);
    write_file(tmp / "bad.tsv", "just-one-column\n");
    EXPECT_THROW(read_manifest(tmp / "bad.tsv"), FormatError);
    EXPECT_THROW(resolve_corpus(tmp / "absent"), Error);
}

TEST(Corpus, VersionDates) {
    TempDir tmp;
    make_oss(tmp / "a", "1.0\t2020-01-01\n");
    const auto versions = list_versions(tmp / "a");
    ASSERT_EQ(versions.size(), 2u);
    EXPECT_EQ(versions[0].release_date, Date(2020, 1, 1));
    EXPECT_FALSE(versions[1].release_date.has_value());
    write_file(tmp / "a/meta.tsv", "1.0\t2020-1-1\n");
    EXPECT_THROW(read_version_dates(tmp / "a"), FormatError);
}

TEST(Corpus, PreprocessContinuesPastFailures) {
    TempDir tmp;
    make_oss(tmp / "good", "1.0\t2020-01-01\n1.1\t2020-06-01\n");
    write_file(tmp / "empty/1.0/readme.txt", "no code");
    const auto out = preprocess_corpus(resolve_corpus(tmp.path()));
    EXPECT_EQ(out.db.signatures.size(), 1u);
    ASSERT_EQ(out.errors.size(), 1u);
    EXPECT_NE(out.errors.at("empty").find("empty OSS"), std::string::npos);
    const auto& sig = out.db.signatures.at("good");
    EXPECT_EQ(sig.entries.size(), 2u);
    EXPECT_EQ(sig.total_incidences(), 3u);
    EXPECT_FALSE(sig.segmented());
}

TEST(Corpus, PreprocessIndependentOfJobs) {
    TempDir tmp;
    for (int i = 0; i < 5; ++i) make_oss(tmp / ("p" + std::to_string(i)), "1.0\t2020-01-0" + std::to_string(i + 1) + "\n");
    const auto m = resolve_corpus(tmp.path());
    EXPECT_EQ(preprocess_corpus(m, {}, 1).db, preprocess_corpus(m, {}, 3).db);
}

TEST(Corpus, TargetsManifest) {
    TempDir tmp;
    write_file(tmp / "targets.tsv", "t1\ttargets/t1\nt2\t/abs/t2\n");
    const auto t = read_targets(tmp / "targets.tsv");
    ASSERT_EQ(t.size(), 2u);
    EXPECT_EQ(t[0].root, tmp / "targets/t1");
    EXPECT_EQ(t[1].root, "/abs/t2");
}

TEST(Corpus, ThetaGrid) {
    const auto g = parse_grid("0, 0.05,0.1,1/5");
    ASSERT_EQ(g.size(), 4u);
    EXPECT_EQ(g[1], Ratio(1, 20));
    EXPECT_EQ(g[3], Ratio(1, 5));
    EXPECT_THROW(parse_grid("0,,1"), FormatError);
}

TEST(Collect, ExportsTagsFromLocalRepository) {
    if (!git_available()) GTEST_SKIP() << "git not installed";
    TempDir tmp;
    const auto repo = tmp / "repo";
    write_file(repo / "src/a.c", "int one(int x) { return x + 1; }\n");
    const std::string git = "git -C '" + repo.string() + "' -c user.name=t -c user.email=t@t ";
    ASSERT_EQ(std::system((git + "init -q . && " + git + "add -A && " + git +
                           "commit -q -m one && GIT_COMMITTER_DATE='2021-03-04T10:00:00' " + git + "tag -a v1 -m v1")
                              .c_str()),
              0);
    write_file(repo / "src/b.c", "int two(int y) { return y * 2; }\n");
    ASSERT_EQ(std::system((git + "add -A && " + git + "commit -q -m two && " + git + "tag release/v2").c_str()), 0);

    const auto tags = collect_git(repo.string(), tmp / "out");
    ASSERT_EQ(tags.size(), 2u);
    EXPECT_TRUE(std::filesystem::exists(tmp / "out/release_v2/src/b.c"));
    EXPECT_TRUE(std::filesystem::exists(tmp / "out/v1/src/a.c"));
    EXPECT_FALSE(std::filesystem::exists(tmp / "out/v1/src/b.c"));
    EXPECT_FALSE(std::filesystem::exists(tmp / "out/.oscar-clone"));
    const auto dates = read_version_dates(tmp / "out");
    EXPECT_EQ(dates.at("v1").str(), "2021-03-04");
    EXPECT_EQ(list_versions(tmp / "out").size(), 2u);
    EXPECT_THROW(collect_git(repo.string(), tmp / "out2", 3), Error);
    EXPECT_THROW(collect_git((tmp / "no-repo").string(), tmp / "out3"), Error);
}
