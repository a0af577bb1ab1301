#include "helpers.hpp"

#include <gtest/gtest.h>

using namespace oscar;
using testutil::exact;
using testutil::read_file;
using testutil::TempDir;
using testutil::write_file;

namespace {

ComponentDb two_signature_db() {
    std::mt19937_64 rng(9);
    const auto base = testutil::random_text(rng);
    ComponentDb db;
    auto a = build_signature_from_hashes(
        "alpha", {{"1.0", Date(2018, 5, 1), {{"src/a.c", exact("A")}, {"src/b.c", testutil::lsh(base)}}},
                  {"1.1", Date(2019, 5, 1), {{"src/a.c", exact("A")}, {"lib/a.c", exact("A")}}}});
    auto b = build_signature_from_hashes("beta", {{"v0", Date(2020, 1, 2), {{"x.cpp", exact("B")}}}});
    db.signatures.emplace("alpha", std::move(a));
    db.signatures.emplace("beta", std::move(b));
    return db;
}

std::string expect_format_error(const std::filesystem::path& root) {
    try {
        load_db(root);
    } catch (const FormatError& e) {
        return e.what();
    }
    ADD_FAILURE() << "no FormatError";
    return {};
}

}  // namespace

TEST(DbIo, RoundTrip) {
    TempDir tmp;
    auto db = two_signature_db();
    save_db(db, tmp.path());
    EXPECT_EQ(load_db(tmp.path()), db);
}

TEST(DbIo, RoundTripSegmented) {
    TempDir tmp;
    auto db = two_signature_db();
    apply_segmentation(db, segment_all(db));
    save_db(db, tmp.path());
    const auto loaded = load_db(tmp.path());
    EXPECT_EQ(loaded, db);
    EXPECT_TRUE(loaded.signatures.at("alpha").segmented());
}

TEST(DbIo, BytesAreDeterministic) {
    TempDir a;
    TempDir b;
    save_db(two_signature_db(), a.path());
    save_db(load_db(a.path()), b.path());
    EXPECT_EQ(testutil::snapshot(a.path()), testutil::snapshot(b.path()));
}

TEST(DbIo, FileLayout) {
    TempDir tmp;
    save_db(two_signature_db(), tmp.path());
    EXPECT_EQ(read_file(tmp / "beta/meta.tsv"), "0\tv0\t2020-01-02\n");
    const auto meta = nlohmann::json::parse(read_file(tmp / "db_meta.json"));
    EXPECT_EQ(meta["format"], 1);
    EXPECT_EQ(meta["cutoff"], 30);
    EXPECT_EQ(meta["hash"], std::string(kLshSchemeId));
    EXPECT_FALSE(std::filesystem::exists(tmp / "beta/app.txt"));
    const auto line = read_file(tmp / "beta/sig.jsonl");
    EXPECT_EQ(line, "{\"h\":\"" + exact("B").str() + "\",\"v\":[{\"o\":0,\"p\":[\"x.cpp\"]}]}\n");
}

TEST(DbIo, TamperedHeader) {
    TempDir tmp;
    save_db(two_signature_db(), tmp.path());
    write_file(tmp / "db_meta.json", "{\"format\":1,");
    EXPECT_FALSE(expect_format_error(tmp.path()).empty());
    write_file(tmp / "db_meta.json", "{\"format\":1,\"hash\":\"ssdeep\",\"exact\":\"SHA-256\",\"cutoff\":30}");
    EXPECT_NE(expect_format_error(tmp.path()).find("hash scheme"), std::string::npos);
}

TEST(DbIo, FormatMismatchNamesBothVersions) {
    TempDir tmp;
    save_db(two_signature_db(), tmp.path());
    auto meta = nlohmann::json::parse(read_file(tmp / "db_meta.json"));
    meta["format"] = 7;
    write_file(tmp / "db_meta.json", meta.dump());
    const auto msg = expect_format_error(tmp.path());
    EXPECT_NE(msg.find("7"), std::string::npos) << msg;
    EXPECT_NE(msg.find("1"), std::string::npos) << msg;
}

TEST(DbIo, CorruptLineReportsFileAndLine) {
    TempDir tmp;
    save_db(two_signature_db(), tmp.path());
    auto text = read_file(tmp / "alpha/sig.jsonl");
    text.insert(text.find('\n') + 1, "{\"h\":garbage}\n");
    write_file(tmp / "alpha/sig.jsonl", text);
    const auto msg = expect_format_error(tmp.path());
    EXPECT_NE(msg.find("sig.jsonl:2"), std::string::npos) << msg;
}

TEST(DbIo, CorruptMetaAndApp) {
    TempDir tmp;
    auto db = two_signature_db();
    apply_segmentation(db, segment_all(db));
    save_db(db, tmp.path());
    write_file(tmp / "beta/app.txt", "prime:true\nsha256:zz\n");
    EXPECT_NE(expect_format_error(tmp.path()).find("app.txt:2"), std::string::npos);
    save_db(db, tmp.path());
    write_file(tmp / "beta/meta.tsv", "0\tv0\t2020-13-02\n");
    EXPECT_NE(expect_format_error(tmp.path()).find("meta.tsv:1"), std::string::npos);
}

TEST(DbIo, MissingDb) {
    TempDir tmp;
    EXPECT_THROW(load_db(tmp / "nothing"), FormatError);
}

TEST(DbIo, SaveReplacesStaleSignatures) {
    TempDir tmp;
    auto db = two_signature_db();
    save_db(db, tmp.path());
    db.signatures.erase("beta");
    save_db(db, tmp.path());
    EXPECT_EQ(load_db(tmp.path()).signatures.size(), 1u);
}

TEST(DbIo, GoldenFixture) {
    const std::filesystem::path golden = std::string(OSCAR_FIXTURES) + "/golden_db";
    const auto db = load_db(golden);
    ASSERT_EQ(db.signatures.size(), 3u);
    EXPECT_EQ(db.signatures.at("corelib").entries.size(), 4u);
    EXPECT_EQ(db.signatures.at("corelib").n_versions(), 2u);
    EXPECT_EQ(db.signatures.at("corelib").total_incidences(), 7u);
    EXPECT_EQ(db.signatures.at("app").entries.size(), 5u);
    EXPECT_FALSE(*db.signatures.at("app").is_prime);
    EXPECT_EQ(db.signatures.at("app").app_entries.size(), 2u);
    EXPECT_TRUE(*db.signatures.at("corelib").is_prime);
    EXPECT_EQ(dedup_ratio(db), Ratio(12, 17));
    TempDir tmp;
    save_db(db, tmp.path());
    EXPECT_EQ(testutil::snapshot(tmp.path()), testutil::snapshot(golden));
}
