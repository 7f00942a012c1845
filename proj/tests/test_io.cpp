#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "dust/io.hpp"

using namespace dust;
using namespace dust::io;
using lake::Cell;

namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name) {
    auto p = fs::temp_directory_path() / ("dust_io_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

}  // namespace

TEST(TupleJsonl, RoundTripPreservesOrderAndValues) {
    embed::EmbeddingMatrix m(3, "ext-model");
    m.add({"b", 4}, Vec{0.1, -2.5, 1e-17});
    m.add({"a", 0}, Vec{1, 2, 3});
    std::stringstream ss;
    write_tuple_embeddings(ss, m);
    auto tv = read_tuple_vectors(ss);
    EXPECT_EQ(tv.dim, 3u);
    EXPECT_EQ(tv.provider, "ext-model");
    auto back = to_matrix(tv);
    ASSERT_EQ(back.size(), 2u);
    EXPECT_EQ(back.id(0), (lake::TupleRef{"b", 4}));
    for (std::size_t i = 0; i < 2; ++i) {
        for (std::size_t d = 0; d < 3; ++d) EXPECT_EQ(back.row(i)[d], m.row(i)[d]);
    }
}

TEST(TupleJsonl, ErrorsCarryLineNumbers) {
    auto fails_with = [](const std::string& text, const std::string& needle) {
        std::istringstream in(text);
        try {
            read_tuple_vectors(in);
        } catch (const lake::IoError& e) {
            EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
            return;
        }
        ADD_FAILURE() << "no error for: " << text;
    };
    fails_with("{\"dim\": 2}\n{\"table\": \"t\", \"row\": 0, \"vec\": [1]}\n", "line 2: vector has dimension 1");
    fails_with("{\"dim\": 2}\n\n{not json\n", "line 3: malformed JSON");
    fails_with("{\"dim\": 2}\n{\"table\": \"t\", \"row\": 0, \"vec\": [1, 2]}\n{\"table\": \"t\", \"row\": 0, \"vec\": [1, 2]}\n",
               "line 3: duplicate tuple");
    fails_with("{\"table\": \"t\"}\n", "line 1: expected header");
    fails_with("", "no header");
    fails_with("{\"dim\": 1}\n{\"table\": \"t\", \"row\": 0, \"vec\": [\"x\"]}\n", "line 2: non-numeric");
}

TEST(TupleJsonl, ImportedProviderServesVectors) {
    auto dir = temp_dir("provider");
    embed::EmbeddingMatrix m(2, "ext");
    m.add({"t", 1}, Vec{0.5, 0.5});
    write_tuple_embeddings(dir / "v.jsonl", m);
    auto prov = import_provider(dir / "v.jsonl");
    EXPECT_EQ(prov.dim(), 2u);
    EXPECT_THROW(import_provider(dir / "missing.jsonl"), lake::IoError);
}

TEST(ColumnJsonl, ReadsVectorsAndRejectsDuplicates) {
    std::istringstream ok("{\"dim\": 2}\n{\"table\": \"a\", \"index\": 0, \"vec\": [1, 0]}\n");
    auto e = read_column_embeddings(ok);
    EXPECT_EQ(e.dim(), 2u);
    std::istringstream dup(
        "{\"dim\": 2}\n{\"table\": \"a\", \"index\": 0, \"vec\": [1, 0]}\n{\"table\": \"a\", \"index\": 0, \"vec\": [1, 0]}\n");
    EXPECT_THROW(read_column_embeddings(dup), lake::IoError);
}

TEST(SerializedExport, OneLinePerTupleWithIndex) {
    std::vector<std::string> schema{"Name", "Note"};
    std::vector<embed::SerializedTuple> ts{
        embed::serialize_tuple(std::vector<Cell>{Cell("A"), Cell("two\nlines")}, schema, {"t", 0}),
        embed::serialize_tuple(std::vector<Cell>{std::nullopt, std::nullopt}, schema, {"u", 3})};
    std::ostringstream text, index;
    write_serialized(text, index, ts);
    EXPECT_EQ(text.str(), "[CLS] Name A [SEP] Note two lines [SEP]\n[CLS] [SEP]\n");
    EXPECT_EQ(index.str(), "line\ttable\trow\n0\tt\t0\n1\tu\t3\n");
}

TEST(Json, AlignmentRoundTrip) {
    align::AlignmentMap m;
    m.n_clusters = 3;
    m.clusters.push_back({{"q", 0, std::string("Name")}, {{"b", 2, std::string("Title")}}});
    m.discarded.push_back({"b", 1, std::nullopt});
    m.silhouette = 0.25;
    auto back = alignment_from_json(to_json(m));
    EXPECT_EQ(back.n_clusters, 3u);
    ASSERT_EQ(back.clusters.size(), 1u);
    EXPECT_EQ(back.clusters[0].members[0], (lake::ColumnRef{"b", 2, {}}));
    EXPECT_EQ(*back.clusters[0].members[0].header, "Title");
    EXPECT_EQ(back.discarded.size(), 1u);
    EXPECT_EQ(*back.silhouette, 0.25);
}

TEST(Json, ResultDocumentShape) {
    diversify::DiverseResult r;
    r.algorithm = "dust";
    r.selected.push_back({{"t", 2}, 0, 0.5, 0.6});
    r.metrics = metrics::DiversityScore{1.0, 0.5, 3, 1};
    diversify::DiversifyParams p;
    auto j = to_json(r, p);
    EXPECT_EQ(j["algorithm"], "dust");
    EXPECT_EQ(j["selected"][0]["table"], "t");
    EXPECT_EQ(j["metrics"]["min_diversity"], 0.5);
    EXPECT_TRUE(j["params"]["s"].is_null());
    EXPECT_EQ(j["params"]["objective"], "max-sum");
    EXPECT_EQ(parse_objective("max-min"), diversify::Objective::max_min);
    EXPECT_THROW(parse_objective("max"), ConfigError);
}

TEST(Manifest, LoadsFixtureAndResolvesPaths) {
    auto m = load_manifest(fs::path(DUST_TEST_DATA) / "parks" / "manifest.json");
    ASSERT_EQ(m.query_tables.size(), 1u);
    EXPECT_EQ(m.query_tables[0].filename(), "a.csv");
    EXPECT_TRUE(fs::exists(m.lake_tables[2]));
    ASSERT_TRUE(m.candidates.has_value());
    EXPECT_EQ(m.candidates->at("a"), (std::vector<std::string>{"b", "d"}));
    EXPECT_EQ(m.alignment_ground_truth.size(), 12u);
}

TEST(Manifest, MissingFilesAndBadShapesAreConfigErrors) {
    auto dir = temp_dir("manifest");
    EXPECT_THROW(parse_manifest(json{{"query_tables", {"nope.csv"}}, {"lake_tables", json::array()}}, dir), ConfigError);
    EXPECT_THROW(parse_manifest(json{{"lake_tables", json::array()}}, dir), ConfigError);
    EXPECT_THROW(parse_manifest(json::array(), dir), ConfigError);
    {
        std::ofstream bad(dir / "bad.json");
        bad << "{ oops";
    }
    EXPECT_THROW(load_manifest(dir / "bad.json"), ConfigError);
}

TEST(Manifest, WritesRelativePaths) {
    auto m = load_manifest(fs::path(DUST_TEST_DATA) / "parks" / "manifest.json");
    auto j = to_json(m, fs::path(DUST_TEST_DATA) / "parks");
    EXPECT_EQ(j["query_tables"][0], "a.csv");
    auto again = parse_manifest(j, fs::path(DUST_TEST_DATA) / "parks");
    EXPECT_EQ(again.alignment_ground_truth, m.alignment_ground_truth);
}
