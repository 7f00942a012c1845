#include <gtest/gtest.h>

#include <random>

#include "dust/metrics.hpp"

using namespace dust;
using namespace dust::metrics;
using lake::Cell;

TEST(Diversity, HandComputedExample) {
    // One query tuple and two selected tuples, pairwise orthogonal:
    // (1 + 1 + 1) / (1 + 2) = 1; min = 1.
    std::vector<Vec> q{{1, 0, 0}};
    std::vector<Vec> t{{0, 1, 0}, {0, 0, 1}};
    auto s = diversity(q, t);
    EXPECT_DOUBLE_EQ(s.average, 1.0);
    EXPECT_EQ(s.min, 1.0);
    // A selected tuple equal to a query tuple pulls the minimum to 0.
    std::vector<Vec> q2{{1, 0}, {-1, 0}};
    std::vector<Vec> t2{{0, 1}, {1, 0}};
    auto s2 = diversity(q2, t2);
    // q-t: 1, 0, 1, 2 ; t-t: 1  -> 5 / 4
    EXPECT_DOUBLE_EQ(s2.average, 5.0 / 4.0);
    EXPECT_EQ(s2.min, 0.0);
}

TEST(Diversity, FourThirdsExample) {
    // Query (1,0); selected (-1,0) and (0,1): 2 + 1 + 1 = 4 over n + k = 3.
    std::vector<Vec> q{{1, 0}};
    std::vector<Vec> t{{-1, 0}, {0, 1}};
    EXPECT_DOUBLE_EQ(average_diversity(q, t), 4.0 / 3.0);
    EXPECT_EQ(min_diversity(q, t), 1.0);
}

TEST(Diversity, SingleSelectedTupleHasNoPairTerm) {
    std::vector<Vec> q{{1, 0}, {0, 1}};
    std::vector<Vec> t{{-1, 0}};
    EXPECT_DOUBLE_EQ(average_diversity(q, t), 3.0 / 3.0);
}

TEST(Diversity, DuplicatesDriveMinToZero) {
    std::vector<Vec> q{{1, 2}};
    std::vector<Vec> t{{3, 1}, {3, 1}};
    EXPECT_EQ(min_diversity(q, t), 0.0);
}

TEST(Diversity, EmptyInputsAreRejected) {
    std::vector<Vec> none, one{{1, 0}};
    EXPECT_THROW(diversity(none, one), ConfigError);
    EXPECT_THROW(diversity(one, none), ConfigError);
}

TEST(Diversity, PointsOverloadAgreesWithVectorOverload) {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> nd;
    embed::EmbeddingMatrix q(5), l(5);
    std::vector<Vec> qv, sel;
    for (std::size_t i = 0; i < 4; ++i) {
        Vec v(5);
        for (auto& x : v) x = nd(rng);
        q.add({"q", i}, v);
        qv.push_back(v);
    }
    for (std::size_t i = 0; i < 10; ++i) {
        Vec v(5);
        for (auto& x : v) x = nd(rng);
        l.add({"t", i}, v);
    }
    std::vector<std::size_t> rows{7, 2, 5};
    for (auto r : rows) sel.emplace_back(l.row(r).begin(), l.row(r).end());
    Points qp(q, Metric::cosine), lp(l, Metric::cosine);
    auto a = diversity(qp, lp, rows);
    auto b = diversity(qv, sel);
    EXPECT_NEAR(a.average, b.average, 1e-12);
    EXPECT_NEAR(a.min, b.min, 1e-12);
    EXPECT_EQ(a.n, 4u);
    EXPECT_EQ(a.k, 3u);
}

TEST(Tally, ExactTiesCreditEveryTiedMethod) {
    QueryScores s;
    s["q1"]["dust"] = {0.9, 0.5, 1, 2};
    s["q1"]["gmc"] = {0.8, 0.5, 1, 2};
    s["q2"]["dust"] = {0.7, 0.1, 1, 2};
    s["q2"]["gmc"] = {0.9, 0.3, 1, 2};
    auto t = winner_tally(s);
    EXPECT_EQ(t["dust"].average_wins, 1u);
    EXPECT_EQ(t["dust"].min_wins, 1u);
    EXPECT_EQ(t["dust"].min_tied_wins, 1u);
    EXPECT_EQ(t["gmc"].average_wins, 1u);
    EXPECT_EQ(t["gmc"].min_wins, 2u);
    EXPECT_EQ(t["gmc"].average_tied_wins, 0u);
}

TEST(Tally, MissingMethodIsAnError) {
    QueryScores s;
    s["q1"]["dust"] = {};
    s["q2"]["gmc"] = {};
    EXPECT_THROW(winner_tally(s), Error);
}

TEST(NovelValues, CountsDistinctNormalizedNewValues) {
    lake::Table q{"q", lake::Role::query, {"Name"}, {{Cell("a")}, {Cell("b")}}};
    std::vector<lake::Row> sel{{Cell("B ")}, {Cell("c")}, {Cell("c")}, {std::nullopt}};
    EXPECT_EQ(novel_values(q, sel, 0), 1u);
    EXPECT_EQ(novel_values(q, sel, "name"), 1u);
    EXPECT_EQ(novel_values(q, std::vector<lake::Row>{}, 0), 0u);
    EXPECT_THROW(novel_values(q, sel, 3), ConfigError);
    EXPECT_THROW(novel_values(q, sel, "Other"), ConfigError);
}
