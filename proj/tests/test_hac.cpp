#include <gtest/gtest.h>

#include <random>

#include "dust/hac.hpp"

using namespace dust;
using namespace dust::hac;

namespace {

using Matrix = std::vector<std::vector<double>>;

Matrix random_distances(std::size_t n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Matrix d(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) d[i][j] = d[j][i] = u(rng);
    }
    return d;
}

// Textbook greedy average linkage: repeatedly merge the pair of clusters with
// the smallest mean pairwise distance, recomputed from the original matrix.
std::vector<std::size_t> naive_labels(const Matrix& d, std::size_t n_clusters) {
    const std::size_t n = d.size();
    std::vector<std::vector<std::size_t>> clusters;
    for (std::size_t i = 0; i < n; ++i) clusters.push_back({i});
    while (clusters.size() > n_clusters) {
        std::size_t ba = 0, bb = 1;
        double best = 1e300;
        for (std::size_t a = 0; a < clusters.size(); ++a) {
            for (std::size_t b = a + 1; b < clusters.size(); ++b) {
                double s = 0;
                for (auto x : clusters[a])
                    for (auto y : clusters[b]) s += d[x][y];
                s /= static_cast<double>(clusters[a].size() * clusters[b].size());
                if (s < best) {
                    best = s;
                    ba = a;
                    bb = b;
                }
            }
        }
        clusters[ba].insert(clusters[ba].end(), clusters[bb].begin(), clusters[bb].end());
        clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(bb));
    }
    // Number clusters by their smallest member, as cut() does.
    std::vector<std::size_t> root(n);
    for (const auto& c : clusters) {
        auto m = *std::min_element(c.begin(), c.end());
        for (auto x : c) root[x] = m;
    }
    std::vector<std::size_t> label(n, n), relabel(n, n);
    std::size_t next = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (relabel[root[i]] == n) relabel[root[i]] = next++;
        label[i] = relabel[root[i]];
    }
    return label;
}

}  // namespace

TEST(Hac, CondensedMatrixIsSymmetric) {
    CondensedMatrix m(4);
    m.at(2, 1) = 0.5;
    EXPECT_EQ(std::as_const(m).at(1, 2), 0.5);
    EXPECT_EQ(std::as_const(m).at(3, 3), 0.0);
}

TEST(Hac, MatchesNaiveAverageLinkageAtEveryCut) {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t n = 2 + rng() % 24;
        auto d = random_distances(n, rng);
        CondensedMatrix c(n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) c.at(i, j) = d[i][j];
        auto merges = average_linkage(c);
        ASSERT_EQ(merges.size(), n - 1);
        for (std::size_t i = 1; i < merges.size(); ++i) EXPECT_LE(merges[i - 1].height, merges[i].height);
        for (std::size_t k = 1; k <= n; ++k) EXPECT_EQ(cut(merges, n, k), naive_labels(d, k)) << "n=" << n << " k=" << k;
    }
}

TEST(Hac, TwoObviousGroups) {
    // points on a line: 0, 0.1, 0.2 | 5, 5.1
    std::vector<double> x{0, 5, 0.1, 5.1, 0.2};
    CondensedMatrix c(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = i + 1; j < x.size(); ++j) c.at(i, j) = std::abs(x[i] - x[j]);
    auto merges = average_linkage(c);
    EXPECT_EQ(cut(merges, 5, 2), (std::vector<std::size_t>{0, 1, 0, 1, 0}));
    EXPECT_EQ(cut(merges, 5, 1), (std::vector<std::size_t>(5, 0)));
    EXPECT_EQ(cut(merges, 5, 5), (std::vector<std::size_t>{0, 1, 2, 3, 4}));
}

TEST(Hac, CutRejectsBadCounts) {
    std::vector<Merge> none;
    EXPECT_THROW(cut(none, 3, 0), ConfigError);
    EXPECT_THROW(cut(none, 3, 4), ConfigError);
    CondensedMatrix one(1);
    EXPECT_TRUE(average_linkage(one).empty());
}
