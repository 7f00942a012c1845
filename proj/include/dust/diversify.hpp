#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dust/common.hpp"
#include "dust/distance.hpp"
#include "dust/hac.hpp"
#include "dust/metrics.hpp"
#include "dust/points.hpp"
#include "dust/serialize_embed.hpp"

namespace dust::diversify {

using embed::EmbeddingMatrix;
using lake::TupleRef;

enum class Objective { max_sum, max_min };

struct DiversifyParams {
    std::size_t k = 10;
    std::optional<std::size_t> s;  // prune budget; empty disables pruning
    std::size_t p = 2;
    std::uint64_t seed = 0;
    Objective objective = Objective::max_sum;
    Metric metric = Metric::cosine;
    double lambda = 0.5;               // GMC/GNE relevance-diversity trade-off
    std::size_t gne_iterations = 10;
    std::size_t gne_alpha = 3;         // restricted candidate list size
};

inline void validate(const DiversifyParams& p) {
    if (p.k < 1) throw ConfigError("k must be >= 1");
    if (p.p < 1) throw ConfigError("p must be >= 1");
    if (p.s && *p.s < p.k * p.p) {
        throw ConfigError("prune budget s=" + std::to_string(*p.s) + " is below k*p=" + std::to_string(p.k * p.p));
    }
    if (p.lambda < 0.0 || p.lambda > 1.0) throw ConfigError("lambda must lie in [0, 1]");
    if (p.gne_iterations < 1) throw ConfigError("GNE iterations must be >= 1");
    if (p.gne_alpha < 1) throw ConfigError("GNE alpha must be >= 1");
}

struct RankedTuple {
    TupleRef id;
    std::size_t row = 0;  // row in the matrix the result was drawn from
    double rank_score = 0.0;
    double tie_score = 0.0;
};

struct DiverseResult {
    std::string algorithm;
    std::vector<RankedTuple> selected;
    std::optional<metrics::DiversityScore> metrics;
    std::vector<std::string> warnings;

    std::vector<std::size_t> rows() const {
        std::vector<std::size_t> r;
        r.reserve(selected.size());
        for (const auto& t : selected) r.push_back(t.row);
        return r;
    }
};

// ---------------------------------------------------------------------------
// Pruning
// ---------------------------------------------------------------------------

struct PruneResult {
    std::vector<std::size_t> kept;  // ascending row order
    std::vector<double> scores;     // per input row
};

/// Scores each tuple by its distance to the mean embedding of its source
/// table and keeps the global top-s (ties by tuple id).
inline PruneResult prune_tuples(const EmbeddingMatrix& e, std::optional<std::size_t> s, Metric metric) {
    if (s && *s < 1) throw ConfigError("prune budget must be >= 1");
    PruneResult out;
    const std::size_t n = e.size();
    out.scores.assign(n, 0.0);
    std::map<std::string, std::vector<std::size_t>> by_table;
    for (std::size_t i = 0; i < n; ++i) by_table[e.id(i).table].push_back(i);
    for (const auto& [table, rows] : by_table) {
        Vec mean(e.dim(), 0.0);
        for (auto r : rows) {
            auto v = e.row(r);
            for (std::size_t d = 0; d < mean.size(); ++d) mean[d] += v[d];
        }
        for (auto& x : mean) x /= static_cast<double>(rows.size());
        // A zero mean has no cosine direction; every tuple then scores 0.
        if (metric == Metric::cosine && dot(mean, mean) == 0.0) continue;
        for (auto r : rows) out.scores[r] = distance(metric, mean, e.row(r));
    }
    if (!s || *s >= n) {
        out.kept.resize(n);
        std::iota(out.kept.begin(), out.kept.end(), 0);
        return out;
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (out.scores[a] != out.scores[b]) return out.scores[a] > out.scores[b];
        return e.id(a) < e.id(b);
    });
    out.kept.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(*s));
    std::sort(out.kept.begin(), out.kept.end());
    return out;
}

// ---------------------------------------------------------------------------
// Cluster medoids
// ---------------------------------------------------------------------------

struct MedoidResult {
    std::vector<std::size_t> medoids;  // ascending row order, one per cluster
    std::vector<std::size_t> labels;
    std::size_t n_clusters = 0;
    bool clamped = false;
};

inline hac::CondensedMatrix pairwise(const Points& pts) {
    hac::CondensedMatrix d(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        for (std::size_t j = i + 1; j < pts.size(); ++j) d.at(i, j) = pts.between(i, j);
    }
    return d;
}

/// Medoid of one cluster: the member with the smallest summed distance to
/// its co-members, ties to the smaller row.
inline std::size_t medoid_of(const Points& pts, std::span<const std::size_t> members) {
    const std::size_t m = members.size();
    std::vector<double> sum(m, 0.0);
    for (std::size_t a = 0; a < m; ++a) {
        for (std::size_t b = a + 1; b < m; ++b) {
            double d = pts.between(members[a], members[b]);
            sum[a] += d;
            sum[b] += d;
        }
    }
    std::size_t best = 0;
    for (std::size_t a = 1; a < m; ++a) {
        if (sum[a] < sum[best] || (sum[a] == sum[best] && members[a] < members[best])) best = a;
    }
    return members[best];
}

/// Average-linkage clustering into n clusters and one medoid per cluster.
/// n above the point count is clamped.
inline MedoidResult cluster_medoids(const Points& pts, std::size_t n) {
    if (n < 1) throw ConfigError("cluster_medoids: n must be >= 1");
    MedoidResult out;
    const std::size_t m = pts.size();
    if (m == 0) throw ConfigError("cluster_medoids: no tuples");
    if (n > m) {
        n = m;
        out.clamped = true;
    }
    out.n_clusters = n;
    if (n == m) {
        out.labels.resize(m);
        std::iota(out.labels.begin(), out.labels.end(), 0);
        out.medoids = out.labels;
        return out;
    }
    std::vector<hac::Merge> merges;
    {
        auto d = pairwise(pts);
        merges = hac::average_linkage(d);
    }
    out.labels = hac::cut(merges, m, n);
    std::vector<std::vector<std::size_t>> members(n);
    for (std::size_t i = 0; i < m; ++i) members[out.labels[i]].push_back(i);
    for (const auto& mem : members) out.medoids.push_back(medoid_of(pts, mem));
    std::sort(out.medoids.begin(), out.medoids.end());
    return out;
}

// ---------------------------------------------------------------------------
// Re-ranking against the query tuples
// ---------------------------------------------------------------------------

struct RankEntry {
    std::size_t candidate = 0;  // index into the candidate list
    double rank_score = 0.0;    // min distance to any query tuple
    double tie_score = 0.0;     // mean distance to the query tuples
};

/// Orders candidates by (rank_score, tie_score) descending, then by id.
/// `distances[c][q]` is the distance of candidate c to query tuple q.
inline std::vector<RankEntry> rank_by_query_distances(std::span<const TupleRef> ids,
                                                      const std::vector<std::vector<double>>& distances) {
    if (ids.size() != distances.size()) throw ConfigError("rank: one distance row per candidate required");
    std::vector<RankEntry> out;
    out.reserve(ids.size());
    for (std::size_t c = 0; c < ids.size(); ++c) {
        const auto& row = distances[c];
        if (row.empty()) throw ConfigError("rank: at least one query tuple required");
        RankEntry e{c, std::numeric_limits<double>::infinity(), 0.0};
        for (double d : row) {
            e.rank_score = std::min(e.rank_score, d);
            e.tie_score += d;
        }
        e.tie_score /= static_cast<double>(row.size());
        out.push_back(e);
    }
    std::sort(out.begin(), out.end(), [&](const RankEntry& a, const RankEntry& b) {
        if (a.rank_score != b.rank_score) return a.rank_score > b.rank_score;
        if (a.tie_score != b.tie_score) return a.tie_score > b.tie_score;
        return ids[a.candidate] < ids[b.candidate];
    });
    return out;
}

/// Ranks the given rows of `lake` against all query tuples.
inline std::vector<RankedTuple> rank_candidates(const Points& lake, std::span<const std::size_t> rows,
                                                const Points& query) {
    if (query.size() == 0) throw ConfigError("rank_candidates: at least one query tuple required");
    std::vector<TupleRef> ids;
    std::vector<std::vector<double>> dist(rows.size(), std::vector<double>(query.size()));
    for (std::size_t c = 0; c < rows.size(); ++c) {
        ids.push_back(lake.matrix().id(rows[c]));
        for (std::size_t q = 0; q < query.size(); ++q) dist[c][q] = lake.to(rows[c], query, q);
    }
    auto ranked = rank_by_query_distances(ids, dist);
    std::vector<RankedTuple> out;
    out.reserve(ranked.size());
    for (const auto& r : ranked) out.push_back({ids[r.candidate], rows[r.candidate], r.rank_score, r.tie_score});
    return out;
}

namespace detail {

inline DiverseResult finish(std::string name, const Points& lake, std::span<const std::size_t> rows,
                            const Points& query) {
    DiverseResult res;
    res.algorithm = std::move(name);
    res.selected = rank_candidates(lake, rows, query);
    std::vector<std::size_t> sel = res.rows();
    res.metrics = metrics::diversity(query, lake, sel);
    return res;
}

inline void require_pool(const EmbeddingMatrix& lake, std::size_t k) {
    if (lake.size() < k) {
        throw ConfigError("only " + std::to_string(lake.size()) + " unionable tuples available, k=" + std::to_string(k));
    }
}

inline void check_dims(const EmbeddingMatrix& q, const EmbeddingMatrix& t) {
    if (q.empty()) throw ConfigError("no query tuples");
    if (q.dim() != t.dim()) throw ConfigError("query and lake embeddings differ in dimension");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// DUST: prune -> cluster medoids -> re-rank -> top-k
// ---------------------------------------------------------------------------

inline DiverseResult diversify_dust(const EmbeddingMatrix& query, const EmbeddingMatrix& lake,
                                    const DiversifyParams& params) {
    validate(params);
    detail::check_dims(query, lake);
    detail::require_pool(lake, params.k);
    Points qp(query, params.metric);
    auto pruned = prune_tuples(lake, params.s, params.metric);
    EmbeddingMatrix sub = lake.subset(pruned.kept);
    Points sp(sub, params.metric);
    std::vector<std::string> warnings;
    std::size_t n = params.k * params.p;
    if (n > sub.size()) {
        warnings.push_back("k*p=" + std::to_string(n) + " clamped to " + std::to_string(sub.size()) + " tuples");
        n = sub.size();
    }
    auto med = cluster_medoids(sp, n);
    auto ranked = rank_candidates(sp, med.medoids, qp);
    ranked.resize(params.k);
    std::vector<std::size_t> rows;
    for (const auto& r : ranked) rows.push_back(pruned.kept[r.row]);
    Points lp(lake, params.metric);
    auto res = detail::finish("dust", lp, rows, qp);
    res.warnings = std::move(warnings);
    return res;
}

// ---------------------------------------------------------------------------
// GMC / GNE
// ---------------------------------------------------------------------------

/// Relevance of each lake tuple: mean distance to the query tuples.
inline std::vector<double> relevance(const Points& lake, const Points& query) {
    std::vector<double> rel(lake.size(), 0.0);
    for (std::size_t u = 0; u < lake.size(); ++u) {
        double s = 0.0;
        for (std::size_t q = 0; q < query.size(); ++q) s += lake.to(u, query, q);
        rel[u] = s / static_cast<double>(query.size());
    }
    return rel;
}

/// MMR objective F(R) = (k-1)(1-lambda) sum rel + 2 lambda sum_{pairs} dist.
/// (k-1) is floored at 1 so that k = 1 still ranks by relevance.
inline double mmr_objective(const Points& lake, std::span<const double> rel, std::span<const std::size_t> set,
                            std::size_t k, double lambda) {
    const double scale = static_cast<double>(std::max<std::size_t>(k, 2) - 1);
    double r = 0.0, d = 0.0;
    for (std::size_t i = 0; i < set.size(); ++i) {
        r += rel[set[i]];
        for (std::size_t j = i + 1; j < set.size(); ++j) d += lake.between(set[i], set[j]);
    }
    return scale * (1.0 - lambda) * r + 2.0 * lambda * d;
}

/// Marginal-contribution state shared by GMC and GNE construction.
class MarginalContribution {
public:
    MarginalContribution(const Points& lake, const Points& query, std::size_t k, double lambda)
        : lake_(lake), k_(k), lambda_(lambda), rel_(relevance(lake, query)), div_sum_(lake.size(), 0.0),
          selected_(lake.size(), false) {
        const std::size_t m = lake.size();
        look_ = std::min(k - 1, m - 1);
        if (lambda_ == 0.0 || look_ == 0) return;
        top_.resize(m);
        std::vector<std::pair<double, std::size_t>> buf;
        buf.reserve(m);
        auto cmp = [](const auto& a, const auto& b) { return a.first > b.first || (a.first == b.first && a.second < b.second); };
        for (std::size_t u = 0; u < m; ++u) {
            buf.clear();
            for (std::size_t x = 0; x < m; ++x) {
                if (x != u) buf.emplace_back(lake.between(u, x), x);
            }
            std::nth_element(buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(look_ - 1), buf.end(), cmp);
            buf.resize(look_);
            std::sort(buf.begin(), buf.end(), cmp);
            top_[u] = buf;
        }
    }

    const std::vector<double>& rel() const { return rel_; }
    bool selected(std::size_t u) const { return selected_[u]; }
    std::size_t count() const { return chosen_.size(); }
    const std::vector<std::size_t>& chosen() const { return chosen_; }

    /// (1-lambda) rel(u) + lambda/(k-1) [sum_{r in R} d(u,r) + sum of the
    /// k-|R|-1 largest distances from u to unselected tuples].
    double value(std::size_t u) const {
        double v = (1.0 - lambda_) * rel_[u];
        if (lambda_ == 0.0) return v;
        const double scale = 1.0 / static_cast<double>(std::max<std::size_t>(k_, 2) - 1);
        double ahead = 0.0;
        std::size_t need = k_ - chosen_.size() - 1;
        if (need > 0 && !top_.empty()) {
            for (const auto& [d, x] : top_[u]) {
                if (need == 0) break;
                if (selected_[x]) continue;
                ahead += d;
                --need;
            }
        }
        return v + lambda_ * scale * (div_sum_[u] + ahead);
    }

    void select(std::size_t u) {
        selected_[u] = true;
        chosen_.push_back(u);
        if (lambda_ == 0.0) return;
        for (std::size_t x = 0; x < lake_.size(); ++x) {
            if (!selected_[x]) div_sum_[x] += lake_.between(x, u);
        }
    }

private:
    const Points& lake_;
    std::size_t k_;
    double lambda_;
    std::size_t look_ = 0;
    std::vector<double> rel_;
    std::vector<double> div_sum_;
    std::vector<bool> selected_;
    std::vector<std::size_t> chosen_;
    std::vector<std::vector<std::pair<double, std::size_t>>> top_;
};

/// Greedy marginal contribution: adds the tuple with the largest marginal
/// contribution each round.
inline DiverseResult gmc(const EmbeddingMatrix& query, const EmbeddingMatrix& lake, std::size_t k, double lambda,
                         Metric metric = Metric::cosine) {
    if (k < 1) throw ConfigError("k must be >= 1");
    if (lambda < 0.0 || lambda > 1.0) throw ConfigError("lambda must lie in [0, 1]");
    detail::check_dims(query, lake);
    detail::require_pool(lake, k);
    Points qp(query, metric);
    Points lp(lake, metric);
    MarginalContribution mc(lp, qp, k, lambda);
    while (mc.count() < k) {
        std::size_t best = lake.size();
        double best_v = -std::numeric_limits<double>::infinity();
        for (std::size_t u = 0; u < lake.size(); ++u) {
            if (mc.selected(u)) continue;
            double v = mc.value(u);
            if (v > best_v || (v == best_v && lake.id(u) < lake.id(best))) {
                best_v = v;
                best = u;
            }
        }
        mc.select(best);
    }
    return detail::finish("gmc", lp, mc.chosen(), qp);
}

/// GRASP with neighbourhood expansion: randomized greedy construction from
/// the top-alpha marginal contributors, then swap-based local search on F.
/// Returns the best set over all iterations.
inline DiverseResult gne(const EmbeddingMatrix& query, const EmbeddingMatrix& lake, std::size_t k, double lambda,
                         std::size_t iterations, std::uint64_t seed, std::size_t alpha = 3,
                         Metric metric = Metric::cosine) {
    if (k < 1) throw ConfigError("k must be >= 1");
    if (iterations < 1) throw ConfigError("GNE iterations must be >= 1");
    if (alpha < 1) throw ConfigError("GNE alpha must be >= 1");
    if (lambda < 0.0 || lambda > 1.0) throw ConfigError("lambda must lie in [0, 1]");
    detail::check_dims(query, lake);
    detail::require_pool(lake, k);
    Points qp(query, metric);
    Points lp(lake, metric);
    const std::size_t m = lake.size();
    std::mt19937_64 rng(seed);
    const MarginalContribution base(lp, qp, k, lambda);
    const auto& rel = base.rel();
    const double rel_w = static_cast<double>(std::max<std::size_t>(k, 2) - 1) * (1.0 - lambda);

    std::vector<std::size_t> best_set;
    double best_f = -std::numeric_limits<double>::infinity();
    for (std::size_t it = 0; it < iterations; ++it) {
        MarginalContribution mc = base;
        while (mc.count() < k) {
            std::vector<std::pair<double, std::size_t>> cands;
            for (std::size_t u = 0; u < m; ++u) {
                if (!mc.selected(u)) cands.emplace_back(mc.value(u), u);
            }
            std::size_t take = std::min(alpha, cands.size());
            std::partial_sort(cands.begin(), cands.begin() + static_cast<std::ptrdiff_t>(take), cands.end(),
                              [&](const auto& a, const auto& b) {
                                  return a.first > b.first || (a.first == b.first && lake.id(a.second) < lake.id(b.second));
                              });
            std::uniform_int_distribution<std::size_t> pick(0, take - 1);
            mc.select(cands[pick(rng)].second);
        }
        std::vector<std::size_t> set = mc.chosen();
        std::vector<bool> in(m, false);
        for (auto u : set) in[u] = true;
        // contrib[x] = sum of distances from x to the current set
        std::vector<double> contrib(m, 0.0);
        if (lambda > 0.0) {
            for (std::size_t x = 0; x < m; ++x) {
                for (auto u : set) contrib[x] += lp.between(x, u);
            }
        }
        bool improved = true;
        while (improved) {
            improved = false;
            std::vector<std::size_t> positions(set.size());
            std::iota(positions.begin(), positions.end(), 0);
            std::shuffle(positions.begin(), positions.end(), rng);
            for (auto pos : positions) {
                const std::size_t r = set[pos];
                for (std::size_t u = 0; u < m && !improved; ++u) {
                    if (in[u]) continue;
                    double delta = rel_w * (rel[u] - rel[r]);
                    if (lambda > 0.0) delta += 2.0 * lambda * (contrib[u] - lp.between(u, r) - contrib[r]);
                    if (delta > 1e-12) {
                        set[pos] = u;
                        in[r] = false;
                        in[u] = true;
                        if (lambda > 0.0) {
                            for (std::size_t x = 0; x < m; ++x) contrib[x] += lp.between(x, u) - lp.between(x, r);
                        }
                        improved = true;
                    }
                }
                if (improved) break;
            }
        }
        double f = mmr_objective(lp, rel, set, k, lambda);
        if (f > best_f + 1e-12) {
            best_f = f;
            best_set = set;
        }
    }
    return detail::finish("gne", lp, best_set, qp);
}

/// The lambda at which F(R) is proportional to (n + k) * Average Diversity
/// for n query tuples.
inline double lambda_for_average_diversity(std::size_t n_query, std::size_t k) {
    if (k <= 1) return 0.0;
    return static_cast<double>(k - 1) / static_cast<double>(2 * n_query + k - 1);
}

// ---------------------------------------------------------------------------
// CLT, random and exhaustive baselines
// ---------------------------------------------------------------------------

/// One medoid per cluster for k clusters, using the same clustering as DUST.
inline DiverseResult clt(const EmbeddingMatrix& query, const EmbeddingMatrix& lake, std::size_t k,
                         Metric metric = Metric::cosine) {
    if (k < 1) throw ConfigError("k must be >= 1");
    detail::check_dims(query, lake);
    detail::require_pool(lake, k);
    Points qp(query, metric);
    Points lp(lake, metric);
    auto med = cluster_medoids(lp, k);
    return detail::finish("clt", lp, med.medoids, qp);
}

/// Uniform samples without replacement, one result per seed.
inline std::vector<DiverseResult> random_select(const EmbeddingMatrix& query, const EmbeddingMatrix& lake,
                                                std::size_t k, std::span<const std::uint64_t> seeds,
                                                Metric metric = Metric::cosine) {
    if (k < 1) throw ConfigError("k must be >= 1");
    detail::check_dims(query, lake);
    detail::require_pool(lake, k);
    Points qp(query, metric);
    Points lp(lake, metric);
    std::vector<DiverseResult> out;
    for (auto seed : seeds) {
        std::mt19937_64 rng(seed);
        std::vector<std::size_t> idx(lake.size());
        std::iota(idx.begin(), idx.end(), 0);
        for (std::size_t i = 0; i < k; ++i) {
            std::uniform_int_distribution<std::size_t> pick(i, idx.size() - 1);
            std::swap(idx[i], idx[pick(rng)]);
        }
        idx.resize(k);
        std::sort(idx.begin(), idx.end());
        out.push_back(detail::finish("random", lp, idx, qp));
    }
    return out;
}

/// Best-of-seeds random baseline for one metric.
inline DiverseResult best_random(const std::vector<DiverseResult>& runs, Objective objective) {
    if (runs.empty()) throw ConfigError("best_random: no runs");
    const DiverseResult* best = &runs.front();
    for (const auto& r : runs) {
        double a = objective == Objective::max_sum ? r.metrics->average : r.metrics->min;
        double b = objective == Objective::max_sum ? best->metrics->average : best->metrics->min;
        if (a > b) best = &r;
    }
    return *best;
}

struct BruteForceResult {
    std::vector<std::size_t> rows;  // ascending id order
    double score = 0.0;
};

inline double binomial(std::size_t n, std::size_t k) {
    if (k > n) return 0.0;
    k = std::min(k, n - k);
    double c = 1.0;
    for (std::size_t i = 1; i <= k; ++i) c = c * static_cast<double>(n - k + i) / static_cast<double>(i);
    return c;
}

inline constexpr double kBruteForceLimit = 1e6;

/// Exhaustive optimum of Average Diversity (max-sum) or Min Diversity
/// (max-min). Ties go to the lexicographically smallest id set.
inline BruteForceResult brute_force_best(const EmbeddingMatrix& query, const EmbeddingMatrix& lake, std::size_t k,
                                         Objective objective, Metric metric = Metric::cosine) {
    if (k < 1) throw ConfigError("k must be >= 1");
    detail::check_dims(query, lake);
    detail::require_pool(lake, k);
    const std::size_t m = lake.size();
    if (binomial(m, k) > kBruteForceLimit) {
        throw ConfigError("brute force over C(" + std::to_string(m) + "," + std::to_string(k) + ") subsets exceeds the guard");
    }
    Points qp(query, metric);
    Points lp(lake, metric);
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return lake.id(a) < lake.id(b); });
    std::vector<std::vector<double>> dq(m, std::vector<double>(query.size()));
    std::vector<std::vector<double>> dt(m, std::vector<double>(m, 0.0));
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t q = 0; q < query.size(); ++q) dq[i][q] = lp.to(order[i], qp, q);
        for (std::size_t j = i + 1; j < m; ++j) dt[i][j] = dt[j][i] = lp.between(order[i], order[j]);
    }
    std::vector<std::size_t> comb(k);
    std::iota(comb.begin(), comb.end(), 0);
    BruteForceResult best;
    best.score = -std::numeric_limits<double>::infinity();
    while (true) {
        auto s = metrics::detail::score(
            query.size(), k, [&](std::size_t q, std::size_t j) { return dq[comb[j]][q]; },
            [&](std::size_t i, std::size_t j) { return dt[comb[i]][comb[j]]; });
        double v = objective == Objective::max_sum ? s.average : s.min;
        if (v > best.score) {
            best.score = v;
            best.rows.clear();
            for (auto c : comb) best.rows.push_back(order[c]);
        }
        std::size_t i = k;
        while (i > 0 && comb[i - 1] == m - k + i - 1) --i;
        if (i == 0) break;
        ++comb[i - 1];
        for (std::size_t j = i; j < k; ++j) comb[j] = comb[j - 1] + 1;
    }
    return best;
}

// ---------------------------------------------------------------------------
// Registry
// ---------------------------------------------------------------------------

inline const std::vector<std::string>& algorithm_names() {
    static const std::vector<std::string> names{"dust", "gmc", "gne", "clt", "random"};
    return names;
}

/// Runs one named algorithm. Pruning applies to every algorithm when s is set.
/// "random" returns the best-of-5-seeds set for `params.objective`.
inline DiverseResult run_algorithm(const std::string& name, const EmbeddingMatrix& query, const EmbeddingMatrix& lake,
                                   const DiversifyParams& params) {
    validate(params);
    if (name == "dust") return diversify_dust(query, lake, params);
    detail::check_dims(query, lake);
    detail::require_pool(lake, params.k);
    auto pruned = prune_tuples(lake, params.s, params.metric);
    EmbeddingMatrix sub = lake.subset(pruned.kept);
    DiverseResult r;
    if (name == "gmc") {
        r = gmc(query, sub, params.k, params.lambda, params.metric);
    } else if (name == "gne") {
        r = gne(query, sub, params.k, params.lambda, params.gne_iterations, params.seed, params.gne_alpha, params.metric);
    } else if (name == "clt") {
        r = clt(query, sub, params.k, params.metric);
    } else if (name == "random") {
        std::vector<std::uint64_t> seeds;
        for (std::uint64_t i = 0; i < 5; ++i) seeds.push_back(params.seed + i);
        r = best_random(random_select(query, sub, params.k, seeds, params.metric), params.objective);
    } else {
        throw ConfigError("unknown algorithm '" + name + "'");
    }
    for (auto& t : r.selected) t.row = pruned.kept[t.row];
    return r;
}

}  // namespace dust::diversify
