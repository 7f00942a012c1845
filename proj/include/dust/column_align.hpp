#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "dust/common.hpp"
#include "dust/distance.hpp"
#include "dust/lake_model.hpp"

namespace dust::align {

using lake::ColumnRef;
using lake::Table;

class ConstraintInfeasibleError : public Error {
public:
    using Error::Error;
};

// ---------------------------------------------------------------------------
// Token statistics
// ---------------------------------------------------------------------------

/// All token streams of one column (cells concatenated in row order).
inline std::vector<std::string> column_tokens(const Table& t, std::size_t col) {
    std::vector<std::string> out;
    for (const auto& r : t.rows) {
        if (!r[col]) continue;
        auto toks = text::tokenize(*r[col]);
        out.insert(out.end(), std::make_move_iterator(toks.begin()), std::make_move_iterator(toks.end()));
    }
    return out;
}

/// Column-document frequencies over every column taking part in one run.
class TokenCorpus {
public:
    TokenCorpus() = default;

    void add_document(std::span<const std::string> tokens) {
        std::set<std::string_view> distinct(tokens.begin(), tokens.end());
        for (auto tok : distinct) ++df_[std::string(tok)];
        ++docs_;
    }

    std::size_t documents() const { return docs_; }

    std::size_t document_frequency(const std::string& tok) const {
        auto it = df_.find(tok);
        return it == df_.end() ? 0 : it->second;
    }

    // Smoothed: ln((1 + N) / (1 + df)) + 1, so a token seen in every column
    // still carries weight 1.
    double idf(const std::string& tok) const {
        return std::log((1.0 + static_cast<double>(docs_)) /
                        (1.0 + static_cast<double>(document_frequency(tok)))) +
               1.0;
    }

private:
    std::unordered_map<std::string, std::size_t> df_;
    std::size_t docs_ = 0;
};

inline constexpr std::size_t kMaxColumnTokens = 512;

/// Distinct tokens of a column ranked by tf * idf (descending), ties kept in
/// first-occurrence order, truncated to max_tokens.
inline std::vector<std::string> tfidf_select_tokens(std::span<const std::string> tokens,
                                                    const TokenCorpus& corpus,
                                                    std::size_t max_tokens = kMaxColumnTokens) {
    if (max_tokens == 0) throw ConfigError("tfidf_select_tokens: max_tokens must be >= 1");
    if (tokens.empty()) return {};
    std::vector<std::string> order;
    std::unordered_map<std::string, std::size_t> counts;
    for (const auto& t : tokens) {
        if (counts[t]++ == 0) order.push_back(t);
    }
    const double total = static_cast<double>(tokens.size());
    std::vector<std::pair<double, std::size_t>> scored;
    scored.reserve(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        double tf = static_cast<double>(counts[order[i]]) / total;
        scored.emplace_back(tf * corpus.idf(order[i]), i);
    }
    std::stable_sort(scored.begin(), scored.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    std::vector<std::string> out;
    for (std::size_t i = 0; i < scored.size() && out.size() < max_tokens; ++i) {
        out.push_back(order[scored[i].second]);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Column embeddings
// ---------------------------------------------------------------------------

enum class EmbedMode { cell_level, column_level };

struct ColumnVector {
    ColumnRef column;
    Vec vec;
};

class ColumnEmbedder {
public:
    virtual ~ColumnEmbedder() = default;
    virtual std::size_t dim() const = 0;
    virtual Vec embed_tokens(std::span<const std::string> tokens, const TokenCorpus& corpus) const = 0;
    /// Providers holding precomputed column vectors answer here instead.
    virtual std::optional<Vec> lookup(const ColumnRef&) const { return std::nullopt; }
};

/// Hashed bag of tokens weighted by corpus idf, L2-normalized.
class HashedColumnEmbedder final : public ColumnEmbedder {
public:
    explicit HashedColumnEmbedder(std::size_t dim = 256) : dim_(dim) {
        if (dim_ == 0) throw ConfigError("column embedder dimension must be > 0");
    }

    std::size_t dim() const override { return dim_; }

    Vec embed_tokens(std::span<const std::string> tokens, const TokenCorpus& corpus) const override {
        Vec v(dim_, 0.0);
        std::unordered_map<std::string_view, double> idf_cache;
        for (const auto& t : tokens) {
            auto [it, fresh] = idf_cache.try_emplace(t, 0.0);
            if (fresh) it->second = corpus.idf(t);
            v[text::fnv1a(t) % dim_] += it->second;
        }
        double n = std::sqrt(dot(v, v));
        if (n > 0.0) {
            for (auto& x : v) x /= n;
        }
        return v;
    }

private:
    std::size_t dim_;
};

/// Column vectors supplied from outside (see io::read_column_embeddings).
class ImportedColumnEmbedder final : public ColumnEmbedder {
public:
    ImportedColumnEmbedder(std::size_t dim, std::map<std::pair<std::string, std::size_t>, Vec> vectors)
        : dim_(dim), vectors_(std::move(vectors)) {}

    std::size_t dim() const override { return dim_; }

    Vec embed_tokens(std::span<const std::string>, const TokenCorpus&) const override {
        throw Error("imported column embeddings cannot embed raw tokens");
    }

    std::optional<Vec> lookup(const ColumnRef& c) const override {
        auto it = vectors_.find({c.table, c.index});
        if (it == vectors_.end()) {
            throw Error("no imported embedding for column " + c.table + "." + std::to_string(c.index));
        }
        return it->second;
    }

private:
    std::size_t dim_;
    std::map<std::pair<std::string, std::size_t>, Vec> vectors_;
};

inline void check_vector(const Vec& v, std::size_t dim, const std::string& what) {
    if (v.size() != dim) {
        throw Error(what + ": dimension " + std::to_string(v.size()) + ", expected " + std::to_string(dim));
    }
    for (double x : v) {
        if (!std::isfinite(x)) throw Error(what + ": non-finite component");
    }
}

inline ColumnVector embed_column(const Table& t, std::size_t col, const ColumnEmbedder& provider,
                                 EmbedMode mode, const TokenCorpus& corpus,
                                 std::size_t max_tokens = kMaxColumnTokens) {
    ColumnVector out{t.column(col), {}};
    const std::string what = "embedding of column " + t.name + "." + std::to_string(col);
    if (auto v = provider.lookup(out.column)) {
        check_vector(*v, provider.dim(), what);
        out.vec = std::move(*v);
        return out;
    }
    if (mode == EmbedMode::column_level) {
        auto stream = column_tokens(t, col);
        auto selected = tfidf_select_tokens(stream, corpus, max_tokens);
        std::set<std::string> keep(selected.begin(), selected.end());
        std::vector<std::string> filtered;
        for (auto& tok : stream) {
            if (keep.count(tok)) filtered.push_back(std::move(tok));
        }
        out.vec = provider.embed_tokens(filtered, corpus);
        check_vector(out.vec, provider.dim(), what);
        return out;
    }
    out.vec.assign(provider.dim(), 0.0);
    std::size_t cells = 0;
    for (const auto& r : t.rows) {
        if (!r[col]) continue;
        auto toks = text::tokenize(*r[col]);
        if (toks.empty()) continue;
        auto cv = provider.embed_tokens(toks, corpus);
        check_vector(cv, provider.dim(), what);
        for (std::size_t i = 0; i < cv.size(); ++i) out.vec[i] += cv[i];
        ++cells;
    }
    if (cells > 0) {
        for (auto& x : out.vec) x /= static_cast<double>(cells);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Cannot-link constrained agglomerative clustering (average linkage, Euclidean)
// ---------------------------------------------------------------------------

/// Runs the constrained merge sequence to exhaustion once. Merges are greedy
/// and never depend on the target cluster count, so the clustering for any n
/// is the prefix of this sequence that leaves n clusters.
class ConstrainedAgglomeration {
public:
    ConstrainedAgglomeration(std::span<const Vec> points, std::span<const std::string> groups)
        : n_(points.size()) {
        if (groups.size() != points.size()) throw ConfigError("one group label per point required");
        std::map<std::string, std::size_t> gid;
        std::vector<std::size_t> group_of(n_);
        std::map<std::size_t, std::size_t> per_group;
        for (std::size_t i = 0; i < n_; ++i) {
            group_of[i] = gid.try_emplace(groups[i], gid.size()).first->second;
            max_group_size_ = std::max(max_group_size_, ++per_group[group_of[i]]);
        }
        run(points, group_of, gid.size());
    }

    std::size_t size() const { return n_; }
    /// Fewest clusters the constrained merge sequence reaches.
    std::size_t min_clusters() const { return n_ - merges_.size(); }
    /// Largest number of points sharing one group; no feasible clustering has fewer clusters.
    std::size_t max_group_size() const { return max_group_size_; }

    /// Labels 0..n-1 numbered by each cluster's smallest member index.
    std::vector<std::size_t> labels(std::size_t n_clusters) const {
        if (n_clusters == 0 || n_clusters > n_) {
            throw ConfigError("n_clusters must be in [1, " + std::to_string(n_) + "]");
        }
        if (n_clusters < max_group_size_) {
            throw ConstraintInfeasibleError("cannot form " + std::to_string(n_clusters) +
                                            " clusters: one table has " + std::to_string(max_group_size_) +
                                            " columns");
        }
        if (n_clusters < min_clusters()) {
            throw ConstraintInfeasibleError("constrained merging stalls at " + std::to_string(min_clusters()) +
                                            " clusters; " + std::to_string(n_clusters) + " unreachable");
        }
        std::vector<std::size_t> slot(n_);
        std::iota(slot.begin(), slot.end(), 0);
        for (std::size_t m = 0; m < n_ - n_clusters; ++m) {
            for (auto& s : slot) {
                if (s == merges_[m].second) s = merges_[m].first;
            }
        }
        std::map<std::size_t, std::size_t> relabel;
        for (auto s : slot) relabel.try_emplace(s, 0);
        std::size_t next = 0;
        for (auto& [s, l] : relabel) l = next++;
        std::vector<std::size_t> out(n_);
        for (std::size_t i = 0; i < n_; ++i) out[i] = relabel[slot[i]];
        return out;
    }

    const std::vector<std::pair<std::size_t, std::size_t>>& merges() const { return merges_; }

private:
    void run(std::span<const Vec> points, const std::vector<std::size_t>& group_of, std::size_t n_groups) {
        const double inf = std::numeric_limits<double>::infinity();
        std::vector<double> avg(n_ * n_, 0.0);
        for (std::size_t i = 0; i < n_; ++i) {
            for (std::size_t j = i + 1; j < n_; ++j) {
                double d = euclidean_distance(points[i], points[j]);
                avg[i * n_ + j] = avg[j * n_ + i] = d;
            }
        }
        std::vector<std::vector<bool>> groups(n_, std::vector<bool>(n_groups, false));
        for (std::size_t i = 0; i < n_; ++i) groups[i][group_of[i]] = true;
        std::vector<std::size_t> size(n_, 1);
        std::vector<bool> active(n_, true);
        auto disjoint = [&](std::size_t a, std::size_t b) {
            for (std::size_t g = 0; g < n_groups; ++g) {
                if (groups[a][g] && groups[b][g]) return false;
            }
            return true;
        };
        for (std::size_t step = 0; step + 1 < n_; ++step) {
            double best = inf;
            std::size_t bi = n_, bj = n_;
            for (std::size_t i = 0; i < n_; ++i) {
                if (!active[i]) continue;
                for (std::size_t j = i + 1; j < n_; ++j) {
                    if (!active[j] || avg[i * n_ + j] >= best) continue;
                    if (!disjoint(i, j)) continue;
                    best = avg[i * n_ + j];
                    bi = i;
                    bj = j;
                }
            }
            if (bi == n_) break;
            const double si = static_cast<double>(size[bi]);
            const double sj = static_cast<double>(size[bj]);
            for (std::size_t x = 0; x < n_; ++x) {
                if (!active[x] || x == bi || x == bj) continue;
                double d = (si * avg[bi * n_ + x] + sj * avg[bj * n_ + x]) / (si + sj);
                avg[bi * n_ + x] = avg[x * n_ + bi] = d;
            }
            size[bi] += size[bj];
            active[bj] = false;
            for (std::size_t g = 0; g < n_groups; ++g) groups[bi][g] = groups[bi][g] || groups[bj][g];
            merges_.emplace_back(bi, bj);
        }
    }

    std::size_t n_;
    std::size_t max_group_size_ = 0;
    std::vector<std::pair<std::size_t, std::size_t>> merges_;
};

inline std::vector<std::string> groups_of(std::span<const ColumnVector> vectors) {
    std::vector<std::string> g;
    g.reserve(vectors.size());
    for (const auto& v : vectors) g.push_back(v.column.table);
    return g;
}

inline std::vector<Vec> points_of(std::span<const ColumnVector> vectors) {
    std::vector<Vec> p;
    p.reserve(vectors.size());
    for (const auto& v : vectors) p.push_back(v.vec);
    return p;
}

/// Cluster labels for exactly n_clusters under the cannot-link constraint.
inline std::vector<std::size_t> constrained_agglomerative(std::span<const ColumnVector> vectors,
                                                          std::size_t n_clusters) {
    auto pts = points_of(vectors);
    auto grp = groups_of(vectors);
    return ConstrainedAgglomeration(pts, grp).labels(n_clusters);
}

/// Mean silhouette coefficient under Euclidean distance. Points in singleton
/// clusters score 0.
inline double silhouette(std::span<const Vec> points, std::span<const std::size_t> labels) {
    const std::size_t n = points.size();
    if (labels.size() != n) throw ConfigError("silhouette: one label per point required");
    std::size_t k = 0;
    for (auto l : labels) k = std::max(k, l + 1);
    std::vector<std::size_t> count(k, 0);
    for (auto l : labels) ++count[l];
    if (k < 2) throw Error("silhouette undefined for a single cluster");
    for (auto c : count) {
        if (c == 0) throw Error("silhouette: empty cluster label");
    }
    std::vector<double> d(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) d[i * n + j] = d[j * n + i] = euclidean_distance(points[i], points[j]);
    }
    double total = 0.0;
    std::vector<double> sums(k);
    for (std::size_t i = 0; i < n; ++i) {
        if (count[labels[i]] == 1) continue;
        std::fill(sums.begin(), sums.end(), 0.0);
        for (std::size_t j = 0; j < n; ++j) sums[labels[j]] += d[i * n + j];
        double a = sums[labels[i]] / static_cast<double>(count[labels[i]] - 1);
        double b = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < k; ++c) {
            if (c != labels[i]) b = std::min(b, sums[c] / static_cast<double>(count[c]));
        }
        double m = std::max(a, b);
        total += m > 0.0 ? (b - a) / m : 0.0;
    }
    return total / static_cast<double>(n);
}

struct ClusterCountChoice {
    std::size_t n_clusters = 0;
    double score = 0.0;
    std::vector<std::pair<std::size_t, double>> scores;  // (n, silhouette) for every n tried
};

inline ClusterCountChoice select_cluster_count(const ConstrainedAgglomeration& agg,
                                               std::span<const Vec> points) {
    const std::size_t m = agg.size();
    if (m < 3) throw ConfigError("select_cluster_count needs at least 3 vectors");
    std::size_t lo = std::max<std::size_t>({2, agg.max_group_size(), agg.min_clusters()});
    std::size_t hi = m - 1;
    if (lo > hi) throw ConstraintInfeasibleError("no feasible cluster count in [2, |vectors|-1]");
    ClusterCountChoice best;
    best.score = -std::numeric_limits<double>::infinity();
    for (std::size_t n = lo; n <= hi; ++n) {
        auto labels = agg.labels(n);
        double s = silhouette(points, labels);
        best.scores.emplace_back(n, s);
        if (s > best.score) {
            best.score = s;
            best.n_clusters = n;
        }
    }
    return best;
}

/// Silhouette-maximizing cluster count; ties go to the smaller count.
inline std::size_t select_cluster_count(std::span<const ColumnVector> vectors) {
    auto pts = points_of(vectors);
    auto grp = groups_of(vectors);
    ConstrainedAgglomeration agg(pts, grp);
    return select_cluster_count(agg, pts).n_clusters;
}

// ---------------------------------------------------------------------------
// Alignment
// ---------------------------------------------------------------------------

struct AlignedCluster {
    ColumnRef anchor;
    std::vector<ColumnRef> members;
};

struct AlignmentMap {
    std::vector<AlignedCluster> clusters;  // one per query column, in query column order
    std::vector<ColumnRef> discarded;
    std::size_t n_clusters = 0;
    std::optional<double> silhouette;
};

/// Aligns lake columns to query columns. Lake tables are processed in name
/// order, so the result does not depend on the order they are passed in.
inline AlignmentMap align_columns(const Table& query, std::span<const Table> lake_tables,
                                  const ColumnEmbedder& provider, EmbedMode mode,
                                  std::size_t max_tokens = kMaxColumnTokens) {
    std::vector<const Table*> tables{&query};
    std::vector<const Table*> sorted;
    for (const auto& t : lake_tables) sorted.push_back(&t);
    std::sort(sorted.begin(), sorted.end(), [](const Table* a, const Table* b) { return a->name < b->name; });
    tables.insert(tables.end(), sorted.begin(), sorted.end());
    {
        std::set<std::string> names;
        for (const auto* t : tables) {
            if (!names.insert(t->name).second) throw ConfigError("duplicate table name '" + t->name + "' in alignment");
        }
    }

    TokenCorpus corpus;
    for (const auto* t : tables) {
        for (std::size_t c = 0; c < t->num_columns(); ++c) corpus.add_document(column_tokens(*t, c));
    }
    std::vector<ColumnVector> vectors;
    for (const auto* t : tables) {
        for (std::size_t c = 0; c < t->num_columns(); ++c) {
            vectors.push_back(embed_column(*t, c, provider, mode, corpus, max_tokens));
        }
    }

    auto pts = points_of(vectors);
    auto grp = groups_of(vectors);
    ConstrainedAgglomeration agg(pts, grp);
    AlignmentMap map;
    std::size_t lo = std::max<std::size_t>({2, agg.max_group_size(), agg.min_clusters()});
    if (vectors.size() >= 3 && lo <= vectors.size() - 1) {
        auto choice = select_cluster_count(agg, pts);
        map.n_clusters = choice.n_clusters;
        map.silhouette = choice.score;
    } else {
        // Too few columns for a silhouette search: take the most merged state.
        map.n_clusters = agg.min_clusters();
    }
    auto labels = agg.labels(map.n_clusters);

    std::vector<std::vector<std::size_t>> by_label(map.n_clusters);
    for (std::size_t i = 0; i < labels.size(); ++i) by_label[labels[i]].push_back(i);

    std::vector<std::optional<AlignedCluster>> per_query(query.num_columns());
    for (const auto& members : by_label) {
        std::vector<std::size_t> qcols;
        std::vector<ColumnRef> lake_cols;
        for (auto i : members) {
            if (vectors[i].column.table == query.name) qcols.push_back(vectors[i].column.index);
            else lake_cols.push_back(vectors[i].column);
        }
        std::sort(lake_cols.begin(), lake_cols.end());
        if (qcols.empty()) {
            map.discarded.insert(map.discarded.end(), lake_cols.begin(), lake_cols.end());
            continue;
        }
        std::sort(qcols.begin(), qcols.end());
        per_query[qcols.front()] = AlignedCluster{query.column(qcols.front()), std::move(lake_cols)};
        // Extra query columns in one cluster get their own empty anchor.
        for (std::size_t q = 1; q < qcols.size(); ++q) per_query[qcols[q]] = AlignedCluster{query.column(qcols[q]), {}};
    }
    for (std::size_t q = 0; q < per_query.size(); ++q) {
        if (!per_query[q]) per_query[q] = AlignedCluster{query.column(q), {}};
        map.clusters.push_back(std::move(*per_query[q]));
    }
    std::sort(map.discarded.begin(), map.discarded.end());
    return map;
}

// ---------------------------------------------------------------------------
// Outer union
// ---------------------------------------------------------------------------

struct UnionedTuple {
    lake::TupleRef source;
    lake::Row cells;  // one per schema anchor
};

struct UnionedTupleSet {
    std::vector<ColumnRef> anchors;
    std::vector<std::string> schema;  // anchor headers
    std::vector<UnionedTuple> tuples;
};

inline UnionedTupleSet outer_union(const Table& query, std::span<const Table> lake_tables,
                                   const AlignmentMap& map) {
    UnionedTupleSet out;
    for (const auto& c : map.clusters) {
        out.anchors.push_back(c.anchor);
        out.schema.push_back(c.anchor.header.value_or(query.headers.at(c.anchor.index)));
    }
    for (const auto& t : lake_tables) {
        std::vector<std::optional<std::size_t>> source_col(map.clusters.size());
        for (std::size_t a = 0; a < map.clusters.size(); ++a) {
            for (const auto& m : map.clusters[a].members) {
                if (m.table == t.name && (!source_col[a] || m.index < *source_col[a])) source_col[a] = m.index;
            }
        }
        for (std::size_t r = 0; r < t.num_rows(); ++r) {
            UnionedTuple tup{{t.name, r}, lake::Row(map.clusters.size())};
            for (std::size_t a = 0; a < source_col.size(); ++a) {
                if (source_col[a]) tup.cells[a] = t.rows[r].at(*source_col[a]);
            }
            out.tuples.push_back(std::move(tup));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Alignment quality
// ---------------------------------------------------------------------------

using ColumnPair = std::pair<ColumnRef, ColumnRef>;

inline ColumnPair make_pair(ColumnRef a, ColumnRef b) {
    a.header.reset();
    b.header.reset();
    if (b < a) std::swap(a, b);
    return {std::move(a), std::move(b)};
}

/// Pair set of a map: anchor-member pairs, member-member pairs within a
/// cluster, and a self pair for every anchor without members.
inline std::set<ColumnPair> alignment_pairs(const AlignmentMap& map) {
    std::set<ColumnPair> out;
    for (const auto& c : map.clusters) {
        if (c.members.empty()) {
            out.insert(make_pair(c.anchor, c.anchor));
            continue;
        }
        for (std::size_t i = 0; i < c.members.size(); ++i) {
            out.insert(make_pair(c.anchor, c.members[i]));
            for (std::size_t j = i + 1; j < c.members.size(); ++j) out.insert(make_pair(c.members[i], c.members[j]));
        }
    }
    return out;
}

struct PrecisionRecall {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

inline PrecisionRecall prf_from_counts(std::size_t hits, std::size_t predicted, std::size_t truth) {
    PrecisionRecall r;
    if (predicted == 0 && truth == 0) return {1.0, 1.0, 1.0};
    r.precision = predicted ? static_cast<double>(hits) / static_cast<double>(predicted) : 0.0;
    r.recall = truth ? static_cast<double>(hits) / static_cast<double>(truth) : 0.0;
    r.f1 = (r.precision + r.recall) > 0.0 ? 2.0 * r.precision * r.recall / (r.precision + r.recall) : 0.0;
    return r;
}

inline PrecisionRecall alignment_prf(const std::set<ColumnPair>& predicted, const std::set<ColumnPair>& truth) {
    std::size_t hits = 0;
    for (const auto& p : predicted) hits += truth.count(p);
    return prf_from_counts(hits, predicted.size(), truth.size());
}

inline PrecisionRecall alignment_prf(const AlignmentMap& predicted, const std::set<ColumnPair>& truth) {
    return alignment_prf(alignment_pairs(predicted), truth);
}

}  // namespace dust::align
