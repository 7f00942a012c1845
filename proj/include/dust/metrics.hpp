#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "dust/common.hpp"
#include "dust/distance.hpp"
#include "dust/lake_model.hpp"
#include "dust/points.hpp"

namespace dust::metrics {

struct DiversityScore {
    double average = 0.0;
    double min = 0.0;
    std::size_t n = 0;  // query tuples
    std::size_t k = 0;  // selected tuples
};

namespace detail {

// q_dist(i, j): query i to selected j; t_dist(i, j): selected i to selected j.
template <class QueryDist, class SelDist>
DiversityScore score(std::size_t n, std::size_t k, QueryDist q_dist, SelDist t_dist) {
    if (n == 0 || k == 0) throw ConfigError("diversity metrics need at least one query and one selected tuple");
    DiversityScore s{0.0, std::numeric_limits<double>::infinity(), n, k};
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            double d = q_dist(i, j);
            sum += d;
            s.min = std::min(s.min, d);
        }
    }
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i + 1; j < k; ++j) {
            double d = t_dist(i, j);
            sum += d;
            s.min = std::min(s.min, d);
        }
    }
    // Normalized by n + k, not by the number of summed pairs.
    s.average = sum / static_cast<double>(n + k);
    return s;
}

}  // namespace detail

/// Average and Min Diversity of the selected rows of `lake` against every query row.
inline DiversityScore diversity(const Points& query, const Points& lake, std::span<const std::size_t> selected) {
    return detail::score(
        query.size(), selected.size(), [&](std::size_t i, std::size_t j) { return query.to(i, lake, selected[j]); },
        [&](std::size_t i, std::size_t j) { return lake.between(selected[i], selected[j]); });
}

inline DiversityScore diversity(std::span<const Vec> query, std::span<const Vec> selected,
                                Metric metric = Metric::cosine) {
    return detail::score(
        query.size(), selected.size(),
        [&](std::size_t i, std::size_t j) { return distance(metric, query[i], selected[j]); },
        [&](std::size_t i, std::size_t j) { return distance(metric, selected[i], selected[j]); });
}

inline double average_diversity(std::span<const Vec> query, std::span<const Vec> selected,
                                Metric metric = Metric::cosine) {
    return diversity(query, selected, metric).average;
}

inline double min_diversity(std::span<const Vec> query, std::span<const Vec> selected,
                            Metric metric = Metric::cosine) {
    return diversity(query, selected, metric).min;
}

// ---------------------------------------------------------------------------
// Per-query winner tallies
// ---------------------------------------------------------------------------

struct Tally {
    std::size_t average_wins = 0;
    std::size_t min_wins = 0;
    std::size_t average_tied_wins = 0;  // wins shared with another method
    std::size_t min_tied_wins = 0;
};

using QueryScores = std::map<std::string, std::map<std::string, DiversityScore>>;

/// Highest score per query and metric earns a win; exact ties credit every tied method.
inline std::map<std::string, Tally> winner_tally(const QueryScores& per_query) {
    std::set<std::string> methods;
    for (const auto& [q, by_method] : per_query) {
        for (const auto& [m, s] : by_method) methods.insert(m);
    }
    std::map<std::string, Tally> out;
    for (const auto& m : methods) out[m];
    for (const auto& [q, by_method] : per_query) {
        for (const auto& m : methods) {
            if (!by_method.count(m)) throw Error("query '" + q + "' has no score for method '" + m + "'");
        }
        double best_avg = -std::numeric_limits<double>::infinity();
        double best_min = -std::numeric_limits<double>::infinity();
        for (const auto& [m, s] : by_method) {
            best_avg = std::max(best_avg, s.average);
            best_min = std::max(best_min, s.min);
        }
        std::size_t n_avg = 0, n_min = 0;
        for (const auto& [m, s] : by_method) {
            n_avg += s.average == best_avg;
            n_min += s.min == best_min;
        }
        for (const auto& [m, s] : by_method) {
            auto& t = out[m];
            if (s.average == best_avg) {
                ++t.average_wins;
                if (n_avg > 1) ++t.average_tied_wins;
            }
            if (s.min == best_min) {
                ++t.min_wins;
                if (n_min > 1) ++t.min_tied_wins;
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Novel values
// ---------------------------------------------------------------------------

/// Distinct normalized values the selection adds to one query column.
inline std::size_t novel_values(const lake::Table& query, std::span<const lake::Row> selected, std::size_t anchor) {
    if (anchor >= query.num_columns()) throw ConfigError("novel_values: unknown anchor column " + std::to_string(anchor));
    std::set<std::string> known;
    for (const auto& r : query.rows) {
        if (r[anchor]) known.insert(text::normalize(*r[anchor]));
    }
    std::set<std::string> fresh;
    for (const auto& r : selected) {
        if (anchor >= r.size()) throw ConfigError("novel_values: selected tuple does not match the query schema");
        if (!r[anchor]) continue;
        auto v = text::normalize(*r[anchor]);
        if (!known.count(v)) fresh.insert(std::move(v));
    }
    return fresh.size();
}

inline std::size_t novel_values(const lake::Table& query, std::span<const lake::Row> selected,
                                const std::string& header) {
    auto key = text::casefold(header);
    for (std::size_t j = 0; j < query.num_columns(); ++j) {
        if (text::casefold(query.headers[j]) == key) return novel_values(query, selected, j);
    }
    throw ConfigError("novel_values: unknown anchor column '" + header + "'");
}

}  // namespace dust::metrics
