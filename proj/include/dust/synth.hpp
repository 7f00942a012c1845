#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "dust/column_align.hpp"
#include "dust/lake_model.hpp"
#include "dust/serialize_embed.hpp"

// Seeded instance generators for experiments and tests. Everything here is
// deterministic given the seed (for a fixed standard library).
namespace dust::synth {

using embed::EmbeddingMatrix;
using lake::Table;

// ---------------------------------------------------------------------------
// Embedding-level instances: Gaussian mixture with planted duplicates
// ---------------------------------------------------------------------------

struct MixtureConfig {
    std::size_t dim = 64;
    std::size_t clusters = 20;
    std::size_t lake_tuples = 1000;
    std::size_t lake_tables = 10;
    std::size_t query_tuples = 10;
    double cluster_sd = 0.2;          // per-component spread around a unit-variance center
    double duplicate_fraction = 0.0;  // share of lake tuples that are near-copies
    double query_copy_share = 0.5;    // of the duplicates, share copying a query tuple
    std::size_t hot_tuples = 10;      // lake tuples that other duplicates copy
    double duplicate_noise = 0.005;
    std::uint64_t seed = 0;
};

struct MixtureInstance {
    EmbeddingMatrix query;
    EmbeddingMatrix lake;
};

inline MixtureInstance gaussian_mixture(const MixtureConfig& c, const std::string& query_name = "q") {
    if (c.dim == 0 || c.clusters == 0 || c.lake_tables == 0 || c.query_tuples == 0) {
        throw ConfigError("mixture generator needs positive dim, clusters, tables and query size");
    }
    if (c.duplicate_fraction < 0.0 || c.duplicate_fraction > 1.0) throw ConfigError("duplicate_fraction outside [0, 1]");
    std::mt19937_64 rng(c.seed);
    std::normal_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> pick_cluster(0, c.clusters - 1);
    std::uniform_real_distribution<double> coin(0.0, 1.0);

    std::vector<Vec> centers(c.clusters, Vec(c.dim));
    for (auto& ctr : centers) {
        for (auto& x : ctr) x = unit(rng);
    }
    auto sample = [&](std::size_t cluster) {
        Vec v(c.dim);
        for (std::size_t d = 0; d < c.dim; ++d) v[d] = centers[cluster][d] + c.cluster_sd * unit(rng);
        return v;
    };
    auto jitter = [&](const Vec& src) {
        Vec v = src;
        for (auto& x : v) x += c.duplicate_noise * unit(rng);
        return v;
    };

    MixtureInstance out{EmbeddingMatrix(c.dim, "synthetic-mixture"), EmbeddingMatrix(c.dim, "synthetic-mixture")};
    std::vector<Vec> qv;
    for (std::size_t i = 0; i < c.query_tuples; ++i) {
        qv.push_back(sample(pick_cluster(rng)));
        out.query.add({query_name, i}, qv.back());
    }

    const auto n_dup = static_cast<std::size_t>(static_cast<double>(c.lake_tuples) * c.duplicate_fraction);
    const std::size_t n_fresh = c.lake_tuples - n_dup;
    std::vector<Vec> lake;
    lake.reserve(c.lake_tuples);
    for (std::size_t i = 0; i < n_fresh; ++i) lake.push_back(sample(pick_cluster(rng)));
    const std::size_t hot = std::max<std::size_t>(1, std::min(c.hot_tuples, n_fresh));
    for (std::size_t i = 0; i < n_dup; ++i) {
        if (n_fresh == 0 || coin(rng) < c.query_copy_share) {
            lake.push_back(jitter(qv[std::uniform_int_distribution<std::size_t>(0, qv.size() - 1)(rng)]));
        } else {
            lake.push_back(jitter(lake[std::uniform_int_distribution<std::size_t>(0, hot - 1)(rng)]));
        }
    }
    std::shuffle(lake.begin(), lake.end(), rng);
    out.lake.reserve(lake.size());
    std::vector<std::size_t> next_row(c.lake_tables, 0);
    std::uniform_int_distribution<std::size_t> pick_table(0, c.lake_tables - 1);
    for (const auto& v : lake) {
        std::size_t t = pick_table(rng);
        out.lake.add({"t" + std::to_string(t), next_row[t]++}, v);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Text-level helpers
// ---------------------------------------------------------------------------

/// Distinct lowercase pseudo-words; never collide with each other.
class WordSource {
public:
    explicit WordSource(std::uint64_t seed) : rng_(seed) {}

    std::string next(std::size_t len = 7) {
        static constexpr char consonants[] = "bcdfghjklmnprstvz";
        static constexpr char vowels[] = "aeiou";
        while (true) {
            std::string w;
            for (std::size_t i = 0; i < len; ++i) {
                if (i % 2 == 0) w += consonants[std::uniform_int_distribution<int>(0, 16)(rng_)];
                else w += vowels[std::uniform_int_distribution<int>(0, 4)(rng_)];
            }
            if (used_.insert(w).second) return w;
        }
    }

    std::vector<std::string> many(std::size_t n, std::size_t len = 7) {
        std::vector<std::string> out;
        for (std::size_t i = 0; i < n; ++i) out.push_back(next(len));
        return out;
    }

private:
    std::mt19937_64 rng_;
    std::set<std::string> used_;
};

// ---------------------------------------------------------------------------
// Column-alignment benchmark: base tables split into lake tables
// ---------------------------------------------------------------------------

struct AlignmentBenchConfig {
    std::size_t base_tables = 5;
    std::size_t columns_per_table = 5;
    std::size_t lake_per_base = 4;
    std::size_t min_lake_columns = 3;
    std::size_t query_rows = 20;
    std::size_t lake_rows = 30;
    std::size_t vocabulary = 40;  // words per base column
    std::size_t noise_pool = 60;  // words shared by every column
    double noise = 0.0;           // probability that a cell is drawn from the noise pool
    std::uint64_t seed = 0;
};

struct AlignmentBench {
    std::vector<Table> queries;  // one per base table
    std::vector<Table> lake;
    std::map<std::string, std::vector<std::string>> candidates;
    std::map<std::string, std::set<align::ColumnPair>> truth;  // per query
};

/// Each base table yields one query (all columns) and several lake tables
/// holding a shuffled subset of its columns under renamed headers. Columns
/// from the same base column form the true alignment.
inline AlignmentBench alignment_benchmark(const AlignmentBenchConfig& c) {
    if (c.min_lake_columns < 1 || c.min_lake_columns > c.columns_per_table) {
        throw ConfigError("min_lake_columns must lie in [1, columns_per_table]");
    }
    std::mt19937_64 rng(c.seed);
    WordSource words(c.seed ^ 0x9e3779b97f4a7c15ULL);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    const auto noise_pool = words.many(c.noise_pool);
    AlignmentBench out;

    for (std::size_t b = 0; b < c.base_tables; ++b) {
        std::vector<std::vector<std::string>> vocab;
        for (std::size_t j = 0; j < c.columns_per_table; ++j) vocab.push_back(words.many(c.vocabulary));
        auto cell = [&](std::size_t col) {
            const auto& pool = coin(rng) < c.noise ? noise_pool : vocab[col];
            std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
            std::string v = pool[pick(rng)];
            if (coin(rng) < 0.5) v += " " + pool[pick(rng)];
            return lake::Cell(v);
        };

        Table q{"base" + std::to_string(b) + "_query", lake::Role::query, {}, {}};
        for (std::size_t j = 0; j < c.columns_per_table; ++j) q.headers.push_back("attr" + std::to_string(j));
        for (std::size_t r = 0; r < c.query_rows; ++r) {
            lake::Row row;
            for (std::size_t j = 0; j < c.columns_per_table; ++j) row.push_back(cell(j));
            q.rows.push_back(std::move(row));
        }
        // groups[j] = every column derived from base column j
        std::vector<std::vector<lake::ColumnRef>> groups(c.columns_per_table);
        for (std::size_t j = 0; j < c.columns_per_table; ++j) groups[j].push_back({q.name, j, std::nullopt});

        for (std::size_t l = 0; l < c.lake_per_base; ++l) {
            std::vector<std::size_t> cols(c.columns_per_table);
            std::iota(cols.begin(), cols.end(), 0);
            std::shuffle(cols.begin(), cols.end(), rng);
            std::uniform_int_distribution<std::size_t> width(c.min_lake_columns, c.columns_per_table);
            cols.resize(width(rng));
            Table t{"base" + std::to_string(b) + "_part" + std::to_string(l), lake::Role::lake, {}, {}};
            for (std::size_t i = 0; i < cols.size(); ++i) {
                t.headers.push_back("field_" + words.next(4));
                groups[cols[i]].push_back({t.name, i, std::nullopt});
            }
            for (std::size_t r = 0; r < c.lake_rows; ++r) {
                lake::Row row;
                for (auto j : cols) row.push_back(cell(j));
                t.rows.push_back(std::move(row));
            }
            out.candidates[q.name].push_back(t.name);
            out.lake.push_back(std::move(t));
        }
        auto& truth = out.truth[q.name];
        for (const auto& g : groups) {
            if (g.size() == 1) truth.insert(align::make_pair(g[0], g[0]));
            for (std::size_t i = 0; i < g.size(); ++i) {
                for (std::size_t j = i + 1; j < g.size(); ++j) truth.insert(align::make_pair(g[i], g[j]));
            }
        }
        out.queries.push_back(std::move(q));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Duplicated lake for the novel-values case study
// ---------------------------------------------------------------------------

struct DuplicatedLakeConfig {
    std::size_t query_rows = 10;
    std::size_t copy_tables = 4;   // tables of near-copies of query rows
    std::size_t copy_rows = 25;
    std::size_t novel_tables = 2;  // tables mixing copies and new entities
    std::size_t novel_rows = 25;
    double novel_share = 0.6;      // share of new entities in a novel table
    std::uint64_t seed = 0;
};

struct DuplicatedLake {
    Table query;
    std::vector<Table> lake;
};

/// Park-style tables (name, city, country). Copy tables repeat query rows
/// with case and whitespace changes only, so they dominate any similarity
/// ranking while adding no new values.
inline DuplicatedLake duplicated_lake(const DuplicatedLakeConfig& c) {
    if (c.query_rows < lake::kMinQueryRows) throw ConfigError("query needs at least 3 rows");
    std::mt19937_64 rng(c.seed);
    WordSource words(c.seed + 17);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    const std::vector<std::string> countries{"USA", "Canada", "Mexico"};
    auto entity = [&] {
        std::string name = words.next(6);
        name[0] = static_cast<char>(name[0] - 'a' + 'A');
        std::string city = words.next(5);
        city[0] = static_cast<char>(city[0] - 'a' + 'A');
        return lake::Row{name + " Park", city, countries[std::uniform_int_distribution<std::size_t>(0, 2)(rng)]};
    };
    auto variant = [&](const lake::Row& r) {
        lake::Row out = r;
        for (auto& cell : out) {
            double u = coin(rng);
            if (u < 0.3) cell = text::casefold(*cell);
            else if (u < 0.5) cell = " " + *cell + " ";
        }
        return out;
    };

    DuplicatedLake out;
    out.query = Table{"parks_query", lake::Role::query, {"Park Name", "City", "Country"}, {}};
    for (std::size_t i = 0; i < c.query_rows; ++i) out.query.rows.push_back(entity());
    std::uniform_int_distribution<std::size_t> pick_q(0, c.query_rows - 1);
    for (std::size_t t = 0; t < c.copy_tables; ++t) {
        Table tab{"copy" + std::to_string(t), lake::Role::lake, {"Park Name", "City", "Country"}, {}};
        for (std::size_t r = 0; r < c.copy_rows; ++r) tab.rows.push_back(variant(out.query.rows[pick_q(rng)]));
        out.lake.push_back(std::move(tab));
    }
    for (std::size_t t = 0; t < c.novel_tables; ++t) {
        Table tab{"novel" + std::to_string(t), lake::Role::lake, {"Name", "Park City", "Park Country"}, {}};
        for (std::size_t r = 0; r < c.novel_rows; ++r) {
            tab.rows.push_back(coin(rng) < c.novel_share ? entity() : variant(out.query.rows[pick_q(rng)]));
        }
        out.lake.push_back(std::move(tab));
    }
    return out;
}

}  // namespace dust::synth
