#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "dust/column_align.hpp"
#include "dust/diversify.hpp"
#include "dust/io.hpp"
#include "dust/lake_model.hpp"
#include "dust/metrics.hpp"
#include "dust/serialize_embed.hpp"
#include "dust/synth.hpp"

namespace dust::harness {

using diversify::DiversifyParams;
using diversify::DiverseResult;
using embed::EmbeddingMatrix;
using lake::Table;

inline std::string fmt(double x, int precision = 6) {
    if (!std::isfinite(x)) return x > 0 ? "inf" : (x < 0 ? "-inf" : "nan");
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", precision, x);
    return buf;
}

class Stopwatch {
public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

// ---------------------------------------------------------------------------
// Configuration and providers
// ---------------------------------------------------------------------------

struct RunConfig {
    std::filesystem::path manifest;
    std::string provider = "builtin";  // builtin | import:<tuple embeddings JSONL>
    align::EmbedMode align_mode = align::EmbedMode::column_level;
    DiversifyParams params;
    std::vector<std::string> algorithms{"dust"};
    std::filesystem::path out_dir;  // empty: no artifacts
    std::size_t naive_candidates = 10;
    std::size_t union_sample = 20;
};

inline void validate(const RunConfig& c) {
    diversify::validate(c.params);
    if (c.algorithms.empty()) throw ConfigError("no algorithms selected");
    const auto& known = diversify::algorithm_names();
    std::set<std::string> seen;
    for (const auto& a : c.algorithms) {
        if (std::find(known.begin(), known.end(), a) == known.end()) throw ConfigError("unknown algorithm '" + a + "'");
        if (!seen.insert(a).second) throw ConfigError("algorithm '" + a + "' listed twice");
    }
    if (c.provider != "builtin" && c.provider.rfind("import:", 0) != 0) {
        throw ConfigError("provider must be 'builtin' or 'import:<path>'");
    }
    if (c.provider.rfind("import:", 0) == 0 && !std::filesystem::exists(c.provider.substr(7))) {
        throw ConfigError("embedding file '" + c.provider.substr(7) + "' does not exist");
    }
    if (!c.manifest.empty() && !std::filesystem::exists(c.manifest)) {
        throw ConfigError("manifest '" + c.manifest.string() + "' does not exist");
    }
}

struct Providers {
    std::unique_ptr<embed::TupleEmbedder> tuples;
    std::unique_ptr<align::ColumnEmbedder> columns;
};

inline Providers make_providers(const std::string& spec) {
    Providers p;
    p.columns = std::make_unique<align::HashedColumnEmbedder>();
    if (spec == "builtin") {
        p.tuples = std::make_unique<embed::HashedPairEmbedder>();
    } else if (spec.rfind("import:", 0) == 0) {
        p.tuples = std::make_unique<embed::ImportedTupleEmbedder>(io::import_provider(spec.substr(7)));
    } else {
        throw ConfigError("provider must be 'builtin' or 'import:<path>'");
    }
    return p;
}

// ---------------------------------------------------------------------------
// Candidate table search
// ---------------------------------------------------------------------------

/// Ranks lake tables by the mean, over query columns, of the best cosine
/// similarity to any column of the table. Returns the top n names.
inline std::vector<std::string> naive_candidates(const Table& query, std::span<const Table> lake,
                                                 const align::ColumnEmbedder& provider, std::size_t n,
                                                 align::EmbedMode mode = align::EmbedMode::column_level) {
    align::TokenCorpus corpus;
    for (std::size_t c = 0; c < query.num_columns(); ++c) corpus.add_document(align::column_tokens(query, c));
    for (const auto& t : lake) {
        for (std::size_t c = 0; c < t.num_columns(); ++c) corpus.add_document(align::column_tokens(t, c));
    }
    auto usable = [](const Vec& v) { return dot(v, v) > 0.0; };
    std::vector<Vec> qv;
    for (std::size_t c = 0; c < query.num_columns(); ++c) qv.push_back(align::embed_column(query, c, provider, mode, corpus).vec);
    std::vector<std::pair<double, std::string>> scored;
    for (const auto& t : lake) {
        if (t.name == query.name) continue;
        std::vector<Vec> tv;
        for (std::size_t c = 0; c < t.num_columns(); ++c) tv.push_back(align::embed_column(t, c, provider, mode, corpus).vec);
        double total = 0.0;
        for (const auto& q : qv) {
            double best = 0.0;
            if (usable(q)) {
                for (const auto& v : tv) {
                    if (usable(v)) best = std::max(best, cosine_similarity(q, v));
                }
            }
            total += best;
        }
        scored.emplace_back(qv.empty() ? 0.0 : total / static_cast<double>(qv.size()), t.name);
    }
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        return a.first != b.first ? a.first > b.first : a.second < b.second;
    });
    std::vector<std::string> out;
    for (std::size_t i = 0; i < scored.size() && i < n; ++i) out.push_back(scored[i].second);
    return out;
}

// ---------------------------------------------------------------------------
// Per-query preparation: align, union, embed
// ---------------------------------------------------------------------------

struct PreparedQuery {
    std::string name;
    Table query;
    std::vector<Table> lake;
    align::AlignmentMap alignment;
    align::UnionedTupleSet unioned;
    EmbeddingMatrix query_emb;
    EmbeddingMatrix lake_emb;  // row i embeds unioned.tuples[i]
    double seconds = 0.0;
};

inline PreparedQuery prepare_query(const Table& query, std::span<const Table> candidates, const Providers& providers,
                                   align::EmbedMode mode) {
    Stopwatch sw;
    if (auto rej = lake::validate_query(query)) throw ConfigError(rej->reason);
    PreparedQuery p;
    p.name = query.name;
    p.query = lake::drop_null_columns(query);
    if (p.query.num_columns() == 0) throw ConfigError("query table '" + query.name + "' has no non-null columns");
    for (const auto& t : candidates) p.lake.push_back(lake::drop_null_columns(t));
    p.alignment = align::align_columns(p.query, p.lake, *providers.columns, mode);
    p.unioned = align::outer_union(p.query, p.lake, p.alignment);
    auto qt = embed::query_tuples(p.query);
    p.query_emb = embed::embed_tuples(qt, p.unioned.schema, *providers.tuples);
    p.lake_emb = embed::embed_tuples(p.unioned.tuples, p.unioned.schema, *providers.tuples);
    p.seconds = sw.seconds();
    return p;
}

// ---------------------------------------------------------------------------
// Running methods on embedded instances
// ---------------------------------------------------------------------------

struct EmbeddedInstance {
    std::string name;
    EmbeddingMatrix query;
    EmbeddingMatrix lake;
};

struct MethodRun {
    DiverseResult result;
    metrics::DiversityScore score;  // the score used for tallies
    double seconds = 0.0;
};

inline constexpr std::size_t kRandomSeeds = 5;

/// Runs one method. "random" draws kRandomSeeds samples and is scored by the
/// best Average and the best Min Diversity over the samples; its reported
/// selection is the best sample for params.objective.
inline MethodRun run_method(const std::string& name, const EmbeddingMatrix& query, const EmbeddingMatrix& lake,
                            const DiversifyParams& params) {
    MethodRun m;
    Stopwatch sw;
    if (name == "random") {
        auto pruned = diversify::prune_tuples(lake, params.s, params.metric);
        auto sub = lake.subset(pruned.kept);
        std::vector<std::uint64_t> seeds;
        for (std::uint64_t i = 0; i < kRandomSeeds; ++i) seeds.push_back(params.seed + i);
        auto runs = diversify::random_select(query, sub, params.k, seeds, params.metric);
        m.seconds = sw.seconds();
        m.result = diversify::best_random(runs, params.objective);
        for (auto& t : m.result.selected) t.row = pruned.kept[t.row];
        m.score = *runs.front().metrics;
        for (const auto& r : runs) {
            m.score.average = std::max(m.score.average, r.metrics->average);
            m.score.min = std::max(m.score.min, r.metrics->min);
        }
        return m;
    }
    m.result = diversify::run_algorithm(name, query, lake, params);
    m.seconds = sw.seconds();
    m.score = *m.result.metrics;
    return m;
}

struct QueryOutcome {
    std::string name;
    std::optional<std::string> error;
    std::map<std::string, MethodRun> runs;
    double prepare_seconds = 0.0;
    std::size_t pool_size = 0;
};

struct BenchReport {
    std::vector<std::string> methods;
    std::vector<QueryOutcome> queries;
    std::map<std::string, metrics::Tally> tally;

    std::size_t failures() const {
        return static_cast<std::size_t>(
            std::count_if(queries.begin(), queries.end(), [](const QueryOutcome& q) { return q.error.has_value(); }));
    }
};

inline void finalize(BenchReport& r) {
    metrics::QueryScores scores;
    for (const auto& q : r.queries) {
        if (q.error) continue;
        for (const auto& [m, run] : q.runs) scores[q.name][m] = run.score;
    }
    r.tally = metrics::winner_tally(scores);
    for (const auto& m : r.methods) r.tally[m];
}

inline QueryOutcome evaluate_instance(const std::string& name, const EmbeddingMatrix& query,
                                      const EmbeddingMatrix& lake, const std::vector<std::string>& methods,
                                      const DiversifyParams& params) {
    QueryOutcome q;
    q.name = name;
    q.pool_size = lake.size();
    try {
        for (const auto& m : methods) q.runs[m] = run_method(m, query, lake, params);
    } catch (const Error& e) {
        q.runs.clear();
        q.error = e.what();
    }
    return q;
}

inline BenchReport bench_instances(const std::vector<EmbeddedInstance>& instances,
                                   const std::vector<std::string>& methods, const DiversifyParams& params) {
    BenchReport r;
    r.methods = methods;
    for (const auto& inst : instances) r.queries.push_back(evaluate_instance(inst.name, inst.query, inst.lake, methods, params));
    finalize(r);
    return r;
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

inline constexpr const char* kReportHeader = "method,#Average,#Min,Time(s),TotalTime(s)";
inline constexpr const char* kQueriesHeader = "query,method,average_diversity,min_diversity,time_s,status";

/// One row per method: wins on each metric and mean per-query times.
/// Time(s) covers the diversification call only; TotalTime(s) adds the
/// query's alignment, union and embedding time.
inline std::string report_csv(const BenchReport& r) {
    std::ostringstream out;
    out << kReportHeader << '\n';
    for (const auto& m : r.methods) {
        double t = 0.0, total = 0.0;
        std::size_t n = 0;
        for (const auto& q : r.queries) {
            if (q.error) continue;
            auto it = q.runs.find(m);
            if (it == q.runs.end()) continue;
            t += it->second.seconds;
            total += it->second.seconds + q.prepare_seconds;
            ++n;
        }
        const auto& tl = r.tally.at(m);
        out << m << ',' << tl.average_wins << ',' << tl.min_wins << ',' << fmt(n ? t / static_cast<double>(n) : 0.0)
            << ',' << fmt(n ? total / static_cast<double>(n) : 0.0) << '\n';
    }
    return out.str();
}

inline std::string queries_csv(const BenchReport& r) {
    std::ostringstream out;
    out << kQueriesHeader << '\n';
    for (const auto& q : r.queries) {
        if (q.error) {
            for (const auto& m : r.methods) out << q.name << ',' << m << ",,,,failed\n";
            continue;
        }
        for (const auto& m : r.methods) {
            const auto& run = q.runs.at(m);
            out << q.name << ',' << m << ',' << fmt(run.score.average, 9) << ',' << fmt(run.score.min, 9) << ','
                << fmt(run.seconds) << ",ok\n";
        }
    }
    return out.str();
}

inline io::json report_json(const BenchReport& r, const DiversifyParams& params) {
    io::json j;
    j["params"] = io::to_json(params);
    j["methods"] = r.methods;
    io::json summary = io::json::array();
    for (const auto& m : r.methods) {
        const auto& t = r.tally.at(m);
        summary.push_back({{"method", m},
                           {"average_wins", t.average_wins},
                           {"min_wins", t.min_wins},
                           {"average_tied_wins", t.average_tied_wins},
                           {"min_tied_wins", t.min_tied_wins}});
    }
    j["summary"] = summary;
    j["tie_policy"] = "exact ties credit every tied method";
    io::json queries = io::json::array();
    for (const auto& q : r.queries) {
        io::json e{{"query", q.name}, {"pool_size", q.pool_size}, {"prepare_time_s", q.prepare_seconds}};
        if (q.error) {
            e["error"] = *q.error;
        } else {
            io::json ms;
            for (const auto& [m, run] : q.runs) {
                ms[m] = io::to_json(run.score);
                ms[m]["time_s"] = run.seconds;
            }
            e["methods"] = ms;
        }
        queries.push_back(e);
    }
    j["queries"] = queries;
    j["failures"] = r.failures();
    return j;
}

/// Drops every wall-time field so two reports can be compared byte for byte.
inline io::json strip_times(io::json j) {
    if (j.is_object()) {
        io::json out = io::json::object();
        for (auto& [k, v] : j.items()) {
            if (k.size() >= 6 && k.compare(k.size() - 6, 6, "time_s") == 0) continue;
            out[k] = strip_times(v);
        }
        return out;
    }
    if (j.is_array()) {
        io::json out = io::json::array();
        for (auto& v : j) out.push_back(strip_times(v));
        return out;
    }
    return j;
}

inline void write_text(const std::filesystem::path& p, const std::string& s) {
    auto out = io::detail::open_out(p);
    out << s;
}

// ---------------------------------------------------------------------------
// Pipeline over a manifest
// ---------------------------------------------------------------------------

struct LoadedBenchmark {
    io::Manifest manifest;
    std::vector<Table> queries;
    std::vector<Table> lake;
};

inline LoadedBenchmark load_benchmark(const std::filesystem::path& manifest_path) {
    LoadedBenchmark b;
    b.manifest = io::load_manifest(manifest_path);
    std::set<std::string> names;
    for (const auto& p : b.manifest.query_tables) b.queries.push_back(lake::load_table(p, lake::Role::query));
    for (const auto& p : b.manifest.lake_tables) {
        b.lake.push_back(lake::load_table(p, lake::Role::lake));
        if (!names.insert(b.lake.back().name).second) throw ConfigError("duplicate lake table name '" + b.lake.back().name + "'");
    }
    return b;
}

inline std::vector<Table> candidates_for(const Table& q, const LoadedBenchmark& b, const RunConfig& c,
                                         const Providers& providers) {
    std::vector<std::string> names;
    if (b.manifest.candidates) {
        auto it = b.manifest.candidates->find(q.name);
        if (it == b.manifest.candidates->end()) throw ConfigError("manifest lists no candidates for query '" + q.name + "'");
        names = it->second;
    } else {
        names = naive_candidates(q, b.lake, *providers.columns, c.naive_candidates, c.align_mode);
    }
    std::vector<Table> out;
    for (const auto& n : names) {
        auto it = std::find_if(b.lake.begin(), b.lake.end(), [&](const Table& t) { return t.name == n; });
        if (it == b.lake.end()) throw ConfigError("candidate '" + n + "' is not a lake table");
        out.push_back(*it);
    }
    return out;
}

inline void write_query_artifacts(const std::filesystem::path& dir, const PreparedQuery& p,
                                  const std::map<std::string, MethodRun>& runs, const DiversifyParams& params,
                                  std::size_t sample) {
    io::write_json(dir / "alignment.json", io::to_json(p.alignment));
    Table s{"union_sample", lake::Role::lake, {"source_table", "source_row"}, {}};
    for (const auto& h : p.unioned.schema) s.headers.push_back(h);
    for (std::size_t i = 0; i < p.unioned.tuples.size() && i < sample; ++i) {
        const auto& t = p.unioned.tuples[i];
        lake::Row row{t.source.table, std::to_string(t.source.row)};
        row.insert(row.end(), t.cells.begin(), t.cells.end());
        s.rows.push_back(std::move(row));
    }
    lake::save_table(dir / "union_sample.csv", s);
    io::write_tuple_embeddings(dir / "query_embeddings.jsonl", p.query_emb);
    io::write_tuple_embeddings(dir / "lake_embeddings.jsonl", p.lake_emb);
    for (const auto& [m, run] : runs) {
        auto j = io::to_json(run.result, params);
        j["score"] = io::to_json(run.score);
        io::write_json(dir / ("result_" + m + ".json"), j);
    }
}

/// The full pipeline for every query in the manifest. A failing query is
/// recorded and the others proceed.
inline BenchReport run_pipeline(const RunConfig& config) {
    validate(config);
    auto bench = load_benchmark(config.manifest);
    auto providers = make_providers(config.provider);
    BenchReport r;
    r.methods = config.algorithms;
    for (const auto& q : bench.queries) {
        QueryOutcome out;
        out.name = q.name;
        try {
            auto cands = candidates_for(q, bench, config, providers);
            auto prepared = prepare_query(q, cands, providers, config.align_mode);
            out = evaluate_instance(q.name, prepared.query_emb, prepared.lake_emb, config.algorithms, config.params);
            out.prepare_seconds = prepared.seconds;
            if (!config.out_dir.empty()) {
                write_query_artifacts(config.out_dir / q.name, prepared, out.runs, config.params, config.union_sample);
            }
        } catch (const Error& e) {
            out.runs.clear();
            out.error = e.what();
        }
        r.queries.push_back(std::move(out));
    }
    finalize(r);
    if (!config.out_dir.empty()) {
        write_text(config.out_dir / "report.csv", report_csv(r));
        write_text(config.out_dir / "queries.csv", queries_csv(r));
        io::write_json(config.out_dir / "report.json", report_json(r, config.params));
    }
    return r;
}

// ---------------------------------------------------------------------------
// Synthetic query sets
// ---------------------------------------------------------------------------

/// n independent mixture instances; instance i uses seed base.seed + i.
inline std::vector<EmbeddedInstance> synthetic_queries(const synth::MixtureConfig& base, std::size_t n) {
    std::vector<EmbeddedInstance> out;
    for (std::size_t i = 0; i < n; ++i) {
        auto c = base;
        c.seed = base.seed + i;
        auto name = "query" + std::to_string(i);
        auto inst = synth::gaussian_mixture(c, name);
        out.push_back({name, std::move(inst.query), std::move(inst.lake)});
    }
    return out;
}

// ---------------------------------------------------------------------------
// p-sweep
// ---------------------------------------------------------------------------

struct SweepRow {
    std::size_t p = 0;
    double mean_average = 0.0;
    double mean_min = 0.0;
    std::optional<double> average_change_pct;  // vs the previous p
    std::optional<double> min_change_pct;
};

inline std::optional<double> pct_change(double prev, double cur) {
    if (prev == 0.0) return std::nullopt;
    return 100.0 * (cur - prev) / std::abs(prev);
}

inline std::vector<SweepRow> sweep_p(const std::vector<EmbeddedInstance>& instances, DiversifyParams params,
                                     const std::vector<std::size_t>& p_values) {
    if (p_values.empty()) throw ConfigError("sweep_p: no p values");
    if (!std::is_sorted(p_values.begin(), p_values.end())) throw ConfigError("sweep_p: p values must be ascending");
    if (instances.empty()) throw ConfigError("sweep_p: no instances");
    std::vector<SweepRow> rows;
    for (auto p : p_values) {
        params.p = p;
        SweepRow row{p, 0.0, 0.0, std::nullopt, std::nullopt};
        for (const auto& inst : instances) {
            auto res = diversify::diversify_dust(inst.query, inst.lake, params);
            row.mean_average += res.metrics->average;
            row.mean_min += res.metrics->min;
        }
        row.mean_average /= static_cast<double>(instances.size());
        row.mean_min /= static_cast<double>(instances.size());
        if (!rows.empty()) {
            row.average_change_pct = pct_change(rows.back().mean_average, row.mean_average);
            row.min_change_pct = pct_change(rows.back().mean_min, row.mean_min);
        }
        rows.push_back(row);
    }
    return rows;
}

inline std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::ostringstream out;
    out << "p,mean_average_diversity,mean_min_diversity,average_change_pct,min_change_pct\n";
    auto opt = [](const std::optional<double>& v) { return v ? fmt(*v, 4) : std::string(); };
    for (const auto& r : rows) {
        out << r.p << ',' << fmt(r.mean_average, 9) << ',' << fmt(r.mean_min, 9) << ',' << opt(r.average_change_pct)
            << ',' << opt(r.min_change_pct) << '\n';
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// Pruning ablation
// ---------------------------------------------------------------------------

struct AblationRow {
    std::optional<std::size_t> s;  // empty: no pruning
    double seconds = 0.0;          // mean diversification time per query
    double mean_average = 0.0;
    double mean_min = 0.0;
};

inline std::vector<AblationRow> ablate_pruning(const std::vector<EmbeddedInstance>& instances, DiversifyParams params,
                                               const std::vector<std::optional<std::size_t>>& s_values) {
    if (std::find(s_values.begin(), s_values.end(), std::nullopt) == s_values.end()) {
        throw ConfigError("ablate_pruning: the s values must include no pruning");
    }
    if (instances.empty()) throw ConfigError("ablate_pruning: no instances");
    std::vector<AblationRow> rows;
    for (const auto& s : s_values) {
        params.s = s;
        diversify::validate(params);
        AblationRow row{s, 0.0, 0.0, 0.0};
        for (const auto& inst : instances) {
            Stopwatch sw;
            auto res = diversify::diversify_dust(inst.query, inst.lake, params);
            row.seconds += sw.seconds();
            row.mean_average += res.metrics->average;
            row.mean_min += res.metrics->min;
        }
        const auto n = static_cast<double>(instances.size());
        row.seconds /= n;
        row.mean_average /= n;
        row.mean_min /= n;
        rows.push_back(row);
    }
    return rows;
}

inline std::string ablation_csv(const std::vector<AblationRow>& rows) {
    std::ostringstream out;
    out << "s,time_s,mean_average_diversity,mean_min_diversity\n";
    for (const auto& r : rows) {
        out << (r.s ? std::to_string(*r.s) : std::string("inf")) << ',' << fmt(r.seconds) << ','
            << fmt(r.mean_average, 9) << ',' << fmt(r.mean_min, 9) << '\n';
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// Runtime scaling
// ---------------------------------------------------------------------------

/// Least-squares slope of log(y) against log(x). Empty when fewer than two
/// distinct x values (or a non-positive value) make the fit degenerate.
inline std::optional<double> fit_exponent(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw ConfigError("fit_exponent: x and y differ in length");
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] <= 0.0 || y[i] <= 0.0) return std::nullopt;
        lx.push_back(std::log(x[i]));
        ly.push_back(std::log(y[i]));
    }
    if (std::set<double>(lx.begin(), lx.end()).size() < 2) return std::nullopt;
    const double n = static_cast<double>(lx.size());
    const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / n;
    const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxy += (lx[i] - mx) * (ly[i] - my);
        sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    return sxy / sxx;
}

enum class ScaleAxis { s, k };

struct ScaleConfig {
    synth::MixtureConfig generator;
    std::vector<std::string> algorithms{"dust", "gmc"};
    ScaleAxis vary = ScaleAxis::s;
    std::vector<std::size_t> values;
    std::size_t fixed_k = 100;
    std::size_t fixed_s = 5000;
    std::size_t dust_budget = 2500;  // DUST prunes its input to this many tuples
    std::size_t repeats = 1;         // best-of timing per point
    DiversifyParams params;          // k and s are overridden per point
};

struct ScalePoint {
    std::string algorithm;
    std::size_t x = 0;
    double seconds = 0.0;
};

struct ScaleReport {
    std::vector<ScalePoint> points;
    std::map<std::string, std::optional<double>> exponents;
};

/// Times the diversification call per algorithm as s (input tuples) or k
/// grows. DUST prunes to dust_budget; the baselines see every tuple.
inline ScaleReport scale_runtime(const ScaleConfig& c) {
    if (c.values.empty()) throw ConfigError("scale_runtime: no values");
    ScaleReport r;
    for (auto x : c.values) {
        auto gen = c.generator;
        gen.lake_tuples = c.vary == ScaleAxis::s ? x : c.fixed_s;
        auto inst = synth::gaussian_mixture(gen);
        const std::size_t k = c.vary == ScaleAxis::k ? x : c.fixed_k;
        for (const auto& a : c.algorithms) {
            auto params = c.params;
            params.k = k;
            params.s.reset();
            if (a == "dust" && inst.lake.size() > c.dust_budget) params.s = std::max(c.dust_budget, k * params.p);
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t rep = 0; rep < std::max<std::size_t>(c.repeats, 1); ++rep) {
                Stopwatch sw;
                (void)diversify::run_algorithm(a, inst.query, inst.lake, params);
                best = std::min(best, sw.seconds());
            }
            r.points.push_back({a, x, best});
        }
    }
    for (const auto& a : c.algorithms) {
        std::vector<double> xs, ys;
        for (const auto& p : r.points) {
            if (p.algorithm != a) continue;
            xs.push_back(static_cast<double>(p.x));
            ys.push_back(p.seconds);
        }
        r.exponents[a] = fit_exponent(xs, ys);
    }
    return r;
}

inline std::string scale_csv(const ScaleReport& r, ScaleAxis axis) {
    std::ostringstream out;
    out << "algorithm," << (axis == ScaleAxis::s ? "s" : "k") << ",seconds\n";
    for (const auto& p : r.points) out << p.algorithm << ',' << p.x << ',' << fmt(p.seconds) << '\n';
    return out.str();
}

inline std::string exponents_csv(const ScaleReport& r) {
    std::ostringstream out;
    out << "algorithm,exponent\n";
    for (const auto& [a, e] : r.exponents) out << a << ',' << (e ? fmt(*e, 4) : std::string("n/a")) << '\n';
    return out.str();
}

// ---------------------------------------------------------------------------
// Novel-values case study
// ---------------------------------------------------------------------------

/// The k lake tuples closest to the query (smallest distance to any query
/// tuple, then smallest mean distance, then id): what a similarity-only
/// ranking returns.
inline std::vector<std::size_t> naive_top_similarity(const EmbeddingMatrix& query, const EmbeddingMatrix& lake,
                                                     std::size_t k, Metric metric = Metric::cosine) {
    Points qp(query, metric);
    Points lp(lake, metric);
    std::vector<std::size_t> all(lake.size());
    std::iota(all.begin(), all.end(), 0);
    auto ranked = diversify::rank_candidates(lp, all, qp);
    std::reverse(ranked.begin(), ranked.end());
    // rank_candidates breaks ties by ascending id; restore that after reversal.
    std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.rank_score != b.rank_score) return a.rank_score < b.rank_score;
        if (a.tie_score != b.tie_score) return a.tie_score < b.tie_score;
        return a.id < b.id;
    });
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < k && i < ranked.size(); ++i) out.push_back(ranked[i].row);
    return out;
}

struct CaseStudyRow {
    std::string method;
    std::size_t k = 0;
    std::string column;
    std::size_t novel = 0;
};

/// Novel values per query column added by DUST and by the similarity-only
/// ranking, for each k.
inline std::vector<CaseStudyRow> case_study(const PreparedQuery& p, const std::vector<std::size_t>& k_values,
                                            const std::vector<std::string>& columns, DiversifyParams params) {
    std::vector<std::string> cols = columns;
    if (cols.empty()) cols = p.unioned.schema;
    std::vector<CaseStudyRow> rows;
    auto materialize = [&](const std::vector<std::size_t>& sel) {
        std::vector<lake::Row> out;
        for (auto r : sel) out.push_back(p.unioned.tuples.at(r).cells);
        return out;
    };
    for (auto k : k_values) {
        std::vector<std::size_t> dust_rows, naive_rows;
        if (k > 0) {
            params.k = k;
            if (params.s && *params.s < k * params.p) params.s = k * params.p;
            dust_rows = diversify::diversify_dust(p.query_emb, p.lake_emb, params).rows();
            naive_rows = naive_top_similarity(p.query_emb, p.lake_emb, k, params.metric);
        }
        auto dust_sel = materialize(dust_rows);
        auto naive_sel = materialize(naive_rows);
        for (const auto& c : cols) {
            rows.push_back({"dust", k, c, metrics::novel_values(p.query, dust_sel, c)});
            rows.push_back({"naive", k, c, metrics::novel_values(p.query, naive_sel, c)});
        }
    }
    return rows;
}

inline std::string case_study_csv(const std::vector<CaseStudyRow>& rows) {
    std::ostringstream out;
    out << "method,k,column,novel_values\n";
    for (const auto& r : rows) out << r.method << ',' << r.k << ',' << lake::detail::quote_field(r.column, ',') << ',' << r.novel << '\n';
    return out.str();
}

}  // namespace dust::harness
