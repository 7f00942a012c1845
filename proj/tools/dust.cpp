// Command-line front end: pipeline stages and experiment suites.
//
// Exit codes: 0 success, 1 configuration error, 2 some queries failed,
// 3 internal error.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "dust/column_align.hpp"
#include "dust/diversify.hpp"
#include "dust/harness.hpp"
#include "dust/io.hpp"
#include "dust/lake_model.hpp"
#include "dust/serialize_embed.hpp"
#include "dust/synth.hpp"

namespace fs = std::filesystem;
using namespace dust;

namespace {

enum Exit { kOk = 0, kConfig = 1, kPartial = 2, kInternal = 3 };

struct Options {
    std::string manifest;
    std::string query;
    std::vector<std::string> lake;
    std::string out = "dust_out";
    std::string provider = "builtin";
    std::string align_mode = "column";
    std::size_t k = 10;
    std::string s = "inf";
    std::size_t p = 2;
    double lambda = 0.5;
    std::uint64_t seed = 0;
    std::string distance = "cosine";
    std::string objective = "max-sum";
    std::vector<std::string> algorithms;
    std::size_t gne_iterations = 10;
    char delimiter = ',';

    // synthetic instances
    std::size_t synthetic = 0;
    std::size_t tuples = 1000;
    std::size_t dim = 64;
    std::size_t clusters = 20;
    std::size_t query_tuples = 10;
    double duplicates = 0.0;
};

std::optional<std::size_t> parse_budget(const std::string& s) {
    if (s == "inf" || s == "none") return std::nullopt;
    try {
        std::size_t pos = 0;
        auto v = std::stoull(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
        throw ConfigError("prune budget must be a count or 'inf', got '" + s + "'");
    }
}

diversify::DiversifyParams params_of(const Options& o) {
    diversify::DiversifyParams p;
    p.k = o.k;
    p.s = parse_budget(o.s);
    p.p = o.p;
    p.lambda = o.lambda;
    p.seed = o.seed;
    p.metric = parse_metric(o.distance);
    p.objective = io::parse_objective(o.objective);
    p.gne_iterations = o.gne_iterations;
    diversify::validate(p);
    return p;
}

align::EmbedMode mode_of(const Options& o) {
    if (o.align_mode == "column") return align::EmbedMode::column_level;
    if (o.align_mode == "cell") return align::EmbedMode::cell_level;
    throw ConfigError("align mode must be 'column' or 'cell'");
}

harness::RunConfig run_config(const Options& o, std::vector<std::string> default_algorithms) {
    harness::RunConfig c;
    c.manifest = o.manifest;
    c.provider = o.provider;
    c.align_mode = mode_of(o);
    c.params = params_of(o);
    c.algorithms = o.algorithms.empty() ? std::move(default_algorithms) : o.algorithms;
    c.out_dir = o.out;
    harness::validate(c);
    return c;
}

/// Query/lake pairs from --manifest or from --query with --lake files.
struct Job {
    lake::Table query;
    std::vector<lake::Table> lake;
};

std::vector<Job> load_jobs(const Options& o, const harness::Providers& providers) {
    std::vector<Job> jobs;
    if (!o.manifest.empty()) {
        harness::RunConfig c;
        c.align_mode = mode_of(o);
        auto b = harness::load_benchmark(o.manifest);
        for (const auto& q : b.queries) jobs.push_back({q, harness::candidates_for(q, b, c, providers)});
        return jobs;
    }
    if (o.query.empty() || o.lake.empty()) throw ConfigError("give --manifest, or --query with one or more --lake files");
    Job j{lake::load_table(o.query, lake::Role::query, o.delimiter), {}};
    for (const auto& l : o.lake) j.lake.push_back(lake::load_table(l, lake::Role::lake, o.delimiter));
    jobs.push_back(std::move(j));
    return jobs;
}

synth::MixtureConfig mixture_of(const Options& o) {
    synth::MixtureConfig m;
    m.dim = o.dim;
    m.clusters = o.clusters;
    m.lake_tuples = o.tuples;
    m.query_tuples = o.query_tuples;
    m.duplicate_fraction = o.duplicates;
    m.seed = o.seed;
    return m;
}

/// Embedded queries from --synthetic or from the manifest pipeline.
std::vector<harness::EmbeddedInstance> instances_of(const Options& o, std::size_t& failures) {
    if (o.synthetic > 0) return harness::synthetic_queries(mixture_of(o), o.synthetic);
    auto providers = harness::make_providers(o.provider);
    std::vector<harness::EmbeddedInstance> out;
    for (auto& j : load_jobs(o, providers)) {
        try {
            auto p = harness::prepare_query(j.query, j.lake, providers, mode_of(o));
            out.push_back({p.name, std::move(p.query_emb), std::move(p.lake_emb)});
        } catch (const Error& e) {
            std::cerr << "query " << j.query.name << ": " << e.what() << '\n';
            ++failures;
        }
    }
    if (out.empty()) throw ConfigError("no query could be prepared");
    return out;
}

void add_common(CLI::App* c, Options& o) {
    c->add_option("--manifest", o.manifest, "Benchmark manifest (JSON)");
    c->add_option("--query", o.query, "Query table CSV (instead of --manifest)");
    c->add_option("--lake", o.lake, "Candidate lake table CSVs (instead of --manifest)");
    c->add_option("--out", o.out, "Output directory");
    c->add_option("--provider", o.provider, "Tuple embeddings: builtin | import:<jsonl>");
    c->add_option("--align-mode", o.align_mode, "Column embedding: column | cell");
    c->add_option("--delimiter", o.delimiter, "CSV delimiter");
}

void add_params(CLI::App* c, Options& o) {
    c->add_option("--k", o.k, "Number of tuples to return");
    c->add_option("--s", o.s, "Prune budget, or 'inf' for no pruning");
    c->add_option("--p", o.p, "Candidate multiplier: DUST clusters into k*p");
    c->add_option("--lambda", o.lambda, "GMC/GNE relevance-diversity trade-off");
    c->add_option("--seed", o.seed, "RNG seed");
    c->add_option("--distance", o.distance, "cosine | euclidean | manhattan");
    c->add_option("--objective", o.objective, "max-sum | max-min (random best-of selection)");
    c->add_option("--algorithm", o.algorithms, "dust, gmc, gne, clt, random (repeat or comma-separate)")->delimiter(',');
    c->add_option("--gne-iterations", o.gne_iterations, "GNE GRASP iterations");
}

void add_synthetic(CLI::App* c, Options& o) {
    c->add_option("--synthetic", o.synthetic, "Use N generated queries instead of a manifest");
    c->add_option("--tuples", o.tuples, "Generated lake tuples per query");
    c->add_option("--dim", o.dim, "Generated embedding dimension");
    c->add_option("--clusters", o.clusters, "Generated mixture components");
    c->add_option("--query-tuples", o.query_tuples, "Generated query tuples");
    c->add_option("--duplicates", o.duplicates, "Generated duplicate fraction in [0, 1]");
}

int report_status(std::size_t failures) {
    if (failures > 0) {
        std::cerr << failures << " quer" << (failures == 1 ? "y" : "ies") << " failed\n";
        return kPartial;
    }
    return kOk;
}

// ---------------------------------------------------------------------------

int cmd_align(const Options& o) {
    auto providers = harness::make_providers("builtin");
    std::optional<io::Manifest> manifest;
    if (!o.manifest.empty()) manifest = io::load_manifest(o.manifest);
    std::size_t failures = 0;
    for (auto& j : load_jobs(o, providers)) {
        try {
            auto q = lake::drop_null_columns(j.query);
            std::vector<lake::Table> lk;
            for (const auto& t : j.lake) lk.push_back(lake::drop_null_columns(t));
            auto map = align::align_columns(q, lk, *providers.columns, mode_of(o));
            io::write_json(fs::path(o.out) / q.name / "alignment.json", io::to_json(map));
            std::cout << q.name << ": " << map.n_clusters << " clusters, " << map.discarded.size() << " discarded";
            if (manifest && !manifest->alignment_ground_truth.empty()) {
                std::set<std::string> tables{q.name};
                for (const auto& t : lk) tables.insert(t.name);
                std::set<align::ColumnPair> truth;
                for (const auto& pr : manifest->alignment_ground_truth) {
                    if (tables.count(pr.first.table) && tables.count(pr.second.table)) truth.insert(pr);
                }
                auto prf = align::alignment_prf(map, truth);
                std::cout << ", P=" << harness::fmt(prf.precision, 4) << " R=" << harness::fmt(prf.recall, 4)
                          << " F1=" << harness::fmt(prf.f1, 4);
            }
            std::cout << '\n';
        } catch (const Error& e) {
            std::cerr << "query " << j.query.name << ": " << e.what() << '\n';
            ++failures;
        }
    }
    return report_status(failures);
}

int cmd_union(const Options& o) {
    auto providers = harness::make_providers("builtin");
    std::size_t failures = 0;
    for (auto& j : load_jobs(o, providers)) {
        try {
            auto q = lake::drop_null_columns(j.query);
            std::vector<lake::Table> lk;
            for (const auto& t : j.lake) lk.push_back(lake::drop_null_columns(t));
            auto map = align::align_columns(q, lk, *providers.columns, mode_of(o));
            auto u = align::outer_union(q, lk, map);
            lake::Table out{"union", lake::Role::lake, {"source_table", "source_row"}, {}};
            for (const auto& h : u.schema) out.headers.push_back(h);
            for (const auto& t : u.tuples) {
                lake::Row row{t.source.table, std::to_string(t.source.row)};
                row.insert(row.end(), t.cells.begin(), t.cells.end());
                out.rows.push_back(std::move(row));
            }
            lake::save_table(fs::path(o.out) / q.name / "union.csv", out);
            std::cout << q.name << ": " << u.tuples.size() << " unionable tuples over " << u.schema.size() << " columns\n";
        } catch (const Error& e) {
            std::cerr << "query " << j.query.name << ": " << e.what() << '\n';
            ++failures;
        }
    }
    return report_status(failures);
}

int cmd_embed(const Options& o, const std::string& action, const std::string& vectors) {
    auto providers = harness::make_providers(action == "import" ? "import:" + vectors : o.provider);
    std::size_t failures = 0;
    for (auto& j : load_jobs(o, providers)) {
        try {
            auto q = lake::drop_null_columns(j.query);
            std::vector<lake::Table> lk;
            for (const auto& t : j.lake) lk.push_back(lake::drop_null_columns(t));
            auto map = align::align_columns(q, lk, *providers.columns, mode_of(o));
            auto u = align::outer_union(q, lk, map);
            auto qt = embed::query_tuples(q);
            const fs::path dir = fs::path(o.out) / q.name;
            if (action == "export") {
                auto ser = embed::serialize_all(qt, u.schema);
                auto lser = embed::serialize_all(u.tuples, u.schema);
                ser.insert(ser.end(), lser.begin(), lser.end());
                io::write_serialized(dir / "tuples.txt", dir / "tuples.index.tsv", ser);
                std::size_t all_null = 0;
                for (const auto& s : ser) all_null += s.all_null;
                std::cout << q.name << ": " << ser.size() << " serialized tuples";
                if (all_null) std::cout << " (" << all_null << " all-null)";
                std::cout << '\n';
            } else {
                auto qe = embed::embed_tuples(qt, u.schema, *providers.tuples);
                auto le = embed::embed_tuples(u.tuples, u.schema, *providers.tuples);
                io::write_tuple_embeddings(dir / "query_embeddings.jsonl", qe);
                io::write_tuple_embeddings(dir / "lake_embeddings.jsonl", le);
                std::cout << q.name << ": " << qe.size() + le.size() << " tuples embedded, dim " << qe.dim() << '\n';
            }
        } catch (const Error& e) {
            std::cerr << "query " << j.query.name << ": " << e.what() << '\n';
            ++failures;
        }
    }
    return report_status(failures);
}

int cmd_diversify(const Options& o, const std::string& qe, const std::string& le) {
    auto params = params_of(o);
    std::vector<std::string> algs = o.algorithms.empty() ? std::vector<std::string>{"dust"} : o.algorithms;
    if (!qe.empty() || !le.empty()) {
        if (qe.empty() || le.empty()) throw ConfigError("give both --query-embeddings and --lake-embeddings");
        auto q = io::to_matrix(io::read_tuple_vectors(qe));
        auto l = io::to_matrix(io::read_tuple_vectors(le));
        for (const auto& a : algs) {
            auto run = harness::run_method(a, q, l, params);
            auto j = io::to_json(run.result, params);
            io::write_json(fs::path(o.out) / ("result_" + a + ".json"), j);
            std::cout << a << ": average " << harness::fmt(run.result.metrics->average) << ", min "
                      << harness::fmt(run.result.metrics->min) << '\n';
        }
        return kOk;
    }
    auto c = run_config(o, algs);
    auto r = harness::run_pipeline(c);
    std::cout << harness::queries_csv(r);
    return report_status(r.failures());
}

int cmd_evaluate(const Options& o, const std::string& qe, const std::string& le, const std::string& result) {
    if (qe.empty() || le.empty() || result.empty()) {
        throw ConfigError("evaluate needs --query-embeddings, --lake-embeddings and --result");
    }
    auto q = io::to_matrix(io::read_tuple_vectors(qe));
    auto l = io::to_matrix(io::read_tuple_vectors(le));
    auto j = io::read_json(result);
    std::vector<std::size_t> rows;
    for (const auto& t : j.at("selected")) {
        lake::TupleRef id{t.at("table").get<std::string>(), t.at("row").get<std::size_t>()};
        auto r = l.find(id);
        if (!r) throw ConfigError("selected tuple " + embed::EmbeddingMatrix::describe(id) + " has no embedding");
        rows.push_back(*r);
    }
    const auto metric = parse_metric(o.distance);
    Points qp(q, metric), lp(l, metric);
    auto s = metrics::diversity(qp, lp, rows);
    std::cout << io::to_json(s).dump(2) << '\n';
    return kOk;
}

int cmd_bench(const Options& o) {
    auto params = params_of(o);
    std::vector<std::string> algs = o.algorithms.empty() ? diversify::algorithm_names() : o.algorithms;
    harness::BenchReport r;
    if (o.synthetic > 0) {
        r = harness::bench_instances(harness::synthetic_queries(mixture_of(o), o.synthetic), algs, params);
        harness::write_text(fs::path(o.out) / "report.csv", harness::report_csv(r));
        harness::write_text(fs::path(o.out) / "queries.csv", harness::queries_csv(r));
        io::write_json(fs::path(o.out) / "report.json", harness::report_json(r, params));
    } else {
        r = harness::run_pipeline(run_config(o, algs));
    }
    std::cout << harness::report_csv(r);
    return report_status(r.failures());
}

int cmd_sweep_p(const Options& o, const std::vector<std::size_t>& ps) {
    std::size_t failures = 0;
    auto inst = instances_of(o, failures);
    auto rows = harness::sweep_p(inst, params_of(o), ps);
    auto csv = harness::sweep_csv(rows);
    harness::write_text(fs::path(o.out) / "sweep_p.csv", csv);
    std::cout << csv;
    return report_status(failures);
}

int cmd_ablate(const Options& o, const std::vector<std::string>& ss) {
    std::size_t failures = 0;
    auto inst = instances_of(o, failures);
    std::vector<std::optional<std::size_t>> budgets{std::nullopt};
    for (const auto& s : ss) {
        auto b = parse_budget(s);
        if (b) budgets.push_back(b);
    }
    auto rows = harness::ablate_pruning(inst, params_of(o), budgets);
    auto csv = harness::ablation_csv(rows);
    harness::write_text(fs::path(o.out) / "ablate_prune.csv", csv);
    std::cout << csv;
    return report_status(failures);
}

int cmd_scale(const Options& o, const std::string& vary, const std::vector<std::size_t>& values, std::size_t budget,
              std::size_t fixed_s) {
    harness::ScaleConfig c;
    c.generator = mixture_of(o);
    c.params = params_of(o);
    if (vary == "s") c.vary = harness::ScaleAxis::s;
    else if (vary == "k") c.vary = harness::ScaleAxis::k;
    else throw ConfigError("--vary must be 's' or 'k'");
    c.values = values;
    c.fixed_k = o.k;
    c.fixed_s = fixed_s;
    c.dust_budget = budget;
    if (!o.algorithms.empty()) c.algorithms = o.algorithms;
    auto r = harness::scale_runtime(c);
    harness::write_text(fs::path(o.out) / ("scale_" + vary + ".csv"), harness::scale_csv(r, c.vary));
    harness::write_text(fs::path(o.out) / ("scale_" + vary + "_exponents.csv"), harness::exponents_csv(r));
    std::cout << harness::scale_csv(r, c.vary) << harness::exponents_csv(r);
    return kOk;
}

int cmd_case_study(const Options& o, const std::vector<std::size_t>& ks, const std::vector<std::string>& columns) {
    auto providers = harness::make_providers(o.provider);
    std::vector<Job> jobs;
    if (o.manifest.empty() && o.query.empty()) {
        synth::DuplicatedLakeConfig dc;
        dc.seed = o.seed;
        auto d = synth::duplicated_lake(dc);
        jobs.push_back({d.query, d.lake});
    } else {
        jobs = load_jobs(o, providers);
    }
    std::size_t failures = 0;
    for (auto& j : jobs) {
        try {
            auto p = harness::prepare_query(j.query, j.lake, providers, mode_of(o));
            auto rows = harness::case_study(p, ks, columns, params_of(o));
            auto csv = harness::case_study_csv(rows);
            harness::write_text(fs::path(o.out) / p.name / "case_study.csv", csv);
            std::cout << csv;
        } catch (const Error& e) {
            std::cerr << "query " << j.query.name << ": " << e.what() << '\n';
            ++failures;
        }
    }
    return report_status(failures);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Diverse unionable tuple search over a table data lake"};
    app.require_subcommand(1);
    Options o;

    auto* align_cmd = app.add_subcommand("align", "Align candidate lake columns to the query columns");
    add_common(align_cmd, o);

    auto* union_cmd = app.add_subcommand("union", "Outer-union the aligned candidate tables");
    add_common(union_cmd, o);

    auto* embed_cmd = app.add_subcommand("embed", "Export serialized tuples or import tuple embeddings");
    add_common(embed_cmd, o);
    std::string embed_action = "export";
    std::string vectors;
    embed_cmd->add_option("action", embed_action, "export | import")->check(CLI::IsMember({"export", "import"}));
    embed_cmd->add_option("--vectors", vectors, "Tuple embeddings JSONL for 'import'");

    std::string qe, le, result;
    auto* div_cmd = app.add_subcommand("diversify", "Select k diverse unionable tuples");
    add_common(div_cmd, o);
    add_params(div_cmd, o);
    div_cmd->add_option("--query-embeddings", qe, "Query tuple embeddings JSONL");
    div_cmd->add_option("--lake-embeddings", le, "Lake tuple embeddings JSONL");

    auto* eval_cmd = app.add_subcommand("evaluate", "Average and Min Diversity of a stored result");
    eval_cmd->add_option("--query-embeddings", qe, "Query tuple embeddings JSONL")->required();
    eval_cmd->add_option("--lake-embeddings", le, "Lake tuple embeddings JSONL")->required();
    eval_cmd->add_option("--result", result, "Result JSON written by 'diversify'")->required();
    eval_cmd->add_option("--distance", o.distance, "cosine | euclidean | manhattan");

    auto* bench_cmd = app.add_subcommand("bench", "Compare algorithms per query and tally wins");
    add_common(bench_cmd, o);
    add_params(bench_cmd, o);
    add_synthetic(bench_cmd, o);

    std::vector<std::size_t> ps{1, 2, 3, 4};
    auto* sweep_cmd = app.add_subcommand("sweep-p", "DUST diversity as the candidate multiplier p grows");
    add_common(sweep_cmd, o);
    add_params(sweep_cmd, o);
    add_synthetic(sweep_cmd, o);
    sweep_cmd->add_option("--p-values", ps, "Ascending p values")->delimiter(',');

    std::vector<std::string> ss{"2500"};
    auto* ablate_cmd = app.add_subcommand("ablate-prune", "DUST runtime and diversity with and without pruning");
    add_common(ablate_cmd, o);
    add_params(ablate_cmd, o);
    add_synthetic(ablate_cmd, o);
    ablate_cmd->add_option("--s-values", ss, "Prune budgets; no pruning is always included")->delimiter(',');

    std::string vary = "s";
    std::vector<std::size_t> values{1000, 2000, 4000, 6000, 8000, 10000};
    std::size_t budget = 2500, fixed_s = 5000;
    auto* scale_cmd = app.add_subcommand("scale", "Runtime curves over generated instances");
    scale_cmd->add_option("--out", o.out, "Output directory");
    add_params(scale_cmd, o);
    add_synthetic(scale_cmd, o);
    scale_cmd->add_option("--vary", vary, "s | k");
    scale_cmd->add_option("--values", values, "Values of the varied parameter")->delimiter(',');
    scale_cmd->add_option("--dust-budget", budget, "DUST prune budget");
    scale_cmd->add_option("--fixed-s", fixed_s, "Input tuples when varying k");

    std::vector<std::size_t> ks{0, 5, 10, 20, 40};
    std::vector<std::string> columns;
    auto* case_cmd = app.add_subcommand("case-study", "Novel values added per column, DUST vs similarity ranking");
    add_common(case_cmd, o);
    add_params(case_cmd, o);
    case_cmd->add_option("--k-values", ks, "k values")->delimiter(',');
    case_cmd->add_option("--columns", columns, "Query columns to report (default: all)")->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kOk : kConfig;
    }

    try {
        if (*align_cmd) return cmd_align(o);
        if (*union_cmd) return cmd_union(o);
        if (*embed_cmd) return cmd_embed(o, embed_action, vectors);
        if (*div_cmd) return cmd_diversify(o, qe, le);
        if (*eval_cmd) return cmd_evaluate(o, qe, le, result);
        if (*bench_cmd) return cmd_bench(o);
        if (*sweep_cmd) return cmd_sweep_p(o, ps);
        if (*ablate_cmd) return cmd_ablate(o, ss);
        if (*scale_cmd) return cmd_scale(o, vary, values, budget, fixed_s);
        if (*case_cmd) return cmd_case_study(o, ks, columns);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const lake::IoError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "config error: malformed JSON input: " << e.what() << '\n';
        return kConfig;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return kInternal;
    }
    return kInternal;
}
