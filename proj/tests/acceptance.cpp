// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "dust/harness.hpp"

using namespace dust;
using diversify::DiversifyParams;
using diversify::Objective;
using embed::EmbeddingMatrix;

namespace {

std::string sci(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1e", x);
    return buf;
}

struct Verdict {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void report(const std::string& name, const std::function<Verdict()>& check) {
    auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
        v = check();
    } catch (const std::exception& e) {
        v = {false, std::string("exception: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!v.pass) ++failures;
    std::printf("%s %s: %s [%.1fs]\n", v.pass ? "PASS" : "FAIL", name.c_str(), v.detail.c_str(), secs);
    std::fflush(stdout);
}

std::string num(double x, int prec = 4) { return harness::fmt(x, prec); }

EmbeddingMatrix random_matrix(const std::string& table, std::size_t n, std::size_t dim, std::mt19937_64& rng) {
    std::normal_distribution<double> nd(0.0, 1.0);
    EmbeddingMatrix m(dim, "acceptance");
    for (std::size_t i = 0; i < n; ++i) {
        Vec v(dim);
        for (auto& x : v) x = nd(rng);
        m.add({table, i}, v);
    }
    return m;
}

synth::MixtureConfig duplicate_heavy() {
    synth::MixtureConfig c;
    c.lake_tuples = 1000;
    c.dim = 64;
    c.clusters = 20;
    c.query_tuples = 10;
    c.duplicate_fraction = 0.5;
    c.seed = 1000;
    return c;
}

// ---------------------------------------------------------------------------

Verdict serialization_golden() {
    const std::vector<std::string> schema{"Park Name", "Supervisor", "City", "Country"};
    using lake::Cell;
    auto a = embed::serialize_tuple(std::vector<Cell>{Cell("River Park"), Cell("Vera Onate"), Cell("Fresno"), Cell("USA")},
                                    schema)
                 .text;
    auto b = embed::serialize_tuple(std::vector<Cell>{Cell("Chippewa Park"), std::nullopt, Cell("Brandon, MN"), Cell("USA")},
                                    schema)
                 .text;
    const std::string want_a =
        "[CLS] Park Name River Park [SEP] Supervisor Vera Onate [SEP] City Fresno [SEP] Country USA [SEP]";
    const std::string want_b = "[CLS] Park Name Chippewa Park [SEP] City Brandon, MN [SEP] Country USA [SEP]";
    return {a == want_a && b == want_b, "2 strings byte-exact: " + std::string(a == want_a && b == want_b ? "yes" : "no")};
}

Verdict ranking_golden() {
    std::vector<lake::TupleRef> ids{{"T", 1}, {"T", 2}, {"T", 3}, {"T", 4}, {"T", 5}, {"T", 6}};
    std::vector<std::vector<double>> dist{{0.3, 0.6, 0.7},   {0.4, 0.5, 0.6},  {0.4, 0.49, 0.58},
                                          {0.4, 0.44, 0.6},  {0.01, 0.5, 0.9}, {0.0, 0.2, 0.3}};
    auto r = diversify::rank_by_query_distances(ids, dist);
    std::string order;
    for (const auto& e : r) order += "t" + std::to_string(e.candidate + 1) + " ";
    bool ok = order == "t2 t3 t4 t1 t5 t6 " && r[4].rank_score == 0.01 && r[5].rank_score == 0.0;
    return {ok, "order " + order + "(tie scores t2 " + num(r[0].tie_score, 2) + ", t4 " + num(r[2].tie_score, 2) + ")"};
}

Verdict oracle_equivalence() {
    auto start = std::chrono::steady_clock::now();
    std::mt19937_64 rng(2024);
    const std::size_t instances = 200;
    std::size_t violations = 0, gne_hits = 0;
    std::string worst;
    for (std::size_t i = 0; i < instances; ++i) {
        auto q = random_matrix("q", 1 + rng() % 3, 8, rng);
        const std::size_t m = 5 + rng() % 8;  // 5..12
        auto l = random_matrix("t", m, 8, rng);
        const std::size_t k = 1 + rng() % 4;
        auto opt_avg = diversify::brute_force_best(q, l, k, Objective::max_sum);
        auto opt_min = diversify::brute_force_best(q, l, k, Objective::max_min);
        DiversifyParams p;
        p.k = k;
        p.seed = i;
        p.gne_iterations = 50;
        p.lambda = diversify::lambda_for_average_diversity(q.size(), k);
        for (const auto& name : diversify::algorithm_names()) {
            auto r = diversify::run_algorithm(name, q, l, p);
            if (r.metrics->average > opt_avg.score + 1e-9 || r.metrics->min > opt_min.score + 1e-9) {
                ++violations;
                worst = name + " on instance " + std::to_string(i);
            }
            if (name == "gne" && r.metrics->average >= opt_avg.score - 1e-9) ++gne_hits;
        }
    }
    const double share = static_cast<double>(gne_hits) / static_cast<double>(instances);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    bool ok = violations == 0 && share >= 0.8 && secs < 300.0;
    std::string d = std::to_string(instances) + " instances, " + std::to_string(violations) +
                    " heuristic scores above the exhaustive optimum; GNE(50 iters) reached the max-sum optimum on " +
                    num(100 * share, 1) + "%";
    if (!worst.empty()) d += "; e.g. " + worst;
    return {ok, d};
}

double naive_cosine(const Vec& a, const Vec& b) {
    double ab = 0, aa = 0, bb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ab += a[i] * b[i];
        aa += a[i] * a[i];
        bb += b[i] * b[i];
    }
    return 1.0 - ab / (std::sqrt(aa) * std::sqrt(bb));
}

Verdict metric_cross_check() {
    std::mt19937_64 rng(77);
    std::normal_distribution<double> nd;
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const std::size_t n = 1 + rng() % 6, k = 1 + rng() % 8, dim = 1 + rng() % 32;
        auto draw = [&](std::size_t cnt) {
            std::vector<Vec> out(cnt, Vec(dim));
            for (auto& v : out)
                for (auto& x : v) x = nd(rng);
            // sometimes plant an exact duplicate
            if (cnt > 1 && rng() % 4 == 0) out[1] = out[0];
            return out;
        };
        auto q = draw(n), t = draw(k);
        double sum = 0, mn = 1e300;
        for (const auto& a : q)
            for (const auto& b : t) {
                double d = naive_cosine(a, b);
                sum += d;
                mn = std::min(mn, d);
            }
        for (std::size_t a = 0; a < k; ++a)
            for (std::size_t b = a + 1; b < k; ++b) {
                double d = naive_cosine(t[a], t[b]);
                sum += d;
                mn = std::min(mn, d);
            }
        const double avg = sum / static_cast<double>(n + k);
        worst = std::max(worst, std::abs(avg - metrics::average_diversity(q, t)));
        worst = std::max(worst, std::abs(mn - metrics::min_diversity(q, t)));
    }
    return {worst <= 1e-9, "1000 instances, max abs deviation " + sci(worst) + " (tolerance 1e-9)"};
}

Verdict alignment_recovery() {
    auto start = std::chrono::steady_clock::now();
    auto run = [](double noise) {
        synth::AlignmentBenchConfig c;
        c.noise = noise;
        c.seed = 5;
        auto bench = synth::alignment_benchmark(c);
        align::HashedColumnEmbedder e;
        std::vector<double> f1;
        for (const auto& q : bench.queries) {
            std::vector<lake::Table> cands;
            for (const auto& t : bench.lake) {
                const auto& names = bench.candidates.at(q.name);
                if (std::find(names.begin(), names.end(), t.name) != names.end()) cands.push_back(t);
            }
            auto m = align::align_columns(q, cands, e, align::EmbedMode::column_level);
            f1.push_back(align::alignment_prf(m, bench.truth.at(q.name)).f1);
        }
        return f1;
    };
    auto clean = run(0.0), noisy = run(0.2);
    const double min_clean = *std::min_element(clean.begin(), clean.end());
    double mean_noisy = 0;
    for (double f : noisy) mean_noisy += f;
    mean_noisy /= static_cast<double>(noisy.size());
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    bool ok = min_clean == 1.0 && mean_noisy >= 0.8 && secs < 60.0;
    return {ok, "5 base tables / 20 lake tables: F1 " + num(min_clean) + " (min over queries, separable), mean F1 " +
                    num(mean_noisy) + " at 20% noise"};
}

Verdict scaling_gate() {
    auto start = std::chrono::steady_clock::now();
    harness::ScaleConfig sc;
    sc.generator.dim = 64;
    sc.generator.clusters = 20;
    sc.generator.seed = 7;
    sc.values = {1000, 2000, 3000, 4000, 5000, 6000, 7000, 8000, 9000, 10000};
    sc.fixed_k = 100;
    sc.repeats = 2;
    auto rs = harness::scale_runtime(sc);

    harness::ScaleConfig kc = sc;
    kc.vary = harness::ScaleAxis::k;
    kc.algorithms = {"dust"};
    kc.values = {10, 50, 100, 150, 200};
    kc.fixed_s = 5000;
    auto rk = harness::scale_runtime(kc);

    double k_lo = 1e300, k_hi = 0;
    for (const auto& p : rk.points) {
        k_lo = std::min(k_lo, p.seconds);
        k_hi = std::max(k_hi, p.seconds);
    }
    double dust10k = 0, gmc10k = 0;
    for (const auto& p : rs.points) {
        if (p.x != 10000) continue;
        (p.algorithm == "dust" ? dust10k : gmc10k) = p.seconds;
    }
    auto de = rs.exponents.at("dust"), ge = rs.exponents.at("gmc");
    const double spread = k_lo > 0 ? k_hi / k_lo : 1e300;
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    bool ok = de && ge && *de < 1.3 && *ge > 1.6 && spread < 2.0 && dust10k * 3.0 <= gmc10k && secs < 900.0;
    return {ok, "exponent DUST " + (de ? num(*de, 3) : std::string("n/a")) + ", GMC " + (ge ? num(*ge, 3) : std::string("n/a")) +
                    "; DUST k-spread " + num(spread, 3) + "x; at s=10000 DUST " + num(dust10k, 3) + "s vs GMC " +
                    num(gmc10k, 3) + "s (" + num(gmc10k / std::max(dust10k, 1e-9), 1) + "x)"};
}

Verdict pruning_ablation() {
    synth::MixtureConfig c;
    c.lake_tuples = 10000;
    c.dim = 64;
    c.clusters = 20;
    c.seed = 11;
    auto inst = harness::synthetic_queries(c, 1);
    DiversifyParams p;
    p.k = 10;
    auto rows = harness::ablate_pruning(inst, p, {std::nullopt, 2500});
    const double speedup = rows[0].seconds / rows[1].seconds;
    const double change = std::abs(rows[1].mean_average - rows[0].mean_average) / rows[0].mean_average;
    bool ok = speedup >= 5.0 && change <= 0.05;
    return {ok, "10000 tuples: " + num(rows[0].seconds, 2) + "s unpruned vs " + num(rows[1].seconds, 2) + "s at s=2500 (" +
                    num(speedup, 1) + "x); Average Diversity change " + num(100 * change, 2) + "%"};
}

Verdict random_dominance() {
    auto inst = harness::synthetic_queries(duplicate_heavy(), 30);
    DiversifyParams p;
    p.k = 10;
    std::size_t wins = 0;
    for (const auto& i : inst) {
        auto d = harness::run_method("dust", i.query, i.lake, p);
        auto r = harness::run_method("random", i.query, i.lake, p);
        wins += d.score.min > r.score.min;
    }
    const double share = static_cast<double>(wins) / 30.0;
    return {share >= 0.9, "DUST beat best-of-5 random on Min Diversity in " + std::to_string(wins) + "/30 queries"};
}

Verdict p_sweep() {
    auto inst = harness::synthetic_queries(duplicate_heavy(), 30);
    DiversifyParams p;
    p.k = 10;
    auto rows = harness::sweep_p(inst, p, {2, 3, 4});
    const double base = rows[0].mean_min;
    bool ok = rows[1].mean_min <= 1.01 * base && rows[2].mean_min <= 1.01 * base;
    return {ok, "mean Min Diversity p=2 " + num(base) + ", p=3 " + num(rows[1].mean_min) + ", p=4 " + num(rows[2].mean_min)};
}

Verdict order_invariance() {
    std::mt19937_64 rng(99);
    synth::WordSource words(4);
    auto vocab = words.many(500, 5);
    embed::HashedPairEmbedder e;
    std::size_t exact = 0;
    const std::size_t n = 10000;
    for (std::size_t t = 0; t < n; ++t) {
        const std::size_t cols = 1 + rng() % 8;
        std::vector<std::string> headers;
        std::vector<lake::Cell> cells;
        for (std::size_t j = 0; j < cols; ++j) {
            headers.push_back("col " + std::to_string(j) + " " + vocab[rng() % vocab.size()]);
            if (rng() % 6 == 0) {
                cells.emplace_back();
            } else {
                std::string v = vocab[rng() % vocab.size()];
                if (rng() % 2) v += " " + vocab[rng() % vocab.size()];
                cells.emplace_back(v);
            }
        }
        std::vector<std::size_t> perm(cols);
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        std::vector<std::string> h2;
        std::vector<lake::Cell> c2;
        for (auto j : perm) {
            h2.push_back(headers[j]);
            c2.push_back(cells[j]);
        }
        auto a = e.embed(embed::serialize_tuple(cells, headers));
        auto b = e.embed(embed::serialize_tuple(c2, h2));
        exact += cosine_similarity(a, b) == 1.0;
    }
    return {exact == n, std::to_string(exact) + "/" + std::to_string(n) + " shuffled tuples with cosine similarity exactly 1.0"};
}

}  // namespace

int main() {
    report("serialization-golden", serialization_golden);
    report("ranking-golden", ranking_golden);
    report("oracle-equivalence", oracle_equivalence);
    report("metric-cross-check", metric_cross_check);
    report("alignment-recovery", alignment_recovery);
    report("scaling-gate", scaling_gate);
    report("pruning-ablation", pruning_ablation);
    report("random-dominance", random_dominance);
    report("p-sweep", p_sweep);
    report("order-invariance", order_invariance);
    std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
