#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "dust/column_align.hpp"
#include "dust/diversify.hpp"
#include "dust/lake_model.hpp"
#include "dust/serialize_embed.hpp"

namespace dust::io {

using json = nlohmann::json;
using lake::IoError;

namespace detail {

inline std::ifstream open_in(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw IoError("cannot open '" + p.string() + "' for reading");
    return in;
}

inline std::ofstream open_out(const std::filesystem::path& p) {
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out) throw IoError("cannot open '" + p.string() + "' for writing");
    return out;
}

inline json parse_line(const std::string& line, std::size_t line_no) {
    try {
        return json::parse(line);
    } catch (const json::parse_error& e) {
        throw IoError("line " + std::to_string(line_no) + ": malformed JSON: " + e.what());
    }
}

inline Vec read_vec(const json& j, std::size_t dim, std::size_t line_no) {
    if (!j.is_array()) throw IoError("line " + std::to_string(line_no) + ": 'vec' must be an array");
    if (j.size() != dim) {
        throw IoError("line " + std::to_string(line_no) + ": vector has dimension " + std::to_string(j.size()) +
                      ", header says " + std::to_string(dim));
    }
    Vec v;
    v.reserve(dim);
    for (const auto& x : j) {
        if (!x.is_number()) throw IoError("line " + std::to_string(line_no) + ": non-numeric vector component");
        double d = x.get<double>();
        if (!std::isfinite(d)) throw IoError("line " + std::to_string(line_no) + ": non-finite vector component");
        v.push_back(d);
    }
    return v;
}

template <class F>
void for_each_line(std::istream& in, F&& f) {
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        f(line, line_no);
    }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Tuple embeddings (JSONL: header line, then one record per tuple)
//   {"dim": 256, "provider": "..."}
//   {"table": "b", "row": 0, "vec": [...]}
// ---------------------------------------------------------------------------

struct TupleVectors {
    std::size_t dim = 0;
    std::string provider;
    std::map<lake::TupleRef, Vec> vectors;
    std::vector<lake::TupleRef> order;  // file order
};

inline TupleVectors read_tuple_vectors(std::istream& in) {
    TupleVectors out;
    bool header = false;
    detail::for_each_line(in, [&](const std::string& line, std::size_t line_no) {
        json j = detail::parse_line(line, line_no);
        if (!header) {
            if (!j.is_object() || !j.contains("dim") || !j["dim"].is_number_unsigned()) {
                throw IoError("line " + std::to_string(line_no) + ": expected header {\"dim\": <int>, \"provider\": ...}");
            }
            out.dim = j["dim"].get<std::size_t>();
            if (out.dim == 0) throw IoError("embedding header declares dim 0");
            out.provider = j.value("provider", std::string("imported"));
            header = true;
            return;
        }
        if (!j.is_object() || !j.contains("table") || !j.contains("row") || !j.contains("vec") ||
            !j["table"].is_string() || !j["row"].is_number_unsigned()) {
            throw IoError("line " + std::to_string(line_no) + ": expected {\"table\", \"row\", \"vec\"}");
        }
        lake::TupleRef id{j["table"].get<std::string>(), j["row"].get<std::size_t>()};
        Vec v = detail::read_vec(j["vec"], out.dim, line_no);
        if (!out.vectors.emplace(id, std::move(v)).second) {
            throw IoError("line " + std::to_string(line_no) + ": duplicate tuple " +
                          embed::EmbeddingMatrix::describe(id));
        }
        out.order.push_back(std::move(id));
    });
    if (!header) throw IoError("embedding file has no header line");
    return out;
}

inline TupleVectors read_tuple_vectors(const std::filesystem::path& p) {
    auto in = detail::open_in(p);
    try {
        return read_tuple_vectors(in);
    } catch (const IoError& e) {
        throw IoError(p.string() + ": " + e.what());
    }
}

inline embed::ImportedTupleEmbedder import_provider(const std::filesystem::path& p) {
    auto tv = read_tuple_vectors(p);
    return embed::ImportedTupleEmbedder(tv.dim, tv.provider, std::move(tv.vectors));
}

inline embed::EmbeddingMatrix to_matrix(const TupleVectors& tv) {
    embed::EmbeddingMatrix m(tv.dim, tv.provider);
    m.reserve(tv.order.size());
    for (const auto& id : tv.order) m.add(id, tv.vectors.at(id));
    return m;
}

inline void write_tuple_embeddings(std::ostream& out, const embed::EmbeddingMatrix& m) {
    out << json{{"dim", m.dim()}, {"provider", m.provider_tag()}}.dump() << '\n';
    for (std::size_t i = 0; i < m.size(); ++i) {
        auto r = m.row(i);
        json rec{{"table", m.id(i).table}, {"row", m.id(i).row}, {"vec", Vec(r.begin(), r.end())}};
        out << rec.dump() << '\n';
    }
}

inline void write_tuple_embeddings(const std::filesystem::path& p, const embed::EmbeddingMatrix& m) {
    auto out = detail::open_out(p);
    write_tuple_embeddings(out, m);
}

// ---------------------------------------------------------------------------
// Column embeddings (JSONL: header line, then {"table", "index", "vec"})
// ---------------------------------------------------------------------------

inline align::ImportedColumnEmbedder read_column_embeddings(std::istream& in) {
    std::size_t dim = 0;
    std::map<std::pair<std::string, std::size_t>, Vec> vectors;
    detail::for_each_line(in, [&](const std::string& line, std::size_t line_no) {
        json j = detail::parse_line(line, line_no);
        if (dim == 0) {
            if (!j.is_object() || !j.contains("dim") || !j["dim"].is_number_unsigned() || j["dim"].get<std::size_t>() == 0) {
                throw IoError("line " + std::to_string(line_no) + ": expected header {\"dim\": <int>}");
            }
            dim = j["dim"].get<std::size_t>();
            return;
        }
        if (!j.is_object() || !j.contains("table") || !j.contains("index") || !j.contains("vec") ||
            !j["table"].is_string() || !j["index"].is_number_unsigned()) {
            throw IoError("line " + std::to_string(line_no) + ": expected {\"table\", \"index\", \"vec\"}");
        }
        std::pair<std::string, std::size_t> key{j["table"].get<std::string>(), j["index"].get<std::size_t>()};
        if (!vectors.emplace(key, detail::read_vec(j["vec"], dim, line_no)).second) {
            throw IoError("line " + std::to_string(line_no) + ": duplicate column " + key.first + "." +
                          std::to_string(key.second));
        }
    });
    if (dim == 0) throw IoError("column embedding file has no header line");
    return align::ImportedColumnEmbedder(dim, std::move(vectors));
}

inline align::ImportedColumnEmbedder read_column_embeddings(const std::filesystem::path& p) {
    auto in = detail::open_in(p);
    return read_column_embeddings(in);
}

// ---------------------------------------------------------------------------
// Ser(t) export: one serialized tuple per line plus a TSV index
//   line<TAB>table<TAB>row
// ---------------------------------------------------------------------------

inline std::string one_line(std::string s) {
    for (auto& c : s) {
        if (c == '\n' || c == '\r') c = ' ';
    }
    return s;
}

inline void write_serialized(std::ostream& text, std::ostream& index, std::span<const embed::SerializedTuple> tuples) {
    index << "line\ttable\trow\n";
    for (std::size_t i = 0; i < tuples.size(); ++i) {
        text << one_line(tuples[i].text) << '\n';
        index << i << '\t' << tuples[i].source.table << '\t' << tuples[i].source.row << '\n';
    }
}

inline void write_serialized(const std::filesystem::path& text_path, const std::filesystem::path& index_path,
                             std::span<const embed::SerializedTuple> tuples) {
    auto t = detail::open_out(text_path);
    auto i = detail::open_out(index_path);
    write_serialized(t, i, tuples);
}

// ---------------------------------------------------------------------------
// JSON documents
// ---------------------------------------------------------------------------

inline json to_json(const lake::ColumnRef& c) {
    json j{{"table", c.table}, {"index", c.index}};
    if (c.header) j["header"] = *c.header;
    return j;
}

inline lake::ColumnRef column_ref_from_json(const json& j) {
    if (!j.is_object() || !j.contains("table") || !j.contains("index")) {
        throw ConfigError("column reference must be {\"table\": ..., \"index\": ...}");
    }
    lake::ColumnRef c{j["table"].get<std::string>(), j["index"].get<std::size_t>(), std::nullopt};
    if (j.contains("header")) c.header = j["header"].get<std::string>();
    return c;
}

inline json to_json(const align::AlignmentMap& m) {
    json clusters = json::array();
    for (const auto& c : m.clusters) {
        json members = json::array();
        for (const auto& x : c.members) members.push_back(to_json(x));
        clusters.push_back({{"anchor", to_json(c.anchor)}, {"members", members}});
    }
    json discarded = json::array();
    for (const auto& x : m.discarded) discarded.push_back(to_json(x));
    json j{{"n_clusters", m.n_clusters}, {"clusters", clusters}, {"discarded", discarded}};
    j["silhouette"] = m.silhouette ? json(*m.silhouette) : json(nullptr);
    return j;
}

inline align::AlignmentMap alignment_from_json(const json& j) {
    align::AlignmentMap m;
    m.n_clusters = j.at("n_clusters").get<std::size_t>();
    for (const auto& c : j.at("clusters")) {
        align::AlignedCluster ac{column_ref_from_json(c.at("anchor")), {}};
        for (const auto& x : c.at("members")) ac.members.push_back(column_ref_from_json(x));
        m.clusters.push_back(std::move(ac));
    }
    for (const auto& x : j.at("discarded")) m.discarded.push_back(column_ref_from_json(x));
    if (j.contains("silhouette") && !j["silhouette"].is_null()) m.silhouette = j["silhouette"].get<double>();
    return m;
}

inline json to_json(const metrics::DiversityScore& s) {
    return {{"average_diversity", s.average}, {"min_diversity", s.min}, {"n_query", s.n}, {"k", s.k}};
}

inline std::string objective_name(diversify::Objective o) {
    return o == diversify::Objective::max_sum ? "max-sum" : "max-min";
}

inline diversify::Objective parse_objective(const std::string& s) {
    if (s == "max-sum") return diversify::Objective::max_sum;
    if (s == "max-min") return diversify::Objective::max_min;
    throw ConfigError("unknown objective '" + s + "'");
}

inline json to_json(const diversify::DiversifyParams& p) {
    json j{{"k", p.k},
           {"p", p.p},
           {"seed", p.seed},
           {"objective", objective_name(p.objective)},
           {"distance", std::string(metric_name(p.metric))},
           {"lambda", p.lambda},
           {"gne_iterations", p.gne_iterations}};
    j["s"] = p.s ? json(*p.s) : json(nullptr);
    return j;
}

inline json to_json(const diversify::DiverseResult& r, const diversify::DiversifyParams& p) {
    json sel = json::array();
    for (const auto& t : r.selected) {
        sel.push_back({{"table", t.id.table}, {"row", t.id.row}, {"rank_score", t.rank_score}, {"tie_score", t.tie_score}});
    }
    json j{{"algorithm", r.algorithm}, {"params", to_json(p)}, {"selected", sel}};
    j["metrics"] = r.metrics ? to_json(*r.metrics) : json(nullptr);
    j["warnings"] = r.warnings;
    return j;
}

inline void write_json(const std::filesystem::path& p, const json& j) {
    auto out = detail::open_out(p);
    out << j.dump(2) << '\n';
}

inline json read_json(const std::filesystem::path& p) {
    auto in = detail::open_in(p);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(p.string() + ": malformed JSON: " + e.what());
    }
}

// ---------------------------------------------------------------------------
// Benchmark manifest
// ---------------------------------------------------------------------------

struct Manifest {
    std::filesystem::path base;  // directory relative paths resolve against
    std::vector<std::filesystem::path> query_tables;
    std::vector<std::filesystem::path> lake_tables;
    std::optional<std::map<std::string, std::vector<std::string>>> candidates;
    std::set<align::ColumnPair> alignment_ground_truth;
};

inline Manifest parse_manifest(const json& j, const std::filesystem::path& base) {
    if (!j.is_object()) throw ConfigError("manifest must be a JSON object");
    Manifest m;
    m.base = base;
    auto paths = [&](const char* key) {
        std::vector<std::filesystem::path> out;
        if (!j.contains(key) || !j[key].is_array()) throw ConfigError(std::string("manifest needs an array '") + key + "'");
        for (const auto& p : j[key]) {
            std::filesystem::path path = p.get<std::string>();
            if (path.is_relative()) path = base / path;
            if (!std::filesystem::exists(path)) throw ConfigError("manifest references missing file '" + path.string() + "'");
            out.push_back(path);
        }
        return out;
    };
    m.query_tables = paths("query_tables");
    m.lake_tables = paths("lake_tables");
    if (j.contains("candidates") && !j["candidates"].is_null()) {
        std::map<std::string, std::vector<std::string>> cands;
        for (const auto& [q, list] : j["candidates"].items()) cands[q] = list.get<std::vector<std::string>>();
        m.candidates = std::move(cands);
    }
    if (j.contains("alignment_ground_truth")) {
        for (const auto& pair : j["alignment_ground_truth"]) {
            if (!pair.is_array() || pair.size() != 2) throw ConfigError("ground-truth entries must be pairs of column refs");
            m.alignment_ground_truth.insert(
                align::make_pair(column_ref_from_json(pair[0]), column_ref_from_json(pair[1])));
        }
    }
    return m;
}

inline Manifest load_manifest(const std::filesystem::path& p) {
    return parse_manifest(read_json(p), p.parent_path());
}

inline json to_json(const Manifest& m, const std::filesystem::path& relative_to) {
    auto rel = [&](const std::filesystem::path& p) { return std::filesystem::relative(p, relative_to).generic_string(); };
    json j;
    j["query_tables"] = json::array();
    for (const auto& p : m.query_tables) j["query_tables"].push_back(rel(p));
    j["lake_tables"] = json::array();
    for (const auto& p : m.lake_tables) j["lake_tables"].push_back(rel(p));
    if (m.candidates) j["candidates"] = *m.candidates;
    json gt = json::array();
    for (const auto& [a, b] : m.alignment_ground_truth) gt.push_back({to_json(a), to_json(b)});
    j["alignment_ground_truth"] = gt;
    return j;
}

}  // namespace dust::io
