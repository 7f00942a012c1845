#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dust/column_align.hpp"
#include "dust/common.hpp"
#include "dust/distance.hpp"
#include "dust/lake_model.hpp"

namespace dust::embed {

using lake::TupleRef;

class MissingEmbeddingError : public Error {
public:
    using Error::Error;
};

// ---------------------------------------------------------------------------
// Embedding matrix
// ---------------------------------------------------------------------------

/// Row-major tuple embeddings keyed by unique tuple ids.
class EmbeddingMatrix {
public:
    EmbeddingMatrix() = default;
    explicit EmbeddingMatrix(std::size_t dim, std::string provider_tag = "")
        : dim_(dim), tag_(std::move(provider_tag)) {
        if (dim_ == 0) throw ConfigError("embedding dimension must be > 0");
    }

    void reserve(std::size_t rows) {
        ids_.reserve(rows);
        data_.reserve(rows * dim_);
    }

    void add(TupleRef id, std::span<const double> v) {
        if (v.size() != dim_) {
            throw Error("embedding for " + describe(id) + " has dimension " + std::to_string(v.size()) +
                        ", expected " + std::to_string(dim_));
        }
        for (double x : v) {
            if (!std::isfinite(x)) throw Error("embedding for " + describe(id) + " has a non-finite component");
        }
        if (!index_.try_emplace(id, ids_.size()).second) throw Error("duplicate embedding id " + describe(id));
        ids_.push_back(std::move(id));
        data_.insert(data_.end(), v.begin(), v.end());
    }

    std::size_t size() const { return ids_.size(); }
    bool empty() const { return ids_.empty(); }
    std::size_t dim() const { return dim_; }
    const std::string& provider_tag() const { return tag_; }
    const std::vector<TupleRef>& ids() const { return ids_; }
    const TupleRef& id(std::size_t i) const { return ids_.at(i); }

    std::span<const double> row(std::size_t i) const { return {data_.data() + i * dim_, dim_}; }

    std::optional<std::size_t> find(const TupleRef& id) const {
        auto it = index_.find(id);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    /// Rows in the given order.
    EmbeddingMatrix subset(std::span<const std::size_t> rows) const {
        EmbeddingMatrix out(dim_, tag_);
        out.reserve(rows.size());
        for (auto r : rows) out.add(ids_.at(r), row(r));
        return out;
    }

    static std::string describe(const TupleRef& id) { return id.table + "#" + std::to_string(id.row); }

private:
    std::size_t dim_ = 1;
    std::string tag_;
    std::vector<TupleRef> ids_;
    std::vector<double> data_;
    std::map<TupleRef, std::size_t> index_;
};

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

inline constexpr std::string_view kCls = "[CLS]";
inline constexpr std::string_view kSep = "[SEP]";

struct SerializedTuple {
    std::string text;
    std::vector<std::pair<std::string, std::string>> segments;  // (header, value), nulls omitted
    TupleRef source;
    bool all_null = false;
};

namespace detail {

inline std::string replace_all(std::string s, std::string_view from, std::string_view to) {
    std::size_t pos = 0;
    while ((pos = s.find(from, pos)) != std::string::npos) {
        s.replace(pos, from.size(), to);
        pos += to.size();
    }
    return s;
}

}  // namespace detail

// Marker literals inside data get a leading backslash.
inline std::string escape_markers(std::string s) {
    s = detail::replace_all(std::move(s), kCls, "\\[CLS]");
    return detail::replace_all(std::move(s), kSep, "\\[SEP]");
}

inline std::string unescape_markers(std::string s) {
    s = detail::replace_all(std::move(s), "\\[CLS]", kCls);
    return detail::replace_all(std::move(s), "\\[SEP]", kSep);
}

/// "[CLS] h1 v1 [SEP] h2 v2 [SEP] ... [SEP]" with null cells skipped.
inline SerializedTuple serialize_tuple(std::span<const lake::Cell> cells, std::span<const std::string> headers,
                                       TupleRef source = {}) {
    if (cells.size() != headers.size()) throw Error("serialize_tuple: cell count does not match schema");
    SerializedTuple out;
    out.source = std::move(source);
    out.text = kCls;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (!cells[i]) continue;
        out.segments.emplace_back(headers[i], *cells[i]);
        out.text += ' ';
        out.text += escape_markers(headers[i]);
        out.text += ' ';
        out.text += escape_markers(*cells[i]);
        out.text += ' ';
        out.text += kSep;
    }
    if (out.segments.empty()) {
        out.all_null = true;
        out.text += ' ';
        out.text += kSep;
    }
    return out;
}

/// Recovers (header, value) segments from serialized text given the schema
/// headers in serialization order.
inline std::vector<std::pair<std::string, std::string>> parse_serialized(std::string_view text,
                                                                         std::span<const std::string> headers) {
    const std::string prefix = std::string(kCls) + " ";
    const std::string suffix = " " + std::string(kSep);
    if (text.substr(0, prefix.size()) != prefix || text.size() < prefix.size() + kSep.size() ||
        text.substr(text.size() - kSep.size()) != kSep) {
        throw Error("malformed serialized tuple");
    }
    std::vector<std::pair<std::string, std::string>> out;
    if (text == prefix + std::string(kSep)) return out;
    if (text.size() < prefix.size() + suffix.size()) throw Error("malformed serialized tuple");
    std::string_view body = text.substr(prefix.size(), text.size() - prefix.size() - suffix.size());
    const std::string delim = " " + std::string(kSep) + " ";
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        auto pos = body.find(delim, start);
        if (pos == std::string_view::npos) {
            parts.push_back(body.substr(start));
            break;
        }
        parts.push_back(body.substr(start, pos - start));
        start = pos + delim.size();
    }
    std::size_t h = 0;
    for (auto part : parts) {
        bool matched = false;
        for (; h < headers.size(); ++h) {
            auto esc = escape_markers(headers[h]) + " ";
            if (part.substr(0, esc.size()) == esc) {
                out.emplace_back(headers[h], unescape_markers(std::string(part.substr(esc.size()))));
                ++h;
                matched = true;
                break;
            }
        }
        if (!matched) throw Error("serialized segment does not start with a schema header");
    }
    return out;
}

// ---------------------------------------------------------------------------
// Tuple embedding providers
// ---------------------------------------------------------------------------

class TupleEmbedder {
public:
    virtual ~TupleEmbedder() = default;
    virtual std::size_t dim() const = 0;
    virtual std::string tag() const = 0;
    virtual Vec embed(const SerializedTuple& t) const = 0;
};

/// Hashed bag of (header token, value token) pairs with integer counts,
/// L2-normalized. Counts are order-free, so permuting columns reproduces the
/// vector bit for bit.
class HashedPairEmbedder final : public TupleEmbedder {
public:
    explicit HashedPairEmbedder(std::size_t dim = 256) : dim_(dim) {
        if (dim_ == 0) throw ConfigError("tuple embedder dimension must be > 0");
    }

    std::size_t dim() const override { return dim_; }
    std::string tag() const override { return "builtin-hashed-pairs"; }

    Vec embed(const SerializedTuple& t) const override {
        std::vector<std::uint64_t> counts(dim_, 0);
        bool any = false;
        for (const auto& [header, value] : t.segments) {
            auto htoks = text::tokenize(header);
            auto vtoks = text::tokenize(value);
            for (const auto& ht : htoks) {
                for (const auto& vt : vtoks) {
                    std::string key = ht;
                    key += '\x1f';
                    key += vt;
                    ++counts[text::fnv1a(key) % dim_];
                    any = true;
                }
            }
        }
        if (!any) ++counts[text::fnv1a("\x1f<empty>") % dim_];
        Vec v(dim_);
        double ss = 0.0;
        for (std::size_t i = 0; i < dim_; ++i) {
            v[i] = static_cast<double>(counts[i]);
            ss += v[i] * v[i];
        }
        double n = std::sqrt(ss);
        for (auto& x : v) x /= n;
        return v;
    }

private:
    std::size_t dim_;
};

/// Serves embeddings produced elsewhere, keyed by tuple id.
class ImportedTupleEmbedder final : public TupleEmbedder {
public:
    ImportedTupleEmbedder(std::size_t dim, std::string tag, std::map<TupleRef, Vec> vectors)
        : dim_(dim), tag_(std::move(tag)), vectors_(std::move(vectors)) {}

    std::size_t dim() const override { return dim_; }
    std::string tag() const override { return tag_; }

    Vec embed(const SerializedTuple& t) const override {
        auto it = vectors_.find(t.source);
        if (it == vectors_.end()) {
            throw MissingEmbeddingError("no imported embedding for tuple " + EmbeddingMatrix::describe(t.source));
        }
        return it->second;
    }

    std::size_t size() const { return vectors_.size(); }

private:
    std::size_t dim_;
    std::string tag_;
    std::map<TupleRef, Vec> vectors_;
};

/// Query rows as tuples over the query's own column order.
inline std::vector<align::UnionedTuple> query_tuples(const lake::Table& q) {
    std::vector<align::UnionedTuple> out;
    out.reserve(q.num_rows());
    for (std::size_t r = 0; r < q.num_rows(); ++r) out.push_back({{q.name, r}, q.rows[r]});
    return out;
}

inline std::vector<SerializedTuple> serialize_all(std::span<const align::UnionedTuple> tuples,
                                                  std::span<const std::string> schema) {
    std::vector<SerializedTuple> out;
    out.reserve(tuples.size());
    for (const auto& t : tuples) out.push_back(serialize_tuple(t.cells, schema, t.source));
    return out;
}

inline EmbeddingMatrix embed_tuples(std::span<const align::UnionedTuple> tuples,
                                    std::span<const std::string> schema, const TupleEmbedder& provider) {
    EmbeddingMatrix m(provider.dim(), provider.tag());
    m.reserve(tuples.size());
    for (const auto& t : tuples) {
        auto s = serialize_tuple(t.cells, schema, t.source);
        Vec v;
        try {
            v = provider.embed(s);
        } catch (const MissingEmbeddingError&) {
            throw;
        } catch (const std::exception& e) {
            throw Error("embedding failed for tuple " + EmbeddingMatrix::describe(t.source) + ": " + e.what());
        }
        m.add(t.source, v);
    }
    return m;
}

// ---------------------------------------------------------------------------
// Pair-level scoring
// ---------------------------------------------------------------------------

inline double cosine_embedding_loss(std::span<const double> e1, std::span<const double> e2, int label) {
    double c = cosine_similarity(e1, e2);
    if (label == 1) return 1.0 - c;
    if (label == 0) return std::max(0.0, c);
    throw ConfigError("cosine_embedding_loss: label must be 0 or 1");
}

inline constexpr double kUnionableThreshold = 0.7;

inline bool is_unionable_distance(double distance, double threshold = kUnionableThreshold) {
    return distance < threshold;
}

inline bool classify_unionable(std::span<const double> e1, std::span<const double> e2,
                               double threshold = kUnionableThreshold) {
    return is_unionable_distance(cosine_distance(e1, e2), threshold);
}

/// (TP + TN) / (TP + TN + FP + FN).
inline double pair_accuracy(const std::vector<bool>& predictions, const std::vector<bool>& labels) {
    if (predictions.size() != labels.size()) throw ConfigError("pair_accuracy: length mismatch");
    if (predictions.empty()) throw ConfigError("pair_accuracy: empty input");
    std::size_t correct = 0;
    for (std::size_t i = 0; i < predictions.size(); ++i) correct += predictions[i] == labels[i];
    return static_cast<double>(correct) / static_cast<double>(predictions.size());
}

}  // namespace dust::embed
