#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "dust/distance.hpp"
#include "dust/serialize_embed.hpp"

namespace dust {

/// Distance view over an embedding matrix. Caches squared norms so cosine
/// distances cost one dot product per pair.
class Points {
public:
    Points(const embed::EmbeddingMatrix& m, Metric metric) : m_(&m), metric_(metric) {
        if (metric_ != Metric::cosine) return;
        sq_.resize(m.size());
        for (std::size_t i = 0; i < m.size(); ++i) {
            sq_[i] = dot(m.row(i), m.row(i));
            if (sq_[i] == 0.0) {
                throw Error("zero embedding for tuple " + embed::EmbeddingMatrix::describe(m.id(i)) +
                            " has no cosine distance");
            }
        }
    }

    std::size_t size() const { return m_->size(); }
    Metric metric() const { return metric_; }
    const embed::EmbeddingMatrix& matrix() const { return *m_; }
    std::span<const double> row(std::size_t i) const { return m_->row(i); }

    double between(std::size_t i, std::size_t j) const { return to(i, *this, j); }

    double to(std::size_t i, const Points& other, std::size_t j) const {
        switch (metric_) {
            case Metric::cosine:
                return cosine_from_parts(dot(row(i), other.row(j)), sq_[i], other.sq_[j]);
            case Metric::euclidean: return euclidean_distance(row(i), other.row(j));
            case Metric::manhattan: return manhattan_distance(row(i), other.row(j));
        }
        return 0.0;
    }

private:
    const embed::EmbeddingMatrix* m_;
    Metric metric_;
    std::vector<double> sq_;
};

}  // namespace dust
