#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <numeric>
#include <vector>

#include "dust/common.hpp"

namespace dust::hac {

/// Upper-triangular pairwise distance storage, n(n-1)/2 entries.
class CondensedMatrix {
public:
    explicit CondensedMatrix(std::size_t n) : n_(n), d_(n < 2 ? 0 : n * (n - 1) / 2, 0.0) {}

    std::size_t size() const { return n_; }

    double& at(std::size_t i, std::size_t j) { return d_[index(i, j)]; }
    double at(std::size_t i, std::size_t j) const { return i == j ? 0.0 : d_[index(i, j)]; }

private:
    std::size_t index(std::size_t i, std::size_t j) const {
        if (i > j) std::swap(i, j);
        return n_ * i - i * (i + 1) / 2 + (j - i - 1);
    }

    std::size_t n_;
    std::vector<double> d_;
};

struct Merge {
    std::size_t a = 0;  // representative point of one side
    std::size_t b = 0;  // representative point of the other side
    double height = 0.0;
};

/// Average-linkage dendrogram by the nearest-neighbour chain algorithm.
/// O(n^2) time on top of the matrix. The input matrix is consumed (updated in
/// place by the Lance-Williams recurrence). Merges are returned sorted by
/// height; equal heights keep discovery order.
inline std::vector<Merge> average_linkage(CondensedMatrix& d) {
    const std::size_t n = d.size();
    std::vector<Merge> merges;
    if (n < 2) return merges;
    merges.reserve(n - 1);
    std::vector<std::size_t> size(n, 1);
    std::vector<bool> active(n, true);
    std::vector<std::size_t> chain;
    chain.reserve(n);
    std::size_t first_active = 0;

    for (std::size_t step = 0; step + 1 < n; ++step) {
        if (chain.empty()) {
            while (!active[first_active]) ++first_active;
            chain.push_back(first_active);
        }
        std::size_t a = 0, b = 0;
        double best = 0.0;
        while (true) {
            a = chain.back();
            std::size_t cand = n;
            best = std::numeric_limits<double>::infinity();
            // The previous chain element wins ties, which guarantees termination.
            if (chain.size() >= 2) {
                cand = chain[chain.size() - 2];
                best = d.at(a, cand);
            }
            for (std::size_t x = 0; x < n; ++x) {
                if (!active[x] || x == a) continue;
                double v = d.at(a, x);
                if (v < best) {
                    best = v;
                    cand = x;
                }
            }
            if (chain.size() >= 2 && cand == chain[chain.size() - 2]) {
                b = cand;
                chain.pop_back();
                chain.pop_back();
                break;
            }
            chain.push_back(cand);
        }
        if (a > b) std::swap(a, b);
        merges.push_back({a, b, best});
        const double sa = static_cast<double>(size[a]);
        const double sb = static_cast<double>(size[b]);
        for (std::size_t x = 0; x < n; ++x) {
            if (!active[x] || x == a || x == b) continue;
            d.at(a, x) = (sa * d.at(a, x) + sb * d.at(b, x)) / (sa + sb);
        }
        size[a] += size[b];
        active[b] = false;
    }
    std::stable_sort(merges.begin(), merges.end(),
                     [](const Merge& x, const Merge& y) { return x.height < y.height; });
    return merges;
}

/// Flat labels for n_clusters after applying the lowest merges. Labels are
/// numbered by each cluster's smallest point index.
inline std::vector<std::size_t> cut(const std::vector<Merge>& merges, std::size_t n_points, std::size_t n_clusters) {
    if (n_clusters == 0 || n_clusters > n_points) throw ConfigError("cut: n_clusters out of range");
    std::vector<std::size_t> parent(n_points);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    for (std::size_t m = 0; m < n_points - n_clusters && m < merges.size(); ++m) {
        auto ra = find(merges[m].a);
        auto rb = find(merges[m].b);
        if (ra == rb) continue;
        if (ra < rb) parent[rb] = ra;
        else parent[ra] = rb;
    }
    std::vector<std::size_t> label(n_points, n_points);
    std::vector<std::size_t> root_label(n_points, n_points);
    std::size_t next = 0;
    for (std::size_t i = 0; i < n_points; ++i) {
        auto r = find(i);
        if (root_label[r] == n_points) root_label[r] = next++;
        label[i] = root_label[r];
    }
    return label;
}

}  // namespace dust::hac
