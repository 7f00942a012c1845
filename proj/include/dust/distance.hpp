#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>

#include "dust/common.hpp"

namespace dust {

enum class Metric { cosine, euclidean, manhattan };

inline Metric parse_metric(std::string_view s) {
    if (s == "cosine") return Metric::cosine;
    if (s == "euclidean") return Metric::euclidean;
    if (s == "manhattan") return Metric::manhattan;
    throw ConfigError("unknown distance '" + std::string(s) + "'");
}

inline std::string_view metric_name(Metric m) {
    switch (m) {
        case Metric::cosine: return "cosine";
        case Metric::euclidean: return "euclidean";
        case Metric::manhattan: return "manhattan";
    }
    return "?";
}

// Four partial sums let the compiler keep several FMA lanes busy. The
// summation order depends only on the index, so dot(u, v) == dot(v, u).
inline double dot(std::span<const double> u, std::span<const double> v) {
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    const std::size_t n = u.size();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        s0 += u[i] * v[i];
        s1 += u[i + 1] * v[i + 1];
        s2 += u[i + 2] * v[i + 2];
        s3 += u[i + 3] * v[i + 3];
    }
    for (; i < n; ++i) s0 += u[i] * v[i];
    return (s0 + s1) + (s2 + s3);
}

// 1 - dot / sqrt(uu * vv). For u == v, sqrt(uu * uu) == uu exactly in IEEE
// arithmetic, so the distance of a vector to itself is exactly 0.
inline double cosine_from_parts(double uv, double uu, double vv) {
    double c = uv / std::sqrt(uu * vv);
    return 1.0 - std::clamp(c, -1.0, 1.0);
}

/// Cosine distance in [0, 2]. Throws on zero vectors or dimension mismatch.
inline double cosine_distance(std::span<const double> u, std::span<const double> v) {
    if (u.size() != v.size()) throw Error("cosine_distance: dimension mismatch");
    double uu = dot(u, u);
    double vv = dot(v, v);
    if (uu == 0.0 || vv == 0.0) throw Error("cosine_distance: zero vector");
    return cosine_from_parts(dot(u, v), uu, vv);
}

inline double cosine_similarity(std::span<const double> u, std::span<const double> v) {
    return 1.0 - cosine_distance(u, v);
}

inline double euclidean_distance(std::span<const double> u, std::span<const double> v) {
    if (u.size() != v.size()) throw Error("euclidean_distance: dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        double d = u[i] - v[i];
        s += d * d;
    }
    return std::sqrt(s);
}

inline double manhattan_distance(std::span<const double> u, std::span<const double> v) {
    if (u.size() != v.size()) throw Error("manhattan_distance: dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) s += std::abs(u[i] - v[i]);
    return s;
}

inline double distance(Metric m, std::span<const double> u, std::span<const double> v) {
    switch (m) {
        case Metric::cosine: return cosine_distance(u, v);
        case Metric::euclidean: return euclidean_distance(u, v);
        case Metric::manhattan: return manhattan_distance(u, v);
    }
    return 0.0;
}

}  // namespace dust
