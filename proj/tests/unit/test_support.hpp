#pragma once

#include <cmath>
#include <functional>
#include <random>

#include "pmwls/model.hpp"
#include "pmwls/objective.hpp"

namespace pmwls::test {

struct Instance {
    Dataset data;
    Vector theta;
};

inline RowMatrix random_rows(Index n, Index d, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    RowMatrix x(n, d);
    for (Index t = 0; t < n; ++t)
        for (Index k = 0; k < d; ++k) x(t, k) = g(rng);
    return x;
}

inline Vector random_vector(Index n, std::mt19937_64& rng, double sd = 1.0) {
    std::normal_distribution<double> g(0.0, sd);
    Vector v(n);
    for (Index i = 0; i < n; ++i) v(i) = g(rng);
    return v;
}

/// y = logistic(x theta) + shift + noise.
inline Instance logistic_instance(Index n, Index d, std::uint64_t seed, double noise = 0.1, double shift = 0.3) {
    std::mt19937_64 rng(seed);
    RowMatrix x = random_rows(n, d, rng);
    Vector theta = random_vector(d, rng);
    Vector y(n);
    Vector e = random_vector(n, rng, noise);
    for (Index t = 0; t < n; ++t) y(t) = 1.0 / (1.0 + std::exp(-x.row(t).dot(theta))) + shift + e(t);
    return {make_dataset(y, x), theta};
}

/// Brute-force minimizer of fn over a uniform 1-D grid of `points` values in [lo, hi].
inline double grid_argmin(const std::function<double(double)>& fn, double lo, double hi, int points) {
    double best = lo;
    double best_val = fn(lo);
    for (int i = 1; i < points; ++i) {
        double u = lo + (hi - lo) * i / (points - 1);
        double v = fn(u);
        if (v < best_val) {
            best_val = v;
            best = u;
        }
    }
    return best;
}

}  // namespace pmwls::test
