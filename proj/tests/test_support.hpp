#pragma once

#include "expforge/distribution.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace expforge::testing {

using Rng = std::mt19937_64;

// Dirichlet(1) draw, optionally mixed with the uniform distribution so that
// every entry is at least floor / k.
inline Distribution random_distribution(Rng& rng, std::size_t k, double floor = 0.0) {
    std::gamma_distribution<double> gamma(1.0, 1.0);
    Eigen::VectorXd v(static_cast<Eigen::Index>(k));
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = gamma(rng);
    v /= v.sum();
    v = (1.0 - floor) * v + Eigen::VectorXd::Constant(v.size(), floor / static_cast<double>(k));
    return Distribution::normalized(v);
}

// Random distribution with some entries forced to zero.
inline Distribution random_sparse_distribution(Rng& rng, std::size_t k) {
    std::bernoulli_distribution keep(0.6);
    Eigen::VectorXd v = random_distribution(rng, k).probs();
    for (Eigen::Index i = 0; i < v.size(); ++i)
        if (!keep(rng)) v(i) = 0.0;
    if (v.sum() == 0.0) v(0) = 1.0;
    return Distribution::normalized(v);
}

inline int uniform_int(Rng& rng, int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline double uniform_real(Rng& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// Visits every sequence in {0..k-1}^n in lexicographic order.
template <typename Visit>
void for_each_sequence(std::size_t k, std::size_t n, Visit&& visit) {
    std::vector<int> seq(n, 0);
    while (true) {
        visit(seq);
        std::size_t pos = n;
        while (pos > 0) {
            --pos;
            if (++seq[pos] < static_cast<int>(k)) break;
            seq[pos] = 0;
            if (pos == 0) return;
        }
        if (n == 0) return;
    }
}

}  // namespace expforge::testing
