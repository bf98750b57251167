#pragma once

#include "expforge/distribution.hpp"

#include <Eigen/Core>

#include <cmath>
#include <limits>

namespace expforge {

// All logarithms are base 2; divergences and entropies are in bits.
// +infinity is an ordinary return value for divergences.

namespace kernel {

template <typename Derived>
typename Derived::Scalar entropy(const Eigen::MatrixBase<Derived>& q) {
    using Scalar = typename Derived::Scalar;
    Scalar h(0);
    for (Eigen::Index i = 0; i < q.size(); ++i) {
        const Scalar qi = q(i);
        if (qi > Scalar(0)) h -= qi * std::log2(qi);
    }
    return h;
}

template <typename DerivedQ, typename DerivedG>
typename DerivedQ::Scalar kl_divergence(const Eigen::MatrixBase<DerivedQ>& q,
                                        const Eigen::MatrixBase<DerivedG>& g) {
    using Scalar = typename DerivedQ::Scalar;
    Scalar d(0);
    for (Eigen::Index i = 0; i < q.size(); ++i) {
        const Scalar qi = q(i);
        if (!(qi > Scalar(0))) continue;
        const Scalar gi = g(i);
        if (!(gi > Scalar(0))) return std::numeric_limits<Scalar>::infinity();
        d += qi * std::log2(qi / gi);
    }
    // Roundoff can leave tiny negative sums for q == g up to the last ulp.
    return d < Scalar(0) ? Scalar(0) : d;
}

// sum_s P(s) D(G(.|s) || Gm(.|s)) with columns indexed by state.
template <typename DerivedG, typename DerivedGm, typename DerivedP>
typename DerivedG::Scalar kl_divergence_cond(const Eigen::MatrixBase<DerivedG>& g,
                                             const Eigen::MatrixBase<DerivedGm>& gm,
                                             const Eigen::MatrixBase<DerivedP>& p) {
    using Scalar = typename DerivedG::Scalar;
    Scalar d(0);
    for (Eigen::Index s = 0; s < p.size(); ++s) {
        if (!(p(s) > Scalar(0))) continue;
        d += p(s) * kl_divergence(g.col(s), gm.col(s));
    }
    return d;
}

}  // namespace kernel

double entropy(const Distribution& q);

// H(G|P) = sum_s P(s) H(G(.|s)).
double entropy_cond(const ConditionalFamily& g, const Distribution& state_dist);

double kl_divergence(const Distribution& q, const Distribution& g);

// D(G || Gm | P). The first family plays the role of a conditional type.
double kl_divergence_cond(const ConditionalFamily& g, const ConditionalFamily& gm,
                          const Distribution& state_dist);

}  // namespace expforge
