#pragma once

#include "expforge/distribution.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <string>
#include <vector>

namespace expforge {

inline constexpr double kDefaultTolerance = 1e-6;

// Mixture weights over the extreme points of a hull.
class HullWeights {
public:
    explicit HullWeights(Eigen::VectorXd lambda);
    static HullWeights uniform(std::size_t size);
    static HullWeights vertex(std::size_t size, std::size_t at);

    std::size_t size() const noexcept { return static_cast<std::size_t>(lambda_.size()); }
    const Eigen::VectorXd& lambda() const noexcept { return lambda_; }

private:
    Eigen::VectorXd lambda_;
};

// Convex hull of a finite set of distributions over a common alphabet.
class Hull {
public:
    Hull(std::string label, std::vector<Distribution> extreme_points);
    explicit Hull(const ConditionalFamily& family);

    const std::string& label() const noexcept { return label_; }
    std::size_t num_points() const noexcept { return static_cast<std::size_t>(points_.cols()); }
    std::size_t alphabet_size() const noexcept { return static_cast<std::size_t>(points_.rows()); }

    // |X| x n, one extreme point per column.
    const Eigen::MatrixXd& points() const noexcept { return points_; }
    Distribution extreme_point(std::size_t i) const;

    Hull with_point(const Distribution& extra) const;

private:
    std::string label_;
    Eigen::MatrixXd points_;
};

Distribution hull_point(const Hull& hull, const HullWeights& weights);

struct ProjectionResult {
    double value;            // D(W || point), bits; may be +inf
    HullWeights weights;
    Distribution point;      // hull_point(hull, weights)
    double certified_gap;    // Frank-Wolfe duality gap, bounds value - optimum
    int iterations;
};

// min over the hull of D(W || .), by pairwise Frank-Wolfe with exact line
// search. Returns once the duality gap is <= tol.
ProjectionResult min_divergence_to_hull(const Distribution& w, const Hull& hull,
                                        double tol = kDefaultTolerance);

struct HullPairResult {
    double value;  // min D(a-point || b-point), bits; may be +inf
    HullWeights weights_a;
    HullWeights weights_b;
    double certified_gap;
    int iterations;
};

// min over (lambda, mu) of D(hull_point(a, lambda) || hull_point(b, mu)).
// Block-coordinate pairwise Frank-Wolfe over the product of simplices.
HullPairResult min_divergence_between_hulls(const Hull& a, const Hull& b,
                                            double tol = kDefaultTolerance);

// Exhaustive minimum over the lambda grid of the given denominator. An upper
// bound on the true minimum; reference values only.
double oracle_min_divergence_to_hull(const Distribution& w, const Hull& hull,
                                     int grid_denominator);

}  // namespace expforge
