#include "expforge/hull.hpp"

#include "expforge/divergence.hpp"
#include "expforge/errors.hpp"
#include "expforge/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <utility>

namespace expforge {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kMaxIterations = 200000;

void check_weights(const Eigen::VectorXd& lambda) {
    if (lambda.size() == 0) throw InputError("hull weights must be nonempty");
    for (Eigen::Index i = 0; i < lambda.size(); ++i) {
        if (!(lambda(i) >= 0.0 && lambda(i) <= 1.0)) throw InputError("hull weight outside [0,1]");
    }
    if (std::abs(lambda.sum() - 1.0) > kSimplexTolerance) throw InputError("hull weights do not sum to 1");
}

// Clears roundoff drift accumulated by pairwise updates.
Eigen::VectorXd tidy(Eigen::VectorXd lambda) {
    lambda = lambda.cwiseMax(0.0);
    lambda /= lambda.sum();
    return lambda;
}

// Minimizer over [0, max_step] of a convex function given its derivative and
// curvature. Safeguarded Newton inside a sign bracket.
template <typename Derivs>
double exact_line_search(Derivs&& derivs, double max_step) {
    if (const auto [d_max, dd_max] = derivs(max_step); d_max <= 0.0) return max_step;
    double lo = 0.0;
    double hi = max_step;
    double g = 0.0;
    for (int it = 0; it < 200; ++it) {
        const auto [d, dd] = derivs(g);
        if (d == 0.0) return g;
        if (d < 0.0) lo = g; else hi = g;
        double next = g - d / dd;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - g) <= 1e-15 * max_step) return std::clamp(next, lo, hi);
        if (hi - lo <= 1e-16 * max_step) return lo;
        g = next;
    }
    return lo;
}

std::size_t argmax_lowest(const Eigen::VectorXd& v) {
    std::size_t best = 0;
    for (Eigen::Index i = 1; i < v.size(); ++i)
        if (v(i) > v(static_cast<Eigen::Index>(best))) best = static_cast<std::size_t>(i);
    return best;
}

std::size_t argmin_lowest(const Eigen::VectorXd& v) {
    std::size_t best = 0;
    for (Eigen::Index i = 1; i < v.size(); ++i)
        if (v(i) < v(static_cast<Eigen::Index>(best))) best = static_cast<std::size_t>(i);
    return best;
}

// Among active coordinates (lambda > 0).
template <typename Better>
std::size_t active_extreme(const Eigen::VectorXd& score, const Eigen::VectorXd& lambda, Better better) {
    std::size_t best = score.size();
    for (Eigen::Index i = 0; i < score.size(); ++i) {
        if (!(lambda(i) > 0.0)) continue;
        if (best == static_cast<std::size_t>(score.size()) || better(score(i), score(static_cast<Eigen::Index>(best))))
            best = static_cast<std::size_t>(i);
    }
    return best;
}

}  // namespace

HullWeights::HullWeights(Eigen::VectorXd lambda) : lambda_(std::move(lambda)) { check_weights(lambda_); }

HullWeights HullWeights::uniform(std::size_t size) {
    if (size == 0) throw InputError("hull weights must be nonempty");
    return HullWeights(Eigen::VectorXd::Constant(static_cast<Eigen::Index>(size), 1.0 / static_cast<double>(size)));
}

HullWeights HullWeights::vertex(std::size_t size, std::size_t at) {
    if (at >= size) throw InputError("hull vertex index out of range");
    Eigen::VectorXd l = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(size));
    l(static_cast<Eigen::Index>(at)) = 1.0;
    return HullWeights(std::move(l));
}

Hull::Hull(std::string label, std::vector<Distribution> extreme_points) : label_(std::move(label)) {
    if (extreme_points.empty()) throw InputError("hull '" + label_ + "' needs at least one extreme point");
    const auto k = static_cast<Eigen::Index>(extreme_points.front().size());
    points_.resize(k, static_cast<Eigen::Index>(extreme_points.size()));
    for (std::size_t i = 0; i < extreme_points.size(); ++i) {
        if (static_cast<Eigen::Index>(extreme_points[i].size()) != k)
            throw InputError("hull '" + label_ + "' mixes alphabet sizes");
        points_.col(static_cast<Eigen::Index>(i)) = extreme_points[i].probs();
    }
}

Hull::Hull(const ConditionalFamily& family) : label_(family.name()), points_(family.matrix()) {}

Distribution Hull::extreme_point(std::size_t i) const {
    return Distribution(Eigen::VectorXd(points_.col(static_cast<Eigen::Index>(i))));
}

Hull Hull::with_point(const Distribution& extra) const {
    if (extra.size() != alphabet_size()) throw InputError("extra point has the wrong alphabet size");
    std::vector<Distribution> pts;
    for (std::size_t i = 0; i < num_points(); ++i) pts.push_back(extreme_point(i));
    pts.push_back(extra);
    return Hull(label_, std::move(pts));
}

Distribution hull_point(const Hull& hull, const HullWeights& weights) {
    if (weights.size() != hull.num_points()) throw InputError("hull weights do not match the hull");
    Eigen::VectorXd p = hull.points() * weights.lambda();
    return Distribution(std::move(p));
}

ProjectionResult min_divergence_to_hull(const Distribution& w, const Hull& hull, double tol) {
    if (!(tol > 0.0)) throw InputError("tolerance must be positive");
    if (w.size() != hull.alphabet_size()) throw InputError("distribution and hull alphabets differ");
    const Eigen::MatrixXd& a = hull.points();
    const auto n = static_cast<Eigen::Index>(hull.num_points());

    if (n == 1) {
        const HullWeights weights = HullWeights::vertex(1, 0);
        Distribution point = hull_point(hull, weights);
        const double value = kl_divergence(w, point);
        return {value, weights, std::move(point), 0.0, 0};
    }

    // Only symbols with W(x) > 0 enter the objective -sum W log(A lambda).
    std::vector<Eigen::Index> support;
    for (Eigen::Index x = 0; x < a.rows(); ++x) {
        if (w[static_cast<std::size_t>(x)] > 0.0) support.push_back(x);
    }
    const auto k = static_cast<Eigen::Index>(support.size());
    Eigen::VectorXd ws(k);
    Eigen::MatrixXd as(k, n);
    for (Eigen::Index i = 0; i < k; ++i) {
        ws(i) = w[static_cast<std::size_t>(support[static_cast<std::size_t>(i)])];
        as.row(i) = a.row(support[static_cast<std::size_t>(i)]);
    }

    // A symbol of W outside the support of every extreme point cannot be
    // repaired by mixing.
    for (Eigen::Index i = 0; i < k; ++i) {
        if (!(as.row(i).maxCoeff() > 0.0)) {
            const HullWeights weights = HullWeights::uniform(hull.num_points());
            Distribution point = hull_point(hull, weights);
            return {kInf, weights, std::move(point), 0.0, 0};
        }
    }

    // The uniform mixture covers supp(W); line searches keep it covered.
    Eigen::VectorXd lambda = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
    Eigen::VectorXd mix = as * lambda;
    double gap = kInf;
    int iter = 0;
    for (; iter < kMaxIterations; ++iter) {
        // r_s = sum_x W(x) A(x,s) / (A lambda)(x); the gradient is -r / ln 2.
        const Eigen::VectorXd ratio = ws.cwiseQuotient(mix);
        const Eigen::VectorXd r = as.transpose() * ratio;
        const std::size_t fw = argmax_lowest(r);
        gap = (r(static_cast<Eigen::Index>(fw)) - lambda.dot(r)) / std::numbers::ln2;
        if (gap <= tol) break;
        const std::size_t away = active_extreme(r, lambda, [](double u, double v) { return u < v; });
        if (away == fw) break;

        const Eigen::VectorXd delta = as.col(static_cast<Eigen::Index>(fw)) - as.col(static_cast<Eigen::Index>(away));
        const double max_step = lambda(static_cast<Eigen::Index>(away));
        const auto derivs = [&](double g) {
            double d1 = 0.0;
            double d2 = 0.0;
            for (Eigen::Index i = 0; i < k; ++i) {
                if (delta(i) == 0.0) continue;
                const double m = std::max(mix(i) + g * delta(i), 0.0);
                d1 -= ws(i) * delta(i) / m;
                d2 += ws(i) * delta(i) * delta(i) / (m * m);
            }
            return std::pair{d1, d2};
        };
        const double step = exact_line_search(derivs, max_step);
        if (!(step > 0.0)) break;
        lambda(static_cast<Eigen::Index>(fw)) += step;
        if (step >= max_step) {
            lambda(static_cast<Eigen::Index>(away)) = 0.0;
        } else {
            lambda(static_cast<Eigen::Index>(away)) -= step;
        }
        mix = as * lambda;
    }

    const HullWeights weights(tidy(std::move(lambda)));
    Distribution point = hull_point(hull, weights);
    const double value = kl_divergence(w, point);
    return {value, weights, std::move(point), std::max(gap, 0.0), iter};
}

HullPairResult min_divergence_between_hulls(const Hull& a_hull, const Hull& b_hull, double tol) {
    if (!(tol > 0.0)) throw InputError("tolerance must be positive");
    if (a_hull.alphabet_size() != b_hull.alphabet_size()) throw InputError("hull alphabets differ");
    const Eigen::MatrixXd& a = a_hull.points();
    const Eigen::MatrixXd& b = b_hull.points();
    const Eigen::Index na = a.cols();
    const Eigen::Index nb = b.cols();
    const Eigen::Index k = a.rows();

    Eigen::VectorXd mu = Eigen::VectorXd::Constant(nb, 1.0 / static_cast<double>(nb));
    Eigen::VectorXd q = b * mu;

    // Extreme points of `a` whose support lies inside supp(q) keep D finite.
    Eigen::VectorXd lambda = Eigen::VectorXd::Zero(na);
    for (Eigen::Index s = 0; s < na; ++s) {
        bool inside = true;
        for (Eigen::Index x = 0; x < k && inside; ++x) inside = !(a(x, s) > 0.0 && !(q(x) > 0.0));
        if (inside) lambda(s) = 1.0;
    }
    if (lambda.sum() == 0.0) {
        return {kInf, HullWeights::uniform(static_cast<std::size_t>(na)),
                HullWeights::uniform(static_cast<std::size_t>(nb)), 0.0, 0};
    }
    lambda /= lambda.sum();
    if (na == 1 && nb == 1) {
        const double value = kernel::kl_divergence(a.col(0), b.col(0));
        return {value, HullWeights::vertex(1, 0), HullWeights::vertex(1, 0), 0.0, 0};
    }

    Eigen::VectorXd p = a * lambda;
    double gap = kInf;
    int iter = 0;
    for (; iter < kMaxIterations; ++iter) {
        // Block gradients in bits, with the conventions 0 log 0 = 0 and
        // log(p/0) = +inf.
        Eigen::VectorXd grad_a = Eigen::VectorXd::Zero(na);
        for (Eigen::Index s = 0; s < na; ++s) {
            double g = 0.0;
            for (Eigen::Index x = 0; x < k; ++x) {
                if (!(a(x, s) > 0.0)) continue;
                if (!(q(x) > 0.0)) { g = kInf; break; }
                if (!(p(x) > 0.0)) { g = -kInf; break; }
                g += a(x, s) * (std::log2(p(x) / q(x)) + 1.0 / std::numbers::ln2);
            }
            grad_a(s) = g;
        }
        Eigen::VectorXd grad_b = Eigen::VectorXd::Zero(nb);
        for (Eigen::Index t = 0; t < nb; ++t) {
            double g = 0.0;
            for (Eigen::Index x = 0; x < k; ++x) {
                if (b(x, t) > 0.0 && p(x) > 0.0) g -= b(x, t) * p(x) / q(x);
            }
            grad_b(t) = g / std::numbers::ln2;
        }
        double dot_a = 0.0;
        for (Eigen::Index s = 0; s < na; ++s) if (lambda(s) > 0.0) dot_a += lambda(s) * grad_a(s);
        const std::size_t fw_a = argmin_lowest(grad_a);
        const std::size_t fw_b = argmin_lowest(grad_b);
        const double gap_a = dot_a - grad_a(static_cast<Eigen::Index>(fw_a));
        const double gap_b = mu.dot(grad_b) - grad_b(static_cast<Eigen::Index>(fw_b));
        gap = gap_a + gap_b;
        if (gap <= tol) break;

        if (gap_a >= gap_b) {
            const std::size_t away = active_extreme(grad_a, lambda, [](double u, double v) { return u > v; });
            if (away == fw_a) break;
            const Eigen::VectorXd delta = a.col(static_cast<Eigen::Index>(fw_a)) - a.col(static_cast<Eigen::Index>(away));
            const double max_step = lambda(static_cast<Eigen::Index>(away));
            const auto derivs = [&](double g) {
                double d1 = 0.0;
                double d2 = 0.0;
                for (Eigen::Index x = 0; x < k; ++x) {
                    if (delta(x) == 0.0) continue;
                    const double px = std::max(p(x) + g * delta(x), 0.0);
                    if (!(px > 0.0)) {
                        d1 += delta(x) > 0.0 ? -kInf : kInf;
                        d2 = kInf;
                        continue;
                    }
                    d1 += delta(x) * std::log2(px / q(x));
                    d2 += delta(x) * delta(x) / (px * std::numbers::ln2);
                }
                return std::pair{d1, d2};
            };
            const double step = exact_line_search(derivs, max_step);
            if (!(step > 0.0)) break;
            lambda(static_cast<Eigen::Index>(fw_a)) += step;
            if (step >= max_step) lambda(static_cast<Eigen::Index>(away)) = 0.0;
            else lambda(static_cast<Eigen::Index>(away)) -= step;
            p = a * lambda;
        } else {
            const std::size_t away = active_extreme(grad_b, mu, [](double u, double v) { return u > v; });
            if (away == fw_b) break;
            const Eigen::VectorXd delta = b.col(static_cast<Eigen::Index>(fw_b)) - b.col(static_cast<Eigen::Index>(away));
            const double max_step = mu(static_cast<Eigen::Index>(away));
            const auto derivs = [&](double g) {
                double d1 = 0.0;
                double d2 = 0.0;
                for (Eigen::Index x = 0; x < k; ++x) {
                    if (delta(x) == 0.0 || !(p(x) > 0.0)) continue;
                    const double qx = std::max(q(x) + g * delta(x), 0.0);
                    d1 -= p(x) * delta(x) / qx;
                    d2 += p(x) * delta(x) * delta(x) / (qx * qx);
                }
                return std::pair{d1 / std::numbers::ln2, d2 / std::numbers::ln2};
            };
            const double step = exact_line_search(derivs, max_step);
            if (!(step > 0.0)) break;
            mu(static_cast<Eigen::Index>(fw_b)) += step;
            if (step >= max_step) mu(static_cast<Eigen::Index>(away)) = 0.0;
            else mu(static_cast<Eigen::Index>(away)) -= step;
            q = b * mu;
        }
    }

    const HullWeights wa(tidy(std::move(lambda)));
    const HullWeights wb(tidy(std::move(mu)));
    const Eigen::VectorXd pa = a * wa.lambda();
    const Eigen::VectorXd qb = b * wb.lambda();
    return {kernel::kl_divergence(pa, qb), wa, wb, std::max(gap, 0.0), iter};
}

double oracle_min_divergence_to_hull(const Distribution& w, const Hull& hull, int grid_denominator) {
    if (w.size() != hull.alphabet_size()) throw InputError("distribution and hull alphabets differ");
    const SimplexGrid grid(hull.num_points(), grid_denominator, std::numeric_limits<std::size_t>::max());
    double best = kInf;
    Eigen::VectorXd point(static_cast<Eigen::Index>(hull.alphabet_size()));
    for (std::size_t i = 0; i < grid.size(); ++i) {
        point.noalias() = hull.points() * grid.coords(i);
        best = std::min(best, kernel::kl_divergence(w.probs(), point));
    }
    return best;
}

}  // namespace expforge
