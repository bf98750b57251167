#include "expforge/distribution.hpp"

#include "expforge/errors.hpp"

#include <cmath>
#include <sstream>

namespace expforge {

namespace {

void check_simplex(const Eigen::VectorXd& p) {
    if (p.size() == 0) throw InputError("distribution must be nonempty");
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        if (!std::isfinite(p(i)) || p(i) < 0.0) {
            std::ostringstream os;
            os << "distribution entry " << i << " is " << p(i) << ", expected a value in [0,1]";
            throw InputError(os.str());
        }
    }
    const double total = p.sum();
    if (std::abs(total - 1.0) > kSimplexTolerance) {
        std::ostringstream os;
        os.precision(17);
        os << "distribution sums to " << total;
        throw InputError(os.str());
    }
}

}  // namespace

Distribution::Distribution(Eigen::VectorXd probs) : probs_(std::move(probs)) { check_simplex(probs_); }

Distribution::Distribution(std::initializer_list<double> probs)
    : Distribution(Eigen::Map<const Eigen::VectorXd>(probs.begin(), static_cast<Eigen::Index>(probs.size()))) {}

Distribution Distribution::normalized(Eigen::VectorXd weights) {
    if (weights.size() == 0 || (weights.array() < 0.0).any() || !weights.allFinite())
        throw InputError("cannot normalize: weights must be finite and nonnegative");
    const double total = weights.sum();
    if (!(total > 0.0)) throw InputError("cannot normalize: zero total mass");
    weights /= total;
    return Distribution(std::move(weights));
}

Distribution Distribution::uniform(std::size_t size) {
    if (size == 0) throw InputError("distribution must be nonempty");
    return Distribution(Eigen::VectorXd::Constant(static_cast<Eigen::Index>(size), 1.0 / static_cast<double>(size)));
}

Distribution Distribution::point_mass(std::size_t size, std::size_t at) {
    if (at >= size) throw InputError("point mass index out of range");
    Eigen::VectorXd p = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(size));
    p(static_cast<Eigen::Index>(at)) = 1.0;
    return Distribution(std::move(p));
}

ConditionalFamily::ConditionalFamily(std::string name, std::vector<Distribution> rows)
    : name_(std::move(name)), rows_(std::move(rows)) {
    if (rows_.empty()) throw InputError("family '" + name_ + "' has no states");
    const auto k = static_cast<Eigen::Index>(rows_.front().size());
    matrix_.resize(k, static_cast<Eigen::Index>(rows_.size()));
    for (std::size_t s = 0; s < rows_.size(); ++s) {
        if (static_cast<Eigen::Index>(rows_[s].size()) != k)
            throw InputError("family '" + name_ + "' rows have different alphabet sizes");
        matrix_.col(static_cast<Eigen::Index>(s)) = rows_[s].probs();
    }
}

Distribution marginalize(const Distribution& state_dist, const ConditionalFamily& family) {
    if (state_dist.size() != family.num_states())
        throw InputError("state distribution size does not match family");
    Eigen::VectorXd pg = family.matrix() * state_dist.probs();
    return Distribution(std::move(pg));
}

}  // namespace expforge
