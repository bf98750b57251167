#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <vector>

namespace expforge {

inline constexpr double kSimplexTolerance = 1e-12;

// Probability vector over a finite alphabet. Entries are nonnegative and sum
// to one within kSimplexTolerance; construction never renormalizes.
class Distribution {
public:
    explicit Distribution(Eigen::VectorXd probs);
    Distribution(std::initializer_list<double> probs);

    // Explicit renormalization of a nonnegative vector with positive mass.
    static Distribution normalized(Eigen::VectorXd weights);
    static Distribution uniform(std::size_t size);
    static Distribution point_mass(std::size_t size, std::size_t at);

    std::size_t size() const noexcept { return static_cast<std::size_t>(probs_.size()); }
    double operator[](std::size_t i) const { return probs_(static_cast<Eigen::Index>(i)); }
    const Eigen::VectorXd& probs() const noexcept { return probs_; }

    bool operator==(const Distribution& other) const { return probs_ == other.probs_; }

private:
    Eigen::VectorXd probs_;
};

// Stochastic matrix {G(x|s)}: one Distribution over X per state s.
class ConditionalFamily {
public:
    ConditionalFamily(std::string name, std::vector<Distribution> rows);

    const std::string& name() const noexcept { return name_; }
    std::size_t num_states() const noexcept { return rows_.size(); }
    std::size_t alphabet_size() const noexcept { return rows_.front().size(); }
    const Distribution& row(std::size_t s) const { return rows_.at(s); }
    const std::vector<Distribution>& rows() const noexcept { return rows_; }

    // |X| x |S| matrix, column s holds G(.|s).
    const Eigen::MatrixXd& matrix() const noexcept { return matrix_; }

    bool operator==(const ConditionalFamily& other) const {
        return name_ == other.name_ && matrix_ == other.matrix_;
    }

private:
    std::string name_;
    std::vector<Distribution> rows_;
    Eigen::MatrixXd matrix_;
};

// PG(x) = sum_s P(s) G(x|s).
Distribution marginalize(const Distribution& state_dist, const ConditionalFamily& family);

}  // namespace expforge
