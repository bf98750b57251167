#pragma once

#include "expforge/alphabet.hpp"
#include "expforge/distribution.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace expforge {

inline constexpr std::size_t kDefaultTypeCap = 10'000'000;

// Histogram of a length-N sequence over an alphabet.
class EmpiricalType {
public:
    explicit EmpiricalType(std::vector<std::int64_t> counts);

    const std::vector<std::int64_t>& counts() const noexcept { return counts_; }
    std::int64_t length() const noexcept { return length_; }
    std::size_t alphabet_size() const noexcept { return counts_.size(); }
    Distribution probs() const;

    bool operator==(const EmpiricalType&) const = default;

private:
    std::vector<std::int64_t> counts_;
    std::int64_t length_ = 0;
};

// Joint counts N(x, s | x, s) laid out |X| x |S|.
class ConditionalType {
public:
    using CountMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

    explicit ConditionalType(CountMatrix joint_counts);

    const CountMatrix& joint_counts() const noexcept { return joint_; }
    std::int64_t length() const noexcept { return joint_.sum(); }
    std::vector<std::int64_t> state_counts() const;

    // Type of the state vector, P_s.
    Distribution state_type() const;
    // G_{x,s}(.|s); empty when state s never occurs.
    std::optional<Distribution> conditional_row(std::size_t s) const;

private:
    CountMatrix joint_;
};

EmpiricalType empirical_type(const Sequence& x, std::size_t alphabet_size);
ConditionalType conditional_type(const Sequence& x, const Sequence& s, std::size_t alphabet_size,
                                 std::size_t num_states);

// C(N + k - 1, k - 1), saturating at SIZE_MAX.
std::size_t count_types(std::int64_t length, std::size_t alphabet_size);

// Every type of length-N sequences over k symbols, in descending
// lexicographic order of counts. Throws ResourceError above `cap`.
std::vector<EmpiricalType> enumerate_types(std::int64_t length, std::size_t alphabet_size,
                                           std::size_t cap = kDefaultTypeCap);

// Exact multinomial N! / prod(counts!). Throws ResourceError on 64-bit overflow.
std::uint64_t type_class_size(const EmpiricalType& t);
double log2_type_class_size(const EmpiricalType& t);

// log2 of the probability of any single sequence of type t under i.i.d. G:
// -N [H(t) + D(t || G)].
double sequence_log2_prob(const EmpiricalType& t, const Distribution& g);

// log2 of the probability of the whole type class; -inf when D(t||G) = inf.
double type_class_log2_prob(const EmpiricalType& t, const Distribution& g);

struct TypeClassBounds {
    double lower_log2;  // -|X| log2(N+1) - N D(t||G)
    double upper_log2;  // -N D(t||G)
};

TypeClassBounds type_class_bounds(const EmpiricalType& t, const Distribution& g);

}  // namespace expforge
