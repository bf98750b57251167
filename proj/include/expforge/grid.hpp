#pragma once

#include "expforge/distribution.hpp"
#include "expforge/types.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace expforge {

// All rational distributions on a simplex of `dim` coordinates whose entries
// are multiples of 1/denominator, i.e. every type of length `denominator`.
// Points are ordered by descending lexicographic counts; index 0 is the
// vertex (denominator, 0, ..., 0).
class SimplexGrid {
public:
    SimplexGrid(std::size_t dim, int denominator, std::size_t cap = kDefaultTypeCap);

    std::size_t dim() const noexcept { return dim_; }
    int denominator() const noexcept { return denominator_; }
    std::size_t size() const noexcept { return size_; }

    std::span<const int> counts(std::size_t index) const {
        return {counts_.data() + index * dim_, dim_};
    }
    Eigen::VectorXd coords(std::size_t index) const;
    Distribution point(std::size_t index) const;

    // Inverse of counts(); empty when the counts are not a grid composition.
    std::optional<std::size_t> index_of(std::span<const int> counts) const;

    // Indices reachable by moving one unit of mass between two coordinates.
    std::vector<std::size_t> neighbors(std::size_t index) const;

private:
    std::size_t dim_;
    int denominator_;
    std::size_t size_;
    std::vector<int> counts_;
};

// Materialized grid as distributions.
std::vector<Distribution> simplex_grid(std::size_t alphabet_size, int denominator,
                                       std::size_t cap = kDefaultTypeCap);

}  // namespace expforge
