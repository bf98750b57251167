#include "expforge/grid.hpp"

#include "expforge/errors.hpp"

#include <algorithm>
#include <string>

namespace expforge {

namespace {

void fill_rec(std::vector<int>& current, std::size_t pos, int remaining, std::vector<int>& out) {
    if (pos + 1 == current.size()) {
        current[pos] = remaining;
        out.insert(out.end(), current.begin(), current.end());
        return;
    }
    for (int v = remaining; v >= 0; --v) {
        current[pos] = v;
        fill_rec(current, pos + 1, remaining - v, out);
    }
}

}  // namespace

SimplexGrid::SimplexGrid(std::size_t dim, int denominator, std::size_t cap)
    : dim_(dim), denominator_(denominator) {
    if (dim == 0) throw InputError("simplex grid needs at least one coordinate");
    if (denominator < 1) throw InputError("grid denominator must be >= 1");
    size_ = count_types(denominator, dim);
    if (size_ > cap)
        throw ResourceError("simplex grid at denominator " + std::to_string(denominator) + " has " +
                            std::to_string(size_) + " points, cap is " + std::to_string(cap));
    counts_.reserve(size_ * dim_);
    std::vector<int> current(dim_, 0);
    fill_rec(current, 0, denominator_, counts_);
}

Eigen::VectorXd SimplexGrid::coords(std::size_t index) const {
    const auto c = counts(index);
    Eigen::VectorXd p(static_cast<Eigen::Index>(dim_));
    const auto denom = static_cast<double>(denominator_);
    for (std::size_t i = 0; i < dim_; ++i) p(static_cast<Eigen::Index>(i)) = static_cast<double>(c[i]) / denom;
    return p;
}

Distribution SimplexGrid::point(std::size_t index) const { return Distribution(coords(index)); }

std::optional<std::size_t> SimplexGrid::index_of(std::span<const int> c) const {
    if (c.size() != dim_) return std::nullopt;
    int remaining = denominator_;
    for (const int v : c) {
        if (v < 0) return std::nullopt;
        remaining -= v;
    }
    if (remaining != 0) return std::nullopt;
    // Rank in descending-lexicographic order: count compositions sharing the
    // prefix but carrying more mass at the first differing position.
    std::size_t rank = 0;
    remaining = denominator_;
    for (std::size_t i = 0; i + 1 < dim_; ++i) {
        for (int v = c[i] + 1; v <= remaining; ++v) rank += count_types(remaining - v, dim_ - i - 1);
        remaining -= c[i];
    }
    return rank;
}

std::vector<std::size_t> SimplexGrid::neighbors(std::size_t index) const {
    const auto base = counts(index);
    std::vector<int> moved(base.begin(), base.end());
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < dim_; ++i) {
        if (base[i] == 0) continue;
        for (std::size_t j = 0; j < dim_; ++j) {
            if (j == i) continue;
            --moved[i];
            ++moved[j];
            if (auto idx = index_of(moved)) out.push_back(*idx);
            ++moved[i];
            --moved[j];
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<Distribution> simplex_grid(std::size_t alphabet_size, int denominator, std::size_t cap) {
    const SimplexGrid grid(alphabet_size, denominator, cap);
    std::vector<Distribution> out;
    out.reserve(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) out.push_back(grid.point(i));
    return out;
}

}  // namespace expforge
