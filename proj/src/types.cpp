#include "expforge/types.hpp"

#include "expforge/divergence.hpp"
#include "expforge/errors.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace expforge {

EmpiricalType::EmpiricalType(std::vector<std::int64_t> counts) : counts_(std::move(counts)) {
    if (counts_.empty()) throw InputError("type over an empty alphabet");
    for (const auto c : counts_) {
        if (c < 0) throw InputError("negative count in type");
        length_ += c;
    }
    if (length_ <= 0) throw InputError("type of an empty sequence");
}

Distribution EmpiricalType::probs() const {
    Eigen::VectorXd p(static_cast<Eigen::Index>(counts_.size()));
    const auto n = static_cast<double>(length_);
    for (std::size_t i = 0; i < counts_.size(); ++i) p(static_cast<Eigen::Index>(i)) = static_cast<double>(counts_[i]) / n;
    // Quotients of exact integers; the sum can miss 1 only by roundoff.
    return Distribution(std::move(p));
}

ConditionalType::ConditionalType(CountMatrix joint_counts) : joint_(std::move(joint_counts)) {
    if ((joint_.array() < 0).any()) throw InputError("negative joint count");
    if (joint_.sum() <= 0) throw InputError("conditional type of an empty sequence");
}

std::vector<std::int64_t> ConditionalType::state_counts() const {
    std::vector<std::int64_t> out(static_cast<std::size_t>(joint_.cols()));
    for (Eigen::Index s = 0; s < joint_.cols(); ++s) out[static_cast<std::size_t>(s)] = joint_.col(s).sum();
    return out;
}

Distribution ConditionalType::state_type() const {
    return EmpiricalType(state_counts()).probs();
}

std::optional<Distribution> ConditionalType::conditional_row(std::size_t s) const {
    const auto col = joint_.col(static_cast<Eigen::Index>(s));
    const std::int64_t total = col.sum();
    if (total == 0) return std::nullopt;
    return EmpiricalType(std::vector<std::int64_t>(col.data(), col.data() + col.size())).probs();
}

EmpiricalType empirical_type(const Sequence& x, std::size_t alphabet_size) {
    if (x.empty()) throw InputError("empty sequence");
    std::vector<std::int64_t> counts(alphabet_size, 0);
    for (const int sym : x) {
        if (sym < 0 || static_cast<std::size_t>(sym) >= alphabet_size)
            throw InputError("symbol index " + std::to_string(sym) + " outside the alphabet");
        ++counts[static_cast<std::size_t>(sym)];
    }
    return EmpiricalType(std::move(counts));
}

ConditionalType conditional_type(const Sequence& x, const Sequence& s, std::size_t alphabet_size,
                                 std::size_t num_states) {
    if (x.empty()) throw InputError("empty sequence");
    if (x.size() != s.size()) throw InputError("symbol and state sequences differ in length");
    ConditionalType::CountMatrix joint =
        ConditionalType::CountMatrix::Zero(static_cast<Eigen::Index>(alphabet_size), static_cast<Eigen::Index>(num_states));
    for (std::size_t n = 0; n < x.size(); ++n) {
        if (x[n] < 0 || static_cast<std::size_t>(x[n]) >= alphabet_size)
            throw InputError("symbol index " + std::to_string(x[n]) + " outside the alphabet");
        if (s[n] < 0 || static_cast<std::size_t>(s[n]) >= num_states)
            throw InputError("state index " + std::to_string(s[n]) + " outside the state set");
        ++joint(x[n], s[n]);
    }
    return ConditionalType(std::move(joint));
}

std::size_t count_types(std::int64_t length, std::size_t alphabet_size) {
    if (length < 0 || alphabet_size == 0) return 0;
    // C(N+i, i) = C(N+i-1, i-1) (N+i) / i, exact at every step.
    unsigned __int128 c = 1;
    const auto limit = static_cast<unsigned __int128>(std::numeric_limits<std::size_t>::max());
    for (std::size_t i = 1; i < alphabet_size; ++i) {
        c = c * static_cast<unsigned __int128>(length + static_cast<std::int64_t>(i)) / i;
        if (c > limit) return std::numeric_limits<std::size_t>::max();
    }
    return static_cast<std::size_t>(c);
}

namespace {

void enumerate_rec(std::vector<std::int64_t>& current, std::size_t pos, std::int64_t remaining,
                   std::vector<EmpiricalType>& out) {
    if (pos + 1 == current.size()) {
        current[pos] = remaining;
        out.emplace_back(current);
        return;
    }
    for (std::int64_t v = remaining; v >= 0; --v) {
        current[pos] = v;
        enumerate_rec(current, pos + 1, remaining - v, out);
    }
}

}  // namespace

std::vector<EmpiricalType> enumerate_types(std::int64_t length, std::size_t alphabet_size, std::size_t cap) {
    if (length < 1) throw InputError("type length must be >= 1");
    if (alphabet_size < 2) throw InputError("alphabet size must be >= 2");
    const std::size_t count = count_types(length, alphabet_size);
    if (count > cap)
        throw ResourceError("type enumeration needs " + std::to_string(count) + " types, cap is " + std::to_string(cap));
    std::vector<EmpiricalType> out;
    out.reserve(count);
    std::vector<std::int64_t> current(alphabet_size, 0);
    enumerate_rec(current, 0, length, out);
    return out;
}

std::uint64_t type_class_size(const EmpiricalType& t) {
    // prod_i C(c_1 + ... + c_i, c_i)
    unsigned __int128 size = 1;
    std::int64_t partial = 0;
    const auto limit = static_cast<unsigned __int128>(std::numeric_limits<std::uint64_t>::max());
    for (const auto c : t.counts()) {
        unsigned __int128 binom = 1;
        for (std::int64_t j = 1; j <= c; ++j) {
            binom = binom * static_cast<unsigned __int128>(partial + j) / static_cast<unsigned __int128>(j);
            if (binom > limit) throw ResourceError("type class size exceeds 64 bits");
        }
        partial += c;
        size *= binom;
        if (size > limit) throw ResourceError("type class size exceeds 64 bits");
    }
    return static_cast<std::uint64_t>(size);
}

double log2_type_class_size(const EmpiricalType& t) {
    try {
        return std::log2(static_cast<double>(type_class_size(t)));
    } catch (const ResourceError&) {
        double ln = std::lgamma(static_cast<double>(t.length()) + 1.0);
        for (const auto c : t.counts()) ln -= std::lgamma(static_cast<double>(c) + 1.0);
        return ln / std::log(2.0);
    }
}

double sequence_log2_prob(const EmpiricalType& t, const Distribution& g) {
    const Distribution q = t.probs();
    const double d = kl_divergence(q, g);
    if (std::isinf(d)) return -std::numeric_limits<double>::infinity();
    return -static_cast<double>(t.length()) * (entropy(q) + d);
}

double type_class_log2_prob(const EmpiricalType& t, const Distribution& g) {
    const double seq = sequence_log2_prob(t, g);
    if (std::isinf(seq)) return seq;
    return log2_type_class_size(t) + seq;
}

TypeClassBounds type_class_bounds(const EmpiricalType& t, const Distribution& g) {
    const double d = kl_divergence(t.probs(), g);
    const auto n = static_cast<double>(t.length());
    if (std::isinf(d)) {
        const double ninf = -std::numeric_limits<double>::infinity();
        return {ninf, ninf};
    }
    const double upper = -n * d;
    const double lower = upper - static_cast<double>(t.alphabet_size()) * std::log2(n + 1.0);
    return {lower, upper};
}

}  // namespace expforge
