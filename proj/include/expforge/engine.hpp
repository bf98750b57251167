#pragma once

#include "expforge/alphabet.hpp"
#include "expforge/distribution.hpp"
#include "expforge/grid.hpp"
#include "expforge/hull.hpp"
#include "expforge/types.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace expforge {

// M >= 2 hypotheses, each a conditional family over a shared alphabet and
// state set, together with the per-family convex hulls of their rows.
class HypothesisSet {
public:
    HypothesisSet(Alphabet alphabet, StateSet states, std::vector<ConditionalFamily> families);

    const Alphabet& alphabet() const noexcept { return alphabet_; }
    const StateSet& states() const noexcept { return states_; }
    std::size_t size() const noexcept { return families_.size(); }
    const ConditionalFamily& family(std::size_t m) const { return families_.at(m); }
    const std::vector<ConditionalFamily>& families() const noexcept { return families_; }
    const Hull& hull(std::size_t m) const { return hulls_.at(m); }
    bool is_memoryless() const noexcept { return states_.size() == 1; }

private:
    Alphabet alphabet_;
    StateSet states_;
    std::vector<ConditionalFamily> families_;
    std::vector<Hull> hulls_;
};

// Thresholds E_m and optional rejection thresholds E_{R,m}, in bits.
struct ExponentSpec {
    std::vector<double> E;
    std::optional<std::vector<double>> E_R;

    // Throws InputError unless every entry is finite and positive and the
    // sizes match `num_hypotheses`.
    void validate(std::size_t num_hypotheses) const;
    // E_R when supplied, otherwise E.
    const std::vector<double>& rejection_thresholds() const { return E_R ? *E_R : E; }
};

enum class SourcePath {
    automatic,   // memoryless path when |S| = 1
    arbitrarily_varying,
    memoryless,  // point divergences to the single row; requires |S| = 1
};

struct EngineOptions {
    double tol = kDefaultTolerance;
    SourcePath path = SourcePath::automatic;
    unsigned threads = 0;  // 0: hardware concurrency
    std::size_t grid_cap = kDefaultTypeCap;
};

// d_m(W) for every hypothesis m.
Eigen::VectorXd divergence_profile(const Distribution& w, const HypothesisSet& hs,
                                   const EngineOptions& opts = {});

// d_m(W) evaluated over the whole simplex grid; rows are grid points.
struct DivergenceField {
    SimplexGrid grid;
    Eigen::MatrixXd d;  // grid.size() x M, bits

    std::size_t num_hypotheses() const noexcept { return static_cast<std::size_t>(d.cols()); }
};

DivergenceField divergence_field(const HypothesisSet& hs, int grid_denominator,
                                 const EngineOptions& opts = {});

struct Verdict {
    std::optional<std::size_t> accepted;  // hypothesis index; empty means Reject
    Eigen::VectorXd divergences;          // d_m, bits
    double margin;  // Accept(m): E_m - d_m; Reject: min_m (d_m - E_m)

    bool rejected() const noexcept { return !accepted.has_value(); }
};

// Decision from a precomputed profile: Reject iff d_m > E_m for all m,
// else Accept(argmin of d_m among d_m <= E_m), ties to the lowest index.
Verdict decide(const Eigen::VectorXd& divergences, const std::vector<double>& E);

Verdict classify(const EmpiricalType& type, const HypothesisSet& hs, const ExponentSpec& spec,
                 const EngineOptions& opts = {});
Verdict classify(const Sequence& x, const HypothesisSet& hs, const ExponentSpec& spec,
                 const EngineOptions& opts = {});

// E*_{l,m} (accept l while m is true) and E*_{R,m} (reject while m is true).
// Entries are +inf when the constraint set is empty on the grid. The
// diagonal of off_diagonal is NaN.
struct ExponentMatrix {
    Eigen::MatrixXd off_diagonal;  // (l, m)
    Eigen::VectorXd rejection_row;  // m
    int resolution = 0;

    // Grid points attaining each entry; empty with an infinite entry.
    std::vector<std::vector<std::optional<std::size_t>>> off_diagonal_witness;
    std::vector<std::optional<std::size_t>> rejection_witness;
    // Largest change of d_m between the witness and a grid neighbour; a
    // bound on how far the grid value sits above the continuous infimum.
    Eigen::MatrixXd off_diagonal_slack;
    Eigen::VectorXd rejection_slack;

    std::vector<std::string> diagnostics;

    std::size_t num_hypotheses() const noexcept {
        return static_cast<std::size_t>(rejection_row.size());
    }
};

ExponentMatrix optimal_exponents(const DivergenceField& field, const ExponentSpec& spec);
ExponentMatrix optimal_exponents(const HypothesisSet& hs, const ExponentSpec& spec,
                                 int grid_denominator, const EngineOptions& opts = {});

struct RegionFailure {
    int clause;  // 1 (cover) or 2 (rejection)
    // Clause 1: a W with d_m(W) <= E_m for all m. Clause 2: the W closest to
    // satisfying d_m(W) > E_{R,m} for all m.
    std::optional<Distribution> witness;
    std::string message;
};

struct RegionVerdict {
    std::vector<RegionFailure> failures;  // every violated clause, in clause order
    int resolution = 0;

    bool in_region() const noexcept { return failures.empty(); }
    const RegionFailure* failure(int clause) const noexcept {
        for (const auto& f : failures)
            if (f.clause == clause) return &f;
        return nullptr;
    }
};

// Membership of {E_m, E_{R,m}} in the achievable region, certified at the
// grid resolution. The hull extreme points are checked before the grid.
RegionVerdict achievable_region_check(const HypothesisSet& hs, const DivergenceField& field,
                                      const ExponentSpec& point, const EngineOptions& opts = {});
RegionVerdict achievable_region_check(const HypothesisSet& hs, const ExponentSpec& point,
                                      int grid_denominator, const EngineOptions& opts = {});

struct PreconditionViolation {
    std::string description;
    double lhs;
    double rhs;
};

struct PreconditionReport {
    std::vector<PreconditionViolation> violations;
    bool satisfied() const noexcept { return violations.empty(); }
};

// Sufficient conditions for the test built from the B_m / B_R sets to be
// optimal. Thresholds E_m are compared against between-hull divergences
// (point divergences on the memoryless path) and against E*_{l,m}, l < m.
PreconditionReport check_optimality_preconditions(const HypothesisSet& hs,
                                                  const ExponentMatrix& matrix,
                                                  const ExponentSpec& spec,
                                                  const EngineOptions& opts = {});

struct ReliabilityVector {
    Eigen::VectorXd E;                    // min over column m of {E*_{l,m}, E*_{R,m}}
    std::vector<std::string> violations;  // rejection entry not the column minimum
    bool consistent() const noexcept { return violations.empty(); }
};

ReliabilityVector reliability_vector(const ExponentMatrix& matrix);

// Collapses every family to a single state when its rows are identical.
// Empty when some family has distinct rows.
std::optional<HypothesisSet> dms_specialize(const HypothesisSet& hs);

}  // namespace expforge
