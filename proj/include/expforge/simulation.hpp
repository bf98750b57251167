#pragma once

#include "expforge/alphabet.hpp"
#include "expforge/distribution.hpp"
#include "expforge/engine.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace expforge {

struct ConstantState {
    std::size_t state;
};

struct IIDStates {
    Distribution state_dist;
};

struct ExplicitSequence {
    Sequence states;
};

using StateStrategy = std::variant<ConstantState, IIDStates, ExplicitSequence>;

std::string describe(const StateStrategy& strategy, const StateSet& states);

// Throws InputError when the strategy references unknown states or, for an
// explicit sequence, has a length other than `length`.
void validate_strategy(const StateStrategy& strategy, std::size_t num_states, std::int64_t length);

// x_n ~ G(.|s_n), one stream per call. IID strategies draw s_n before x_n
// from the same stream.
Sequence sample_sequence(const ConditionalFamily& family, const StateStrategy& strategy,
                         std::int64_t length, std::uint64_t stream_seed);

struct TrialPlan {
    const HypothesisSet* hs = nullptr;
    ExponentSpec spec;
    std::size_t true_m = 0;
    // Empty: every constant-state strategy plus, when |S| > 1, i.i.d. states
    // at the mixture weights of the true hull closest to each rival hull.
    std::vector<StateStrategy> strategies;
    std::vector<std::int64_t> lengths;
    std::int64_t trials_per_cell = 1;
    std::uint64_t seed = 0;
};

std::vector<StateStrategy> default_strategies(const HypothesisSet& hs, std::size_t true_m,
                                              double tol = kDefaultTolerance);

struct RateInterval {
    std::int64_t count = 0;
    std::int64_t trials = 0;
    double rate = 0.0;
    double lower = 0.0;  // Wilson score, 95%
    double upper = 0.0;
};

RateInterval wilson_interval(std::int64_t count, std::int64_t trials, double z = 1.959963984540054);

// Verdict tallies for one (length, strategy) cell.
struct CellCounts {
    std::int64_t length = 0;
    std::size_t strategy = 0;
    std::vector<std::int64_t> accepted;  // per hypothesis
    std::int64_t rejected = 0;
    std::int64_t trials = 0;
};

// Error kinds for a true hypothesis m: accept l (l != m) and reject.
struct ErrorKind {
    std::optional<std::size_t> accepted;  // empty: rejection
    bool operator==(const ErrorKind&) const = default;
};

std::string describe(const ErrorKind& kind);

// Worst case over the strategy list at one length. These are lower bounds on
// the supremum over all state sequences.
struct WorstCaseRates {
    std::int64_t length = 0;
    std::vector<RateInterval> accept;  // indexed by l; l == true_m unused
    std::vector<std::size_t> accept_argmax;
    RateInterval reject;
    std::size_t reject_argmax = 0;
    double total = 0.0;  // sum_{l != m} alpha_{l,m} + alpha_{R,m}
};

struct ErrorRateEstimate {
    std::size_t true_m = 0;
    std::size_t num_hypotheses = 0;
    std::vector<std::string> strategy_labels;
    std::vector<CellCounts> cells;  // length-major, then strategy
    std::vector<WorstCaseRates> worst;  // one per length

    const CellCounts& cell(std::size_t length_index, std::size_t strategy) const {
        return cells.at(length_index * strategy_labels.size() + strategy);
    }
};

ErrorRateEstimate estimate_error_rates(const TrialPlan& plan, const EngineOptions& opts = {});

struct DecayPoint {
    std::int64_t length;
    double rate;
};

struct KindFit {
    ErrorKind kind;
    // Assumed decay rate of -log2 alpha against N, bits per symbol.
    std::optional<double> slope;
    std::optional<double> intercept;
    std::optional<double> std_error;  // needs >= 3 fitted cells
    std::vector<std::int64_t> used_lengths;
    std::vector<std::int64_t> censored_lengths;  // zero counts, alpha < 1/trials
    // "fitted", "censored" (every cell zero) or "insufficient" (one nonzero cell).
    std::string status;
};

struct DecayFit {
    std::vector<KindFit> kinds;
    const KindFit& kind(const ErrorKind& k) const;
};

KindFit fit_decay(const ErrorKind& kind, const std::vector<DecayPoint>& points);
DecayFit fit_decay(const ErrorRateEstimate& est);

}  // namespace expforge
