#include "expforge/simulation.hpp"

#include "expforge/errors.hpp"
#include "expforge/parallel.hpp"
#include "expforge/rng.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace expforge {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Inverse-CDF draw; falls back to the last index with positive mass when
// roundoff leaves the cumulative sum just below u.
std::size_t draw(SplitMix64& rng, const Eigen::Ref<const Eigen::VectorXd>& probs) {
    const double u = rng.uniform();
    double cum = 0.0;
    std::size_t last_positive = 0;
    for (Eigen::Index i = 0; i < probs.size(); ++i) {
        if (!(probs(i) > 0.0)) continue;
        last_positive = static_cast<std::size_t>(i);
        cum += probs(i);
        if (u < cum) return static_cast<std::size_t>(i);
    }
    return last_positive;
}

// Calls emit(symbol) for n = 0..length-1.
template <typename Emit>
void draw_symbols(const ConditionalFamily& family, const StateStrategy& strategy, std::int64_t length,
                  std::uint64_t stream_seed, Emit&& emit) {
    SplitMix64 rng(stream_seed);
    const Eigen::MatrixXd& g = family.matrix();
    std::visit(overloaded{
                   [&](const ConstantState& c) {
                       const auto col = g.col(static_cast<Eigen::Index>(c.state));
                       for (std::int64_t n = 0; n < length; ++n) emit(draw(rng, col));
                   },
                   [&](const IIDStates& iid) {
                       for (std::int64_t n = 0; n < length; ++n) {
                           const std::size_t s = draw(rng, iid.state_dist.probs());
                           emit(draw(rng, g.col(static_cast<Eigen::Index>(s))));
                       }
                   },
                   [&](const ExplicitSequence& e) {
                       for (std::int64_t n = 0; n < length; ++n)
                           emit(draw(rng, g.col(e.states[static_cast<std::size_t>(n)])));
                   },
               },
               strategy);
}

std::string format_g(double v) {
    std::ostringstream os;
    os.precision(9);
    os << v;
    return os.str();
}

}  // namespace

std::string describe(const StateStrategy& strategy, const StateSet& states) {
    return std::visit(overloaded{
                          [&](const ConstantState& c) { return "const:" + states.label(c.state); },
                          [&](const IIDStates& iid) {
                              std::string out = "iid:[";
                              for (std::size_t s = 0; s < iid.state_dist.size(); ++s) {
                                  if (s > 0) out += ';';
                                  out += format_g(iid.state_dist[s]);
                              }
                              return out + "]";
                          },
                          [&](const ExplicitSequence& e) { return "explicit:len=" + std::to_string(e.states.size()); },
                      },
                      strategy);
}

void validate_strategy(const StateStrategy& strategy, std::size_t num_states, std::int64_t length) {
    std::visit(overloaded{
                   [&](const ConstantState& c) {
                       if (c.state >= num_states) throw InputError("constant strategy references an unknown state");
                   },
                   [&](const IIDStates& iid) {
                       if (iid.state_dist.size() != num_states)
                           throw InputError("i.i.d. strategy distribution does not match the state set");
                   },
                   [&](const ExplicitSequence& e) {
                       if (static_cast<std::int64_t>(e.states.size()) != length)
                           throw InputError("explicit state sequence has length " + std::to_string(e.states.size()) +
                                            ", expected " + std::to_string(length));
                       for (const int s : e.states) {
                           if (s < 0 || static_cast<std::size_t>(s) >= num_states)
                               throw InputError("explicit state sequence references an unknown state");
                       }
                   },
               },
               strategy);
}

Sequence sample_sequence(const ConditionalFamily& family, const StateStrategy& strategy, std::int64_t length,
                         std::uint64_t stream_seed) {
    if (length < 1) throw InputError("sequence length must be >= 1");
    validate_strategy(strategy, family.num_states(), length);
    Sequence out;
    out.reserve(static_cast<std::size_t>(length));
    draw_symbols(family, strategy, length, stream_seed, [&](std::size_t x) { out.push_back(static_cast<int>(x)); });
    return out;
}

std::vector<StateStrategy> default_strategies(const HypothesisSet& hs, std::size_t true_m, double tol) {
    std::vector<StateStrategy> out;
    for (std::size_t s = 0; s < hs.states().size(); ++s) out.emplace_back(ConstantState{s});
    if (hs.states().size() == 1) return out;
    std::vector<Eigen::VectorXd> seen;
    for (std::size_t l = 0; l < hs.size(); ++l) {
        if (l == true_m) continue;
        const HullPairResult r = min_divergence_between_hulls(hs.hull(true_m), hs.hull(l), tol);
        const Eigen::VectorXd& w = r.weights_a.lambda();
        if (w.maxCoeff() == 1.0) continue;  // a vertex repeats a constant strategy
        if (std::any_of(seen.begin(), seen.end(), [&](const Eigen::VectorXd& v) { return v == w; })) continue;
        seen.push_back(w);
        out.emplace_back(IIDStates{Distribution(w)});
    }
    return out;
}

RateInterval wilson_interval(std::int64_t count, std::int64_t trials, double z) {
    if (trials <= 0 || count < 0 || count > trials) throw InputError("invalid binomial counts");
    const auto n = static_cast<double>(trials);
    const double p = static_cast<double>(count) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (p + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    const double lower = count == 0 ? 0.0 : std::max(0.0, center - half);
    const double upper = count == trials ? 1.0 : std::min(1.0, center + half);
    return {count, trials, p, lower, upper};
}

std::string describe(const ErrorKind& kind) {
    return kind.accepted ? "accept_" + std::to_string(*kind.accepted + 1) : std::string("reject");
}

ErrorRateEstimate estimate_error_rates(const TrialPlan& plan, const EngineOptions& opts) {
    if (plan.hs == nullptr) throw InputError("trial plan has no hypothesis set");
    const HypothesisSet& hs = *plan.hs;
    plan.spec.validate(hs.size());
    if (plan.true_m >= hs.size()) throw InputError("true hypothesis index out of range");
    if (plan.trials_per_cell < 1) throw InputError("trials per cell must be >= 1");
    if (plan.lengths.empty()) throw InputError("at least one sequence length is required");
    for (std::size_t i = 0; i < plan.lengths.size(); ++i) {
        if (plan.lengths[i] < 1) throw InputError("sequence lengths must be >= 1");
        if (i > 0 && plan.lengths[i] <= plan.lengths[i - 1]) throw InputError("sequence lengths must be strictly increasing");
    }
    const std::vector<StateStrategy> strategies =
        plan.strategies.empty() ? default_strategies(hs, plan.true_m, opts.tol) : plan.strategies;
    for (const auto& st : strategies)
        for (const auto n : plan.lengths) validate_strategy(st, hs.states().size(), n);

    const std::size_t m_count = hs.size();
    const ConditionalFamily& truth = hs.family(plan.true_m);
    ErrorRateEstimate est;
    est.true_m = plan.true_m;
    est.num_hypotheses = m_count;
    for (const auto& st : strategies) est.strategy_labels.push_back(describe(st, hs.states()));

    const unsigned threads = resolve_threads(opts.threads);
    for (std::size_t li = 0; li < plan.lengths.size(); ++li) {
        const std::int64_t length = plan.lengths[li];
        for (std::size_t si = 0; si < strategies.size(); ++si) {
            // Per-worker tallies over trials; slot m_count counts rejections.
            std::vector<std::vector<std::int64_t>> tallies(threads, std::vector<std::int64_t>(m_count + 1, 0));
            parallel_for_chunks(static_cast<std::size_t>(plan.trials_per_cell), threads,
                                [&](std::size_t begin, std::size_t end, unsigned worker) {
                                    // Verdicts depend on the sequence only through its type.
                                    std::map<std::vector<std::int64_t>, std::size_t> cache;
                                    std::vector<std::int64_t> counts(hs.alphabet().size());
                                    auto& tally = tallies[worker];
                                    for (std::size_t t = begin; t < end; ++t) {
                                        std::fill(counts.begin(), counts.end(), 0);
                                        const std::uint64_t stream = derive_stream_seed(plan.seed, li, si, t);
                                        draw_symbols(truth, strategies[si], length, stream,
                                                     [&](std::size_t x) { ++counts[x]; });
                                        auto it = cache.find(counts);
                                        if (it == cache.end()) {
                                            const Verdict v = classify(EmpiricalType(counts), hs, plan.spec, opts);
                                            it = cache.emplace(counts, v.accepted ? *v.accepted : m_count).first;
                                        }
                                        ++tally[it->second];
                                    }
                                });
            CellCounts cell;
            cell.length = length;
            cell.strategy = si;
            cell.accepted.assign(m_count, 0);
            for (const auto& tally : tallies) {
                for (std::size_t m = 0; m < m_count; ++m) cell.accepted[m] += tally[m];
                cell.rejected += tally[m_count];
            }
            cell.trials = plan.trials_per_cell;
            est.cells.push_back(std::move(cell));
        }

        WorstCaseRates worst;
        worst.length = length;
        worst.accept.resize(m_count);
        worst.accept_argmax.assign(m_count, 0);
        for (std::size_t l = 0; l < m_count; ++l) {
            for (std::size_t si = 0; si < strategies.size(); ++si) {
                const auto& c = est.cell(li, si);
                const RateInterval r = wilson_interval(c.accepted[l], c.trials);
                if (si == 0 || r.count > worst.accept[l].count) {
                    worst.accept[l] = r;
                    worst.accept_argmax[l] = si;
                }
            }
        }
        for (std::size_t si = 0; si < strategies.size(); ++si) {
            const auto& c = est.cell(li, si);
            const RateInterval r = wilson_interval(c.rejected, c.trials);
            if (si == 0 || r.count > worst.reject.count) {
                worst.reject = r;
                worst.reject_argmax = si;
            }
        }
        worst.total = worst.reject.rate;
        for (std::size_t l = 0; l < m_count; ++l)
            if (l != plan.true_m) worst.total += worst.accept[l].rate;
        est.worst.push_back(std::move(worst));
    }
    return est;
}

KindFit fit_decay(const ErrorKind& kind, const std::vector<DecayPoint>& points) {
    KindFit fit;
    fit.kind = kind;
    std::vector<double> xs;
    std::vector<double> ys;
    for (const auto& p : points) {
        if (p.rate > 0.0) {
            fit.used_lengths.push_back(p.length);
            xs.push_back(static_cast<double>(p.length));
            ys.push_back(-std::log2(p.rate));
        } else {
            fit.censored_lengths.push_back(p.length);
        }
    }
    if (xs.empty()) {
        fit.status = "censored";
        return fit;
    }
    if (xs.size() == 1) {
        fit.status = "insufficient";
        return fit;
    }
    const auto n = static_cast<double>(xs.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    const double slope = sxy / sxx;
    const double intercept = my - slope * mx;
    fit.slope = slope;
    fit.intercept = intercept;
    if (xs.size() >= 3) {
        double ssr = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            const double r = ys[i] - (intercept + slope * xs[i]);
            ssr += r * r;
        }
        fit.std_error = std::sqrt(ssr / (n - 2.0) / sxx);
    }
    fit.status = "fitted";
    return fit;
}

DecayFit fit_decay(const ErrorRateEstimate& est) {
    DecayFit out;
    for (std::size_t l = 0; l < est.num_hypotheses; ++l) {
        if (l == est.true_m) continue;
        std::vector<DecayPoint> pts;
        for (const auto& w : est.worst) pts.push_back({w.length, w.accept[l].rate});
        out.kinds.push_back(fit_decay(ErrorKind{l}, pts));
    }
    std::vector<DecayPoint> pts;
    for (const auto& w : est.worst) pts.push_back({w.length, w.reject.rate});
    out.kinds.push_back(fit_decay(ErrorKind{std::nullopt}, pts));
    return out;
}

const KindFit& DecayFit::kind(const ErrorKind& k) const {
    for (const auto& f : kinds)
        if (f.kind == k) return f;
    throw InputError("no fit for error kind " + describe(k));
}

}  // namespace expforge
