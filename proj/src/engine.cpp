#include "expforge/engine.hpp"

#include "expforge/divergence.hpp"
#include "expforge/errors.hpp"
#include "expforge/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace expforge {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool use_memoryless(const HypothesisSet& hs, SourcePath path) {
    switch (path) {
        case SourcePath::memoryless:
            if (!hs.is_memoryless()) throw InputError("memoryless path requires a single state");
            return true;
        case SourcePath::arbitrarily_varying:
            return false;
        case SourcePath::automatic:
        default:
            return hs.is_memoryless();
    }
}

std::string hyp(std::size_t m) { return std::to_string(m + 1); }

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(9);
    os << v;
    return os.str();
}

// Largest finite |d_m(neighbour) - d_m(witness)| over one grid step.
double local_slack(const DivergenceField& field, std::size_t witness, std::size_t m) {
    const auto col = static_cast<Eigen::Index>(m);
    const double base = field.d(static_cast<Eigen::Index>(witness), col);
    double slack = 0.0;
    for (const std::size_t nb : field.grid.neighbors(witness)) {
        const double v = field.d(static_cast<Eigen::Index>(nb), col);
        if (std::isfinite(v) && std::isfinite(base)) slack = std::max(slack, std::abs(v - base));
    }
    return slack;
}

}  // namespace

HypothesisSet::HypothesisSet(Alphabet alphabet, StateSet states, std::vector<ConditionalFamily> families)
    : alphabet_(std::move(alphabet)), states_(std::move(states)), families_(std::move(families)) {
    if (alphabet_.size() < 2) throw InputError("alphabet must have at least two symbols");
    if (families_.size() < 2) throw InputError("at least two hypotheses are required");
    for (const auto& f : families_) {
        if (f.num_states() != states_.size())
            throw InputError("hypothesis '" + f.name() + "' has " + std::to_string(f.num_states()) +
                             " rows, expected one per state");
        if (f.alphabet_size() != alphabet_.size())
            throw InputError("hypothesis '" + f.name() + "' rows do not match the alphabet");
        hulls_.emplace_back(f);
    }
}

void ExponentSpec::validate(std::size_t num_hypotheses) const {
    const auto check = [&](const std::vector<double>& v, const char* name) {
        if (v.size() != num_hypotheses)
            throw InputError(std::string(name) + " has " + std::to_string(v.size()) + " entries, expected " +
                             std::to_string(num_hypotheses));
        for (const double e : v) {
            if (!std::isfinite(e) || !(e > 0.0)) throw InputError(std::string(name) + " entries must be finite and positive");
        }
    };
    check(E, "E");
    if (E_R) check(*E_R, "E_R");
}

Eigen::VectorXd divergence_profile(const Distribution& w, const HypothesisSet& hs, const EngineOptions& opts) {
    if (w.size() != hs.alphabet().size()) throw InputError("distribution does not match the alphabet");
    const bool memoryless = use_memoryless(hs, opts.path);
    Eigen::VectorXd d(static_cast<Eigen::Index>(hs.size()));
    for (std::size_t m = 0; m < hs.size(); ++m) {
        d(static_cast<Eigen::Index>(m)) = memoryless ? kl_divergence(w, hs.family(m).row(0))
                                                     : min_divergence_to_hull(w, hs.hull(m), opts.tol).value;
    }
    return d;
}

DivergenceField divergence_field(const HypothesisSet& hs, int grid_denominator, const EngineOptions& opts) {
    SimplexGrid grid(hs.alphabet().size(), grid_denominator, opts.grid_cap);
    Eigen::MatrixXd d(static_cast<Eigen::Index>(grid.size()), static_cast<Eigen::Index>(hs.size()));
    use_memoryless(hs, opts.path);  // validates the path before spawning workers
    parallel_for_chunks(grid.size(), opts.threads, [&](std::size_t begin, std::size_t end, unsigned) {
        for (std::size_t i = begin; i < end; ++i)
            d.row(static_cast<Eigen::Index>(i)) = divergence_profile(grid.point(i), hs, opts).transpose();
    });
    return {std::move(grid), std::move(d)};
}

Verdict decide(const Eigen::VectorXd& divergences, const std::vector<double>& E) {
    if (static_cast<std::size_t>(divergences.size()) != E.size()) throw InputError("threshold count mismatch");
    std::optional<std::size_t> best;
    double reject_margin = kInf;
    for (std::size_t m = 0; m < E.size(); ++m) {
        const double dm = divergences(static_cast<Eigen::Index>(m));
        if (dm <= E[m]) {
            if (!best || dm < divergences(static_cast<Eigen::Index>(*best))) best = m;
        } else {
            reject_margin = std::min(reject_margin, dm - E[m]);
        }
    }
    const double margin = best ? E[*best] - divergences(static_cast<Eigen::Index>(*best)) : reject_margin;
    return {best, divergences, margin};
}

Verdict classify(const EmpiricalType& type, const HypothesisSet& hs, const ExponentSpec& spec,
                 const EngineOptions& opts) {
    spec.validate(hs.size());
    if (type.alphabet_size() != hs.alphabet().size()) throw InputError("type does not match the alphabet");
    return decide(divergence_profile(type.probs(), hs, opts), spec.E);
}

Verdict classify(const Sequence& x, const HypothesisSet& hs, const ExponentSpec& spec, const EngineOptions& opts) {
    return classify(empirical_type(x, hs.alphabet().size()), hs, spec, opts);
}

ExponentMatrix optimal_exponents(const DivergenceField& field, const ExponentSpec& spec) {
    const std::size_t m_count = field.num_hypotheses();
    spec.validate(m_count);
    const auto mi = static_cast<Eigen::Index>(m_count);
    ExponentMatrix out;
    out.resolution = field.grid.denominator();
    out.off_diagonal = Eigen::MatrixXd::Constant(mi, mi, kInf);
    out.rejection_row = Eigen::VectorXd::Constant(mi, kInf);
    out.off_diagonal_slack = Eigen::MatrixXd::Zero(mi, mi);
    out.rejection_slack = Eigen::VectorXd::Zero(mi);
    out.off_diagonal_witness.assign(m_count, std::vector<std::optional<std::size_t>>(m_count));
    out.rejection_witness.assign(m_count, std::nullopt);

    const auto& d = field.d;
    for (std::size_t i = 0; i < field.grid.size(); ++i) {
        const auto row = d.row(static_cast<Eigen::Index>(i));
        bool in_reject = true;
        for (std::size_t l = 0; l < m_count; ++l) {
            const double dl = row(static_cast<Eigen::Index>(l));
            if (!(dl > spec.E[l])) in_reject = false;
            if (!(dl < spec.E[l])) continue;
            // W in B_l: candidate for every E*_{l,m}.
            for (std::size_t m = 0; m < m_count; ++m) {
                if (m == l) continue;
                const double dm = row(static_cast<Eigen::Index>(m));
                if (dm < out.off_diagonal(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(m))) {
                    out.off_diagonal(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(m)) = dm;
                    out.off_diagonal_witness[l][m] = i;
                }
            }
        }
        if (!in_reject) continue;
        for (std::size_t m = 0; m < m_count; ++m) {
            const double dm = row(static_cast<Eigen::Index>(m));
            if (dm < out.rejection_row(static_cast<Eigen::Index>(m))) {
                out.rejection_row(static_cast<Eigen::Index>(m)) = dm;
                out.rejection_witness[m] = i;
            }
        }
    }

    const std::string at = " on the grid at denominator " + std::to_string(out.resolution);
    for (std::size_t m = 0; m < m_count; ++m) {
        out.off_diagonal(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m)) =
            std::numeric_limits<double>::quiet_NaN();
        if (const auto w = out.rejection_witness[m]) {
            out.rejection_slack(static_cast<Eigen::Index>(m)) = local_slack(field, *w, m);
        } else {
            out.diagnostics.push_back("B_R is empty" + at + ": E*_{R," + hyp(m) + "} = inf");
        }
        for (std::size_t l = 0; l < m_count; ++l) {
            if (l == m) continue;
            if (const auto w = out.off_diagonal_witness[l][m]) {
                out.off_diagonal_slack(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(m)) =
                    local_slack(field, *w, m);
            } else {
                out.diagnostics.push_back("B_" + hyp(l) + " is empty" + at + ": E*_{" + hyp(l) + "," + hyp(m) +
                                          "} = inf");
            }
        }
    }
    return out;
}

ExponentMatrix optimal_exponents(const HypothesisSet& hs, const ExponentSpec& spec, int grid_denominator,
                                 const EngineOptions& opts) {
    spec.validate(hs.size());
    return optimal_exponents(divergence_field(hs, grid_denominator, opts), spec);
}

RegionVerdict achievable_region_check(const HypothesisSet& hs, const DivergenceField& field,
                                      const ExponentSpec& point, const EngineOptions& opts) {
    point.validate(hs.size());
    if (field.num_hypotheses() != hs.size()) throw InputError("divergence field does not match the hypotheses");
    const std::vector<double>& e = point.E;
    const std::vector<double>& e_r = point.rejection_thresholds();
    const std::size_t m_count = hs.size();

    // Hull vertices first, then the grid in order.
    std::vector<Distribution> vertices;
    std::vector<Eigen::VectorXd> vertex_profiles;
    for (std::size_t m = 0; m < m_count; ++m) {
        for (std::size_t s = 0; s < hs.hull(m).num_points(); ++s) {
            vertices.push_back(hs.hull(m).extreme_point(s));
            vertex_profiles.push_back(divergence_profile(vertices.back(), hs, opts));
        }
    }
    const std::size_t total = vertices.size() + field.grid.size();
    const auto profile = [&](std::size_t c) -> Eigen::VectorXd {
        if (c < vertices.size()) return vertex_profiles[c];
        return field.d.row(static_cast<Eigen::Index>(c - vertices.size())).transpose();
    };
    const auto candidate = [&](std::size_t c) {
        return c < vertices.size() ? vertices[c] : field.grid.point(c - vertices.size());
    };

    RegionVerdict out{{}, field.grid.denominator()};
    const std::string at = " at resolution " + std::to_string(out.resolution);

    // Clause 1: every W is farther than E_m from some hull m.
    for (std::size_t c = 0; c < total; ++c) {
        const Eigen::VectorXd d = profile(c);
        bool covered = true;
        for (std::size_t m = 0; m < m_count && covered; ++m) covered = d(static_cast<Eigen::Index>(m)) <= e[m];
        if (covered) {
            out.failures.push_back({1, candidate(c), "clause 1 fails" + at + ": witness has d_m <= E_m for every m"});
            break;
        }
    }

    // Clause 2: some W is farther than E_{R,m} from every hull.
    std::optional<std::size_t> closest;
    double closest_score = -kInf;
    for (std::size_t c = 0; c < total; ++c) {
        const Eigen::VectorXd d = profile(c);
        double score = kInf;
        for (std::size_t m = 0; m < m_count; ++m) score = std::min(score, d(static_cast<Eigen::Index>(m)) - e_r[m]);
        if (score > 0.0) return out;
        if (!closest || score > closest_score) {
            closest = c;
            closest_score = score;
        }
    }
    std::optional<Distribution> miss;
    if (closest) miss = candidate(*closest);
    out.failures.push_back({2, std::move(miss),
                            "clause 2 fails" + at + ": no W has d_m > E_R,m for every m; witness is the closest miss (by " +
                                fmt(-closest_score) + " bits)"});
    return out;
}

RegionVerdict achievable_region_check(const HypothesisSet& hs, const ExponentSpec& point, int grid_denominator,
                                      const EngineOptions& opts) {
    point.validate(hs.size());
    return achievable_region_check(hs, divergence_field(hs, grid_denominator, opts), point, opts);
}

PreconditionReport check_optimality_preconditions(const HypothesisSet& hs, const ExponentMatrix& matrix,
                                                  const ExponentSpec& spec, const EngineOptions& opts) {
    spec.validate(hs.size());
    const std::size_t m_count = hs.size();
    if (matrix.num_hypotheses() != m_count) throw InputError("exponent matrix does not match the hypotheses");
    const bool memoryless = use_memoryless(hs, opts.path);

    // between(l, m) = min D(W_l || W_m).
    Eigen::MatrixXd between = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m_count), static_cast<Eigen::Index>(m_count));
    for (std::size_t l = 0; l < m_count; ++l) {
        for (std::size_t m = 0; m < m_count; ++m) {
            if (l == m) continue;
            between(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(m)) =
                memoryless ? kl_divergence(hs.family(l).row(0), hs.family(m).row(0))
                           : min_divergence_between_hulls(hs.hull(l), hs.hull(m), opts.tol).value;
        }
    }
    const std::string lhs_name = memoryless ? "D(G_" : "min D(W_";

    PreconditionReport report;
    if (memoryless) {
        for (std::size_t m = 0; m < m_count; ++m) {
            for (std::size_t l = 0; l < m_count; ++l) {
                if (l == m) continue;
                const double v = between(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(l));
                if (!(v > 0.0))
                    report.violations.push_back({"D(G_" + hyp(m) + " || G_" + hyp(l) + ") > 0", v, 0.0});
            }
        }
    }
    for (std::size_t m = 0; m < m_count; ++m) {
        double bound = kInf;
        std::string terms;
        const auto add = [&](double v, const std::string& name) {
            bound = std::min(bound, v);
            if (!terms.empty()) terms += ", ";
            terms += name;
        };
        for (std::size_t l = 0; l < m; ++l)
            add(matrix.off_diagonal(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(m)),
                "E*_{" + hyp(l) + "," + hyp(m) + "}");
        for (std::size_t l = m + 1; l < m_count; ++l)
            add(between(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(m)),
                lhs_name + hyp(l) + " || " + (memoryless ? "G_" : "W_") + hyp(m) + ")");
        // m = 1 compares against every other hull.
        if (m == 0) {
            bound = kInf;
            terms.clear();
            for (std::size_t l = 1; l < m_count; ++l)
                add(between(static_cast<Eigen::Index>(l), 0),
                    lhs_name + hyp(l) + " || " + (memoryless ? "G_" : "W_") + "1)");
        }
        if (!(spec.E[m] < bound))
            report.violations.push_back({"E_" + hyp(m) + " < min{" + terms + "}", spec.E[m], bound});
    }
    return report;
}

ReliabilityVector reliability_vector(const ExponentMatrix& matrix) {
    const std::size_t m_count = matrix.num_hypotheses();
    ReliabilityVector out;
    out.E.resize(static_cast<Eigen::Index>(m_count));
    for (std::size_t m = 0; m < m_count; ++m) {
        const auto mi = static_cast<Eigen::Index>(m);
        const double reject = matrix.rejection_row(mi);
        double best_off = kInf;
        std::size_t best_l = m;
        for (std::size_t l = 0; l < m_count; ++l) {
            if (l == m) continue;
            const double v = matrix.off_diagonal(static_cast<Eigen::Index>(l), mi);
            if (v < best_off) {
                best_off = v;
                best_l = l;
            }
        }
        out.E(mi) = std::min(reject, best_off);
        // The grid minimum over B_R sits at most rejection_slack above the
        // continuous infimum, while grid E*_{l,m} can only overestimate.
        if (reject - matrix.rejection_slack(mi) > best_off) {
            out.violations.push_back("E*_{R," + hyp(m) + "} = " + fmt(reject) + " exceeds E*_{" + hyp(best_l) + "," +
                                     hyp(m) + "} = " + fmt(best_off) + " beyond grid slack " +
                                     fmt(matrix.rejection_slack(mi)));
        }
    }
    return out;
}

std::optional<HypothesisSet> dms_specialize(const HypothesisSet& hs) {
    if (hs.is_memoryless()) return hs;
    std::vector<ConditionalFamily> families;
    for (const auto& f : hs.families()) {
        for (std::size_t s = 1; s < f.num_states(); ++s) {
            if (!(f.row(s) == f.row(0))) return std::nullopt;
        }
        families.emplace_back(f.name(), std::vector<Distribution>{f.row(0)});
    }
    return HypothesisSet(hs.alphabet(), StateSet({hs.states().label(0)}), std::move(families));
}

}  // namespace expforge
