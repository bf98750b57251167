#include "expforge/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace expforge::report {

std::string format_number(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", value);
    return buf;
}

std::string format_vector(const Eigen::VectorXd& values) {
    std::string out = "[";
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        if (i > 0) out += ',';
        out += format_number(values(i));
    }
    return out + "]";
}

namespace {

std::string outcome_label(const Verdict& v) {
    return v.accepted ? "Accept(" + std::to_string(*v.accepted + 1) + ")" : std::string("Reject");
}

std::string interval_columns(const RateInterval& r) {
    return std::to_string(r.count) + "," + std::to_string(r.trials) + "," + format_number(r.rate) + "," +
           format_number(r.lower) + "," + format_number(r.upper);
}

std::string join_lengths(const std::vector<std::int64_t>& lengths) {
    std::string out;
    for (std::size_t i = 0; i < lengths.size(); ++i) {
        if (i > 0) out += ';';
        out += std::to_string(lengths[i]);
    }
    return out;
}

std::string optional_number(const std::optional<double>& v) { return v ? format_number(*v) : std::string(); }

}  // namespace

std::string verdict_line(const Verdict& verdict) {
    return "verdict=" + outcome_label(verdict) + " d=" + format_vector(verdict.divergences) +
           " margin=" + format_number(verdict.margin);
}

std::string exponents_csv(const ExponentMatrix& matrix) {
    std::ostringstream os;
    os << "m,l,E_star_bits,grid_denominator\n";
    const std::size_t m_count = matrix.num_hypotheses();
    for (std::size_t m = 0; m < m_count; ++m) {
        for (std::size_t l = 0; l < m_count; ++l) {
            if (l == m) continue;
            os << m + 1 << ',' << l + 1 << ','
               << format_number(matrix.off_diagonal(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(m))) << ','
               << matrix.resolution << '\n';
        }
        os << m + 1 << ",R," << format_number(matrix.rejection_row(static_cast<Eigen::Index>(m))) << ','
           << matrix.resolution << '\n';
    }
    return os.str();
}

std::string region_line(const RegionVerdict& verdict) {
    if (verdict.in_region()) return "InRegion resolution=" + std::to_string(verdict.resolution);
    std::string out = "OutOfRegion";
    for (const auto& f : verdict.failures) {
        out += " clause=" + std::to_string(f.clause);
        if (f.witness) out += " witness=" + format_vector(f.witness->probs());
    }
    return out + " resolution=" + std::to_string(verdict.resolution);
}

std::string preconditions_report(const PreconditionReport& report) {
    std::ostringstream os;
    os << (report.satisfied() ? "Satisfied" : "Violated") << '\n';
    for (const auto& v : report.violations)
        os << "violated " << v.description << " lhs=" << format_number(v.lhs) << " rhs=" << format_number(v.rhs) << '\n';
    return os.str();
}

std::string rates_csv(const ErrorRateEstimate& est) {
    std::ostringstream os;
    os << "N,strategy,outcome,count,trials,rate,wilson_low,wilson_high\n";
    const std::size_t m_count = est.num_hypotheses;
    for (std::size_t li = 0; li < est.worst.size(); ++li) {
        const auto& w = est.worst[li];
        for (std::size_t si = 0; si < est.strategy_labels.size(); ++si) {
            const auto& c = est.cell(li, si);
            for (std::size_t l = 0; l < m_count; ++l)
                os << c.length << ',' << est.strategy_labels[si] << ",accept_" << l + 1 << ','
                   << interval_columns(wilson_interval(c.accepted[l], c.trials)) << '\n';
            os << c.length << ',' << est.strategy_labels[si] << ",reject,"
               << interval_columns(wilson_interval(c.rejected, c.trials)) << '\n';
        }
        std::int64_t total = w.reject.count;
        for (std::size_t l = 0; l < m_count; ++l) {
            if (l == est.true_m) continue;
            total += w.accept[l].count;
            os << w.length << ",worst,accept_" << l + 1 << ',' << interval_columns(w.accept[l]) << '\n';
        }
        os << w.length << ",worst,reject," << interval_columns(w.reject) << '\n';
        // Sum of per-kind maxima; the maxima may come from different
        // strategies, so no interval is attached.
        os << w.length << ",worst,any_error," << total << ',' << w.reject.trials << ',' << format_number(w.total)
           << ",,\n";
    }
    return os.str();
}

std::string fit_csv(const DecayFit& fit) {
    std::ostringstream os;
    os << "error_kind,status,slope_bits_per_symbol,intercept_bits,std_error_bits_per_symbol,used_lengths,censored_lengths\n";
    for (const auto& k : fit.kinds) {
        os << describe(k.kind) << ',' << k.status << ',' << optional_number(k.slope) << ','
           << optional_number(k.intercept) << ',' << optional_number(k.std_error) << ',' << join_lengths(k.used_lengths)
           << ',' << join_lengths(k.censored_lengths) << '\n';
    }
    return os.str();
}

std::string plot_csv(const HypothesisSet& hs, const DivergenceField& field, const ExponentSpec* spec) {
    std::ostringstream os;
    os << "index";
    for (const auto& sym : hs.alphabet().symbols()) os << ",W_" << sym;
    for (std::size_t m = 0; m < hs.size(); ++m) os << ",d_" << m + 1 << "_bits";
    if (spec) os << ",verdict";
    os << '\n';
    for (std::size_t i = 0; i < field.grid.size(); ++i) {
        os << i;
        const Eigen::VectorXd w = field.grid.coords(i);
        for (Eigen::Index x = 0; x < w.size(); ++x) os << ',' << format_number(w(x));
        const Eigen::VectorXd d = field.d.row(static_cast<Eigen::Index>(i)).transpose();
        for (Eigen::Index m = 0; m < d.size(); ++m) os << ',' << format_number(d(m));
        if (spec) os << ',' << outcome_label(decide(d, spec->E));
        os << '\n';
    }
    return os.str();
}

}  // namespace expforge::report
