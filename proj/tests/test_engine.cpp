#include "expforge/divergence.hpp"
#include "expforge/engine.hpp"
#include "expforge/errors.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <cmath>

using namespace expforge;
using expforge::testing::random_distribution;

namespace {

HypothesisSet binary_dms(const Distribution& g1 = Distribution({0.9, 0.1}),
                         const Distribution& g2 = Distribution({0.1, 0.9})) {
    return HypothesisSet(Alphabet({"a", "b"}), StateSet({"s0"}),
                         {ConditionalFamily("H1", {g1}), ConditionalFamily("H2", {g2})});
}

HypothesisSet binary_avs() {
    return HypothesisSet(Alphabet({"a", "b"}), StateSet({"calm", "noisy"}),
                         {ConditionalFamily("H1", {Distribution({0.95, 0.05}), Distribution({0.8, 0.2})}),
                          ConditionalFamily("H2", {Distribution({0.05, 0.95}), Distribution({0.2, 0.8})})});
}

HypothesisSet random_set(expforge::testing::Rng& rng, std::size_t k, std::size_t s, std::size_t m) {
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < k; ++i) labels.push_back(std::string(1, static_cast<char>('a' + i)));
    std::vector<std::string> states;
    for (std::size_t i = 0; i < s; ++i) states.push_back("s" + std::to_string(i));
    std::vector<ConditionalFamily> fams;
    for (std::size_t j = 0; j < m; ++j) {
        std::vector<Distribution> rows;
        for (std::size_t i = 0; i < s; ++i) rows.push_back(random_distribution(rng, k, 0.1));
        fams.emplace_back("H" + std::to_string(j + 1), rows);
    }
    return HypothesisSet(Alphabet(labels), StateSet(states), fams);
}

bool same_bits(double a, double b) {
    return (std::isnan(a) && std::isnan(b)) || a == b;
}

bool same_matrix(const ExponentMatrix& x, const ExponentMatrix& y) {
    if (x.resolution != y.resolution || x.num_hypotheses() != y.num_hypotheses()) return false;
    for (Eigen::Index i = 0; i < x.off_diagonal.size(); ++i)
        if (!same_bits(x.off_diagonal(i), y.off_diagonal(i))) return false;
    for (Eigen::Index i = 0; i < x.rejection_row.size(); ++i)
        if (!same_bits(x.rejection_row(i), y.rejection_row(i))) return false;
    return x.rejection_witness == y.rejection_witness && x.off_diagonal_witness == y.off_diagonal_witness;
}

}  // namespace

TEST_CASE("hypothesis set validation") {
    CHECK_THROWS_AS(HypothesisSet(Alphabet({"a", "b"}), StateSet({"s0"}),
                                  {ConditionalFamily("H1", {Distribution({0.5, 0.5})})}),
                    InputError);
    CHECK_THROWS_AS(HypothesisSet(Alphabet({"a", "b"}), StateSet({"s0"}),
                                  {ConditionalFamily("H1", {Distribution({0.5, 0.5})}),
                                   ConditionalFamily("H2", {Distribution({0.2, 0.3, 0.5})})}),
                    InputError);
    CHECK(binary_dms().is_memoryless());
    CHECK_FALSE(binary_avs().is_memoryless());
    CHECK_THROWS_AS((ExponentSpec{{0.05, -1.0}, std::nullopt}.validate(2)), InputError);
    CHECK_THROWS_AS((ExponentSpec{{0.05}, std::nullopt}.validate(2)), InputError);
}

TEST_CASE("classify examples") {
    const HypothesisSet hs = binary_dms();
    const ExponentSpec spec{{0.05, 0.05}, std::nullopt};
    const Verdict v1 = classify(hs.alphabet().parse("aaaaaaaaab"), hs, spec);
    REQUIRE(v1.accepted.has_value());
    CHECK(*v1.accepted == 0);
    CHECK(v1.divergences(0) == 0.0);
    CHECK(v1.margin == doctest::Approx(0.05));

    const Verdict v2 = classify(EmpiricalType({5, 5}), hs, spec);
    CHECK(v2.rejected());
    CHECK(v2.divergences(0) == doctest::Approx(0.7369655941662061).epsilon(1e-12));
    CHECK(v2.divergences(1) == doctest::Approx(0.7369655941662061).epsilon(1e-12));
    CHECK(v2.margin == doctest::Approx(0.7369655941662061 - 0.05).epsilon(1e-12));

    const HypothesisSet same = binary_dms(Distribution({0.9, 0.1}), Distribution({0.9, 0.1}));
    const Verdict v3 = classify(EmpiricalType({17, 3}), same, ExponentSpec{{0.1, 0.1}, std::nullopt});
    REQUIRE(v3.accepted.has_value());
    CHECK(*v3.accepted == 0);
    CHECK_THROWS_AS(classify(hs.alphabet().parse("abz"), hs, spec), InputError);
}

TEST_CASE("decide follows the boundary and tie rules") {
    const Verdict boundary = decide(Eigen::Vector2d(0.05, 1.0), {0.05, 0.05});
    REQUIRE(boundary.accepted.has_value());
    CHECK(*boundary.accepted == 0);
    CHECK(boundary.margin == 0.0);
    const Verdict argmin = decide(Eigen::Vector3d(0.04, 0.01, 0.02), {0.05, 0.05, 0.05});
    CHECK(*argmin.accepted == 1);
    const Verdict inf = decide(Eigen::Vector2d(std::numeric_limits<double>::infinity(), 0.2), {0.1, 0.1});
    CHECK(inf.rejected());
    CHECK(inf.margin == doctest::Approx(0.1));
}

TEST_CASE("verdict soundness on random instances") {
    expforge::testing::Rng rng(53);
    for (int rep = 0; rep < 60; ++rep) {
        const auto k = static_cast<std::size_t>(expforge::testing::uniform_int(rng, 2, 4));
        const auto s = static_cast<std::size_t>(expforge::testing::uniform_int(rng, 1, 3));
        const auto m = static_cast<std::size_t>(expforge::testing::uniform_int(rng, 2, 3));
        const HypothesisSet hs = random_set(rng, k, s, m);
        std::vector<double> e(m);
        for (auto& v : e) v = expforge::testing::uniform_real(rng, 0.01, 0.5);
        const ExponentSpec spec{e, std::nullopt};
        for (int t = 0; t < 10; ++t) {
            const int n = expforge::testing::uniform_int(rng, 1, 60);
            Sequence x(static_cast<std::size_t>(n));
            for (auto& sym : x) sym = expforge::testing::uniform_int(rng, 0, static_cast<int>(k) - 1);
            const Verdict v = classify(x, hs, spec);
            if (v.accepted) {
                CHECK(v.divergences(static_cast<Eigen::Index>(*v.accepted)) <= e[*v.accepted]);
                for (std::size_t j = 0; j < m; ++j) {
                    if (v.divergences(static_cast<Eigen::Index>(j)) <= e[j])
                        CHECK(v.divergences(static_cast<Eigen::Index>(j)) >=
                              v.divergences(static_cast<Eigen::Index>(*v.accepted)));
                }
            } else {
                for (std::size_t j = 0; j < m; ++j) CHECK(v.divergences(static_cast<Eigen::Index>(j)) > e[j]);
            }
        }
    }
}

TEST_CASE("threshold monotonicity of verdicts") {
    expforge::testing::Rng rng(59);
    for (int rep = 0; rep < 500; ++rep) {
        const auto m = static_cast<std::size_t>(expforge::testing::uniform_int(rng, 2, 4));
        Eigen::VectorXd d(static_cast<Eigen::Index>(m));
        std::vector<double> e(m);
        std::vector<double> lower(m);
        std::vector<double> higher(m);
        for (std::size_t j = 0; j < m; ++j) {
            d(static_cast<Eigen::Index>(j)) = expforge::testing::uniform_real(rng, 0.0, 1.0);
            e[j] = expforge::testing::uniform_real(rng, 0.01, 1.0);
            lower[j] = e[j] * expforge::testing::uniform_real(rng, 0.1, 1.0);
            higher[j] = e[j] * expforge::testing::uniform_real(rng, 1.0, 3.0);
        }
        const Verdict base = decide(d, e);
        if (base.rejected()) {
            CHECK(decide(d, lower).rejected());
        } else {
            CHECK_FALSE(decide(d, higher).rejected());
        }
    }
}

TEST_CASE("optimal exponents of the worked binary instance") {
    const HypothesisSet hs = binary_dms();
    const ExponentSpec spec{{0.05, 0.05}, std::nullopt};
    const ExponentMatrix mx = optimal_exponents(hs, spec, 1000);
    CHECK(mx.resolution == 1000);
    CHECK(mx.rejection_row(0) == doctest::Approx(0.05068017792387655).epsilon(1e-12));
    CHECK(mx.rejection_row(1) == doctest::Approx(0.05068017792387655).epsilon(1e-12));
    CHECK(mx.off_diagonal(1, 0) == doctest::Approx(2.0339987826615484).epsilon(1e-12));
    CHECK(mx.off_diagonal(0, 1) == doctest::Approx(2.0339987826615484).epsilon(1e-12));
    CHECK(std::isnan(mx.off_diagonal(0, 0)));
    CHECK(mx.diagnostics.empty());
    for (Eigen::Index m = 0; m < 2; ++m) {
        CHECK(mx.rejection_row(m) >= spec.E[static_cast<std::size_t>(m)]);
        CHECK(mx.rejection_slack(m) > 0.0);
        CHECK(mx.rejection_slack(m) < 0.01);
    }

    const ExponentMatrix fine = optimal_exponents(hs, spec, 100000);
    CHECK(fine.rejection_row(0) == doctest::Approx(0.05000424122433221).epsilon(1e-10));
    CHECK(fine.off_diagonal(1, 0) == doctest::Approx(2.0321478138839555).epsilon(1e-10));
}

TEST_CASE("vacuous rejection region gives infinite exponents") {
    const HypothesisSet hs = binary_dms();
    const ExponentMatrix mx = optimal_exponents(hs, ExponentSpec{{50.0, 50.0}, std::nullopt}, 200);
    CHECK(std::isinf(mx.rejection_row(0)));
    CHECK(std::isinf(mx.rejection_row(1)));
    CHECK_FALSE(mx.rejection_witness[0].has_value());
    REQUIRE_FALSE(mx.diagnostics.empty());
    CHECK(mx.diagnostics.front().find("B_R is empty") != std::string::npos);
}

TEST_CASE("optimal exponents of the binary varying-source instance") {
    const HypothesisSet hs = binary_avs();
    const ExponentMatrix mx = optimal_exponents(hs, ExponentSpec{{0.05, 0.05}, std::nullopt}, 1000);
    CHECK(std::abs(mx.rejection_row(0) - 0.050459453745340305) <= 1e-6);
    CHECK(std::abs(mx.rejection_row(1) - 0.050459453745340305) <= 1e-6);
    CHECK(std::abs(mx.off_diagonal(1, 0) - 0.8056036787291501) <= 1e-6);
    CHECK(std::abs(mx.off_diagonal(0, 1) - 0.8056036787291501) <= 1e-6);
    const ReliabilityVector rv = reliability_vector(mx);
    CHECK(rv.consistent());
    CHECK(rv.E(0) == mx.rejection_row(0));
}

TEST_CASE("reliability vector examples") {
    const HypothesisSet hs = binary_dms();
    const ExponentMatrix mx = optimal_exponents(hs, ExponentSpec{{0.05, 0.05}, std::nullopt}, 1000);
    const ReliabilityVector rv = reliability_vector(mx);
    CHECK(rv.consistent());
    CHECK(rv.E(0) == mx.rejection_row(0));
    CHECK(rv.E(0) == doctest::Approx(rv.E(1)).epsilon(1e-12));

    ExponentMatrix broken = mx;
    broken.off_diagonal(1, 0) = 0.01;
    const ReliabilityVector bad = reliability_vector(broken);
    CHECK_FALSE(bad.consistent());
    CHECK(bad.E(0) == 0.01);
}

TEST_CASE("rejection is the column minimum on random memoryless instances passing the preconditions") {
    expforge::testing::Rng rng(61);
    int tested = 0;
    for (int rep = 0; rep < 400 && tested < 40; ++rep) {
        const auto k = static_cast<std::size_t>(expforge::testing::uniform_int(rng, 2, 3));
        const HypothesisSet hs = random_set(rng, k, 1, 2);
        const double sep = std::min(kl_divergence(hs.family(0).row(0), hs.family(1).row(0)),
                                    kl_divergence(hs.family(1).row(0), hs.family(0).row(0)));
        const ExponentSpec spec{{sep * expforge::testing::uniform_real(rng, 0.02, 0.2),
                                 sep * expforge::testing::uniform_real(rng, 0.02, 0.2)},
                                std::nullopt};
        const ExponentMatrix mx = optimal_exponents(hs, spec, k == 2 ? 2000 : 150);
        if (!check_optimality_preconditions(hs, mx, spec).satisfied()) continue;
        ++tested;
        const ReliabilityVector rv = reliability_vector(mx);
        CHECK(rv.consistent());
        for (Eigen::Index m = 0; m < 2; ++m) {
            CHECK(mx.rejection_row(m) >= spec.E[static_cast<std::size_t>(m)]);
        }
    }
    CHECK(tested >= 20);
}

TEST_CASE("optimality precondition examples") {
    const HypothesisSet hs = binary_dms();
    const ExponentSpec ok{{0.05, 0.05}, std::nullopt};
    const ExponentMatrix mx = optimal_exponents(hs, ok, 1000);
    CHECK(check_optimality_preconditions(hs, mx, ok).satisfied());

    const ExponentSpec big{{3.0, 3.0}, std::nullopt};
    const PreconditionReport bad = check_optimality_preconditions(hs, optimal_exponents(hs, big, 1000), big);
    REQUIRE_FALSE(bad.satisfied());
    CHECK(bad.violations.front().lhs == 3.0);
    CHECK(bad.violations.front().rhs == doctest::Approx(2.5359400011538495).epsilon(1e-12));

    const HypothesisSet same = binary_dms(Distribution({0.9, 0.1}), Distribution({0.9, 0.1}));
    const PreconditionReport tie = check_optimality_preconditions(same, optimal_exponents(same, ok, 200), ok);
    REQUIRE_FALSE(tie.satisfied());
    bool positivity = false;
    for (const auto& v : tie.violations) positivity |= v.description.find("> 0") != std::string::npos;
    CHECK(positivity);

    const HypothesisSet avs = binary_avs();
    CHECK(check_optimality_preconditions(avs, optimal_exponents(avs, ok, 500), ok).satisfied());
}

TEST_CASE("region check examples") {
    const HypothesisSet hs = binary_dms();
    const RegionVerdict in = achievable_region_check(hs, ExponentSpec{{0.01, 0.01}, std::vector<double>{0.01, 0.01}}, 1000);
    CHECK(in.in_region());
    CHECK(in.resolution == 1000);

    const RegionVerdict out = achievable_region_check(hs, ExponentSpec{{10.0, 10.0}, std::nullopt}, 1000);
    CHECK_FALSE(out.in_region());
    const RegionFailure* cover = out.failure(1);
    REQUIRE(cover != nullptr);
    REQUIRE(cover->witness.has_value());
    CHECK(*cover->witness == hs.family(0).row(0));

    // Rejection thresholds beyond every reachable divergence fail only the
    // second clause.
    const RegionVerdict far = achievable_region_check(hs, ExponentSpec{{0.05, 0.05}, std::vector<double>{5.0, 5.0}}, 500);
    REQUIRE(far.failures.size() == 1);
    CHECK(far.failures.front().clause == 2);
    CHECK(far.failures.front().witness.has_value());

    // One hull is the whole simplex, so no W lies outside every hull.
    const HypothesisSet whole(Alphabet({"a", "b"}), StateSet({"s0", "s1"}),
                              {ConditionalFamily("H1", {Distribution({1.0, 0.0}), Distribution({0.0, 1.0})}),
                               ConditionalFamily("H2", {Distribution({0.3, 0.7}), Distribution({0.3, 0.7})})});
    const RegionVerdict full = achievable_region_check(whole, ExponentSpec{{0.01, 0.01}, std::nullopt}, 200);
    CHECK_FALSE(full.in_region());
    const RegionFailure* reject = full.failure(2);
    REQUIRE(reject != nullptr);
    CHECK(reject->witness.has_value());
}

TEST_CASE("region membership is monotone under shrinking") {
    expforge::testing::Rng rng(67);
    const HypothesisSet hs = binary_dms();
    const DivergenceField field = divergence_field(hs, 400);
    const ExponentSpec base{{0.3, 0.3}, std::vector<double>{0.3, 0.3}};
    REQUIRE(achievable_region_check(hs, field, base).in_region());
    for (int i = 0; i < 30; ++i) {
        std::vector<double> e(2);
        std::vector<double> er(2);
        for (std::size_t j = 0; j < 2; ++j) {
            e[j] = base.E[j] * expforge::testing::uniform_real(rng, 0.01, 1.0);
            er[j] = (*base.E_R)[j] * expforge::testing::uniform_real(rng, 0.01, 1.0);
        }
        CHECK(achievable_region_check(hs, field, ExponentSpec{e, er}).in_region());
    }
}

TEST_CASE("memoryless and varying-source paths agree exactly") {
    const HypothesisSet hs = binary_dms();
    const ExponentSpec spec{{0.05, 0.05}, std::nullopt};
    EngineOptions avs;
    avs.path = SourcePath::arbitrarily_varying;
    EngineOptions dms;
    dms.path = SourcePath::memoryless;
    CHECK(same_matrix(optimal_exponents(hs, spec, 1000, avs), optimal_exponents(hs, spec, 1000, dms)));

    expforge::testing::Rng rng(71);
    for (int rep = 0; rep < 20; ++rep) {
        const HypothesisSet r = random_set(rng, 3, 1, 3);
        const ExponentSpec s{{0.1, 0.2, 0.15}, std::nullopt};
        CHECK(same_matrix(optimal_exponents(r, s, 60, avs), optimal_exponents(r, s, 60, dms)));
        for (int t = 0; t < 10; ++t) {
            const Distribution w = random_distribution(rng, 3);
            const Eigen::VectorXd a = divergence_profile(w, r, avs);
            const Eigen::VectorXd b = divergence_profile(w, r, dms);
            CHECK((a.array() == b.array()).all());
        }
    }

    EngineOptions bad;
    bad.path = SourcePath::memoryless;
    CHECK_THROWS_AS(divergence_profile(Distribution({0.5, 0.5}), binary_avs(), bad), InputError);
}

TEST_CASE("dms_specialize collapses identical rows") {
    const HypothesisSet hs = binary_dms();
    const auto same = dms_specialize(hs);
    REQUIRE(same.has_value());
    CHECK(same->states().size() == 1);
    CHECK(same->family(0).row(0) == hs.family(0).row(0));

    CHECK_FALSE(dms_specialize(binary_avs()).has_value());

    const HypothesisSet doubled(Alphabet({"a", "b"}), StateSet({"x", "y"}),
                                {ConditionalFamily("H1", {Distribution({0.9, 0.1}), Distribution({0.9, 0.1})}),
                                 ConditionalFamily("H2", {Distribution({0.1, 0.9}), Distribution({0.1, 0.9})})});
    const auto collapsed = dms_specialize(doubled);
    REQUIRE(collapsed.has_value());
    const ExponentSpec spec{{0.05, 0.05}, std::nullopt};
    CHECK(same_matrix(optimal_exponents(*collapsed, spec, 500), optimal_exponents(hs, spec, 500)));
    const ExponentMatrix through_hulls = optimal_exponents(doubled, spec, 500);
    const ExponentMatrix point = optimal_exponents(hs, spec, 500);
    CHECK(through_hulls.rejection_row(0) == doctest::Approx(point.rejection_row(0)).epsilon(1e-9));
    CHECK(through_hulls.off_diagonal(1, 0) == doctest::Approx(point.off_diagonal(1, 0)).epsilon(1e-9));
}
