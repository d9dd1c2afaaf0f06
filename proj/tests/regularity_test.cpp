#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "polydyn/forms.hpp"
#include "polydyn/parser.hpp"
#include "polydyn/regularity.hpp"
#include "polydyn/rng.hpp"

using namespace polydyn;

namespace {

PolynomialMap map_of(const char *text) { return parse_map(text); }

const char *kF0 = "z1^2, z2^2";
const char *kF1 = "z1^6 - z2^4, z1^3 - 2*z2^2 + z2";
const char *kG = "z1^6 - z2^4, z1^3 - z2^2 + z2";
const char *kF2 = "z1^2, z1 + 2*z2";
const char *kF3 = "z1^4 + z2^2, z2^2";

std::vector<mpq_class> q(std::initializer_list<long> v) {
    std::vector<mpq_class> out;
    for (long x : v) out.emplace_back(x);
    return out;
}

} // namespace

TEST(Forms, ResultantOfKnownPairs) {
    // x^2 - y^2 and x - y share [1:1].
    EXPECT_TRUE(resultant({1, 0, -1}, {1, -1}).is_zero());
    // x^2 + y^2 and x*y: no common projective zero.
    EXPECT_FALSE(resultant({1, 0, 1}, {0, 1, 0}).is_zero());
    // y^2 and x*y share [1:0].
    EXPECT_TRUE(resultant({0, 0, 1}, {0, 1, 0}).is_zero());
    EXPECT_EQ(resultant({3}, {1, 2, 5}), GaussianRational(9));
    EXPECT_EQ(determinant({{1, 2}, {3, 4}}), GaussianRational(-2));
}

TEST(Forms, ResultantAgreesWithGcd) {
    Rng rng(2024);
    int shared = 0;
    auto coeff = [&rng] { return GaussianRational(static_cast<long>(rng.below(7)) - 3, static_cast<long>(rng.below(3)) - 1); };
    auto nonzero_coeff = [&] {
        GaussianRational c;
        do c = coeff(); while (c.is_zero());
        return c;
    };
    auto random_form = [&](std::size_t degree) {
        CoeffList f(degree + 1);
        f[0] = nonzero_coeff();
        for (std::size_t j = 1; j <= degree; ++j) f[j] = coeff();
        return f;
    };
    auto multiply = [](const CoeffList &a, const CoeffList &b) {
        CoeffList c(a.size() + b.size() - 1);
        for (std::size_t i = 0; i < a.size(); ++i)
            for (std::size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
        return c;
    };
    for (int trial = 0; trial < 200; ++trial) {
        CoeffList a = random_form(1 + rng.below(3));
        CoeffList b = random_form(1 + rng.below(3));
        if (trial % 2 == 0) {
            CoeffList common = random_form(1);
            a = multiply(a, common);
            b = multiply(b, common);
        }
        bool res_zero = resultant(a, b).is_zero();
        bool gcd_nonconstant = poly_gcd(a, b).size() >= 2;
        EXPECT_EQ(res_zero, gcd_nonconstant) << "trial " << trial;
        shared += res_zero;
    }
    EXPECT_GE(shared, 100);
}

TEST(AlgebraicStability, Examples) {
    PolynomialMap f = map_of(kF1);
    EXPECT_TRUE(check_algebraic_stability(f, block_structure(f)));
    PolynomialMap h = map_of("z1*z2^5 + z2^4, z2^2");
    EXPECT_FALSE(check_algebraic_stability(h, block_structure(h)));
    PolynomialMap f0 = map_of(kF0);
    EXPECT_TRUE(check_algebraic_stability(f0, block_structure(f0)));
}

TEST(SRegularity, F1PassesLevelOneOnly) {
    PolynomialMap f = map_of(kF1);
    auto levels = check_s_regularity(f, block_structure(f), 2);
    ASSERT_EQ(levels.size(), 2u);
    EXPECT_EQ(levels[0].verdict, Verdict::Pass);
    EXPECT_EQ(levels[1].verdict, Verdict::Fail);
    EXPECT_EQ(levels[1].method, "exact-resultant");
    ASSERT_EQ(levels[1].i_generators.size(), 2u);
    EXPECT_EQ(format_polynomial(levels[1].i_generators[0]), "z1^6");
    EXPECT_EQ(format_polynomial(levels[1].i_generators[1]), "z1^3");
    ASSERT_EQ(levels[0].x_generators.size(), 1u);
    EXPECT_EQ(format_polynomial(levels[0].x_generators[0]), "z2");
}

TEST(SRegularity, F3IsRegularAndF0HasOneBlock) {
    PolynomialMap f3 = map_of(kF3);
    auto levels = check_s_regularity(f3, block_structure(f3), 2);
    EXPECT_EQ(levels[0].verdict, Verdict::Pass);
    EXPECT_EQ(levels[1].verdict, Verdict::Pass);
    PolynomialMap f0 = map_of(kF0);
    BlockStructure b0 = block_structure(f0);
    EXPECT_EQ(b0.m, 1u);
    EXPECT_EQ(check_s_regularity(f0, b0, 1)[0].verdict, Verdict::Pass);
}

TEST(SRegularity, BlockOrderIsRestoredBeforeTesting) {
    // F1 with coordinates swapped: same verdicts.
    PolynomialMap swapped = map_of("z2^3 - 2*z1^2 + z1, z2^6 - z1^4");
    BlockStructure b = block_structure(swapped);
    EXPECT_FALSE(b.identity_permutation());
    auto levels = check_s_regularity(swapped, b, 2);
    EXPECT_EQ(levels[0].verdict, Verdict::Pass);
    EXPECT_EQ(levels[1].verdict, Verdict::Fail);
}

TEST(SRegularity, NumericalCertificateInThreeVariables) {
    PolynomialMap cube = map_of("z1^2, z2^2, z3^2");
    auto pass = check_s_regularity(cube, block_structure(cube), 1);
    EXPECT_EQ(pass[0].method, "numerical-certificate");
    EXPECT_EQ(pass[0].verdict, Verdict::Pass);
    EXPECT_NEAR(pass[0].sphere_min, 1.0 / 3.0, 1e-6);

    // Common projective zero [1:1:1].
    PolynomialMap shared = map_of("z1^2 - z2^2, z2^2 - z3^2, z1*z2 - z3^2");
    auto fail = check_s_regularity(shared, block_structure(shared), 1);
    EXPECT_EQ(fail[0].verdict, Verdict::Fail);
    ASSERT_EQ(fail[0].witness.size(), 3u);
    Complex w0 = fail[0].witness[0];
    for (auto w : fail[0].witness) EXPECT_NEAR(std::abs(w * w - w0 * w0), 0.0, 1e-4);

    // Too few nonzero equations: the last component has no part of its block degree.
    PolynomialMap thin = map_of("z1^3, z2^2, z3");
    auto levels = check_levels(thin, {1, 2, 4}, {3, 2}, 2);
    EXPECT_EQ(levels[0].method, "exact");
    EXPECT_EQ(levels[1].method, "exact-dimension");
    EXPECT_EQ(levels[1].verdict, Verdict::Fail);
}

TEST(SRegularity, CertificateIsDeterministic) {
    PolynomialMap cube = map_of("z1^3 - z2*z3^2, z2^3 + z1*z3^2, z3^3 + z1^2*z2");
    auto a = check_s_regularity(cube, block_structure(cube), 1);
    auto b = check_s_regularity(cube, block_structure(cube), 1);
    EXPECT_EQ(a[0].sphere_min, b[0].sphere_min);
    EXPECT_EQ(a[0].verdict, b[0].verdict);
}

TEST(NewtonDiagram, SupportLinesOfExampleMaps) {
    for (const char *text : {kF1, kG}) {
        NewtonDiagram nd = newton_diagram(map_of(text));
        SupportLine d1 = support_line_D1(nd, 6);
        EXPECT_EQ(d1, (SupportLine{2, 3, 12}));
        EXPECT_EQ(support_line_D2(nd, d1), (SupportLine{2, 3, 6}));
    }
    NewtonDiagram nd2 = newton_diagram(map_of(kF2));
    SupportLine d1 = support_line_D1(nd2, 2);
    EXPECT_EQ(d1, (SupportLine{1, 2, 2}));
    EXPECT_EQ(support_line_D2(nd2, d1), (SupportLine{1, 2, 2}));
    EXPECT_EQ(support_line_D1(newton_diagram(map_of("z1^2 + z2^2, z2")), 2), (SupportLine{1, 1, 2}));
}

TEST(NewtonDiagram, Errors) {
    NewtonDiagram flat = newton_diagram(map_of("z1^3 + z1, z1^2 + 1"));
    try {
        support_line_D1(flat, 3);
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), ErrorCode::SlopeZero);
    }
    NewtonDiagram unstable = newton_diagram(map_of("z1*z2^5 + z2^4, z2^2"));
    try {
        support_line_D1(unstable, 6);
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), ErrorCode::NotAlgebraicallyStable);
    }
}

TEST(SemiRegularity, ExampleMapF) {
    RegularityReport r = semi_regularity_2d(map_of(kF1));
    EXPECT_TRUE(r.verdict);
    EXPECT_FALSE(r.failure.has_value());
    ASSERT_TRUE(r.newton.has_value());
    EXPECT_EQ(format_polynomial(r.newton->p1_d1), "z1^6 - z2^4");
    EXPECT_EQ(format_polynomial(r.newton->p2_d2), "z1^3 - 2*z2^2");
    EXPECT_EQ(*r.pi, (std::vector<unsigned>{2, 3}));
    EXPECT_EQ(r.alpha, q({6, 2}));
    EXPECT_EQ(*r.d_t_predicted, 12);
    EXPECT_EQ(*r.lambda_predicted, 2);
    EXPECT_EQ(r.s_max, 2u);
    EXPECT_EQ(format_map(*r.composed), "z1^12 - z2^12, z1^6 - 2*z2^6 + z2^3");
}

TEST(SemiRegularity, ExampleMapGSharesAComponent) {
    RegularityReport r = semi_regularity_2d(map_of(kG));
    EXPECT_FALSE(r.verdict);
    ASSERT_TRUE(r.failure.has_value());
    EXPECT_EQ(*r.failure, ErrorCode::SharedComponent);
    ASSERT_TRUE(r.newton.has_value());
    EXPECT_TRUE(r.newton->resultant.is_zero());
    EXPECT_FALSE(r.pi.has_value());
}

TEST(SemiRegularity, F2AndF3) {
    RegularityReport r2 = semi_regularity_2d(map_of(kF2));
    EXPECT_TRUE(r2.verdict);
    EXPECT_EQ(*r2.pi, (std::vector<unsigned>{1, 2}));
    EXPECT_EQ(r2.alpha, q({2, 1}));
    EXPECT_EQ(*r2.d_t_predicted, 2);
    EXPECT_EQ(*r2.lambda_predicted, 1);
    EXPECT_EQ(r2.prediction_basis, "affine-family");

    RegularityReport r3 = semi_regularity_2d(map_of(kF3));
    EXPECT_TRUE(r3.verdict);
    EXPECT_EQ(*r3.d_t_predicted, 8);
    EXPECT_EQ(*r3.lambda_predicted, 2);
}

TEST(SemiRegularity, FailureReasons) {
    RegularityReport unstable = semi_regularity_2d(map_of("z1*z2^5 + z2^4, z2^2"));
    EXPECT_EQ(unstable.failure, ErrorCode::NotAlgebraicallyStable);
    RegularityReport flat = semi_regularity_2d(map_of("z1^3 + z1, z1^2 + 1"));
    EXPECT_FALSE(flat.verdict);
    EXPECT_EQ(flat.failure, ErrorCode::SlopeZero);
    EXPECT_THROW(semi_regularity_2d(map_of(kF0)), Error);
}

TEST(PiRegularity, Examples) {
    PolynomialMap f = map_of(kF1);
    EXPECT_TRUE(check_pi_regularity(f, {2, 3}, 2).verdict);
    RegularityReport trivial = check_pi_regularity(f, {1, 1}, 2);
    EXPECT_FALSE(trivial.verdict);
    EXPECT_EQ(trivial.s_max, 1u);
    EXPECT_EQ(trivial.levels[1].verdict, Verdict::Fail);
    PolynomialMap f0 = map_of(kF0);
    RegularityReport r0 = check_pi_regularity(f0, {1}, 1);
    EXPECT_TRUE(r0.verdict);
    EXPECT_EQ(*r0.d_t_predicted, 4);
    EXPECT_EQ(*r0.lambda_predicted, 2);
    EXPECT_THROW(check_pi_regularity(f, {3, 2}, 2), Error);
}

TEST(Predictions, PullbackFactors) {
    RegularityReport r = semi_regularity_2d(map_of(kF1));
    // T_1: alpha_1 = 6; T_2: alpha_2 * alpha_1 = 12.
    EXPECT_EQ(predicted_pullback_factors(r), q({6, 12}));
    RegularityReport r0 = check_pi_regularity(map_of(kF0), {1}, 1);
    EXPECT_EQ(predicted_pullback_factors(r0), q({2, 4}));
}

TEST(Analyze, Classifications) {
    Analysis f = analyze(map_of(kF1));
    EXPECT_FALSE(f.is_regular);
    EXPECT_TRUE(f.is_semi_regular);
    EXPECT_EQ(f.regular.s_max, 1u);
    Analysis g = analyze(map_of(kG));
    EXPECT_FALSE(g.is_semi_regular);
    EXPECT_EQ(g.reason, ErrorCode::SharedComponent);
    Analysis f0 = analyze(map_of(kF0));
    EXPECT_TRUE(f0.is_regular);
    EXPECT_EQ(*f0.semi.pi, (std::vector<unsigned>{1}));
    Analysis f3 = analyze(map_of(kF3));
    EXPECT_TRUE(f3.is_regular);
    EXPECT_TRUE(f3.is_semi_regular);
    EXPECT_EQ(*f3.semi.d_t_predicted, 8);
}

namespace {

// Random algebraically stable 2-D map with d1 > d2 and some z2-dependence.
PolynomialMap random_stable_map(Rng &rng) {
    const unsigned d1 = 3 + static_cast<unsigned>(rng.below(4));
    const unsigned d2 = 1 + static_cast<unsigned>(rng.below(d1 - 1));
    auto coeff = [&rng] {
        long c = static_cast<long>(rng.below(9)) - 4;
        return GaussianRational(c == 0 ? 1 : c);
    };
    Polynomial p1 = Polynomial::monomial(coeff(), {d1, 0});
    Polynomial p2(2);
    for (int t = 0; t < 4; ++t) {
        unsigned total = static_cast<unsigned>(rng.below(d1 + 1));
        unsigned n = static_cast<unsigned>(rng.below(total + 1));
        p1.add_term({total - n, n}, coeff());
    }
    p2.add_term({0, 1 + static_cast<unsigned>(rng.below(d2))}, coeff());
    p2.add_term({d2, 0}, coeff());
    for (int t = 0; t < 3; ++t) {
        unsigned total = static_cast<unsigned>(rng.below(d2 + 1));
        unsigned n = static_cast<unsigned>(rng.below(total + 1));
        p2.add_term({total - n, n}, coeff());
    }
    if (p1.coeff({d1, 0}).is_zero()) p1.add_term({d1, 0}, GaussianRational(1));
    if (p2.degree() != static_cast<int>(d2)) p2.add_term({d2, 0}, GaussianRational(1));
    return PolynomialMap({p1, p2});
}

} // namespace

TEST(NewtonDiagram, DominanceProperty) {
    Rng rng(77);
    for (int trial = 0; trial < 300; ++trial) {
        PolynomialMap f = random_stable_map(rng);
        BlockStructure b = block_structure(f);
        if (b.m != 2 || !b.identity_permutation()) continue;
        NewtonDiagram nd = newton_diagram(f);
        const unsigned d1 = static_cast<unsigned>(b.d[0]);
        SupportLine d1line;
        try {
            d1line = support_line_D1(nd, d1);
        } catch (const Error &e) {
            ASSERT_EQ(e.code(), ErrorCode::SlopeZero);
            continue;
        }
        EXPECT_EQ(std::gcd(d1line.p, d1line.q), 1);
        EXPECT_GT(d1line.p, 0);
        EXPECT_LE(d1line.p, d1line.q); // slope in [-1, 0)
        EXPECT_EQ(d1line.p * static_cast<long>(d1), d1line.r);
        bool touched = false;
        for (const auto &sig : nd.sigma)
            for (auto [m, n] : sig) {
                long v = d1line.p * m + d1line.q * n;
                EXPECT_LE(v, d1line.r);
                touched |= (v == d1line.r && n > 0);
            }
        EXPECT_TRUE(touched);
    }
}

TEST(SemiRegularity, ConsistentWithPiRegularityAndDegreeLaw) {
    Rng rng(99);
    int successes = 0;
    for (int trial = 0; trial < 200; ++trial) {
        PolynomialMap f = random_stable_map(rng);
        BlockStructure b = block_structure(f);
        if (b.m != 2) continue;
        RegularityReport r = semi_regularity_2d(f);
        if (!r.verdict) continue;
        ++successes;
        EXPECT_TRUE(check_pi_regularity(f, *r.pi, 2).verdict);
        // Degree of f o pi per block equals the support-line levels.
        EXPECT_EQ(r.composed->components()[0].degree(), r.newton->d1.r);
        EXPECT_EQ(r.composed->components()[1].degree(), r.newton->d2.r);
        EXPECT_EQ(r.alpha[0], b.d[0]);
    }
    EXPECT_GE(successes, 50);
}
