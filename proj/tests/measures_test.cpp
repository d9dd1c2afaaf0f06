#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "polydyn/errors.hpp"
#include "polydyn/measures.hpp"
#include "polydyn/parser.hpp"
#include "polydyn/rng.hpp"

using namespace polydyn;

namespace {

const char *kF0 = "z1^2, z2^2";
const char *kF1 = "z1^6 - z2^4, z1^3 - 2*z2^2 + z2";
const char *kF2 = "z1^2, z1 + 2*z2";

RegularityReport report_of(const char *text) { return analyze(parse_map(text)).semi; }

SliceSpec slice_z1(Complex z2, std::size_t n, double half = 2.0) {
    SliceSpec s;
    s.coord = 0;
    s.width = s.height = 2.0 * half;
    s.fixed = {0.0, z2};
    s.nx = s.ny = n;
    return s;
}

GreenField constant_field(std::size_t n, double (*g)(Complex)) {
    GreenField f;
    f.slice = slice_z1(0.0, n);
    f.values.resize(n * n);
    for (std::size_t iy = 0; iy < n; ++iy)
        for (std::size_t ix = 0; ix < n; ++ix) {
            GreenValue v;
            v.kind = GreenValue::Kind::Finite;
            v.value = g(f.slice.pixel(ix, iy));
            f.values[iy * n + ix] = v;
        }
    return f;
}

MeasureCloud cloud_of(const char *text, std::size_t n, std::uint64_t seed = 3) {
    SampleOptions o;
    o.n_points = n;
    o.seed = seed;
    return equilibrium_sample(parse_map(text), o);
}

} // namespace

TEST(Slice, Validation) {
    SliceSpec s = slice_z1(0.0, 1);
    EXPECT_THROW(s.validate(2), Error);
    s.nx = s.ny = 2;
    EXPECT_NO_THROW(s.validate(2));
    s.width = 0.0;
    EXPECT_THROW(s.validate(2), Error);
    s.width = 1.0;
    EXPECT_THROW(s.validate(3), Error);
}

TEST(Slice, PixelGeometry) {
    SliceSpec s = slice_z1(0.0, 5);
    EXPECT_EQ(s.pixel(0, 0), Complex(-2.0, 2.0));
    EXPECT_EQ(s.pixel(4, 4), Complex(2.0, -2.0));
    EXPECT_EQ(s.pixel(2, 2), Complex(0.0, 0.0));
}

TEST(GreenField, F0ClosedForm) {
    GreenField f = green_field(report_of(kF0), 1, slice_z1(0.5, 64));
    EXPECT_EQ(f.indeterminate, 0u);
    for (std::size_t iy = 0; iy < 64; ++iy)
        for (std::size_t ix = 0; ix < 64; ++ix) {
            const GreenValue &g = f.at(ix, iy);
            ASSERT_TRUE(g.finite());
            EXPECT_NEAR(g.value, std::max(0.0, std::log(std::abs(f.slice.pixel(ix, iy)))), 1e-8);
        }
}

TEST(GreenField, TinyGrid) {
    GreenField f = green_field(report_of(kF0), 1, slice_z1(0.5, 2));
    EXPECT_EQ(f.values.size(), 4u);
}

TEST(GreenField, F1TrichotomyAgreesWithBasins) {
    RegularityReport r = report_of(kF1);
    SliceSpec s = slice_z1(Complex(0.3, 0.1), 40, 1.6);
    GreenField g = green_field(r, 1, s);
    BasinGrid b = basin_grid(r, s);
    std::size_t u1 = 0, rest = 0;
    for (std::size_t k = 0; k < g.values.size(); ++k) {
        const BasinLabel &l = b.labels[k];
        const GreenValue &v = g.values[k];
        if (l.kind == BasinLabel::Kind::Indeterminate || !v.finite()) continue;
        if (l.kind == BasinLabel::Kind::U && l.index == 1) {
            EXPECT_GT(v.value, 0.0);
            ++u1;
        } else {
            EXPECT_EQ(v.value, 0.0);
            ++rest;
        }
    }
    EXPECT_GT(u1, 100u);
    EXPECT_GT(rest, 100u);
}

TEST(Density, ConstantAndLinearFieldsHaveNoMass) {
    for (auto g : {+[](Complex) { return 3.0; }, +[](Complex z) { return 1.0 + 0.5 * z.real() - 0.25 * z.imag(); }}) {
        DensityGrid d = laplacian_density(constant_field(16, g));
        for (double v : d.values) EXPECT_NEAR(v, 0.0, 1e-12);
        EXPECT_NEAR(d.min_raw, 0.0, 1e-12);
    }
}

TEST(Density, F0RingHasUnitMass) {
    GreenField f = green_field(report_of(kF0), 1, slice_z1(0.5, 128));
    DensityGrid d = laplacian_density(f);
    EXPECT_NEAR(d.total_mass, 1.0, 0.05);
    double off_ring = 0.0;
    for (std::size_t iy = 0; iy < d.ny; ++iy)
        for (std::size_t ix = 0; ix < d.nx; ++ix) {
            double r = std::abs(f.slice.pixel(ix, iy));
            if (std::abs(r - 1.0) > 0.1) off_ring += d.at(ix, iy) * d.hx * d.hy;
        }
    EXPECT_LT(off_ring, 0.02);
}

TEST(Density, NegativeMassShrinksWithResolution) {
    RegularityReport r = report_of(kF0);
    double prev = std::numeric_limits<double>::infinity();
    for (std::size_t n : {33u, 65u, 129u}) {
        DensityGrid d = laplacian_density(green_field(r, 1, slice_z1(0.5, n)));
        if (std::isfinite(prev)) EXPECT_LE(d.negative_mass, 0.5 * prev + 1e-12) << n;
        prev = d.negative_mass;
    }
}

TEST(Density, TooManyIndeterminate) {
    GreenField f = constant_field(10, +[](Complex) { return 1.0; });
    for (std::size_t k = 0; k < 4; ++k) f.values[k].kind = GreenValue::Kind::Indeterminate;
    f.indeterminate = 4;
    EXPECT_NO_THROW(laplacian_density(f));
    for (std::size_t k = 4; k < 10; ++k) f.values[k].kind = GreenValue::Kind::Indeterminate;
    f.indeterminate = 10;
    try {
        laplacian_density(f);
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), ErrorCode::TooManyIndeterminate);
    }
}

TEST(Lyapunov, F0TorusIsTwo) {
    MeasureCloud c = cloud_of(kF0, 2000);
    PolynomialMap f = parse_map(kF0);
    LyapunovNorm l = lyapunov_norm(f, c, 20);
    EXPECT_NEAR(l.m_hat, 2.0, 0.05);
    EXPECT_EQ(l.used, 2000u);
    MeasureCloud shuffled = c;
    std::reverse(shuffled.points.begin(), shuffled.points.end());
    EXPECT_EQ(lyapunov_norm(f, shuffled, 20).m_hat, l.m_hat);
    double prev = 0.0;
    for (std::size_t n : {10u, 15u, 20u, 30u}) {
        double m = lyapunov_norm(f, c, n).m_hat;
        EXPECT_GE(m, prev * 0.98);
        prev = m;
    }
}

TEST(Lyapunov, F2AtLeastTwo) {
    LyapunovNorm l = lyapunov_norm(parse_map(kF2), cloud_of(kF2, 1000), 20);
    EXPECT_GE(l.m_hat, 2.0 - 0.05);
}

TEST(Lyapunov, Preconditions) {
    MeasureCloud empty;
    EXPECT_THROW(lyapunov_norm(parse_map(kF0), empty, 20), Error);
    EXPECT_THROW(lyapunov_norm(parse_map(kF0), cloud_of(kF0, 10), 5), Error);
}

TEST(PushforwardTV, SmallForInvariantClouds) {
    for (const char *t : {kF0, kF2}) EXPECT_LT(pushforward_tv(parse_map(t), cloud_of(t, 5000)), 0.05) << t;
}

TEST(PushforwardTV, DetectsNonInvariantCloud) {
    MeasureCloud c;
    Rng rng(2);
    for (int n = 0; n < 2000; ++n) c.points.push_back({rng.in_disk(1.0), rng.in_disk(1.0)});
    EXPECT_GT(pushforward_tv(parse_map(kF0), c), 0.2);
}

TEST(Dimension, F0) {
    DimensionReport d = dimension_report(report_of(kF0), 2.0);
    EXPECT_NEAR(d.mu_bound, 2.0, 1e-12);
    ASSERT_EQ(d.a_bounds.size(), 1u);
    EXPECT_NEAR(d.a_bounds[0], 1.0, 1e-12);
    EXPECT_LT(d.identity_error, 1e-9);
}

TEST(Dimension, F1Formula) {
    const double m = 7.5;
    DimensionReport d = dimension_report(report_of(kF1), m);
    EXPECT_NEAR(d.mu_bound, std::log(12.0) / std::log(m), 1e-12);
    ASSERT_EQ(d.a_bounds.size(), 2u);
    EXPECT_NEAR(d.a_bounds[0], std::log(6.0) / std::log(m), 1e-12);
    EXPECT_NEAR(d.a_bounds[1], std::log(2.0) / std::log(m), 1e-12);
    EXPECT_LT(d.identity_error, 1e-9);
}

TEST(Dimension, IdentityHoldsForAllMaps) {
    for (const char *t : {kF0, kF1, kF2, "z1^4 + z2^2, z2^2", "z1^3 + z2, z2^2 + z3, z3^2"}) {
        for (double m : {1.01, 2.0, 17.0}) EXPECT_LT(dimension_report(report_of(t), m).identity_error, 1e-9) << t;
    }
}

TEST(Dimension, MBelowOne) {
    try {
        dimension_report(report_of(kF0), 1.0 + 1e-12);
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), ErrorCode::MBelowOne);
    }
}

TEST(Holder, F0SlopeNearOne) {
    MeasureCloud c = cloud_of(kF0, 20000);
    HolderFit h = holder_diagnostic(report_of(kF0), 1, c);
    EXPECT_GT(h.used, 500u);
    EXPECT_NEAR(h.slope, 1.0, 0.3);
    EXPECT_LE(h.ci_low, h.slope);
    EXPECT_GE(h.ci_high, h.slope);
    // Direction check against the bound with M = 2.
    EXPECT_GE(h.slope, dimension_report(report_of(kF0), 2.0).a_bounds[0] - 0.2);
}

TEST(Holder, EmptyShell) {
    MeasureCloud far;
    far.points = {{100.0, 100.0}, {-100.0, 100.0}};
    try {
        holder_diagnostic(report_of(kF0), 1, far);
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), ErrorCode::InsufficientSamples);
    }
}
