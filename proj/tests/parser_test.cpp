#include <gtest/gtest.h>

#include "polydyn/errors.hpp"
#include "polydyn/parser.hpp"
#include "polydyn/rng.hpp"

using namespace polydyn;

namespace {

Polynomial mono(GaussianRational c, Exponents e) { return Polynomial::monomial(c, std::move(e)); }

ErrorCode parse_error_code(std::string_view text, int *line = nullptr, int *col = nullptr) {
    try {
        parse_map(text);
    } catch (const ParseError &e) {
        if (line) *line = e.line();
        if (col) *col = e.column();
        return e.code();
    }
    ADD_FAILURE() << "expected a parse error for: " << text;
    return ErrorCode::Unsupported;
}

} // namespace

TEST(ParseMap, ExampleMap) {
    PolynomialMap f = parse_map("z1^6 - z2^4, z1^3 - 2*z2^2 + z2");
    ASSERT_EQ(f.dim(), 2u);
    EXPECT_EQ(f[0], mono(1, {6, 0}) - mono(1, {0, 4}));
    EXPECT_EQ(f[1], mono(1, {3, 0}) - mono(2, {0, 2}) + mono(1, {0, 1}));
}

TEST(ParseMap, ComplexCoefficientAndJuxtaposition) {
    PolynomialMap f = parse_map("(1+2i) z1 z2^3, z2");
    EXPECT_EQ(f[0], mono(GaussianRational(1, 2), {1, 3}));
    EXPECT_EQ(f[1], mono(1, {0, 1}));
}

TEST(ParseMap, CoefficientForms) {
    PolynomialMap f = parse_map("1/2 z1 - 0.25*z2 + 3e-2, 2i^2 z2 + i*z1");
    EXPECT_EQ(f[0].coeff({1, 0}), GaussianRational(mpq_class(1, 2)));
    EXPECT_EQ(f[0].coeff({0, 1}), GaussianRational(mpq_class(-1, 4)));
    EXPECT_EQ(f[0].coeff({0, 0}), GaussianRational(mpq_class(3, 100)));
    EXPECT_EQ(f[1].coeff({0, 1}), GaussianRational(-4));
    EXPECT_EQ(f[1].coeff({1, 0}), GaussianRational::i());
}

TEST(ParseMap, ParenthesesAndPowersExpand) {
    PolynomialMap f = parse_map("(z1 + z2)^2\nz1 - (z2 - 1)");
    EXPECT_EQ(f[0], mono(1, {2, 0}) + mono(2, {1, 1}) + mono(1, {0, 2}));
    EXPECT_EQ(f[1], mono(1, {1, 0}) - mono(1, {0, 1}) + mono(1, {0, 0}));
}

TEST(ParseMap, NewlinesAndHeader) {
    MapDocument doc = parse_document("# comment\nvars: z1 z2 z3\nz1^2 + z3\n\nz2^2,\nz3^2 # last\n");
    EXPECT_EQ(doc.k, 3u);
    ASSERT_EQ(doc.component_text.size(), 3u);
    EXPECT_EQ(doc.component_text[0], "z1^2 + z3");
    EXPECT_EQ(doc.spans[1].line, 5);
    EXPECT_EQ(doc.spans[1].column, 1);
    // A line ending in an operator continues the component.
    PolynomialMap g = parse_map("z1^2 +\n z2, z2");
    EXPECT_EQ(g.dim(), 2u);
}

TEST(ParseMap, UnknownVariable) {
    int line = 0, col = 0;
    EXPECT_EQ(parse_error_code("z3, z1", &line, &col), ErrorCode::UnknownVariable);
    EXPECT_EQ(line, 1);
    EXPECT_EQ(col, 1);
    EXPECT_EQ(parse_error_code("z1 + w, z2"), ErrorCode::UnknownVariable);
    EXPECT_EQ(parse_error_code("z0, z1"), ErrorCode::UnknownVariable);
    EXPECT_EQ(parse_error_code("vars: z1\nz2"), ErrorCode::UnknownVariable);
}

TEST(ParseMap, BadExponent) {
    int line = 0, col = 0;
    EXPECT_EQ(parse_error_code("z1^-1, z2", &line, &col), ErrorCode::BadExponent);
    EXPECT_EQ(col, 4);
    EXPECT_EQ(parse_error_code("z1, z2^1.5", &line, &col), ErrorCode::BadExponent);
    EXPECT_EQ(col, 8);
    EXPECT_EQ(parse_error_code("z1^z2, z2"), ErrorCode::BadExponent);
    EXPECT_EQ(parse_error_code("z1^(2), z2"), ErrorCode::BadExponent);
}

TEST(ParseMap, UnbalancedParens) {
    int line = 0, col = 0;
    EXPECT_EQ(parse_error_code("(z1 + z2, z2", &line, &col), ErrorCode::UnbalancedParens);
    EXPECT_EQ(col, 1);
    EXPECT_EQ(parse_error_code("z1 + z2), z2", &line, &col), ErrorCode::UnbalancedParens);
    EXPECT_EQ(col, 8);
    EXPECT_EQ(parse_error_code("z1,\n (z2", &line, &col), ErrorCode::UnbalancedParens);
    EXPECT_EQ(line, 2);
    EXPECT_EQ(col, 2);
}

TEST(ParseMap, ImplicitMultiplicationOnlyBeforeVariables) {
    EXPECT_EQ(parse_error_code("2 3, z2"), ErrorCode::SyntaxError);
    EXPECT_EQ(parse_error_code("z1 (z2), z2"), ErrorCode::SyntaxError);
    EXPECT_EQ(parse_error_code("z1 i, z2"), ErrorCode::SyntaxError);
}

TEST(FormatMap, CanonicalOrdering) {
    EXPECT_EQ(format_polynomial(parse_polynomial("z2 + z1", 2)), "z1 + z2");
    EXPECT_EQ(format_map(parse_map("z1^6 - z2^4, z1^3 - 2*z2^2 + z2")), "z1^6 - z2^4, z1^3 - 2*z2^2 + z2");
    EXPECT_EQ(format_map(parse_map("z2 - 2 z2^2 + z1^3, -z2^4 + z1^6")), "z1^3 - 2*z2^2 + z2, z1^6 - z2^4");
    EXPECT_EQ(format_polynomial(Polynomial(2)), "0");
    EXPECT_EQ(format_map(parse_map("z1 - z1, z2")), "0, z2");
    EXPECT_EQ(format_polynomial(parse_polynomial("(1+2i) z1 z2^3 - 3/2 i z2 - i + 7", 2)),
              "(1 + 2i)*z1*z2^3 - 3/2i*z2 + (7 - i)");
}

namespace {

GaussianRational random_coeff(Rng &rng) {
    auto part = [&rng]() -> mpq_class {
        switch (rng.below(4)) {
        case 0: return 0;
        case 1: return mpq_class(static_cast<long>(rng.below(21)) - 10);
        case 2: return mpq_class(static_cast<long>(rng.below(41)) - 20, 1 + static_cast<long>(rng.below(12)));
        default: return mpq_class(static_cast<long>(rng.below(2001)) - 1000, 1000);
        }
    };
    GaussianRational c(part(), part());
    return c.is_zero() ? GaussianRational(1) : c;
}

// Random source text mixing the grammar's features; returns text only.
std::string random_expression(Rng &rng, std::size_t k, int depth) {
    std::string out;
    int nterms = 1 + static_cast<int>(rng.below(4));
    for (int t = 0; t < nterms; ++t) {
        if (t > 0 || rng.below(3) == 0) out += rng.below(2) ? " + " : " - ";
        if (depth > 0 && rng.below(5) == 0) {
            out += "(" + random_expression(rng, k, depth - 1) + ")";
            if (rng.below(2)) out += "^" + std::to_string(rng.below(3));
            continue;
        }
        GaussianRational c = random_coeff(rng);
        out += "(" + format_coefficient(c) + ")";
        for (std::size_t j = 0; j < k; ++j) {
            unsigned e = static_cast<unsigned>(rng.below(4));
            if (e == 0) continue;
            out += rng.below(2) ? " * " : " ";
            out += "z" + std::to_string(j + 1);
            if (e > 1 || rng.below(2)) out += "^" + std::to_string(e);
        }
    }
    return out;
}

} // namespace

TEST(FormatMap, FuzzParseFormatParse) {
    Rng rng(314159);
    for (int n = 0; n < 1000; ++n) {
        std::size_t k = 1 + rng.below(3);
        std::string text;
        for (std::size_t j = 0; j < k; ++j) {
            if (j > 0) text += rng.below(2) ? ", " : "\n";
            text += random_expression(rng, k, 2);
        }
        PolynomialMap once = parse_map(text);
        PolynomialMap twice = parse_map(format_map(once));
        ASSERT_EQ(once, twice) << text;
    }
}
