#pragma once

#include <span>
#include <vector>

#include "polydyn/gaussian_rational.hpp"
#include "polydyn/polynomial.hpp"

namespace polydyn {

/// Dense coefficient list, highest power first. For a binary form of degree d
/// in (x, y) the list is a_0..a_d with a_j the coefficient of x^{d-j} y^j, so
/// a zero leading entry means the form is divisible by y.
using CoeffList = std::vector<GaussianRational>;
using ExactMatrix = std::vector<std::vector<GaussianRational>>;

/// Exact determinant over Q(i) by Gaussian elimination.
GaussianRational determinant(ExactMatrix m);

/// Sylvester matrix of two coefficient lists of formal degrees a.size()-1 and
/// b.size()-1 (leading entries may vanish).
ExactMatrix sylvester_matrix(const CoeffList &a, const CoeffList &b);

/// Homogeneous resultant of two binary forms. It vanishes exactly when the
/// forms share a zero in P^1. A constant form c gives c^{deg other}.
GaussianRational resultant(const CoeffList &a, const CoeffList &b);

/// Coefficient list of a homogeneous polynomial in variables x_var, y_var;
/// all other exponents must be zero.
CoeffList binary_form(const Polynomial &form, std::size_t x_var = 0, std::size_t y_var = 1);

/// Univariate helpers on coefficient lists (highest power first).
CoeffList trim(CoeffList a);
CoeffList poly_rem(const CoeffList &a, const CoeffList &b);
/// Monic gcd; the gcd of two zero polynomials is the empty list.
CoeffList poly_gcd(CoeffList a, CoeffList b);

/// True if the binary forms (homogeneous, two variables) have a common zero
/// other than the origin. Zero forms impose no condition.
bool binary_forms_have_common_zero(std::span<const CoeffList> forms);

} // namespace polydyn
