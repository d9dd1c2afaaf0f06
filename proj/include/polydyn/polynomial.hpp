#pragma once

#include <complex>
#include <cstddef>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "polydyn/gaussian_rational.hpp"

namespace polydyn {

using Complex = std::complex<double>;
using Exponents = std::vector<unsigned>;

unsigned total_degree(const Exponents &e);

/// Graded order, highest total degree first; ties broken lexicographically
/// with z1 > z2 > ... This is the canonical print order.
struct GrlexDescending {
    bool operator()(const Exponents &a, const Exponents &b) const;
};

struct Term {
    GaussianRational coeff;
    Exponents exponents;
};

class Polynomial {
  public:
    using TermMap = std::map<Exponents, GaussianRational, GrlexDescending>;

    explicit Polynomial(std::size_t nvars = 0) : nvars_(nvars) {}

    static Polynomial constant(std::size_t nvars, const GaussianRational &c);
    /// The coordinate function z_{index+1}.
    static Polynomial variable(std::size_t nvars, std::size_t index);
    static Polynomial monomial(const GaussianRational &c, Exponents e);

    std::size_t nvars() const { return nvars_; }
    bool is_zero() const { return terms_.empty(); }
    /// Total degree; -1 for the zero polynomial.
    int degree() const;
    /// Degree in a single variable; -1 for the zero polynomial.
    int degree_in(std::size_t var) const;
    bool is_homogeneous() const;

    const TermMap &terms() const { return terms_; }
    std::vector<Term> term_list() const;
    GaussianRational coeff(const Exponents &e) const;

    /// Adds c*z^e, merging with an existing term and dropping exact zeros.
    void add_term(const Exponents &e, const GaussianRational &c);

    Polynomial &operator+=(const Polynomial &o);
    Polynomial &operator-=(const Polynomial &o);
    Polynomial &operator*=(const GaussianRational &c);
    friend Polynomial operator+(Polynomial a, const Polynomial &b) { return a += b; }
    friend Polynomial operator-(Polynomial a, const Polynomial &b) { return a -= b; }
    friend Polynomial operator-(const Polynomial &a);
    friend Polynomial operator*(const Polynomial &a, const Polynomial &b);
    friend Polynomial operator*(Polynomial a, const GaussianRational &c) { return a *= c; }
    friend bool operator==(const Polynomial &a, const Polynomial &b) {
        return a.nvars_ == b.nvars_ && a.terms_ == b.terms_;
    }

    Polynomial pow(unsigned n) const;
    Polynomial derivative(std::size_t var) const;
    /// Substitutes z_var := value (exactly); the variable count is unchanged.
    Polynomial substitute(std::size_t var, const GaussianRational &value) const;
    /// Renames variables: old variable j becomes new variable mapping[j].
    Polynomial rename(std::span<const std::size_t> mapping, std::size_t new_nvars) const;

    Complex eval(std::span<const Complex> z) const;

  private:
    std::size_t nvars_;
    TermMap terms_;
};

/// Homogeneous part of top total degree. Throws MalformedInput on zero.
Polynomial top_part(const Polynomial &p);
/// Homogeneous part of the given degree (possibly zero).
Polynomial homogeneous_part(const Polynomial &p, unsigned degree);
/// Nonzero homogeneous parts, ascending in degree; empty for p = 0.
std::vector<std::pair<unsigned, Polynomial>> homogeneous_decomposition(const Polynomial &p);

class PolynomialMap {
  public:
    PolynomialMap() = default;
    explicit PolynomialMap(std::vector<Polynomial> components);

    std::size_t dim() const { return components_.size(); }
    const std::vector<Polynomial> &components() const { return components_; }
    const Polynomial &operator[](std::size_t j) const { return components_[j]; }
    std::vector<int> degrees() const;

    std::vector<Complex> eval(std::span<const Complex> z) const;

    friend bool operator==(const PolynomialMap &, const PolynomialMap &) = default;

  private:
    std::vector<Polynomial> components_;
};

/// Partition l_0 = 1 < l_1 < ... < l_m = k+1 of the coordinates into blocks
/// of equal component degree d_1 > ... > d_m. Indices in `l` are 1-based.
struct BlockStructure {
    std::size_t m = 0;
    std::vector<std::size_t> l;
    std::vector<int> d;
    /// permutation[new] = old coordinate index (0-based).
    std::vector<std::size_t> permutation;

    std::size_t dim() const { return l.empty() ? 0 : l.back() - 1; }
    std::size_t block_size(std::size_t i) const { return l[i + 1] - l[i]; }
    /// 0-based block index of 0-based coordinate j.
    std::size_t block_of(std::size_t j) const;
    bool identity_permutation() const;
};

/// Sorts coordinates by non-increasing component degree (stable) and groups
/// equal degrees. Throws MalformedMap on a constant component.
BlockStructure block_structure(const PolynomialMap &map);
/// sigma^{-1} o f o sigma for the recorded permutation.
PolynomialMap conjugate(const PolynomialMap &map, std::span<const std::size_t> permutation);

/// f o pi with pi(z)_{(i)} = z_{(i)}^{pexp[i]} blockwise. The map must already
/// be in block order. Throws InvalidPi on decreasing exponents.
PolynomialMap compose_monomial(const PolynomialMap &map, const BlockStructure &blocks,
                               std::span<const unsigned> pexp);
PolynomialMap compose_monomial(const PolynomialMap &map, std::span<const unsigned> pexp);

using PolynomialMatrix = std::vector<std::vector<Polynomial>>;

PolynomialMatrix jacobian(const PolynomialMap &map);
std::vector<std::vector<Complex>> eval_matrix(const PolynomialMatrix &m, std::span<const Complex> z);
/// Largest singular value.
double operator_norm(const std::vector<std::vector<Complex>> &a);
double jacobian_norm_at(const PolynomialMatrix &jac, std::span<const Complex> z);
double jacobian_norm_at(const PolynomialMap &map, std::span<const Complex> z);

} // namespace polydyn
