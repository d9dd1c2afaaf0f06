#include "polydyn/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Dense>

#include "polydyn/errors.hpp"

namespace polydyn {

unsigned total_degree(const Exponents &e) {
    return std::accumulate(e.begin(), e.end(), 0U);
}

bool GrlexDescending::operator()(const Exponents &a, const Exponents &b) const {
    unsigned da = total_degree(a);
    unsigned db = total_degree(b);
    if (da != db) return da > db;
    return std::lexicographical_compare(b.begin(), b.end(), a.begin(), a.end());
}

Polynomial Polynomial::constant(std::size_t nvars, const GaussianRational &c) {
    Polynomial p(nvars);
    p.add_term(Exponents(nvars, 0), c);
    return p;
}

Polynomial Polynomial::variable(std::size_t nvars, std::size_t index) {
    Polynomial p(nvars);
    Exponents e(nvars, 0);
    e.at(index) = 1;
    p.add_term(e, GaussianRational(1));
    return p;
}

Polynomial Polynomial::monomial(const GaussianRational &c, Exponents e) {
    Polynomial p(e.size());
    p.add_term(e, c);
    return p;
}

int Polynomial::degree() const {
    if (terms_.empty()) return -1;
    return static_cast<int>(total_degree(terms_.begin()->first));
}

int Polynomial::degree_in(std::size_t var) const {
    int d = -1;
    for (const auto &[e, c] : terms_) d = std::max(d, static_cast<int>(e[var]));
    return d;
}

bool Polynomial::is_homogeneous() const {
    if (terms_.empty()) return true;
    return total_degree(terms_.begin()->first) == total_degree(terms_.rbegin()->first);
}

std::vector<Term> Polynomial::term_list() const {
    std::vector<Term> out;
    out.reserve(terms_.size());
    for (const auto &[e, c] : terms_) out.push_back({c, e});
    return out;
}

GaussianRational Polynomial::coeff(const Exponents &e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? GaussianRational() : it->second;
}

void Polynomial::add_term(const Exponents &e, const GaussianRational &c) {
    if (e.size() != nvars_) throw Error(ErrorCode::MalformedInput, "exponent tuple length mismatch");
    if (c.is_zero()) return;
    auto [it, inserted] = terms_.try_emplace(e, c);
    if (!inserted) {
        it->second += c;
        if (it->second.is_zero()) terms_.erase(it);
    }
}

Polynomial &Polynomial::operator+=(const Polynomial &o) {
    if (o.nvars_ != nvars_) throw Error(ErrorCode::MalformedInput, "variable count mismatch");
    for (const auto &[e, c] : o.terms_) add_term(e, c);
    return *this;
}

Polynomial &Polynomial::operator-=(const Polynomial &o) {
    if (o.nvars_ != nvars_) throw Error(ErrorCode::MalformedInput, "variable count mismatch");
    for (const auto &[e, c] : o.terms_) add_term(e, -c);
    return *this;
}

Polynomial &Polynomial::operator*=(const GaussianRational &c) {
    if (c.is_zero()) {
        terms_.clear();
        return *this;
    }
    for (auto &[e, v] : terms_) v *= c;
    return *this;
}

Polynomial operator-(const Polynomial &a) {
    Polynomial r = a;
    for (auto &[e, v] : r.terms_) v = -v;
    return r;
}

Polynomial operator*(const Polynomial &a, const Polynomial &b) {
    if (a.nvars_ != b.nvars_) throw Error(ErrorCode::MalformedInput, "variable count mismatch");
    Polynomial r(a.nvars_);
    Exponents e(a.nvars_);
    for (const auto &[ea, ca] : a.terms_) {
        for (const auto &[eb, cb] : b.terms_) {
            for (std::size_t j = 0; j < e.size(); ++j) e[j] = ea[j] + eb[j];
            r.add_term(e, ca * cb);
        }
    }
    return r;
}

Polynomial Polynomial::pow(unsigned n) const {
    Polynomial result = constant(nvars_, GaussianRational(1));
    Polynomial base = *this;
    while (n > 0) {
        if (n & 1U) result = result * base;
        n >>= 1U;
        if (n > 0) base = base * base;
    }
    return result;
}

Polynomial Polynomial::derivative(std::size_t var) const {
    Polynomial r(nvars_);
    for (const auto &[e, c] : terms_) {
        if (e[var] == 0) continue;
        Exponents d = e;
        --d[var];
        r.add_term(d, c * GaussianRational(static_cast<long>(e[var])));
    }
    return r;
}

Polynomial Polynomial::substitute(std::size_t var, const GaussianRational &value) const {
    Polynomial r(nvars_);
    for (const auto &[e, c] : terms_) {
        Exponents d = e;
        d[var] = 0;
        r.add_term(d, c * polydyn::pow(value, e[var]));
    }
    return r;
}

Polynomial Polynomial::rename(std::span<const std::size_t> mapping, std::size_t new_nvars) const {
    Polynomial r(new_nvars);
    for (const auto &[e, c] : terms_) {
        Exponents d(new_nvars, 0);
        for (std::size_t j = 0; j < e.size(); ++j) {
            if (e[j] == 0) continue;
            d.at(mapping[j]) += e[j];
        }
        r.add_term(d, c);
    }
    return r;
}

Complex Polynomial::eval(std::span<const Complex> z) const {
    // Power tables per variable, then one pass over the terms.
    std::vector<std::vector<Complex>> powers(nvars_);
    for (std::size_t j = 0; j < nvars_; ++j) {
        int dj = degree_in(j);
        powers[j].resize(static_cast<std::size_t>(std::max(dj, 0)) + 1);
        powers[j][0] = 1.0;
        for (int a = 1; a <= dj; ++a) powers[j][a] = powers[j][a - 1] * z[j];
    }
    Complex sum = 0.0;
    for (const auto &[e, c] : terms_) {
        Complex t = c.to_complex();
        for (std::size_t j = 0; j < nvars_; ++j)
            if (e[j] != 0) t *= powers[j][e[j]];
        sum += t;
    }
    return sum;
}

Polynomial top_part(const Polynomial &p) {
    if (p.is_zero()) throw Error(ErrorCode::MalformedInput, "top part of the zero polynomial");
    return homogeneous_part(p, static_cast<unsigned>(p.degree()));
}

Polynomial homogeneous_part(const Polynomial &p, unsigned degree) {
    Polynomial r(p.nvars());
    for (const auto &[e, c] : p.terms())
        if (total_degree(e) == degree) r.add_term(e, c);
    return r;
}

std::vector<std::pair<unsigned, Polynomial>> homogeneous_decomposition(const Polynomial &p) {
    std::map<unsigned, Polynomial> parts;
    for (const auto &[e, c] : p.terms()) {
        auto [it, _] = parts.try_emplace(total_degree(e), p.nvars());
        it->second.add_term(e, c);
    }
    return {parts.begin(), parts.end()};
}

PolynomialMap::PolynomialMap(std::vector<Polynomial> components)
    : components_(std::move(components)) {
    for (const auto &c : components_)
        if (c.nvars() != components_.size())
            throw Error(ErrorCode::MalformedMap, "component count must equal variable count");
}

std::vector<int> PolynomialMap::degrees() const {
    std::vector<int> d;
    d.reserve(components_.size());
    for (const auto &c : components_) d.push_back(c.degree());
    return d;
}

std::vector<Complex> PolynomialMap::eval(std::span<const Complex> z) const {
    std::vector<Complex> out;
    out.reserve(components_.size());
    for (const auto &c : components_) out.push_back(c.eval(z));
    return out;
}

std::size_t BlockStructure::block_of(std::size_t j) const {
    for (std::size_t i = 0; i < m; ++i)
        if (j + 1 < l[i + 1]) return i;
    throw Error(ErrorCode::MalformedInput, "coordinate outside block structure");
}

bool BlockStructure::identity_permutation() const {
    for (std::size_t j = 0; j < permutation.size(); ++j)
        if (permutation[j] != j) return false;
    return true;
}

BlockStructure block_structure(const PolynomialMap &map) {
    const std::size_t k = map.dim();
    if (k == 0) throw Error(ErrorCode::MalformedMap, "empty map");
    std::vector<int> deg = map.degrees();
    for (std::size_t j = 0; j < k; ++j)
        if (deg[j] < 1)
            throw Error(ErrorCode::MalformedMap,
                        "component " + std::to_string(j + 1) + " is constant");

    BlockStructure b;
    b.permutation.resize(k);
    std::iota(b.permutation.begin(), b.permutation.end(), 0);
    std::stable_sort(b.permutation.begin(), b.permutation.end(),
                     [&](std::size_t x, std::size_t y) { return deg[x] > deg[y]; });
    b.l.push_back(1);
    for (std::size_t j = 0; j < k; ++j) {
        int dj = deg[b.permutation[j]];
        if (b.d.empty() || b.d.back() != dj) {
            if (!b.d.empty()) b.l.push_back(j + 1);
            b.d.push_back(dj);
        }
    }
    b.l.push_back(k + 1);
    b.m = b.d.size();
    return b;
}

PolynomialMap conjugate(const PolynomialMap &map, std::span<const std::size_t> permutation) {
    const std::size_t k = map.dim();
    // old variable permutation[b] becomes new variable b
    std::vector<std::size_t> old_to_new(k);
    for (std::size_t b = 0; b < k; ++b) old_to_new[permutation[b]] = b;
    std::vector<Polynomial> comps;
    comps.reserve(k);
    for (std::size_t a = 0; a < k; ++a)
        comps.push_back(map[permutation[a]].rename(old_to_new, k));
    return PolynomialMap(std::move(comps));
}

PolynomialMap compose_monomial(const PolynomialMap &map, const BlockStructure &blocks,
                               std::span<const unsigned> pexp) {
    if (pexp.size() != blocks.m)
        throw Error(ErrorCode::InvalidPi, "pi needs one exponent per block");
    for (std::size_t i = 0; i < pexp.size(); ++i) {
        if (pexp[i] == 0) throw Error(ErrorCode::InvalidPi, "pi exponents must be positive");
        if (i > 0 && pexp[i] < pexp[i - 1])
            throw Error(ErrorCode::InvalidPi, "pi exponents must be non-decreasing");
    }
    const std::size_t k = map.dim();
    std::vector<unsigned> scale(k);
    for (std::size_t j = 0; j < k; ++j) scale[j] = pexp[blocks.block_of(j)];

    std::vector<Polynomial> comps;
    comps.reserve(k);
    for (const auto &p : map.components()) {
        Polynomial q(k);
        for (const auto &[e, c] : p.terms()) {
            Exponents s = e;
            for (std::size_t j = 0; j < k; ++j) s[j] *= scale[j];
            q.add_term(s, c);
        }
        comps.push_back(std::move(q));
    }
    return PolynomialMap(std::move(comps));
}

PolynomialMap compose_monomial(const PolynomialMap &map, std::span<const unsigned> pexp) {
    BlockStructure b = block_structure(map);
    if (!b.identity_permutation())
        throw Error(ErrorCode::MalformedMap, "map is not in block order; conjugate it first");
    return compose_monomial(map, b, pexp);
}

PolynomialMatrix jacobian(const PolynomialMap &map) {
    const std::size_t k = map.dim();
    PolynomialMatrix j(k);
    for (std::size_t r = 0; r < k; ++r) {
        j[r].reserve(k);
        for (std::size_t c = 0; c < k; ++c) j[r].push_back(map[r].derivative(c));
    }
    return j;
}

std::vector<std::vector<Complex>> eval_matrix(const PolynomialMatrix &m, std::span<const Complex> z) {
    std::vector<std::vector<Complex>> out(m.size());
    for (std::size_t r = 0; r < m.size(); ++r) {
        out[r].reserve(m[r].size());
        for (const auto &p : m[r]) out[r].push_back(p.eval(z));
    }
    return out;
}

double operator_norm(const std::vector<std::vector<Complex>> &a) {
    const auto rows = static_cast<Eigen::Index>(a.size());
    const auto cols = rows == 0 ? Eigen::Index{0} : static_cast<Eigen::Index>(a[0].size());
    Eigen::MatrixXcd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = a[r][c];
    if (m.size() == 0) return 0.0;
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
    return svd.singularValues()(0);
}

double jacobian_norm_at(const PolynomialMatrix &jac, std::span<const Complex> z) {
    return operator_norm(eval_matrix(jac, z));
}

double jacobian_norm_at(const PolynomialMap &map, std::span<const Complex> z) {
    return jacobian_norm_at(jacobian(map), z);
}

} // namespace polydyn
