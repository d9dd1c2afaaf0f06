#include "polydyn/forms.hpp"

#include "polydyn/errors.hpp"

namespace polydyn {

GaussianRational determinant(ExactMatrix m) {
    const std::size_t n = m.size();
    GaussianRational det(1);
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        while (pivot < n && m[pivot][col].is_zero()) ++pivot;
        if (pivot == n) return GaussianRational(0);
        if (pivot != col) {
            std::swap(m[pivot], m[col]);
            det = -det;
        }
        det *= m[col][col];
        GaussianRational inv = GaussianRational(1) / m[col][col];
        for (std::size_t r = col + 1; r < n; ++r) {
            if (m[r][col].is_zero()) continue;
            GaussianRational factor = m[r][col] * inv;
            for (std::size_t c = col; c < n; ++c) m[r][c] -= factor * m[col][c];
        }
    }
    return det;
}

ExactMatrix sylvester_matrix(const CoeffList &a, const CoeffList &b) {
    const std::size_t da = a.size() - 1;
    const std::size_t db = b.size() - 1;
    const std::size_t n = da + db;
    ExactMatrix s(n, CoeffList(n));
    for (std::size_t r = 0; r < db; ++r)
        for (std::size_t j = 0; j <= da; ++j) s[r][r + j] = a[j];
    for (std::size_t r = 0; r < da; ++r)
        for (std::size_t j = 0; j <= db; ++j) s[db + r][r + j] = b[j];
    return s;
}

GaussianRational resultant(const CoeffList &a, const CoeffList &b) {
    if (a.empty() || b.empty()) return GaussianRational(0);
    const std::size_t da = a.size() - 1;
    const std::size_t db = b.size() - 1;
    if (da == 0) return pow(a[0], static_cast<unsigned>(db));
    if (db == 0) return pow(b[0], static_cast<unsigned>(da));
    return determinant(sylvester_matrix(a, b));
}

CoeffList binary_form(const Polynomial &form, std::size_t x_var, std::size_t y_var) {
    if (form.is_zero()) return {};
    if (!form.is_homogeneous()) throw Error(ErrorCode::MalformedInput, "binary_form needs a homogeneous polynomial");
    const auto d = static_cast<unsigned>(form.degree());
    CoeffList out(d + 1);
    for (const auto &[e, c] : form.terms()) {
        for (std::size_t j = 0; j < e.size(); ++j)
            if (j != x_var && j != y_var && e[j] != 0)
                throw Error(ErrorCode::MalformedInput, "form depends on more than two variables");
        out[e[y_var]] = c;
    }
    return out;
}

CoeffList trim(CoeffList a) {
    std::size_t lead = 0;
    while (lead < a.size() && a[lead].is_zero()) ++lead;
    a.erase(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(lead));
    return a;
}

CoeffList poly_rem(const CoeffList &a_in, const CoeffList &b_in) {
    CoeffList a = trim(a_in);
    CoeffList b = trim(b_in);
    if (b.empty()) throw Error(ErrorCode::MalformedInput, "division by the zero polynomial");
    GaussianRational inv = GaussianRational(1) / b[0];
    while (a.size() >= b.size()) {
        GaussianRational q = a[0] * inv;
        for (std::size_t j = 0; j < b.size(); ++j) a[j] -= q * b[j];
        a = trim(std::move(a));
    }
    return a;
}

CoeffList poly_gcd(CoeffList a, CoeffList b) {
    a = trim(std::move(a));
    b = trim(std::move(b));
    while (!b.empty()) {
        CoeffList r = poly_rem(a, b);
        a = std::move(b);
        b = std::move(r);
    }
    if (a.empty()) return a;
    GaussianRational inv = GaussianRational(1) / a[0];
    for (auto &c : a) c *= inv;
    return a;
}

bool binary_forms_have_common_zero(std::span<const CoeffList> forms) {
    std::vector<const CoeffList *> nonzero;
    for (const auto &f : forms)
        if (!trim(f).empty()) nonzero.push_back(&f);
    if (nonzero.empty()) return true;

    // Zero at [1:0] means every leading coefficient vanishes.
    bool all_vanish_at_infinity = true;
    for (const auto *f : nonzero)
        if (!(*f)[0].is_zero()) all_vanish_at_infinity = false;
    if (all_vanish_at_infinity) return true;

    // Remaining zeros have y != 0: dehomogenize at y = 1, i.e. the list itself
    // read as a polynomial in x.
    CoeffList g = *nonzero.front();
    for (std::size_t j = 1; j < nonzero.size(); ++j) g = poly_gcd(g, *nonzero[j]);
    return trim(g).size() >= 2;
}

} // namespace polydyn
