#include "polydyn/scaled.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "bigfloat.hpp"
#include "polydyn/errors.hpp"

namespace polydyn {

using detail::BigFloat;

ScaledPoint ScaledPoint::from_point(std::span<const Complex> z) {
    ScaledPoint p;
    p.u.assign(z.begin(), z.end());
    double m = 0.0;
    for (const auto &c : z) m = std::max(m, std::abs(c));
    if (m == 0.0) {
        p.zero = true;
        p.ell = 0.0;
        return p;
    }
    p.zero = false;
    p.ell = std::log(m);
    for (auto &c : p.u) c /= m;
    return p;
}

std::vector<Complex> ScaledPoint::to_point() const {
    std::vector<Complex> z(u.size(), Complex{0.0, 0.0});
    if (zero) return z;
    double s = std::exp(ell);
    for (std::size_t j = 0; j < u.size(); ++j) z[j] = u[j] * s;
    return z;
}

CompiledMap::CompiledMap(PolynomialMap map) : map_(std::move(map)) {
    const std::size_t k = map_.dim();
    max_exps_.assign(k, 0);
    for (const auto &p : map_.components()) {
        CPoly cp;
        for (auto &[deg, part] : homogeneous_decomposition(p)) {
            CPart cpart;
            cpart.degree = deg;
            for (const auto &[e, c] : part.terms()) {
                cpart.terms.push_back({c.to_complex(), c, e});
                for (std::size_t j = 0; j < k; ++j) max_exps_[j] = std::max(max_exps_[j], e[j]);
            }
            max_degree_ = std::max(max_degree_, deg);
            cp.parts.push_back(std::move(cpart));
        }
        polys_.push_back(std::move(cp));
    }
}

namespace {

template <class R>
struct Cx {
    R re;
    R im;
};

template <class R>
Cx<R> mul(const Cx<R> &a, const Cx<R> &b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}

// Working-precision representation of a scaled point.
template <class R>
struct WorkPoint {
    std::vector<Cx<R>> u;
    R ell;
    bool zero = true;
};

template <class R>
R make_real(unsigned bits, double x);
template <>
double make_real<double>(unsigned, double x) {
    return x;
}
template <>
BigFloat make_real<BigFloat>(unsigned bits, double x) {
    return BigFloat(bits, x);
}

template <class R>
Cx<R> make_coeff(unsigned bits, const CompiledMap::CTerm &t);
template <>
Cx<double> make_coeff<double>(unsigned, const CompiledMap::CTerm &t) {
    return {t.coeff.real(), t.coeff.imag()};
}
template <>
Cx<BigFloat> make_coeff<BigFloat>(unsigned bits, const CompiledMap::CTerm &t) {
    return {BigFloat(bits, t.exact.re()), BigFloat(bits, t.exact.im())};
}

double to_double(double x) { return x; }
double to_double(const BigFloat &x) { return x.to_double(); }
double real_log(double x) { return std::log(x); }
double real_exp(double x) { return std::exp(x); }
double real_sqrt(double x) { return std::sqrt(x); }
BigFloat real_log(const BigFloat &x) { return log(x); }
BigFloat real_exp(const BigFloat &x) { return exp(x); }
BigFloat real_sqrt(const BigFloat &x) { return sqrt(x); }

enum class StepStatus { Ok, PrecisionLoss };

// Reusable buffers for eval_work; sized once per orbit.
template <class R>
struct Scratch {
    std::vector<std::vector<Cx<R>>> pw;
    std::vector<char> present;
    std::vector<R> factor;
    std::vector<Cx<R>> sums;

    Scratch(const CompiledMap &cm, unsigned bits) {
        const R zero_r = make_real<R>(bits, 0.0);
        for (std::size_t j = 0; j < cm.dim(); ++j)
            pw.emplace_back(cm.max_exponents()[j] + 1, Cx<R>{zero_r, zero_r});
        present.assign(cm.max_degree() + 1, 0);
        for (const auto &poly : cm.polys())
            for (const auto &part : poly.parts) present[part.degree] = 1;
        factor.assign(cm.max_degree() + 1, zero_r);
        sums.assign(cm.dim(), Cx<R>{zero_r, zero_r});
    }
};

// One application of the map in scaled coordinates at working type R.
template <class R>
StepStatus eval_work(const CompiledMap &cm, const WorkPoint<R> &in, WorkPoint<R> &out, Scratch<R> &sc,
                     unsigned bits, unsigned min_retained, double &ratio_out) {
    const std::size_t k = cm.dim();
    const R zero_r = make_real<R>(bits, 0.0);
    const R one_r = make_real<R>(bits, 1.0);

    // Power tables u_j^a.
    auto &pw = sc.pw;
    if (!in.zero) {
        for (std::size_t j = 0; j < k; ++j) {
            pw[j][0] = {one_r, zero_r};
            for (std::size_t a = 1; a < pw[j].size(); ++a) pw[j][a] = mul(pw[j][a - 1], in.u[j]);
        }
    }

    // Common scale E = max over present degrees of d*ell.
    const unsigned dmax = cm.max_degree();
    const auto &present = sc.present;
    auto &factor = sc.factor;
    R scale = zero_r;
    if (in.zero) {
        if (present[0]) factor[0] = one_r;
    } else {
        bool first = true;
        for (unsigned d = 0; d <= dmax; ++d) {
            if (!present[d]) continue;
            R de = make_real<R>(bits, static_cast<double>(d)) * in.ell;
            if (first || scale < de) scale = de;
            first = false;
        }
        for (unsigned d = 0; d <= dmax; ++d) {
            if (!present[d]) continue;
            factor[d] = real_exp(make_real<R>(bits, static_cast<double>(d)) * in.ell - scale);
        }
    }

    R max_term2 = zero_r;
    R max_res2 = zero_r;
    auto &sums = sc.sums;
    for (std::size_t c = 0; c < k; ++c) {
        Cx<R> s{zero_r, zero_r};
        for (const auto &part : cm.polys()[c].parts) {
            if (in.zero && part.degree != 0) continue;
            const R &f = factor[part.degree];
            for (const auto &t : part.terms) {
                Cx<R> v = make_coeff<R>(bits, t);
                if (!in.zero)
                    for (std::size_t j = 0; j < k; ++j)
                        if (t.exps[j] != 0) v = mul(v, pw[j][t.exps[j]]);
                v.re = v.re * f;
                v.im = v.im * f;
                R m2 = v.re * v.re + v.im * v.im;
                if (max_term2 < m2) max_term2 = m2;
                s.re = s.re + v.re;
                s.im = s.im + v.im;
            }
        }
        R r2 = s.re * s.re + s.im * s.im;
        if (max_res2 < r2) max_res2 = r2;
        sums[c] = s;
    }

    if (to_double(max_res2) == 0.0 && !(zero_r < max_res2)) {
        if (to_double(max_term2) == 0.0 && !(zero_r < max_term2)) {
            // Exact zero: every term vanished identically.
            out.zero = true;
            out.ell = zero_r;
            out.u.assign(k, Cx<R>{zero_r, zero_r});
            ratio_out = 1.0;
            return StepStatus::Ok;
        }
        ratio_out = std::numeric_limits<double>::infinity();
        return StepStatus::PrecisionLoss;
    }
    const R max_res = real_sqrt(max_res2);
    const double log2_ratio = 0.5 * to_double(real_log(max_term2 / max_res2)) / std::log(2.0);
    ratio_out = std::exp2(log2_ratio);
    if (static_cast<double>(bits) - log2_ratio < static_cast<double>(min_retained))
        return StepStatus::PrecisionLoss;

    out.zero = false;
    out.ell = scale + real_log(max_res);
    out.u.resize(k, Cx<R>{zero_r, zero_r});
    for (std::size_t c = 0; c < k; ++c) out.u[c] = {sums[c].re / max_res, sums[c].im / max_res};
    return StepStatus::Ok;
}

template <class R>
WorkPoint<R> to_work(const ScaledPoint &p, unsigned bits) {
    WorkPoint<R> w{{}, make_real<R>(bits, p.ell), p.zero};
    for (const auto &c : p.u) w.u.push_back({make_real<R>(bits, c.real()), make_real<R>(bits, c.imag())});
    return w;
}

template <class R>
ScaledPoint from_work(const WorkPoint<R> &w) {
    ScaledPoint p;
    p.zero = w.zero;
    p.ell = w.zero ? 0.0 : to_double(w.ell);
    for (const auto &c : w.u) p.u.emplace_back(to_double(c.re), to_double(c.im));
    return p;
}

// Runs an orbit entirely at one working precision.
template <class R>
std::optional<std::vector<double>> run_orbit(const CompiledMap &cm, std::span<const Complex> z0,
                                             std::size_t max_steps, unsigned bits,
                                             unsigned min_retained, const StopRule &stop,
                                             std::vector<double> &partial) {
    WorkPoint<R> cur = to_work<R>(ScaledPoint::from_point(z0), bits);
    WorkPoint<R> next{{}, make_real<R>(bits, 0.0), true};
    Scratch<R> scratch(cm, bits);
    std::vector<double> ells;
    auto ell_of = [](const WorkPoint<R> &w) {
        return w.zero ? -std::numeric_limits<double>::infinity() : to_double(w.ell);
    };
    ells.push_back(ell_of(cur));
    if (stop(ells)) return ells;
    for (std::size_t n = 0; n < max_steps; ++n) {
        double ratio = 1.0;
        if (eval_work(cm, cur, next, scratch, bits, min_retained, ratio) != StepStatus::Ok) {
            partial = std::move(ells);
            return std::nullopt;
        }
        std::swap(cur, next);
        ells.push_back(ell_of(cur));
        if (stop(ells)) break;
    }
    return ells;
}

} // namespace

ScaledResult CompiledMap::eval_scaled(const ScaledPoint &p, unsigned bits, unsigned min_retained_bits) const {
    if (p.dim() != dim()) throw Error(ErrorCode::MalformedInput, "point dimension mismatch");
    double ratio = 1.0;
    ScaledResult result;
    result.bits = bits;
    StepStatus st;
    if (bits <= 53) {
        WorkPoint<double> in = to_work<double>(p, 53);
        WorkPoint<double> out{{}, 0.0, true};
        Scratch<double> scratch(*this, 53);
        st = eval_work(*this, in, out, scratch, 53, min_retained_bits, ratio);
        result.point = from_work(out);
    } else {
        WorkPoint<BigFloat> in = to_work<BigFloat>(p, bits);
        WorkPoint<BigFloat> out{{}, BigFloat(bits), true};
        Scratch<BigFloat> scratch(*this, bits);
        st = eval_work(*this, in, out, scratch, bits, min_retained_bits, ratio);
        result.point = from_work(out);
    }
    if (st != StepStatus::Ok)
        throw Error(ErrorCode::PrecisionLoss,
                    "cancellation exceeds working precision of " + std::to_string(bits) + " bits");
    result.cancellation_ratio = ratio;
    return result;
}

ScaledResult eval_scaled(const PolynomialMap &map, const ScaledPoint &p, unsigned bits) {
    return CompiledMap(map).eval_scaled(p, bits);
}

std::vector<ScaledScalar> eval_scaled_polys(std::span<const Polynomial> polys, const ScaledPoint &p) {
    std::vector<ScaledScalar> out;
    out.reserve(polys.size());
    for (const auto &poly : polys) {
        ScaledScalar s{Complex{0.0, 0.0}, 0.0};
        if (poly.is_zero()) {
            out.push_back(s);
            continue;
        }
        if (p.zero) {
            s.mantissa = poly.coeff(Exponents(poly.nvars(), 0)).to_complex();
            out.push_back(s);
            continue;
        }
        auto parts = homogeneous_decomposition(poly);
        double scale = -std::numeric_limits<double>::infinity();
        for (const auto &[d, part] : parts) scale = std::max(scale, d * p.ell);
        Complex sum{0.0, 0.0};
        for (const auto &[d, part] : parts) sum += part.eval(p.u) * std::exp(d * p.ell - scale);
        s.mantissa = sum;
        s.log_scale = scale;
        out.push_back(s);
    }
    return out;
}

OrbitTrace trace_orbit(const CompiledMap &map, std::span<const Complex> z0, std::size_t max_steps,
                       const PrecisionPolicy &policy, const StopRule &stop) {
    OrbitTrace trace;
    unsigned bits = policy.start_bits;
    std::vector<double> partial;
    while (true) {
        std::optional<std::vector<double>> ells;
        if (bits <= 53)
            ells = run_orbit<double>(map, z0, max_steps, 53, policy.min_retained_bits, stop, partial);
        else
            ells = run_orbit<BigFloat>(map, z0, max_steps, bits, policy.min_retained_bits, stop, partial);
        trace.bits = std::max(bits, 53U);
        if (ells) {
            trace.ells = std::move(*ells);
            return trace;
        }
        if (bits >= policy.cap_bits) {
            trace.ells = std::move(partial);
            trace.precision_exhausted = true;
            return trace;
        }
        bits = std::min(std::max(bits, 53U) * 2, policy.cap_bits);
    }
}

} // namespace polydyn
