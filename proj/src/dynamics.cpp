#include "polydyn/dynamics.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <numbers>

#include "polydyn/errors.hpp"
#include "polydyn/parallel.hpp"
#include "polydyn/rng.hpp"

namespace polydyn {

const char *to_string(OrbitStatus s) {
    switch (s) {
    case OrbitStatus::Escaped: return "escaped";
    case OrbitStatus::Bounded: return "bounded";
    case OrbitStatus::MaxedOut: return "maxed-out";
    case OrbitStatus::Indeterminate: return "indeterminate";
    }
    return "?";
}

std::string BasinLabel::name() const {
    switch (kind) {
    case Kind::U: return "U" + std::to_string(index);
    case Kind::K: return "K";
    case Kind::Indeterminate: return "Indeterminate";
    }
    return "?";
}

namespace {

constexpr std::size_t kLinearWindow = 10;
constexpr double kLinearSpread = 1.05;
constexpr double kLinearReach = 40.0;

void validate(const OrbitParams &p) {
    if (!(p.bound_ell > 0.0) || !(p.escape_ell > p.bound_ell))
        throw Error(ErrorCode::MalformedInput, "need escape_ell > bound_ell > 0");
    if (p.max_n == 0 || p.window == 0) throw Error(ErrorCode::MalformedInput, "max_n and window must be positive");
}

// ell_{n+1} - ell_n positive and stable over the last window, and ell large
// relative to the step: escape with multiplicative rate 1.
bool linear_escape(const std::vector<double> &e, const OrbitParams &p) {
    if (e.size() < kLinearWindow + 1) return false;
    const double last = e.back();
    if (!(last > p.bound_ell) || !std::isfinite(last)) return false;
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (std::size_t j = e.size() - kLinearWindow; j < e.size(); ++j) {
        double d = e[j] - e[j - 1];
        if (!(d > 0.0)) return false;
        lo = std::min(lo, d);
        hi = std::max(hi, d);
    }
    return hi <= kLinearSpread * lo && last >= kLinearReach * hi;
}

bool bounded_window(const std::vector<double> &e, const OrbitParams &p) {
    if (e.size() < p.window) return false;
    return std::all_of(e.end() - static_cast<std::ptrdiff_t>(p.window), e.end(),
                       [&](double l) { return l < p.bound_ell; });
}

// Geometric mean of the last three ratios; NaN if the tail is not positive.
double tail_rate(const std::vector<double> &e) {
    if (e.size() < 4) return std::numeric_limits<double>::quiet_NaN();
    double s = 0.0;
    for (std::size_t j = e.size() - 3; j < e.size(); ++j) {
        if (!(e[j - 1] > 0.0) || !std::isfinite(e[j])) return std::numeric_limits<double>::quiet_NaN();
        s += std::log(e[j] / e[j - 1]);
    }
    return std::exp(s / 3.0);
}

} // namespace

OrbitRecord iterate(const CompiledMap &map, std::span<const Complex> z0, const OrbitParams &params) {
    validate(params);
    auto stop = [&](const std::vector<double> &e) {
        const std::size_t n = e.size() - 1;
        if (e.back() > params.escape_ell && n >= params.min_escape_steps) return true;
        return linear_escape(e, params);
    };
    OrbitTrace t = trace_orbit(map, z0, params.max_n, params.precision, stop);
    OrbitRecord rec;
    rec.ells = std::move(t.ells);
    rec.steps = rec.ells.size() - 1;
    rec.bits = t.bits;
    if (t.precision_exhausted) {
        rec.status = OrbitStatus::Indeterminate;
    } else if (rec.ells.back() > params.escape_ell) {
        rec.status = OrbitStatus::Escaped;
    } else if (linear_escape(rec.ells, params)) {
        rec.status = OrbitStatus::Escaped;
        rec.linear_escape = true;
    } else if (rec.steps == params.max_n && bounded_window(rec.ells, params)) {
        rec.status = OrbitStatus::Bounded;
    } else {
        rec.status = OrbitStatus::MaxedOut;
    }
    return rec;
}

double escape_degree(const OrbitRecord &orbit) {
    if (orbit.status != OrbitStatus::Escaped) return 0.0;
    double r = tail_rate(orbit.ells);
    if (std::isnan(r)) throw Error(ErrorCode::TooShort, "escape rate needs four positive tail points");
    return r;
}

std::vector<double> alpha_values(const RegularityReport &report) {
    std::vector<double> a;
    if (!report.alpha.empty()) {
        for (const auto &q : report.alpha) a.push_back(q.get_d());
    } else {
        for (int d : report.blocks.d) a.push_back(d);
    }
    return a;
}

std::size_t match_rate(std::span<const double> alpha, double rate) {
    std::size_t best = 0;
    double best_rel = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < alpha.size(); ++i) {
        double rel = std::abs(rate - alpha[i]) / alpha[i];
        if (rel < best_rel) {
            best_rel = rel;
            best = i + 1;
        }
    }
    return best_rel <= kRateMatchTolerance ? best : 0;
}

BasinLabel classify(const CompiledMap &map, std::span<const double> alpha, std::span<const Complex> z,
                    const OrbitParams &params) {
    OrbitRecord rec = iterate(map, z, params);
    switch (rec.status) {
    case OrbitStatus::Bounded: return BasinLabel::k();
    case OrbitStatus::Escaped: {
        double rate = tail_rate(rec.ells);
        if (std::isnan(rate)) return BasinLabel::indeterminate();
        std::size_t i = match_rate(alpha, rate);
        return i == 0 ? BasinLabel::indeterminate(rate) : BasinLabel::u(i, rate);
    }
    default: return BasinLabel::indeterminate();
    }
}

GreenValue green_value(const CompiledMap &map, std::span<const double> alpha, std::size_t i,
                       std::span<const Complex> z, const GreenParams &params) {
    if (i < 1 || i > alpha.size()) throw Error(ErrorCode::MalformedInput, "Green index out of range");
    const double a = alpha[i - 1];
    if (!(a > 1.0)) throw Error(ErrorCode::MalformedInput, "G_i needs alpha_i > 1");
    validate(params.orbit);
    const double log_a = std::log(a);
    const OrbitParams &op = params.orbit;

    auto g_at = [&](std::size_t n, double ell) {
        return ell > 0.0 ? std::exp(std::log(ell) - static_cast<double>(n) * log_a) : 0.0;
    };

    GreenValue out;
    bool decided = false;
    auto stop = [&](const std::vector<double> &e) {
        const std::size_t n = e.size() - 1;
        if (n == 0) return false;
        const double g = g_at(n, e[n]);
        const double incr = std::abs(g - g_at(n - 1, e[n - 1]));
        out.iterations = n;
        out.residual = incr;
        if (e[n] > op.escape_ell && n >= 3) {
            double rate = tail_rate(e);
            if (std::isnan(rate)) return false;
            std::size_t j = match_rate(alpha, rate);
            if (j == 0) {
                out.kind = GreenValue::Kind::Indeterminate;
                decided = true;
                return true;
            }
            if (j < i) {
                out.kind = GreenValue::Kind::Infinite;
                out.value = std::numeric_limits<double>::infinity();
                decided = true;
                return true;
            }
            if (j > i) {
                out.kind = GreenValue::Kind::Finite;
                out.value = 0.0;
                decided = true;
                return true;
            }
            if (incr / (a - 1.0) <= params.tol) {
                out.kind = GreenValue::Kind::Finite;
                out.value = g;
                decided = true;
                return true;
            }
            return false;
        }
        if (linear_escape(e, op)) {
            out.kind = GreenValue::Kind::Finite;
            out.value = 0.0;
            decided = true;
            return true;
        }
        return false;
    };

    OrbitTrace t = trace_orbit(map, z, op.max_n, op.precision, stop);
    if (decided) return out;
    out.iterations = t.ells.size() - 1;
    if (t.precision_exhausted) {
        out.kind = GreenValue::Kind::Indeterminate;
        return out;
    }
    if (out.iterations == op.max_n && bounded_window(t.ells, op)) {
        out.kind = GreenValue::Kind::Finite;
        out.value = 0.0;
        return out;
    }
    out.kind = GreenValue::Kind::NonConvergent;
    return out;
}

GreenValue green(const CompiledMap &map, std::span<const double> alpha, std::size_t i, std::span<const Complex> z,
                 const GreenParams &params) {
    GreenValue g = green_value(map, alpha, i, z, params);
    if (g.kind == GreenValue::Kind::NonConvergent)
        throw Error(ErrorCode::NonConvergent, "Green increments did not contract within max_n");
    if (g.kind == GreenValue::Kind::Indeterminate)
        throw Error(ErrorCode::Indeterminate, "orbit could not be resolved at the precision cap");
    return g;
}

InvarianceResult invariance_residual(const CompiledMap &map, std::span<const double> alpha, std::size_t i,
                                     const std::vector<std::vector<Complex>> &samples, const GreenParams &params) {
    const double a = alpha[i - 1];
    std::vector<double> residual(samples.size(), -1.0);
    parallel_for(samples.size(), [&](std::size_t s) {
        const auto &z = samples[s];
        std::vector<Complex> fz = map.map().eval(z);
        for (auto c : fz)
            if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return;
        GreenValue g0 = green_value(map, alpha, i, z, params);
        GreenValue g1 = green_value(map, alpha, i, fz, params);
        if (g0.finite() && g1.finite()) residual[s] = std::abs(g1.value - a * g0.value);
    });
    InvarianceResult r;
    for (double x : residual) {
        if (x < 0.0) {
            ++r.skipped;
        } else {
            ++r.used;
            r.max_residual = std::max(r.max_residual, x);
        }
    }
    return r;
}

double growth_ratio(const CompiledMap &map, const ScaledPoint &p, const PrecisionPolicy &policy) {
    unsigned bits = policy.start_bits;
    while (true) {
        try {
            ScaledResult r = map.eval_scaled(p, bits, policy.min_retained_bits);
            if (r.point.zero) return -std::numeric_limits<double>::infinity();
            return r.point.ell / p.ell;
        } catch (const Error &e) {
            if (e.code() != ErrorCode::PrecisionLoss) throw;
            if (bits >= policy.cap_bits) return std::numeric_limits<double>::quiet_NaN();
            bits = std::min(std::max(bits, 53U) * 2, policy.cap_bits);
        }
    }
}

namespace {

// Sphere coordinates: face index, the face phase, then (log-modulus offset,
// phase) for every other coordinate. Offsets are clamped to <= 0.
struct SpherePoint {
    std::size_t face = 0;
    std::vector<double> x;
};

ScaledPoint to_scaled(const SpherePoint &sp, std::size_t k, double log_r) {
    ScaledPoint p;
    p.zero = false;
    p.ell = log_r;
    p.u.resize(k);
    p.u[sp.face] = std::polar(1.0, sp.x[0]);
    std::size_t c = 1;
    for (std::size_t j = 0; j < k; ++j) {
        if (j == sp.face) continue;
        p.u[j] = std::polar(std::exp(std::min(sp.x[c], 0.0)), sp.x[c + 1]);
        c += 2;
    }
    return p;
}

} // namespace

LojasiewiczResult lojasiewicz_estimate(const CompiledMap &map, const LojasiewiczOptions &opt) {
    if (!(opt.radius >= 1e4)) throw Error(ErrorCode::MalformedInput, "Lojasiewicz radius must be at least 1e4");
    if (opt.samples == 0) throw Error(ErrorCode::MalformedInput, "need at least one sample");
    const std::size_t k = map.dim();
    const double log_r = std::log(opt.radius);
    const double two_pi = 2.0 * std::numbers::pi;

    auto value = [&](const SpherePoint &sp) {
        double v = growth_ratio(map, to_scaled(sp, k, log_r), opt.precision);
        return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
    };

    std::vector<SpherePoint> starts(opt.samples);
    std::vector<double> vals(opt.samples);
    Rng root(opt.seed);
    parallel_for(opt.samples, [&](std::size_t s) {
        Rng rng = root.split(s);
        SpherePoint sp;
        sp.face = static_cast<std::size_t>(rng.below(k));
        sp.x.push_back(rng.uniform(0.0, two_pi));
        for (std::size_t j = 1; j < k; ++j) {
            sp.x.push_back(-1.2 * log_r * rng.uniform());
            sp.x.push_back(rng.uniform(0.0, two_pi));
        }
        vals[s] = value(sp);
        starts[s] = std::move(sp);
    });

    std::vector<std::size_t> order(opt.samples);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
    const std::size_t nrefine = std::min(opt.refine, opt.samples);

    std::vector<SpherePoint> refined(nrefine);
    std::vector<double> refined_val(nrefine);
    std::vector<std::size_t> evals(nrefine, 0);
    parallel_for(nrefine, [&](std::size_t r) {
        SpherePoint sp = starts[order[r]];
        double best = vals[order[r]];
        std::vector<double> h(sp.x.size());
        for (std::size_t c = 0; c < h.size(); ++c) h[c] = (c % 2 == 0) ? 0.5 : 1.0;
        for (std::size_t step = 0; step < opt.descent_steps; ++step) {
            bool improved = false;
            for (std::size_t c = 0; c < sp.x.size() && !improved; ++c) {
                for (double sign : {1.0, -1.0}) {
                    SpherePoint trial = sp;
                    trial.x[c] += sign * h[c];
                    if (c % 2 == 1) trial.x[c] = std::min(trial.x[c], 0.0);
                    double v = value(trial);
                    ++evals[r];
                    if (v < best) {
                        best = v;
                        sp = std::move(trial);
                        improved = true;
                        break;
                    }
                }
            }
            if (!improved) {
                double hmax = 0.0;
                for (auto &s : h) hmax = std::max(hmax, s *= 0.5);
                if (hmax < 1e-15) break;
            }
        }
        refined[r] = std::move(sp);
        refined_val[r] = best;
    });

    LojasiewiczResult res;
    res.evaluations = opt.samples + std::accumulate(evals.begin(), evals.end(), std::size_t{0});
    std::size_t arg = order[0];
    res.lambda_hat = vals[arg];
    SpherePoint best_point = starts[arg];
    for (std::size_t r = 0; r < nrefine; ++r) {
        if (refined_val[r] < res.lambda_hat) {
            res.lambda_hat = refined_val[r];
            best_point = refined[r];
        }
    }
    res.argmin = to_scaled(best_point, k, log_r).to_point();
    return res;
}

} // namespace polydyn
