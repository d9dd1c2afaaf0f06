#include "polydyn/preimage.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>
#include <sstream>

#include "polydyn/errors.hpp"
#include "polydyn/parallel.hpp"
#include "polydyn/parser.hpp"
#include "polydyn/rng.hpp"

namespace polydyn {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr std::size_t kAberthIterations = 500;
constexpr std::size_t kDegenerateRetries = 16;

void horner_with_derivative(std::span<const Complex> a, Complex z, Complex &p, Complex &dp) {
    p = a[0];
    dp = 0.0;
    for (std::size_t j = 1; j < a.size(); ++j) {
        dp = dp * z + p;
        p = p * z + a[j];
    }
}

double abs_bound(std::span<const Complex> a, double r) {
    double s = 0.0;
    for (const auto &c : a) s = s * r + std::abs(c);
    return s;
}

double relative_residual(std::span<const Complex> a, Complex z) {
    double b = abs_bound(a, std::abs(z));
    return b > 0.0 ? std::abs(horner(a, z)) / b : 0.0;
}

std::vector<Complex> aberth(std::span<const Complex> a, double tol) {
    const std::size_t n = a.size() - 1;
    if (n == 1) return {-a[1] / a[0]};

    // Start on a circle of the geometric-mean root radius, rotated off the axes.
    double radius = std::pow(std::abs(a[n] / a[0]), 1.0 / static_cast<double>(n));
    if (!(radius > 0.0) || !std::isfinite(radius)) radius = 1.0;
    std::vector<Complex> z(n);
    for (std::size_t k = 0; k < n; ++k)
        z[k] = std::polar(radius, 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n) + 0.4);

    std::vector<bool> done(n, false);
    for (std::size_t it = 0; it < kAberthIterations; ++it) {
        bool all_done = true;
        for (std::size_t k = 0; k < n; ++k) {
            if (done[k]) continue;
            Complex p, dp;
            horner_with_derivative(a, z[k], p, dp);
            if (std::abs(p) <= 4.0 * kEps * abs_bound(a, std::abs(z[k]))) {
                done[k] = true;
                continue;
            }
            Complex ratio = p / dp;
            Complex s = 0.0;
            for (std::size_t j = 0; j < n; ++j)
                if (j != k) s += 1.0 / (z[k] - z[j]);
            Complex delta = ratio / (1.0 - ratio * s);
            if (!std::isfinite(delta.real()) || !std::isfinite(delta.imag())) delta = ratio;
            z[k] -= delta;
            if (std::abs(delta) <= 4.0 * kEps * (1.0 + std::abs(z[k])))
                done[k] = true;
            else
                all_done = false;
        }
        if (all_done) return z;
    }
    for (const auto &r : z)
        if (relative_residual(a, r) > tol)
            throw Error(ErrorCode::NonConvergent, "root iteration did not converge");
    return z;
}

} // namespace

std::size_t RootSet::count() const { return std::accumulate(multiplicity.begin(), multiplicity.end(), std::size_t{0}); }

std::vector<Complex> RootSet::expanded() const {
    std::vector<Complex> out;
    for (std::size_t i = 0; i < roots.size(); ++i) out.insert(out.end(), multiplicity[i], roots[i]);
    return out;
}

Complex horner(std::span<const Complex> coeffs, Complex z) {
    Complex p = 0.0;
    for (const auto &c : coeffs) p = p * z + c;
    return p;
}

RootSet roots(std::span<const Complex> coeffs, double tol) {
    std::size_t lead = 0;
    while (lead < coeffs.size() && coeffs[lead] == Complex{}) ++lead;
    std::vector<Complex> a(coeffs.begin() + static_cast<std::ptrdiff_t>(lead), coeffs.end());
    if (a.size() < 2) throw Error(ErrorCode::MalformedInput, "root finding needs degree >= 1");

    std::size_t zeros = 0;
    while (a.back() == Complex{}) {
        a.pop_back();
        ++zeros;
    }

    std::vector<Complex> z;
    if (a.size() >= 2) z = aberth(a, tol);

    // Newton polish on isolated roots; multiple roots are left to clustering.
    for (auto &r : z) {
        for (int step = 0; step < 3; ++step) {
            Complex p, dp;
            horner_with_derivative(a, r, p, dp);
            if (std::abs(dp) <= std::sqrt(kEps) * abs_bound(a, std::abs(r))) break;
            Complex next = r - p / dp;
            if (relative_residual(a, next) >= relative_residual(a, r)) break;
            r = next;
        }
    }

    z.insert(z.end(), zeros, Complex{});
    const double radius = std::sqrt(tol);
    std::vector<std::size_t> cluster(z.size());
    std::iota(cluster.begin(), cluster.end(), 0);
    auto find = [&](std::size_t i) {
        while (cluster[i] != i) i = cluster[i] = cluster[cluster[i]];
        return i;
    };
    for (std::size_t i = 0; i < z.size(); ++i)
        for (std::size_t j = i + 1; j < z.size(); ++j)
            if (std::abs(z[i] - z[j]) <= radius * std::max(1.0, std::abs(z[i]))) cluster[find(j)] = find(i);

    std::map<std::size_t, std::pair<Complex, std::size_t>> groups;
    for (std::size_t i = 0; i < z.size(); ++i) {
        auto &g = groups[find(i)];
        g.first += z[i];
        g.second += 1;
    }
    RootSet out;
    for (const auto &[root, g] : groups) {
        Complex c = g.second == 1 ? z[root] : g.first / static_cast<double>(g.second);
        if (zeros > 0 && std::abs(c) <= radius) c = 0.0;
        out.roots.push_back(c);
        out.multiplicity.push_back(g.second);
        std::vector<Complex> full(coeffs.begin() + static_cast<std::ptrdiff_t>(lead), coeffs.end());
        out.residuals.push_back(relative_residual(full, c));
    }
    return out;
}

namespace {

/// Coefficients of a 1-D interpolant through (0, v_0), ..., (n, v_n), lowest
/// power first, from Newton divided differences.
std::vector<GaussianRational> interpolate(std::vector<GaussianRational> v) {
    const std::size_t n = v.size();
    for (std::size_t j = 1; j < n; ++j)
        for (std::size_t i = n - 1; i >= j; --i) {
            v[i] = (v[i] - v[i - 1]) / GaussianRational(static_cast<long>(j));
            if (i == j) break;
        }
    // Horner expansion of sum_j v_j prod_{i<j} (x - i).
    std::vector<GaussianRational> c(n);
    for (std::size_t jj = n; jj-- > 0;) {
        // c := c * (x - jj) + v_jj
        for (std::size_t e = n - 1; e > 0; --e) c[e] = c[e - 1] - c[e] * GaussianRational(static_cast<long>(jj));
        c[0] = -c[0] * GaussianRational(static_cast<long>(jj)) + v[jj];
    }
    return c;
}

/// Coefficients in z2 (highest first, formal degree deg) of p with z1 := a.
CoeffList z2_coefficients(const Polynomial &p, const GaussianRational &a, int deg) {
    CoeffList out(static_cast<std::size_t>(deg) + 1);
    for (const auto &[e, c] : p.terms()) out[static_cast<std::size_t>(deg) - e[1]] += c * pow(a, e[0]);
    return out;
}

/// Dense coefficients (highest z2 power first) with z1 := r, plus the scale
/// sum |c| |r|^i used for relative zero tests.
std::vector<Complex> z2_numeric(const Polynomial &p, Complex r, int deg, double &scale) {
    std::vector<Complex> out(static_cast<std::size_t>(deg) + 1);
    scale = 0.0;
    for (const auto &[e, c] : p.terms()) {
        Complex v = c.to_complex() * std::pow(r, static_cast<int>(e[0]));
        out[static_cast<std::size_t>(deg) - e[1]] += v;
        scale += std::abs(v);
    }
    return out;
}

std::vector<Complex> trim_numeric(std::vector<Complex> a, double scale) {
    const double zero = 1e-12 * std::max(scale, 1e-300);
    std::size_t lead = 0;
    while (lead < a.size() && std::abs(a[lead]) <= zero) ++lead;
    a.erase(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(lead));
    return a;
}

double max_norm(std::span<const Complex> v) {
    double m = 0.0;
    for (const auto &x : v) m = std::max(m, std::abs(x));
    return m;
}

double contract_residual(const PolynomialMap &map, std::span<const Complex> p, std::span<const Complex> w) {
    auto fp = map.eval(p);
    double r = 0.0;
    for (std::size_t j = 0; j < fp.size(); ++j) r = std::max(r, std::abs(fp[j] - w[j]));
    return r / (1.0 + max_norm(w));
}

} // namespace

PreimageSolver::PreimageSolver(PolynomialMap map) : map_(std::move(map)) {
    if (map_.dim() != 2) throw Error(ErrorCode::MalformedInput, "preimage solving needs k = 2");
    const Polynomial &p1 = map_[0];
    const Polynomial &p2 = map_[1];
    const int m1 = std::max(0, p1.degree_in(1));
    const int m2 = std::max(0, p2.degree_in(1));
    if (m1 == 0 && m2 == 0) throw Error(ErrorCode::MalformedInput, "map does not depend on z2");

    // Degree bounds of R from the Sylvester rows: m2 rows of P1, m1 rows of P2.
    const std::size_t nz = static_cast<std::size_t>(m2 * std::max(0, p1.degree_in(0)) + m1 * std::max(0, p2.degree_in(0))) + 1;
    const std::size_t nw1 = static_cast<std::size_t>(m2) + 1;
    const std::size_t nw2 = static_cast<std::size_t>(m1) + 1;

    // values[a][b][c] = R(a; b, c)
    std::vector<std::vector<std::vector<GaussianRational>>> values(
        nz, std::vector<std::vector<GaussianRational>>(nw1, std::vector<GaussianRational>(nw2)));
    for (std::size_t a = 0; a < nz; ++a) {
        GaussianRational za(static_cast<long>(a));
        CoeffList A0 = z2_coefficients(p1, za, m1);
        CoeffList B0 = z2_coefficients(p2, za, m2);
        for (std::size_t b = 0; b < nw1; ++b)
            for (std::size_t c = 0; c < nw2; ++c) {
                CoeffList A = A0, B = B0;
                A.back() -= GaussianRational(static_cast<long>(b));
                B.back() -= GaussianRational(static_cast<long>(c));
                values[a][b][c] = resultant(A, B);
            }
    }

    // Interpolate along z1, then w1, then w2.
    for (std::size_t b = 0; b < nw1; ++b)
        for (std::size_t c = 0; c < nw2; ++c) {
            std::vector<GaussianRational> line(nz);
            for (std::size_t a = 0; a < nz; ++a) line[a] = values[a][b][c];
            line = interpolate(std::move(line));
            for (std::size_t a = 0; a < nz; ++a) values[a][b][c] = line[a];
        }
    for (std::size_t a = 0; a < nz; ++a)
        for (std::size_t c = 0; c < nw2; ++c) {
            std::vector<GaussianRational> line(nw1);
            for (std::size_t b = 0; b < nw1; ++b) line[b] = values[a][b][c];
            line = interpolate(std::move(line));
            for (std::size_t b = 0; b < nw1; ++b) values[a][b][c] = line[b];
        }
    for (std::size_t a = 0; a < nz; ++a)
        for (std::size_t b = 0; b < nw1; ++b) values[a][b] = interpolate(std::move(values[a][b]));

    exact_.assign(nz, Polynomial(2));
    for (std::size_t a = 0; a < nz; ++a)
        for (std::size_t b = 0; b < nw1; ++b)
            for (std::size_t c = 0; c < nw2; ++c)
                if (!values[a][b][c].is_zero())
                    exact_[a].add_term({static_cast<unsigned>(b), static_cast<unsigned>(c)}, values[a][b][c]);
    while (!exact_.empty() && exact_.back().is_zero()) exact_.pop_back();
    if (exact_.size() < 2) throw Error(ErrorCode::MalformedInput, "resultant has no z1 dependence; map is not proper");

    coeffs_.resize(exact_.size());
    for (std::size_t e = 0; e < exact_.size(); ++e)
        for (const auto &[ex, c] : exact_[e].terms()) coeffs_[e].push_back({c.to_complex(), ex[0], ex[1]});
    jac_ = jacobian(map_);
}

std::vector<Complex> PreimageSolver::specialize(std::span<const Complex> w) const {
    // Highest power of z1 first.
    std::vector<Complex> out(coeffs_.size());
    for (std::size_t e = 0; e < coeffs_.size(); ++e) {
        Complex s = 0.0;
        for (const auto &t : coeffs_[e])
            s += t.c * std::pow(w[0], static_cast<int>(t.j1)) * std::pow(w[1], static_cast<int>(t.j2));
        out[coeffs_.size() - 1 - e] = s;
    }
    return out;
}

std::vector<std::vector<Complex>> PreimageSolver::solve(std::span<const GaussianRational> w, double tol) const {
    if (w.size() != 2) throw Error(ErrorCode::MalformedInput, "target must have 2 coordinates");
    Polynomial lead = exact_.back().substitute(0, w[0]).substitute(1, w[1]);
    if (lead.is_zero()) throw Error(ErrorCode::DegenerateTarget, "resultant degree drops at this target");
    std::vector<Complex> wc{w[0].to_complex(), w[1].to_complex()};
    return solve_numeric(wc, tol);
}

std::vector<std::vector<Complex>> PreimageSolver::solve(std::span<const Complex> w, double tol) const {
    if (w.size() != 2) throw Error(ErrorCode::MalformedInput, "target must have 2 coordinates");
    return solve_numeric(w, tol);
}

std::vector<std::vector<Complex>> PreimageSolver::solve_numeric(std::span<const Complex> w, double tol) const {
    std::vector<Complex> r = specialize(w);
    if (std::abs(r[0]) <= 1e-12 * max_norm(r))
        throw Error(ErrorCode::DegenerateTarget, "resultant degree drops at this target");
    RootSet z1 = roots(r);

    const Polynomial &p1 = map_[0];
    const Polynomial &p2 = map_[1];
    const int m1 = std::max(0, p1.degree_in(1));
    const int m2 = std::max(0, p2.degree_in(1));

    std::vector<std::vector<Complex>> out;
    out.reserve(z1.count());
    for (std::size_t i = 0; i < z1.roots.size(); ++i) {
        const Complex x = z1.roots[i];
        double sa, sb;
        std::vector<Complex> A = z2_numeric(p1, x, m1, sa);
        std::vector<Complex> B = z2_numeric(p2, x, m2, sb);
        A.back() -= w[0];
        B.back() -= w[1];
        sa += std::abs(w[0]);
        sb += std::abs(w[1]);
        std::vector<Complex> At = trim_numeric(A, sa);
        std::vector<Complex> Bt = trim_numeric(B, sb);

        // Candidates from the lower-degree nonconstant polynomial, scored by the other.
        bool use_a = At.size() >= 2 && (Bt.size() < 2 || At.size() <= Bt.size());
        const std::vector<Complex> &src = use_a ? At : Bt;
        const std::vector<Complex> &other = use_a ? B : A;
        const double other_scale = use_a ? sb : sa;
        if (src.size() < 2) continue; // no finite z2 over this z1 root
        std::vector<Complex> cand = roots(src).expanded();
        std::vector<std::pair<double, Complex>> scored;
        for (const auto &y : cand) scored.push_back({std::abs(horner(other, y)) / std::max(other_scale, 1e-300), y});
        std::stable_sort(scored.begin(), scored.end(), [](const auto &l, const auto &rr) { return l.first < rr.first; });

        const std::size_t mult = z1.multiplicity[i];
        for (std::size_t k = 0; k < mult; ++k) {
            std::vector<Complex> p{x, scored[std::min(k, scored.size() - 1)].second};
            // 2-D Newton polish on f(p) = w.
            double res = contract_residual(map_, p, w);
            for (int step = 0; step < 8 && res > 64.0 * kEps; ++step) {
                auto fp = map_.eval(p);
                auto J = eval_matrix(jac_, p);
                Complex det = J[0][0] * J[1][1] - J[0][1] * J[1][0];
                double jn = std::abs(J[0][0]) + std::abs(J[0][1]) + std::abs(J[1][0]) + std::abs(J[1][1]);
                if (std::abs(det) <= 1e-10 * jn * jn) break;
                Complex r0 = fp[0] - w[0], r1 = fp[1] - w[1];
                std::vector<Complex> q{p[0] - (J[1][1] * r0 - J[0][1] * r1) / det,
                                       p[1] - (J[0][0] * r1 - J[1][0] * r0) / det};
                double qres = contract_residual(map_, q, w);
                if (!(qres < res)) break;
                p = std::move(q);
                res = qres;
            }
            if (!(res < tol)) {
                std::ostringstream msg;
                msg << "preimage residual " << res << " exceeds tolerance " << tol;
                throw Error(ErrorCode::NonConvergent, msg.str());
            }
            out.push_back(std::move(p));
        }
    }
    return out;
}

std::vector<std::vector<Complex>> preimages(const PolynomialMap &map, std::span<const Complex> w, double tol) {
    return PreimageSolver(map).solve(w, tol);
}

DegreeCount topological_degree(const PolynomialMap &map, std::size_t trials, std::uint64_t seed, double tol) {
    if (trials == 0) throw Error(ErrorCode::MalformedInput, "trials must be positive");
    PreimageSolver solver(map);
    DegreeCount out;
    Rng rng(seed);
    // Targets have real and imaginary parts in [-2, 2] on a 1/1000 grid.
    auto coordinate = [&] {
        mpq_class re(static_cast<long>(rng.below(4001)) - 2000, 1000);
        mpq_class im(static_cast<long>(rng.below(4001)) - 2000, 1000);
        return GaussianRational(re, im);
    };
    for (std::size_t t = 0; t < trials; ++t) {
        for (std::size_t attempt = 0;; ++attempt) {
            std::vector<GaussianRational> w{coordinate(), coordinate()};
            try {
                auto pts = solver.solve(std::span<const GaussianRational>(w), tol);
                std::vector<Complex> wc{w[0].to_complex(), w[1].to_complex()};
                for (const auto &p : pts) out.max_residual = std::max(out.max_residual, contract_residual(map, p, wc));
                out.counts.push_back(pts.size());
                break;
            } catch (const Error &e) {
                if (e.code() != ErrorCode::DegenerateTarget || attempt + 1 >= kDegenerateRetries) throw;
                ++out.degenerate_retries;
            }
        }
    }
    std::map<std::size_t, std::size_t> histogram;
    for (auto c : out.counts) ++histogram[c];
    out.degree = std::max_element(histogram.begin(), histogram.end(), [](const auto &a, const auto &b) {
                     return a.second < b.second;
                 })->first;
    if (histogram.size() > 1) {
        std::ostringstream msg;
        msg << "preimage counts disagree:";
        for (const auto &[c, n] : histogram) msg << ' ' << c << 'x' << n;
        throw Error(ErrorCode::Inconsistent, msg.str());
    }
    return out;
}

std::uint64_t map_hash(const PolynomialMap &map) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char ch : format_map(map)) {
        h ^= ch;
        h *= 0x100000001B3ULL;
    }
    return h;
}

MeasureCloud equilibrium_sample(const PolynomialMap &map, const SampleOptions &options) {
    if (options.chains == 0) throw Error(ErrorCode::MalformedInput, "chains must be positive");
    PreimageSolver solver(map);
    if (solver.degree() < 2) throw Error(ErrorCode::MalformedInput, "equilibrium sampling needs d_t >= 2");

    MeasureCloud cloud;
    cloud.seed = options.seed;
    cloud.burn_in = options.burn_in;
    cloud.chains = options.chains;
    cloud.chain_length = (options.n_points + options.chains - 1) / options.chains;
    cloud.map_hash = map_hash(map);

    std::vector<std::vector<std::vector<Complex>>> per_chain(options.chains);
    const Rng root(options.seed);
    parallel_for(options.chains, [&](std::size_t c) {
        const std::size_t want = std::min(cloud.chain_length, options.n_points - std::min(options.n_points, c * cloud.chain_length));
        Rng rng = root.split(c);
        auto &out = per_chain[c];
        out.reserve(want);
        std::vector<Complex> state;
        std::size_t age = 0;
        std::size_t restarts = 0;
        while (out.size() < want) {
            if (state.empty()) {
                state = {rng.in_disk(options.start_radius), rng.in_disk(options.start_radius)};
                age = 0;
            }
            try {
                auto pts = solver.solve(std::span<const Complex>(state), options.tol);
                if (pts.empty()) throw Error(ErrorCode::DegenerateTarget, "no finite preimage");
                state = pts[rng.below(pts.size())];
            } catch (const Error &e) {
                if (e.code() != ErrorCode::DegenerateTarget && e.code() != ErrorCode::NonConvergent) throw;
                if (++restarts > 1000) throw;
                state.clear();
                continue;
            }
            if (++age > options.burn_in) out.push_back(state);
        }
    });
    for (auto &chain : per_chain)
        for (auto &p : chain) cloud.points.push_back(std::move(p));
    return cloud;
}

} // namespace polydyn
