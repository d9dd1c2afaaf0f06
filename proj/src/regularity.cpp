#include "polydyn/regularity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "polydyn/forms.hpp"
#include "polydyn/parallel.hpp"
#include "polydyn/rng.hpp"

namespace polydyn {

const char *to_string(Verdict v) {
    switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::Indeterminate: return "indeterminate";
    }
    return "?";
}

PolynomialMap in_block_order(const PolynomialMap &map, const BlockStructure &blocks) {
    if (blocks.identity_permutation()) return map;
    return conjugate(map, blocks.permutation);
}

namespace {

// ---------------------------------------------------------------------------
// Sphere-minimum certificate for homogeneous systems in n >= 3 variables.

struct Certificate {
    double value = std::numeric_limits<double>::infinity();
    std::vector<Complex> point;
    double confidence = 0.0;
};

class FormSystem {
  public:
    explicit FormSystem(const std::vector<Polynomial> &forms) : n_(forms.front().nvars()) {
        for (const auto &f : forms) {
            if (f.is_zero()) continue;
            double scale = 0.0;
            for (const auto &[e, c] : f.terms()) scale = std::max(scale, std::abs(c.to_complex()));
            forms_.push_back(f);
            inv_scale_.push_back(1.0 / scale);
            std::vector<Polynomial> g;
            for (std::size_t k = 0; k < n_; ++k) g.push_back(f.derivative(k));
            grads_.push_back(std::move(g));
        }
    }

    std::size_t nvars() const { return n_; }

    std::vector<Complex> values(std::span<const Complex> z) const {
        std::vector<Complex> v(forms_.size());
        for (std::size_t j = 0; j < forms_.size(); ++j) v[j] = forms_[j].eval(z) * inv_scale_[j];
        return v;
    }

    static double sum_sq(const std::vector<Complex> &v) {
        double s = 0.0;
        for (auto x : v) s += std::norm(x);
        return s;
    }
    static double max_abs(const std::vector<Complex> &v) {
        double s = 0.0;
        for (auto x : v) s = std::max(s, std::abs(x));
        return s;
    }

    /// Gradient of log sum|F_j|^2 with respect to conj(z), projected onto the
    /// tangent space of the sphere.
    std::vector<Complex> log_gradient(std::span<const Complex> z, const std::vector<Complex> &v, double phi) const {
        std::vector<Complex> g(n_, 0.0);
        for (std::size_t j = 0; j < forms_.size(); ++j)
            for (std::size_t k = 0; k < n_; ++k)
                g[k] += v[j] * std::conj(grads_[j][k].eval(z) * inv_scale_[j]);
        Complex radial = 0.0;
        for (std::size_t k = 0; k < n_; ++k) {
            g[k] /= phi;
            radial += std::conj(z[k]) * g[k];
        }
        for (std::size_t k = 0; k < n_; ++k) g[k] -= radial * z[k];
        return g;
    }

  private:
    std::size_t n_;
    std::vector<Polynomial> forms_;
    std::vector<double> inv_scale_;
    std::vector<std::vector<Polynomial>> grads_;
};

void normalize(std::vector<Complex> &z) {
    double s = 0.0;
    for (auto x : z) s += std::norm(x);
    s = std::sqrt(s);
    for (auto &x : z) x /= s;
}

Certificate sphere_minimum(const FormSystem &sys, const CertificateOptions &opt) {
    const std::size_t n = sys.nvars();
    std::vector<double> best(opt.starts);
    std::vector<std::vector<Complex>> where(opt.starts);
    Rng root(opt.seed);

    parallel_for(opt.starts, [&](std::size_t s) {
        Rng rng = root.split(s);
        std::vector<Complex> z(n);
        for (auto &x : z) x = rng.complex_normal();
        normalize(z);
        auto v = sys.values(z);
        double phi = FormSystem::sum_sq(v);
        double t = 0.1;
        for (std::size_t step = 0; step < opt.steps && phi > 0.0; ++step) {
            auto g = sys.log_gradient(z, v, phi);
            bool moved = false;
            for (int tries = 0; tries < 50; ++tries) {
                std::vector<Complex> trial(n);
                for (std::size_t k = 0; k < n; ++k) trial[k] = z[k] - t * g[k];
                normalize(trial);
                auto tv = sys.values(trial);
                double tphi = FormSystem::sum_sq(tv);
                if (tphi < phi) {
                    z = std::move(trial);
                    v = std::move(tv);
                    phi = tphi;
                    t *= 2.0;
                    moved = true;
                    break;
                }
                t *= 0.5;
            }
            if (!moved) break;
        }
        best[s] = FormSystem::max_abs(v);
        where[s] = z;
    });

    Certificate c;
    std::size_t arg = 0;
    for (std::size_t s = 0; s < opt.starts; ++s)
        if (best[s] < best[arg]) arg = s;
    c.value = best[arg];
    c.point = where[arg];
    std::size_t agree = 0;
    for (double b : best)
        if (b <= 2.0 * c.value) ++agree;
    c.confidence = static_cast<double>(agree) / static_cast<double>(opt.starts);
    return c;
}

// ---------------------------------------------------------------------------

Polynomial drop_trailing_variables(const Polynomial &p, std::size_t keep) {
    Polynomial q = p;
    for (std::size_t v = keep; v < p.nvars(); ++v) q = q.substitute(v, GaussianRational(0));
    std::vector<std::size_t> mapping(p.nvars());
    for (std::size_t v = 0; v < p.nvars(); ++v) mapping[v] = v < keep ? v : 0;
    return q.rename(mapping, keep);
}

LevelVerdict check_level(const PolynomialMap &g, const std::vector<std::size_t> &l, const std::vector<int> &d,
                         std::size_t level, const CertificateOptions &opt) {
    const std::size_t k = g.dim();
    const std::size_t free = l[level] - 1;
    LevelVerdict out;
    out.level = level;
    out.sphere_min = std::numeric_limits<double>::quiet_NaN();

    std::vector<Polynomial> restricted;
    for (std::size_t b = 0; b < level; ++b) {
        for (std::size_t j = l[b] - 1; j + 1 < l[b + 1]; ++j) {
            Polynomial top = homogeneous_part(g[j], static_cast<unsigned>(d[b]));
            out.i_generators.push_back(top);
            restricted.push_back(drop_trailing_variables(top, free));
        }
    }
    for (std::size_t j = free; j < k; ++j) out.x_generators.push_back(Polynomial::variable(k, j));

    std::size_t nonzero = 0;
    for (const auto &f : restricted)
        if (!f.is_zero()) ++nonzero;

    if (free == 1) {
        out.method = "exact";
        out.verdict = nonzero > 0 ? Verdict::Pass : Verdict::Fail;
        if (nonzero == 0) {
            out.witness.assign(k, 0.0);
            out.witness[0] = 1.0;
        }
        return out;
    }
    if (nonzero < free) {
        // Fewer equations than variables: a projective solution always exists.
        out.method = "exact-dimension";
        out.verdict = Verdict::Fail;
        return out;
    }
    if (free == 2) {
        std::vector<CoeffList> forms;
        for (const auto &f : restricted)
            if (!f.is_zero()) forms.push_back(binary_form(f));
        if (forms.size() == 2) {
            out.method = "exact-resultant";
            out.verdict = resultant(forms[0], forms[1]).is_zero() ? Verdict::Fail : Verdict::Pass;
        } else {
            out.method = "exact-gcd";
            out.verdict = binary_forms_have_common_zero(forms) ? Verdict::Fail : Verdict::Pass;
        }
        return out;
    }

    out.method = "numerical-certificate";
    Certificate c = sphere_minimum(FormSystem(restricted), opt);
    out.sphere_min = c.value;
    out.confidence = c.confidence;
    if (c.value > opt.epsilon) {
        out.verdict = Verdict::Pass;
    } else if (c.value < opt.delta) {
        out.verdict = Verdict::Fail;
        out.witness = c.point;
        out.witness.resize(k, 0.0);
    } else {
        out.verdict = Verdict::Indeterminate;
    }
    return out;
}

std::size_t leading_passes(const std::vector<LevelVerdict> &levels) {
    std::size_t s = 0;
    while (s < levels.size() && levels[s].verdict == Verdict::Pass) ++s;
    return s;
}

mpq_class product_formula(const std::vector<mpq_class> &alpha, const std::vector<std::size_t> &l) {
    mpq_class dt = 1;
    for (std::size_t i = 0; i < alpha.size(); ++i)
        for (std::size_t r = l[i]; r < l[i + 1]; ++r) dt *= alpha[i];
    return dt;
}

void fill_predictions(RegularityReport &r) {
    Invariants inv = predict_invariants(r);
    r.d_t_predicted = inv.d_t;
    r.lambda_predicted = inv.lambda;
    r.prediction_basis = inv.basis;
}

std::vector<mpq_class> block_degrees(const BlockStructure &b) {
    std::vector<mpq_class> a;
    for (int d : b.d) a.emplace_back(d);
    return a;
}

} // namespace

std::vector<LevelVerdict> check_levels(const PolynomialMap &block_map, const std::vector<std::size_t> &l,
                                       const std::vector<int> &d, std::size_t s,
                                       const CertificateOptions &options) {
    const std::size_t m = l.size() - 1;
    if (s < 1 || s > m) throw Error(ErrorCode::MalformedInput, "s must lie in 1..m");
    std::vector<LevelVerdict> out;
    for (std::size_t i = 1; i <= s; ++i) out.push_back(check_level(block_map, l, d, i, options));
    return out;
}

std::vector<LevelVerdict> check_s_regularity(const PolynomialMap &map, const BlockStructure &blocks, std::size_t s,
                                             const CertificateOptions &options) {
    return check_levels(in_block_order(map, blocks), blocks.l, blocks.d, s, options);
}

bool check_algebraic_stability(const PolynomialMap &map, const BlockStructure &blocks,
                               const CertificateOptions &options) {
    PolynomialMap g = in_block_order(map, blocks);
    if (g.dim() == 2 && blocks.m == 2)
        return !g[0].coeff({static_cast<unsigned>(blocks.d[0]), 0}).is_zero();
    return check_levels(g, blocks.l, blocks.d, 1, options).front().verdict == Verdict::Pass;
}

NewtonDiagram newton_diagram(const PolynomialMap &map) {
    if (map.dim() != 2) throw Error(ErrorCode::MalformedInput, "Newton diagrams need k = 2");
    NewtonDiagram nd;
    for (const auto &p : map.components()) {
        std::set<ExponentPair> s;
        for (const auto &[e, c] : p.terms()) s.emplace(e[0], e[1]);
        nd.sigma.push_back(std::move(s));
    }
    return nd;
}

SupportLine support_line_D1(const NewtonDiagram &diagram, unsigned d1) {
    if (!diagram.sigma[0].contains({d1, 0u}))
        throw Error(ErrorCode::NotAlgebraicallyStable, "(d1, 0) is not in the diagram of P1");
    std::optional<mpq_class> rho;
    for (const auto &sig : diagram.sigma) {
        for (auto [m, n] : sig) {
            if (n == 0) continue;
            if (m >= d1) throw Error(ErrorCode::MalformedInput, "diagram point beyond d1");
            mpq_class r(mpz_class(n), mpz_class(d1 - m));
            r.canonicalize();
            if (!rho || r > *rho) rho = r;
        }
    }
    if (!rho) throw Error(ErrorCode::SlopeZero, "only a horizontal support line passes through (d1, 0)");
    SupportLine line;
    line.p = rho->get_num().get_si();
    line.q = rho->get_den().get_si();
    line.r = line.p * static_cast<long>(d1);
    return line;
}

SupportLine support_line_D2(const NewtonDiagram &diagram, const SupportLine &slope) {
    SupportLine line{slope.p, slope.q, std::numeric_limits<long>::min()};
    for (auto [m, n] : diagram.sigma.at(1))
        line.r = std::max(line.r, slope.p * static_cast<long>(m) + slope.q * static_cast<long>(n));
    if (diagram.sigma[1].empty()) throw Error(ErrorCode::MalformedMap, "P2 is zero");
    return line;
}

Polynomial restrict_to_line(const Polynomial &p, const SupportLine &line) {
    Polynomial out(p.nvars());
    for (const auto &[e, c] : p.terms())
        if (line.p * static_cast<long>(e[0]) + line.q * static_cast<long>(e[1]) == line.r) out.add_term(e, c);
    return out;
}

RegularityReport check_pi_regularity(const PolynomialMap &map, const std::vector<unsigned> &pexp, std::size_t s,
                                     const CertificateOptions &options) {
    RegularityReport rep;
    rep.blocks = block_structure(map);
    rep.block_map = in_block_order(map, rep.blocks);
    rep.alg_stable = check_algebraic_stability(map, rep.blocks, options);
    PolynomialMap composed = compose_monomial(rep.block_map, rep.blocks, pexp);
    rep.pi = pexp;

    const auto &l = rep.blocks.l;
    std::vector<int> dpi(rep.blocks.m, 0);
    for (std::size_t i = 0; i < rep.blocks.m; ++i) {
        for (std::size_t j = l[i] - 1; j + 1 < l[i + 1]; ++j) dpi[i] = std::max(dpi[i], composed[j].degree());
        mpq_class a(mpz_class(dpi[i]), mpz_class(pexp[i]));
        a.canonicalize();
        rep.alpha.push_back(a);
    }
    rep.composed = std::move(composed);
    for (std::size_t i = 1; i < rep.alpha.size(); ++i) {
        if (!(rep.alpha[i] < rep.alpha[i - 1])) {
            rep.failure = ErrorCode::InvalidPi;
            return rep;
        }
    }
    rep.levels = check_levels(*rep.composed, l, dpi, s, options);
    rep.s_max = leading_passes(rep.levels);
    rep.verdict = rep.s_max >= s;
    if (!rep.verdict) {
        bool indeterminate = rep.levels[rep.s_max].verdict == Verdict::Indeterminate;
        rep.failure = indeterminate ? ErrorCode::Indeterminate : ErrorCode::SharedComponent;
    }
    fill_predictions(rep);
    return rep;
}

RegularityReport semi_regularity_2d(const PolynomialMap &map) {
    if (map.dim() != 2) throw Error(ErrorCode::MalformedInput, "semi_regularity_2d needs k = 2");
    RegularityReport rep;
    rep.blocks = block_structure(map);
    if (rep.blocks.m != 2) throw Error(ErrorCode::MalformedInput, "semi_regularity_2d needs d1 > d2");
    rep.block_map = in_block_order(map, rep.blocks);
    rep.alpha = block_degrees(rep.blocks);
    rep.alg_stable = check_algebraic_stability(map, rep.blocks);
    if (!rep.alg_stable) {
        rep.failure = ErrorCode::NotAlgebraicallyStable;
        return rep;
    }

    const PolynomialMap &g = rep.block_map;
    NewtonDiagram diagram = newton_diagram(g);
    NewtonData nd;
    try {
        nd.d1 = support_line_D1(diagram, static_cast<unsigned>(rep.blocks.d[0]));
    } catch (const Error &e) {
        if (e.code() != ErrorCode::SlopeZero) throw;
        rep.failure = ErrorCode::SlopeZero;
        return rep;
    }
    nd.d2 = support_line_D2(diagram, nd.d1);
    nd.p1_d1 = restrict_to_line(g[0], nd.d1);
    nd.p2_d2 = restrict_to_line(g[1], nd.d2);

    // Pulled back through pi = (z1^p, z2^q) both restrictions are homogeneous.
    std::vector<unsigned> pexp{static_cast<unsigned>(nd.d1.p), static_cast<unsigned>(nd.d1.q)};
    BlockStructure trivial = rep.blocks;
    trivial.permutation = {0, 1};
    PolynomialMap pulled = compose_monomial(PolynomialMap(std::vector<Polynomial>{nd.p1_d1, nd.p2_d2}), trivial, pexp);
    nd.resultant = resultant(binary_form(pulled[0]), binary_form(pulled[1]));
    nd.verdict = !nd.resultant.is_zero();
    rep.newton = nd;
    if (!nd.verdict) {
        rep.failure = ErrorCode::SharedComponent;
        return rep;
    }

    RegularityReport pi_rep = check_pi_regularity(map, pexp, 2);
    pi_rep.newton = std::move(rep.newton);
    if (!pi_rep.verdict && !pi_rep.failure) pi_rep.failure = ErrorCode::Inconsistent;
    return pi_rep;
}

bool is_affine_family(const PolynomialMap &g) {
    if (g.dim() != 2) return false;
    const Polynomial &lin = g[1];
    if (lin.is_zero() || lin.degree() != 1 || !lin.is_homogeneous()) return false;
    if (!(lin.coeff({0, 1}).norm() > 1)) return false;
    const int d = g[0].degree();
    if (d < 2) return false;
    return !g[0].coeff({static_cast<unsigned>(d), 0}).is_zero();
}

Invariants predict_invariants(const RegularityReport &report) {
    Invariants inv;
    inv.alpha = report.alpha;
    if (!report.verdict || report.alpha.empty()) return inv;
    const mpq_class &am = report.alpha.back();
    if (am > 1) {
        inv.basis = "product-formula";
    } else if (am == 1 && is_affine_family(report.block_map)) {
        inv.basis = "affine-family";
    } else {
        return inv;
    }
    inv.d_t = product_formula(report.alpha, report.blocks.l);
    inv.lambda = am;
    return inv;
}

std::vector<mpq_class> predicted_pullback_factors(const RegularityReport &report) {
    const auto &l = report.blocks.l;
    std::vector<mpq_class> out;
    if (report.alpha.size() + 1 != l.size()) return out;
    mpq_class lower = 1;
    for (std::size_t i = 0; i < report.alpha.size(); ++i) {
        mpq_class own = 1;
        for (std::size_t j = l[i]; j < l[i + 1]; ++j) {
            own *= report.alpha[i];
            out.push_back(own * lower);
        }
        lower *= own;
    }
    return out;
}

Analysis analyze(const PolynomialMap &map, const AnalysisOptions &options) {
    Analysis a;
    RegularityReport &reg = a.regular;
    reg.blocks = block_structure(map);
    reg.block_map = in_block_order(map, reg.blocks);
    reg.alg_stable = check_algebraic_stability(map, reg.blocks, options.certificate);
    reg.levels = check_levels(reg.block_map, reg.blocks.l, reg.blocks.d, reg.blocks.m, options.certificate);
    reg.s_max = leading_passes(reg.levels);
    reg.alpha = block_degrees(reg.blocks);
    reg.verdict = reg.s_max == reg.blocks.m;
    if (!reg.verdict)
        reg.failure = reg.levels[reg.s_max].verdict == Verdict::Indeterminate ? ErrorCode::Indeterminate
                                                                              : ErrorCode::SharedComponent;
    fill_predictions(reg);
    a.is_regular = reg.verdict;

    auto trivial_pi = [&] {
        RegularityReport r = reg;
        r.pi = std::vector<unsigned>(reg.blocks.m, 1);
        r.composed = reg.block_map;
        return r;
    };

    if (options.pi) {
        a.semi = check_pi_regularity(map, *options.pi, reg.blocks.m, options.certificate);
        a.is_semi_regular = a.semi.verdict;
        a.reason = a.semi.failure;
    } else if (map.dim() == 2 && reg.blocks.m == 2) {
        a.semi = semi_regularity_2d(map);
        a.is_semi_regular = a.semi.verdict;
        a.reason = a.semi.failure;
        if (!a.is_semi_regular && a.is_regular) {
            std::optional<NewtonData> keep = std::move(a.semi.newton);
            a.semi = trivial_pi();
            a.semi.newton = std::move(keep);
            a.is_semi_regular = true;
            a.reason.reset();
        }
    } else if (a.is_regular) {
        a.semi = trivial_pi();
        a.is_semi_regular = true;
    } else {
        a.semi = reg;
        a.reason = reg.alg_stable ? ErrorCode::Unsupported : ErrorCode::NotAlgebraicallyStable;
    }
    return a;
}

} // namespace polydyn
