#include "cli.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "polydyn/dynamics.hpp"
#include "polydyn/errors.hpp"
#include "polydyn/measures.hpp"
#include "polydyn/parser.hpp"
#include "polydyn/preimage.hpp"
#include "polydyn/regularity.hpp"

namespace polydyn::cli {

using Json = nlohmann::ordered_json;

namespace {

/// Result threshold above which a grid run is reported as Indeterminate-dominated.
constexpr double kIndeterminateDominated = 0.5;

struct RunConfig {
    std::string map_path;
    std::optional<std::uint64_t> seed;
    bool entropy = false;
    unsigned precision_cap = PrecisionPolicy{}.cap_bits;
    double escape_ell = OrbitParams{}.escape_ell;
    double bound_ell = OrbitParams{}.bound_ell;
    std::size_t max_n = OrbitParams{}.max_n;
    std::optional<double> tol;
    std::vector<std::size_t> res{256, 256};
    std::size_t coord = 1;
    std::string center = "0";
    double width = 4.0;
    double height = 4.0;
    std::vector<std::string> fix;
    std::size_t index = 1;
    std::size_t trials = 20;
    std::optional<std::size_t> samples;
    std::size_t burn = 30;
    std::size_t orbit_length = 20;
    double radius = 1e6;
    std::string pi;
    std::string out_path;
    std::string json_path;
    std::string pgm_path;
    bool holder = false;
};

Error validation(const std::string &what) { return Error(ErrorCode::MalformedInput, what); }

void require_positive(double v, const char *name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw validation(std::string(name) + " must be positive");
}

std::string read_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw validation("cannot read map file " + path);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void write_file(const std::string &path, const std::string &bytes) {
    std::ofstream o(path, std::ios::binary);
    if (!o) throw Error(ErrorCode::MalformedInput, "cannot write " + path);
    o << bytes;
}

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

Complex parse_complex(const std::string &text) {
    Polynomial p = parse_polynomial(text, 0);
    if (p.degree() > 0) throw validation("expected a complex constant, got " + text);
    return p.is_zero() ? Complex{} : p.terms().begin()->second.to_complex();
}

Json rational(const mpq_class &q) {
    if (q.get_den() == 1) return q.get_num().get_si();
    return q.get_str();
}

Json complex_pair(Complex z) { return Json::array({z.real(), z.imag()}); }

Json polynomials(const std::vector<Polynomial> &ps) {
    Json a = Json::array();
    for (const auto &p : ps) a.push_back(format_polynomial(p));
    return a;
}

std::string line_text(const SupportLine &l) {
    auto coef = [](long c, const char *v) { return (c == 1 ? std::string() : std::to_string(c)) + v; };
    return coef(l.p, "m") + "+" + coef(l.q, "n") + "=" + std::to_string(l.r);
}

Json line_json(const SupportLine &l) {
    Json j;
    j["p"] = l.p;
    j["q"] = l.q;
    j["r"] = l.r;
    j["line"] = line_text(l);
    return j;
}

Json levels_json(const std::vector<LevelVerdict> &levels) {
    Json a = Json::array();
    for (const auto &lv : levels) {
        Json j;
        j["level"] = lv.level;
        j["verdict"] = to_string(lv.verdict);
        j["method"] = lv.method;
        j["confidence"] = lv.confidence;
        j["sphere_min"] = std::isnan(lv.sphere_min) ? Json(nullptr) : Json(lv.sphere_min);
        j["i_generators"] = polynomials(lv.i_generators);
        j["x_generators"] = polynomials(lv.x_generators);
        a.push_back(std::move(j));
    }
    return a;
}

std::vector<unsigned> parse_pi(const std::string &text) {
    std::vector<unsigned> out;
    std::stringstream s(text);
    std::string item;
    while (std::getline(s, item, ',')) {
        try {
            std::size_t used = 0;
            long v = std::stol(item, &used);
            if (used != item.size() || v < 1) throw std::invalid_argument(item);
            out.push_back(static_cast<unsigned>(v));
        } catch (const std::logic_error &) {
            throw validation("--pi expects positive integers separated by commas");
        }
    }
    if (out.empty()) throw validation("--pi expects positive integers separated by commas");
    return out;
}

Json analysis_json(const MapDocument &doc, const Analysis &a) {
    const RegularityReport &reg = a.regular;
    const RegularityReport &semi = a.semi;
    Json j;
    Json comps = Json::array();
    for (const auto &p : doc.map.components()) comps.push_back(format_polynomial(p));
    j["map"] = comps;
    j["k"] = doc.map.dim();
    Json blocks;
    blocks["l"] = reg.blocks.l;
    blocks["d"] = reg.blocks.d;
    std::vector<std::size_t> perm;
    for (auto p : reg.blocks.permutation) perm.push_back(p + 1);
    blocks["permutation"] = perm;
    j["blocks"] = blocks;
    j["algebraically_stable"] = reg.alg_stable;
    j["regular"] = a.is_regular;
    j["s_max"] = reg.s_max;
    j["levels"] = levels_json(reg.levels);
    j["semi_regular"] = a.is_semi_regular;
    j["reason"] = a.reason ? Json(std::string(to_string(*a.reason))) : Json(nullptr);
    if (semi.pi) {
        // Exponents per input coordinate.
        std::vector<unsigned> pi(doc.map.dim());
        for (std::size_t j2 = 0; j2 < pi.size(); ++j2)
            pi[semi.blocks.permutation[j2]] = (*semi.pi)[semi.blocks.block_of(j2)];
        j["pi"] = pi;
    } else {
        j["pi"] = nullptr;
    }
    if (semi.newton) {
        Json n;
        n["D1"] = line_json(semi.newton->d1);
        n["D2"] = line_json(semi.newton->d2);
        n["P1_D1"] = format_polynomial(semi.newton->p1_d1);
        n["P2_D2"] = format_polynomial(semi.newton->p2_d2);
        n["resultant"] = format_coefficient(semi.newton->resultant);
        j["newton"] = n;
    } else {
        j["newton"] = nullptr;
    }
    j["composed"] = semi.composed ? polynomials(semi.composed->components()) : Json(nullptr);
    j["semi_levels"] = levels_json(semi.levels);
    Json alpha = Json::array();
    for (const auto &q : semi.alpha) alpha.push_back(rational(q));
    j["alpha"] = alpha;
    j["d_t"] = semi.d_t_predicted ? rational(*semi.d_t_predicted) : Json(nullptr);
    j["lambda"] = semi.lambda_predicted ? rational(*semi.lambda_predicted) : Json(nullptr);
    j["prediction_basis"] = semi.prediction_basis;
    Json factors = Json::array();
    if (a.is_semi_regular)
        for (const auto &q : predicted_pullback_factors(semi)) factors.push_back(rational(q));
    j["pullback_factors"] = factors;
    return j;
}

struct Loaded {
    MapDocument doc;
    Analysis analysis;
};

Loaded load(const RunConfig &c, bool with_pi = false) {
    Loaded l;
    l.doc = parse_document(read_file(c.map_path));
    AnalysisOptions opts;
    if (with_pi && !c.pi.empty()) opts.pi = parse_pi(c.pi);
    l.analysis = analyze(l.doc.map, opts);
    return l;
}

OrbitParams orbit_params(const RunConfig &c) {
    require_positive(c.escape_ell, "--escape-ell");
    require_positive(c.bound_ell, "--bound-ell");
    if (c.max_n == 0) throw validation("--max-n must be positive");
    if (c.precision_cap < 53) throw validation("--precision-cap must be at least 53");
    OrbitParams p;
    p.max_n = c.max_n;
    p.escape_ell = c.escape_ell;
    p.bound_ell = c.bound_ell;
    p.window = std::min(p.window, c.max_n);
    p.precision.cap_bits = c.precision_cap;
    return p;
}

SliceSpec slice_spec(const RunConfig &c, std::size_t k) {
    if (c.res.size() != 2) throw validation("--res expects NX NY");
    require_positive(c.width, "--width");
    require_positive(c.height, "--height");
    if (c.coord < 1 || c.coord > k) throw validation("--coord must name a coordinate 1..k");
    SliceSpec s;
    s.coord = c.coord - 1;
    s.center = parse_complex(c.center);
    s.width = c.width;
    s.height = c.height;
    s.nx = c.res[0];
    s.ny = c.res[1];
    s.fixed.assign(k, Complex{});
    for (const auto &f : c.fix) {
        auto eq = f.find('=');
        if (eq == std::string::npos || eq < 2 || f[0] != 'z') throw validation("--fix expects zj=a+bi, got " + f);
        std::size_t j = 0;
        try {
            std::size_t used = 0;
            j = std::stoul(f.substr(1, eq - 1), &used);
            if (used != eq - 1) throw std::invalid_argument(f);
        } catch (const std::logic_error &) {
            throw validation("--fix expects zj=a+bi, got " + f);
        }
        if (j < 1 || j > k) throw validation("--fix names a coordinate outside 1..k: " + f);
        if (j == c.coord) throw validation("--fix cannot fix the scanned coordinate");
        s.fixed[j - 1] = parse_complex(f.substr(eq + 1));
    }
    s.validate(k);
    return s;
}

Json slice_json(const SliceSpec &s) {
    Json j;
    j["coord"] = s.coord + 1;
    j["center"] = complex_pair(s.center);
    j["width"] = s.width;
    j["height"] = s.height;
    j["res"] = Json::array({s.nx, s.ny});
    Json fixed = Json::array();
    for (std::size_t q = 0; q < s.fixed.size(); ++q)
        fixed.push_back(q == s.coord ? Json(nullptr) : complex_pair(s.fixed[q]));
    j["fixed"] = fixed;
    return j;
}

std::uint64_t resolve_seed(const RunConfig &c) {
    if (c.seed) return *c.seed;
    if (!c.entropy) throw validation("this subcommand needs --seed (or --entropy)");
    std::random_device rd;
    return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

std::string pnm(const char *magic, std::size_t nx, std::size_t ny, const std::string &payload) {
    return std::string(magic) + "\n" + std::to_string(nx) + " " + std::to_string(ny) + "\n255\n" + payload;
}

std::vector<double> alpha_list(const RegularityReport &r) { return alpha_values(r); }

void emit(const Json &j, const RunConfig &c, std::ostream &out) {
    std::string text = format_json(j) + "\n";
    out << text;
    if (!c.json_path.empty()) write_file(c.json_path, text);
}

int cmd_analyze(const RunConfig &c, std::ostream &out) {
    Loaded l = load(c, true);
    emit(analysis_json(l.doc, l.analysis), c, out);
    return kOk;
}

int cmd_classify(const RunConfig &c, std::ostream &out) {
    Loaded l = load(c, true);
    SliceSpec s = slice_spec(c, l.doc.map.dim());
    BasinGrid g = basin_grid(l.analysis.semi, s, orbit_params(c));
    const std::vector<double> alpha = alpha_list(l.analysis.semi);

    std::vector<std::size_t> u(alpha.size(), 0);
    std::size_t k_count = 0, escaped = 0, within = 0;
    std::string rgb;
    rgb.reserve(3 * g.labels.size());
    for (const auto &lab : g.labels) {
        Rgb colour{255, 255, 255};
        if (lab.kind == BasinLabel::Kind::K) {
            ++k_count;
            colour = {0, 0, 0};
        } else if (lab.kind == BasinLabel::Kind::U) {
            ++u[lab.index - 1];
            ++escaped;
            if (std::abs(lab.rate - alpha[lab.index - 1]) <= 0.05 * alpha[lab.index - 1]) ++within;
            colour = basin_colour(lab.index);
        }
        rgb.push_back(static_cast<char>(colour.r));
        rgb.push_back(static_cast<char>(colour.g));
        rgb.push_back(static_cast<char>(colour.b));
    }
    if (!c.out_path.empty()) write_file(c.out_path, pnm("P6", s.nx, s.ny, rgb));

    Json j;
    j["slice"] = slice_json(s);
    Json a = Json::array();
    for (const auto &q : l.analysis.semi.alpha) a.push_back(rational(q));
    j["alpha"] = a;
    Json counts;
    for (std::size_t i = 0; i < u.size(); ++i) counts["U" + std::to_string(i + 1)] = u[i];
    counts["K"] = k_count;
    counts["Indeterminate"] = g.indeterminate;
    j["counts"] = counts;
    const double frac = static_cast<double>(g.indeterminate) / static_cast<double>(g.labels.size());
    j["indeterminate_fraction"] = frac;
    j["rate_within_5pct"] = escaped ? Json(static_cast<double>(within) / static_cast<double>(escaped)) : Json(nullptr);
    emit(j, c, out);
    return frac > kIndeterminateDominated ? kIndeterminate : kOk;
}

const char *kind_name(GreenValue::Kind k) {
    switch (k) {
    case GreenValue::Kind::Finite: return "finite";
    case GreenValue::Kind::Infinite: return "infinite";
    case GreenValue::Kind::Indeterminate: return "indeterminate";
    case GreenValue::Kind::NonConvergent: return "nonconvergent";
    }
    return "?";
}

int cmd_green(const RunConfig &c, std::ostream &out) {
    Loaded l = load(c, true);
    SliceSpec s = slice_spec(c, l.doc.map.dim());
    GreenParams gp;
    gp.orbit = orbit_params(c);
    if (c.tol) {
        require_positive(*c.tol, "--tol");
        gp.tol = *c.tol;
    }
    GreenField f = green_field(l.analysis.semi, c.index, s, gp);

    double vmax = 0.0;
    for (const auto &v : f.values)
        if (v.finite()) vmax = std::max(vmax, v.value);
    if (!c.out_path.empty()) {
        std::string csv = "ix,iy,re,im,kind,value\n";
        for (std::size_t iy = 0; iy < s.ny; ++iy)
            for (std::size_t ix = 0; ix < s.nx; ++ix) {
                const GreenValue &v = f.at(ix, iy);
                Complex z = s.pixel(ix, iy);
                std::string value = v.finite() ? fmt17(v.value) : v.kind == GreenValue::Kind::Infinite ? "inf" : "nan";
                csv += std::to_string(ix) + "," + std::to_string(iy) + "," + fmt17(z.real()) + "," + fmt17(z.imag()) +
                       "," + kind_name(v.kind) + "," + value + "\n";
            }
        write_file(c.out_path, csv);
    }
    if (!c.pgm_path.empty()) {
        std::string grey;
        grey.reserve(f.values.size());
        for (const auto &v : f.values) {
            unsigned char b = 255;
            if (v.finite()) b = vmax > 0.0 ? static_cast<unsigned char>(std::lround(253.0 * v.value / vmax)) : 0;
            else if (v.kind == GreenValue::Kind::Infinite) b = 254;
            grey.push_back(static_cast<char>(b));
        }
        write_file(c.pgm_path, pnm("P5", s.nx, s.ny, grey));
    }

    Json j;
    j["index"] = c.index;
    j["slice"] = slice_json(s);
    j["pixels"] = f.values.size();
    j["infinite"] = f.infinite;
    j["indeterminate"] = f.indeterminate;
    j["indeterminate_fraction"] = f.indeterminate_fraction();
    j["max_finite"] = vmax;
    emit(j, c, out);
    return f.indeterminate_fraction() > kIndeterminateDominated ? kIndeterminate : kOk;
}

MeasureCloud sample(const RunConfig &c, const PolynomialMap &map, std::uint64_t seed, std::size_t default_n) {
    SampleOptions o;
    o.n_points = c.samples.value_or(default_n);
    if (o.n_points == 0) throw validation("--samples must be positive");
    o.burn_in = c.burn;
    o.seed = seed;
    if (c.tol) {
        require_positive(*c.tol, "--tol");
        o.tol = *c.tol;
    }
    return equilibrium_sample(map, o);
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, v);
    return buf;
}

int cmd_measure(const RunConfig &c, std::ostream &out) {
    const std::uint64_t seed = resolve_seed(c);
    Loaded l = load(c, true);
    MeasureCloud cloud = sample(c, l.doc.map, seed, 100000);
    if (!c.out_path.empty()) {
        std::string csv;
        for (std::size_t q = 0; q < l.doc.map.dim(); ++q)
            csv += (q ? ",re_z" : "re_z") + std::to_string(q + 1) + ",im_z" + std::to_string(q + 1);
        csv += "\n";
        for (const auto &p : cloud.points) {
            for (std::size_t q = 0; q < p.size(); ++q) csv += (q ? "," : "") + fmt17(p[q].real()) + "," + fmt17(p[q].imag());
            csv += "\n";
        }
        write_file(c.out_path, csv);
    }

    Json j;
    j["seed"] = seed;
    j["n_points"] = cloud.points.size();
    j["burn_in"] = cloud.burn_in;
    j["chains"] = cloud.chains;
    j["chain_length"] = cloud.chain_length;
    j["map_hash"] = hex64(cloud.map_hash);
    j["pushforward_tv"] = pushforward_tv(l.doc.map, cloud);
    int code = kOk;
    if (!c.pgm_path.empty()) {
        SliceSpec s = slice_spec(c, l.doc.map.dim());
        GreenParams gp;
        gp.orbit = orbit_params(c);
        GreenField f = green_field(l.analysis.semi, c.index, s, gp);
        DensityGrid d = laplacian_density(f);
        double dmax = 0.0;
        for (double v : d.values) dmax = std::max(dmax, v);
        std::string grey;
        grey.reserve(d.values.size());
        for (double v : d.values)
            grey.push_back(static_cast<char>(dmax > 0.0 ? std::lround(255.0 * std::min(1.0, v / dmax)) : 0));
        write_file(c.pgm_path, pnm("P5", s.nx, s.ny, grey));
        Json dj;
        dj["index"] = c.index;
        dj["slice"] = slice_json(s);
        dj["total_mass"] = d.total_mass;
        dj["min_raw"] = d.min_raw;
        dj["negative_mass"] = d.negative_mass;
        dj["indeterminate_fraction"] = f.indeterminate_fraction();
        j["density"] = dj;
    }
    emit(j, c, out);
    return code;
}

int cmd_degree(const RunConfig &c, std::ostream &out) {
    const std::uint64_t seed = resolve_seed(c);
    if (c.trials == 0) throw validation("--trials must be positive");
    Loaded l = load(c, true);
    if (l.doc.map.dim() != 2) throw Error(ErrorCode::Unsupported, "preimage counting is implemented for k = 2 only");
    double tol = c.tol.value_or(1e-8);
    require_positive(tol, "--tol");
    DegreeCount d = topological_degree(l.doc.map, c.trials, seed, tol);
    Json j;
    j["degree"] = d.degree;
    j["predicted"] = l.analysis.semi.d_t_predicted ? rational(*l.analysis.semi.d_t_predicted) : Json(nullptr);
    j["trials"] = c.trials;
    j["seed"] = seed;
    j["counts"] = d.counts;
    j["degenerate_retries"] = d.degenerate_retries;
    j["max_residual"] = d.max_residual;
    emit(j, c, out);
    return kOk;
}

int cmd_loja(const RunConfig &c, std::ostream &out) {
    const std::uint64_t seed = resolve_seed(c);
    Loaded l = load(c, true);
    LojasiewiczOptions o;
    o.radius = c.radius;
    o.samples = c.samples.value_or(o.samples);
    o.seed = seed;
    o.precision.cap_bits = c.precision_cap;
    if (c.precision_cap < 53) throw validation("--precision-cap must be at least 53");
    LojasiewiczResult r = lojasiewicz_estimate(CompiledMap(l.doc.map), o);
    Json j;
    j["lambda_hat"] = r.lambda_hat;
    j["predicted"] = l.analysis.semi.lambda_predicted ? rational(*l.analysis.semi.lambda_predicted) : Json(nullptr);
    j["radius"] = o.radius;
    j["samples"] = o.samples;
    j["seed"] = seed;
    j["evaluations"] = r.evaluations;
    Json arg = Json::array();
    for (auto z : r.argmin) arg.push_back(complex_pair(z));
    j["argmin"] = arg;
    emit(j, c, out);
    return kOk;
}

int cmd_dimension(const RunConfig &c, std::ostream &out) {
    const std::uint64_t seed = resolve_seed(c);
    Loaded l = load(c, true);
    MeasureCloud cloud = sample(c, l.doc.map, seed, 20000);
    LyapunovNorm m = lyapunov_norm(l.doc.map, cloud, c.orbit_length);
    DimensionReport d = dimension_report(l.analysis.semi, m.m_hat, m.used, c.orbit_length);
    Json j;
    j["seed"] = seed;
    j["samples"] = cloud.points.size();
    j["skipped"] = m.skipped;
    j["orbit_length"] = c.orbit_length;
    j["m_hat"] = d.m_hat;
    j["m_hat_is_lower_estimate"] = true;
    j["block_sizes"] = d.block_sizes;
    j["a_bounds"] = d.a_bounds;
    j["mu_bound"] = d.mu_bound;
    j["identity_error"] = d.identity_error;
    if (c.holder) {
        HolderOptions ho;
        ho.seed = seed;
        HolderFit h = holder_diagnostic(l.analysis.semi, c.index, cloud, ho);
        Json hj;
        hj["index"] = c.index;
        hj["slope"] = h.slope;
        hj["ci95"] = Json::array({h.ci_low, h.ci_high});
        hj["used"] = h.used;
        hj["a_bound"] = d.a_bounds.at(c.index - 1);
        j["holder"] = hj;
    } else {
        j["holder"] = nullptr;
    }
    emit(j, c, out);
    return kOk;
}

int exit_code(ErrorCode code) {
    switch (code) {
    case ErrorCode::MalformedMap:
    case ErrorCode::MalformedInput:
    case ErrorCode::InvalidPi:
    case ErrorCode::UnknownVariable:
    case ErrorCode::BadExponent:
    case ErrorCode::UnbalancedParens:
    case ErrorCode::SyntaxError: return kValidation;
    case ErrorCode::Indeterminate:
    case ErrorCode::TooManyIndeterminate: return kIndeterminate;
    default: return kFailure;
    }
}

void add_map(CLI::App *sub, RunConfig &c) { sub->add_option("map", c.map_path, "Map file")->required(); }

void add_orbit(CLI::App *sub, RunConfig &c) {
    sub->add_option("--max-n", c.max_n, "Orbit length cap");
    sub->add_option("--escape-ell", c.escape_ell, "Escape threshold on log|z|");
    sub->add_option("--bound-ell", c.bound_ell, "Boundedness threshold on log|z|");
    sub->add_option("--precision-cap", c.precision_cap, "Maximum working precision in bits");
    sub->add_option("--tol", c.tol, "Convergence / residual tolerance");
}

void add_slice(CLI::App *sub, RunConfig &c) {
    sub->add_option("--res", c.res, "Grid resolution NX NY")->expected(2);
    sub->add_option("--coord", c.coord, "Scanned coordinate (1-based)");
    sub->add_option("--center", c.center, "Slice centre a+bi");
    sub->add_option("--width", c.width, "Slice width");
    sub->add_option("--height", c.height, "Slice height");
    sub->add_option("--fix", c.fix, "Fixed coordinate zj=a+bi (repeatable)")->expected(1)->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    sub->add_option("--index", c.index, "Green index i (1-based)");
}

void add_common(CLI::App *sub, RunConfig &c) {
    sub->add_option("--pi", c.pi, "Blockwise exponents of pi, e.g. 2,3");
    sub->add_option("--json", c.json_path, "Also write the JSON summary here");
}

void add_seed(CLI::App *sub, RunConfig &c) {
    sub->add_option("--seed", c.seed, "64-bit seed");
    sub->add_flag("--entropy", c.entropy, "Draw the seed from the system entropy source");
}

} // namespace

Rgb basin_colour(std::size_t index) {
    static constexpr Rgb table[8] = {{230, 25, 75},  {60, 180, 75},  {0, 130, 200},  {255, 225, 25},
                                     {245, 130, 48}, {145, 30, 180}, {70, 240, 240}, {240, 50, 230}};
    return table[(index - 1) % 8];
}

std::string format_json(const Json &j) {
    std::string out;
    auto scalar_array = [](const Json &a) {
        return std::all_of(a.begin(), a.end(), [](const Json &e) { return !e.is_structured(); });
    };
    auto rec = [&](auto &&self, const Json &v, std::size_t indent) -> void {
        const std::string pad(indent + 2, ' ');
        if (v.is_object() && !v.empty()) {
            out += "{\n";
            bool first = true;
            for (const auto &[key, val] : v.items()) {
                if (!first) out += ",\n";
                first = false;
                out += pad + Json(key).dump() + ": ";
                self(self, val, indent + 2);
            }
            out += "\n" + std::string(indent, ' ') + "}";
        } else if (v.is_array() && !v.empty() && !scalar_array(v)) {
            out += "[\n";
            for (std::size_t q = 0; q < v.size(); ++q) {
                if (q) out += ",\n";
                out += pad;
                self(self, v[q], indent + 2);
            }
            out += "\n" + std::string(indent, ' ') + "]";
        } else if (v.is_array()) {
            out += "[";
            for (std::size_t q = 0; q < v.size(); ++q) out += (q ? "," : "") + v[q].dump();
            out += "]";
        } else {
            out += v.dump();
        }
    };
    rec(rec, j, 0);
    return out;
}

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
    CLI::App app{"Regularity, escape rates, Green functions and equilibrium measures of polynomial maps"};
    app.require_subcommand(1);
    RunConfig c;

    auto *analyze_cmd = app.add_subcommand("analyze", "Regularity report as JSON");
    add_map(analyze_cmd, c);
    add_common(analyze_cmd, c);

    auto *classify_cmd = app.add_subcommand("classify", "Basin grid on a slice: PPM image and JSON summary");
    add_map(classify_cmd, c);
    add_common(classify_cmd, c);
    add_orbit(classify_cmd, c);
    add_slice(classify_cmd, c);
    classify_cmd->add_option("--out", c.out_path, "PPM output path");

    auto *green_cmd = app.add_subcommand("green", "Green field on a slice: CSV and PGM");
    add_map(green_cmd, c);
    add_common(green_cmd, c);
    add_orbit(green_cmd, c);
    add_slice(green_cmd, c);
    green_cmd->add_option("--out", c.out_path, "CSV output path");
    green_cmd->add_option("--pgm", c.pgm_path, "PGM output path");

    auto *measure_cmd = app.add_subcommand("measure", "Equilibrium cloud: CSV and optional density PGM");
    add_map(measure_cmd, c);
    add_common(measure_cmd, c);
    add_seed(measure_cmd, c);
    add_orbit(measure_cmd, c);
    add_slice(measure_cmd, c);
    measure_cmd->add_option("--samples", c.samples, "Number of cloud points");
    measure_cmd->add_option("--burn", c.burn, "Burn-in steps per chain");
    measure_cmd->add_option("--out", c.out_path, "CSV output path");
    measure_cmd->add_option("--pgm", c.pgm_path, "Density PGM output path (uses the slice flags)");

    auto *degree_cmd = app.add_subcommand("degree", "Topological degree by counting preimages");
    add_map(degree_cmd, c);
    add_common(degree_cmd, c);
    add_seed(degree_cmd, c);
    degree_cmd->add_option("--trials", c.trials, "Number of random targets");
    degree_cmd->add_option("--tol", c.tol, "Residual tolerance");

    auto *loja_cmd = app.add_subcommand("loja", "Lojasiewicz exponent estimate");
    add_map(loja_cmd, c);
    add_common(loja_cmd, c);
    add_seed(loja_cmd, c);
    loja_cmd->add_option("--samples", c.samples, "Random sphere samples");
    loja_cmd->add_option("--radius", c.radius, "Sphere radius (at least 1e4)");
    loja_cmd->add_option("--precision-cap", c.precision_cap, "Maximum working precision in bits");

    auto *dimension_cmd = app.add_subcommand("dimension", "Lyapunov norm and dimension bounds");
    add_map(dimension_cmd, c);
    add_common(dimension_cmd, c);
    add_seed(dimension_cmd, c);
    dimension_cmd->add_option("--samples", c.samples, "Number of cloud points");
    dimension_cmd->add_option("--burn", c.burn, "Burn-in steps per chain");
    dimension_cmd->add_option("--n", c.orbit_length, "Orbit length for the Jacobian product");
    dimension_cmd->add_option("--tol", c.tol, "Preimage residual tolerance");
    dimension_cmd->add_option("--index", c.index, "Green index for the Holder fit");
    dimension_cmd->add_flag("--holder", c.holder, "Also fit the Holder exponent of G_index");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp &) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError &e) {
        err << "error: " << e.what() << "\n";
        return kValidation;
    }

    try {
        if (*analyze_cmd) return cmd_analyze(c, out);
        if (*classify_cmd) return cmd_classify(c, out);
        if (*green_cmd) return cmd_green(c, out);
        if (*measure_cmd) return cmd_measure(c, out);
        if (*degree_cmd) return cmd_degree(c, out);
        if (*loja_cmd) return cmd_loja(c, out);
        if (*dimension_cmd) return cmd_dimension(c, out);
    } catch (const Error &e) {
        err << "error: " << to_string(e.code()) << ": " << e.what() << "\n";
        return exit_code(e.code());
    } catch (const std::exception &e) {
        err << "error: " << e.what() << "\n";
        return kFailure;
    }
    return kValidation;
}

} // namespace polydyn::cli
