#include "polydyn/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "polydyn/errors.hpp"
#include "polydyn/parallel.hpp"
#include "polydyn/rng.hpp"

namespace polydyn {

void SliceSpec::validate(std::size_t k) const {
    if (nx < 2 || ny < 2) throw Error(ErrorCode::MalformedInput, "slice resolution must be at least 2x2");
    if (!(width > 0.0) || !(height > 0.0)) throw Error(ErrorCode::MalformedInput, "slice width and height must be positive");
    if (fixed.size() != k) throw Error(ErrorCode::MalformedInput, "slice needs a value for every coordinate");
    if (coord >= k) throw Error(ErrorCode::MalformedInput, "slice coordinate out of range");
}

Complex SliceSpec::pixel(std::size_t ix, std::size_t iy) const {
    return center + Complex(-0.5 * width + hx() * static_cast<double>(ix), 0.5 * height - hy() * static_cast<double>(iy));
}

std::vector<Complex> SliceSpec::point(std::size_t ix, std::size_t iy) const {
    std::vector<Complex> z = fixed;
    z[coord] = pixel(ix, iy);
    return z;
}

SliceDynamics::SliceDynamics(const RegularityReport &report)
    : map(report.block_map), alpha(alpha_values(report)), permutation(report.blocks.permutation) {}

std::vector<Complex> SliceDynamics::to_block(std::span<const Complex> z) const {
    std::vector<Complex> out(z.size());
    for (std::size_t j = 0; j < z.size(); ++j) out[j] = z[permutation[j]];
    return out;
}

namespace {

void check_index(const SliceDynamics &d, std::size_t i) {
    if (i < 1 || i > d.alpha.size()) throw Error(ErrorCode::MalformedInput, "Green index out of range");
}

} // namespace

GreenField green_field(const RegularityReport &report, std::size_t i, const SliceSpec &slice, const GreenParams &params) {
    SliceDynamics d(report);
    check_index(d, i);
    slice.validate(d.map.dim());
    GreenField field;
    field.slice = slice;
    field.index = i;
    field.values.resize(slice.nx * slice.ny);
    parallel_for(slice.ny, [&](std::size_t iy) {
        for (std::size_t ix = 0; ix < slice.nx; ++ix) {
            auto z = d.to_block(slice.point(ix, iy));
            field.values[iy * slice.nx + ix] = green_value(d.map, d.alpha, i, z, params);
        }
    });
    for (const auto &v : field.values) {
        if (v.kind == GreenValue::Kind::Indeterminate || v.kind == GreenValue::Kind::NonConvergent) ++field.indeterminate;
        if (v.kind == GreenValue::Kind::Infinite) ++field.infinite;
    }
    return field;
}

BasinGrid basin_grid(const RegularityReport &report, const SliceSpec &slice, const OrbitParams &params) {
    SliceDynamics d(report);
    slice.validate(d.map.dim());
    BasinGrid grid;
    grid.slice = slice;
    grid.labels.resize(slice.nx * slice.ny);
    parallel_for(slice.ny, [&](std::size_t iy) {
        for (std::size_t ix = 0; ix < slice.nx; ++ix) {
            auto z = d.to_block(slice.point(ix, iy));
            grid.labels[iy * slice.nx + ix] = classify(d.map, d.alpha, z, params);
        }
    });
    for (const auto &l : grid.labels)
        if (l.kind == BasinLabel::Kind::Indeterminate) ++grid.indeterminate;
    return grid;
}

DensityGrid laplacian_density(const GreenField &field) {
    if (field.indeterminate_fraction() >= kMaxIndeterminateFraction)
        throw Error(ErrorCode::TooManyIndeterminate, "too many indeterminate pixels for a density");
    const std::size_t nx = field.slice.nx, ny = field.slice.ny;
    DensityGrid out;
    out.nx = nx;
    out.ny = ny;
    out.hx = field.slice.hx();
    out.hy = field.slice.hy();
    out.values.assign(nx * ny, 0.0);
    out.valid.assign(nx * ny, false);
    const double cell = out.hx * out.hy;
    auto finite = [&](std::size_t ix, std::size_t iy) { return field.at(ix, iy).finite(); };
    for (std::size_t iy = 1; iy + 1 < ny; ++iy)
        for (std::size_t ix = 1; ix + 1 < nx; ++ix) {
            if (!finite(ix, iy) || !finite(ix - 1, iy) || !finite(ix + 1, iy) || !finite(ix, iy - 1) ||
                !finite(ix, iy + 1))
                continue;
            const double c = field.at(ix, iy).value;
            const double lap = (field.at(ix - 1, iy).value + field.at(ix + 1, iy).value - 2.0 * c) / (out.hx * out.hx) +
                               (field.at(ix, iy - 1).value + field.at(ix, iy + 1).value - 2.0 * c) / (out.hy * out.hy);
            const double raw = lap / (2.0 * std::numbers::pi);
            const std::size_t k = iy * nx + ix;
            out.valid[k] = true;
            if (raw < 0.0) {
                out.min_raw = std::min(out.min_raw, raw);
                out.negative_mass -= raw * cell;
            } else {
                out.values[k] = raw;
                out.total_mass += raw * cell;
            }
        }
    return out;
}

LyapunovNorm lyapunov_norm(const PolynomialMap &map, const MeasureCloud &cloud, std::size_t n) {
    if (cloud.points.empty()) throw Error(ErrorCode::MalformedInput, "empty cloud");
    if (n < 10) throw Error(ErrorCode::MalformedInput, "orbit length must be at least 10");
    const PolynomialMatrix jac = jacobian(map);
    const std::size_t k = map.dim();
    std::vector<double> logs(cloud.points.size(), std::numeric_limits<double>::quiet_NaN());
    parallel_for(cloud.points.size(), [&](std::size_t p) {
        std::vector<Complex> z = cloud.points[p];
        std::vector<std::vector<Complex>> m(k, std::vector<Complex>(k, 0.0));
        for (std::size_t j = 0; j < k; ++j) m[j][j] = 1.0;
        double total = 0.0;
        for (std::size_t step = 0; step < n; ++step) {
            auto J = eval_matrix(jac, z);
            std::vector<std::vector<Complex>> next(k, std::vector<Complex>(k, 0.0));
            for (std::size_t r = 0; r < k; ++r)
                for (std::size_t c = 0; c < k; ++c)
                    for (std::size_t t = 0; t < k; ++t) next[r][c] += J[r][t] * m[t][c];
            const double s = operator_norm(next);
            if (!(s > 0.0) || !std::isfinite(s)) return;
            total += std::log(s);
            for (auto &row : next)
                for (auto &x : row) x /= s;
            m = std::move(next);
            z = map.eval(z);
        }
        logs[p] = total / static_cast<double>(n);
    });
    LyapunovNorm out;
    out.n = n;
    double best = -std::numeric_limits<double>::infinity();
    for (double l : logs) {
        if (std::isnan(l)) {
            ++out.skipped;
            continue;
        }
        ++out.used;
        best = std::max(best, l);
    }
    out.m_hat = out.used > 0 ? std::exp(best) : std::numeric_limits<double>::quiet_NaN();
    return out;
}

double pushforward_tv(const PolynomialMap &map, const MeasureCloud &cloud, std::size_t bins) {
    if (cloud.points.empty() || bins == 0) throw Error(ErrorCode::MalformedInput, "empty cloud or histogram");
    if (map.dim() < 2) throw Error(ErrorCode::MalformedInput, "projection needs two coordinates");
    std::vector<std::vector<Complex>> image(cloud.points.size());
    parallel_for(cloud.points.size(), [&](std::size_t p) { image[p] = map.eval(cloud.points[p]); });

    double lo[2] = {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    double hi[2] = {-lo[0], -lo[1]};
    for (const std::vector<std::vector<Complex>> *set : {&cloud.points, static_cast<const std::vector<std::vector<Complex>> *>(&image)})
        for (const auto &z : *set)
            for (std::size_t a = 0; a < 2; ++a) {
                if (!std::isfinite(z[a].real())) continue;
                lo[a] = std::min(lo[a], z[a].real());
                hi[a] = std::max(hi[a], z[a].real());
            }
    auto histogram = [&](const std::vector<std::vector<Complex>> &set) {
        std::vector<double> h(bins * bins, 0.0);
        double total = 0.0;
        for (const auto &z : set) {
            std::size_t idx[2];
            bool ok = true;
            for (std::size_t a = 0; a < 2; ++a) {
                const double x = z[a].real();
                if (!std::isfinite(x)) ok = false;
                const double span = hi[a] - lo[a];
                const double t = span > 0.0 ? (x - lo[a]) / span : 0.0;
                idx[a] = std::min(bins - 1, static_cast<std::size_t>(std::max(0.0, t) * static_cast<double>(bins)));
            }
            if (!ok) continue;
            h[idx[1] * bins + idx[0]] += 1.0;
            total += 1.0;
        }
        for (auto &v : h) v /= total;
        return h;
    };
    const auto a = histogram(cloud.points);
    const auto b = histogram(image);
    double tv = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) tv += std::abs(a[k] - b[k]);
    return 0.5 * tv;
}

DimensionReport dimension_report(const RegularityReport &report, double m_hat, std::size_t samples,
                                 std::size_t orbit_length) {
    if (!(m_hat > 1.0 + 1e-9)) throw Error(ErrorCode::MBelowOne, "M_hat must exceed 1");
    const std::vector<double> alpha = alpha_values(report);
    DimensionReport out;
    out.m_hat = m_hat;
    out.samples = samples;
    out.orbit_length = orbit_length;
    const double log_m = std::log(m_hat);
    out.log_d_t = 0.0;
    for (std::size_t i = 0; i < alpha.size(); ++i) {
        out.block_sizes.push_back(report.blocks.block_size(i));
        out.a_bounds.push_back(std::log(alpha[i]) / log_m);
        out.log_d_t += static_cast<double>(out.block_sizes[i]) * std::log(alpha[i]);
    }
    // An exact degree, when known, is preferred over the product of rounded rates.
    if (report.d_t_predicted) out.log_d_t = std::log(report.d_t_predicted->get_d());
    out.mu_bound = out.log_d_t / log_m;
    double sum = 0.0;
    for (std::size_t i = 0; i < alpha.size(); ++i) sum += static_cast<double>(out.block_sizes[i]) * out.a_bounds[i];
    out.identity_error = std::abs(out.mu_bound - sum);
    return out;
}

HolderFit holder_diagnostic(const RegularityReport &report, std::size_t i, const MeasureCloud &cloud,
                            const HolderOptions &options) {
    SliceDynamics d(report);
    check_index(d, i);
    if (cloud.points.empty()) throw Error(ErrorCode::InsufficientSamples, "empty cloud");
    if (!(options.r_min > 0.0) || !(options.r_max >= options.r_min))
        throw Error(ErrorCode::MalformedInput, "shell radii must satisfy 0 < r_min <= r_max");

    const std::size_t stride = std::max<std::size_t>(1, cloud.points.size() / std::max<std::size_t>(1, options.max_cloud));
    std::vector<const std::vector<Complex> *> ref;
    for (std::size_t p = 0; p < cloud.points.size(); p += stride) ref.push_back(&cloud.points[p]);

    std::vector<std::vector<Complex>> shell(options.n_samples);
    Rng rng(options.seed);
    for (auto &z : shell) {
        const auto &base = cloud.points[rng.below(cloud.points.size())];
        std::vector<Complex> dir(base.size());
        double norm = 0.0;
        for (auto &c : dir) {
            c = rng.complex_normal();
            norm += std::norm(c);
        }
        const double r = options.r_min * std::pow(options.r_max / options.r_min, rng.uniform());
        z = base;
        for (std::size_t j = 0; j < z.size(); ++j) z[j] += dir[j] * (r / std::sqrt(norm));
    }

    std::vector<double> xs(shell.size(), std::numeric_limits<double>::quiet_NaN()), ys(shell.size());
    parallel_for(shell.size(), [&](std::size_t s) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto *q : ref) {
            double dist = 0.0;
            for (std::size_t j = 0; j < q->size(); ++j) dist += std::norm(shell[s][j] - (*q)[j]);
            best = std::min(best, dist);
        }
        GreenValue g = green_value(d.map, d.alpha, i, d.to_block(shell[s]), options.green);
        if (g.finite() && g.value > 0.0 && g.value < 1.0 && best > 0.0) {
            xs[s] = 0.5 * std::log(best);
            ys[s] = std::log(g.value);
        }
    });

    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    std::size_t n = 0;
    for (std::size_t s = 0; s < xs.size(); ++s) {
        if (std::isnan(xs[s])) continue;
        ++n;
        sx += xs[s];
        sy += ys[s];
        sxx += xs[s] * xs[s];
        sxy += xs[s] * ys[s];
    }
    if (n < 10) throw Error(ErrorCode::InsufficientSamples, "fewer than 10 shell samples with 0 < G < 1");
    const double nn = static_cast<double>(n);
    const double vx = sxx - sx * sx / nn;
    if (!(vx > 0.0)) throw Error(ErrorCode::InsufficientSamples, "shell samples have no spread in distance");
    HolderFit fit;
    fit.used = n;
    fit.slope = (sxy - sx * sy / nn) / vx;
    fit.intercept = (sy - fit.slope * sx) / nn;
    double sse = 0.0;
    for (std::size_t s = 0; s < xs.size(); ++s) {
        if (std::isnan(xs[s])) continue;
        const double e = ys[s] - fit.intercept - fit.slope * xs[s];
        sse += e * e;
    }
    fit.stderr_slope = n > 2 ? std::sqrt(sse / (nn - 2.0) / vx) : 0.0;
    fit.ci_low = fit.slope - 1.96 * fit.stderr_slope;
    fit.ci_high = fit.slope + 1.96 * fit.stderr_slope;
    return fit;
}

} // namespace polydyn
