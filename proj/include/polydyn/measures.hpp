#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "polydyn/dynamics.hpp"
#include "polydyn/preimage.hpp"
#include "polydyn/regularity.hpp"

namespace polydyn {

/// A complex line through `fixed` in which coordinate `coord` (0-based) ranges
/// over a rectangle. Row 0 is the top edge (largest imaginary part).
struct SliceSpec {
    std::size_t coord = 0;
    Complex center{0.0, 0.0};
    double width = 4.0;
    double height = 4.0;
    /// Values of the other coordinates; the entry at `coord` is ignored.
    std::vector<Complex> fixed;
    std::size_t nx = 64;
    std::size_t ny = 64;

    /// Throws MalformedInput unless nx, ny >= 2, width, height > 0 and
    /// coord < fixed.size() == k.
    void validate(std::size_t k) const;
    double hx() const { return width / static_cast<double>(nx - 1); }
    double hy() const { return height / static_cast<double>(ny - 1); }
    Complex pixel(std::size_t ix, std::size_t iy) const;
    std::vector<Complex> point(std::size_t ix, std::size_t iy) const;
};

/// The compiled block-ordered map of a report together with its rates.
/// Points are given in the input coordinates and permuted internally.
struct SliceDynamics {
    explicit SliceDynamics(const RegularityReport &report);

    CompiledMap map;
    std::vector<double> alpha;
    std::vector<std::size_t> permutation;

    std::vector<Complex> to_block(std::span<const Complex> z) const;
};

struct GreenField {
    SliceSpec slice;
    /// 1-based Green index.
    std::size_t index = 1;
    /// Row-major, nx * ny.
    std::vector<GreenValue> values;
    std::size_t indeterminate = 0;
    std::size_t infinite = 0;

    const GreenValue &at(std::size_t ix, std::size_t iy) const { return values[iy * slice.nx + ix]; }
    double indeterminate_fraction() const { return static_cast<double>(indeterminate) / static_cast<double>(values.size()); }
};

/// Per-pixel green_value. NonConvergent pixels are counted as indeterminate.
GreenField green_field(const RegularityReport &report, std::size_t i, const SliceSpec &slice,
                       const GreenParams &params = {});

struct BasinGrid {
    SliceSpec slice;
    std::vector<BasinLabel> labels;
    std::size_t indeterminate = 0;

    const BasinLabel &at(std::size_t ix, std::size_t iy) const { return labels[iy * slice.nx + ix]; }
};

BasinGrid basin_grid(const RegularityReport &report, const SliceSpec &slice, const OrbitParams &params = {});

struct DensityGrid {
    std::size_t nx = 0, ny = 0;
    double hx = 0.0, hy = 0.0;
    /// Clamped at 0; zero where the stencil touches a masked pixel or the edge.
    std::vector<double> values;
    std::vector<bool> valid;
    /// Most negative raw value before clamping (0 if none).
    double min_raw = 0.0;
    /// Integral of the clamped negative part.
    double negative_mass = 0.0;
    /// Integral of the clamped density.
    double total_mass = 0.0;

    double at(std::size_t ix, std::size_t iy) const { return values[iy * nx + ix]; }
};

/// Indeterminate fraction at or above which laplacian_density refuses.
inline constexpr double kMaxIndeterminateFraction = 0.05;

/// Trace density of dd^c G: the 5-point Laplacian divided by 2 pi, so that
/// log|z| has unit mass. Infinite and indeterminate pixels are masked. Throws
/// TooManyIndeterminate.
DensityGrid laplacian_density(const GreenField &field);

struct LyapunovNorm {
    double m_hat = 0.0;
    std::size_t used = 0;
    /// Points whose orbit left the double range within n steps.
    std::size_t skipped = 0;
    std::size_t n = 0;
};

/// max over the cloud of ||D f^n(p)||^{1/n} (operator 2-norm), accumulated
/// with per-step renormalization. Throws MalformedInput for an empty cloud or
/// n < 10.
LyapunovNorm lyapunov_norm(const PolynomialMap &map, const MeasureCloud &cloud, std::size_t n);

/// Total-variation distance between bins x bins histograms of the cloud and
/// of its image under f, both projected to (Re z1, Re z2) over their common
/// bounding box.
double pushforward_tv(const PolynomialMap &map, const MeasureCloud &cloud, std::size_t bins = 32);

struct DimensionReport {
    double m_hat = 0.0;
    /// a_i = log alpha_i / log m_hat.
    std::vector<double> a_bounds;
    /// log d_t / log m_hat.
    double mu_bound = 0.0;
    double log_d_t = 0.0;
    std::vector<std::size_t> block_sizes;
    /// |mu_bound - sum_i size_i a_i|.
    double identity_error = 0.0;
    std::size_t samples = 0;
    std::size_t orbit_length = 0;
};

/// Throws MBelowOne when m_hat <= 1 + 1e-9. A finite cloud underestimates the
/// supremum over K, so mu_bound overestimates the true bound.
DimensionReport dimension_report(const RegularityReport &report, double m_hat, std::size_t samples = 0,
                                 std::size_t orbit_length = 0);

struct HolderOptions {
    std::size_t n_samples = 2000;
    /// Shell radii are log-uniform in [r_min, r_max] around random cloud points.
    double r_min = 1e-2;
    double r_max = 0.3;
    std::uint64_t seed = 1;
    /// The nearest-neighbour search uses at most this many cloud points.
    std::size_t max_cloud = 20000;
    GreenParams green;
};

struct HolderFit {
    double slope = 0.0;
    double intercept = 0.0;
    double stderr_slope = 0.0;
    /// 95% normal-approximation interval for the slope.
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::size_t used = 0;
};

/// Least-squares slope of log G_i against log(distance to the cloud) over
/// shell samples with 0 < G_i < 1. Throws InsufficientSamples below 10 usable
/// samples.
HolderFit holder_diagnostic(const RegularityReport &report, std::size_t i, const MeasureCloud &cloud,
                            const HolderOptions &options = {});

} // namespace polydyn
