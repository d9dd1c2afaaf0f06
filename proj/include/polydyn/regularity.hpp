#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "polydyn/errors.hpp"
#include "polydyn/polynomial.hpp"

namespace polydyn {

enum class Verdict { Pass, Fail, Indeterminate };
const char *to_string(Verdict v);

/// Settings of the sphere-minimum certificate used when a level system has
/// three or more free variables.
struct CertificateOptions {
    double epsilon = 1e-6;
    double delta = 1e-10;
    std::size_t starts = 64;
    std::size_t steps = 200;
    std::uint64_t seed = 0x5EED5EEDULL;
};

/// Outcome for one level i of the s-regularity test. The level system is
/// {P^+_(1) = ... = P^+_(i) = 0} (generators of I_i) intersected with
/// {z_(>i) = 0} (generators of X_i).
struct LevelVerdict {
    std::size_t level = 0;
    Verdict verdict = Verdict::Indeterminate;
    /// "exact", "exact-resultant", "exact-gcd", "exact-dimension" or "numerical-certificate".
    std::string method;
    /// 1 for exact methods; for the certificate, the fraction of starts that
    /// reached the best minimum within a factor of two.
    double confidence = 1.0;
    /// Achieved min over the unit sphere of max_j |F_j| (certificate only, else NaN).
    double sphere_min;
    std::vector<Polynomial> i_generators;
    std::vector<Polynomial> x_generators;
    /// A point of the unit sphere where the system (nearly) vanishes, on failure.
    std::vector<Complex> witness;
};

/// The map in block order: conjugated by blocks.permutation when needed.
PolynomialMap in_block_order(const PolynomialMap &map, const BlockStructure &blocks);

/// Levels 1..s. `map` is in original coordinates; `blocks` from block_structure(map).
std::vector<LevelVerdict> check_s_regularity(const PolynomialMap &map, const BlockStructure &blocks, std::size_t s,
                                             const CertificateOptions &options = {});

/// Same test for a map already in block order with an explicit partition
/// (used for f o pi, whose block degrees may tie).
std::vector<LevelVerdict> check_levels(const PolynomialMap &block_map, const std::vector<std::size_t> &l,
                                       const std::vector<int> &d, std::size_t s,
                                       const CertificateOptions &options = {});

/// 1-regularity. For k = 2 with two blocks: the coefficient of z1^{d1} in P1
/// is nonzero. Otherwise level 1 of check_s_regularity must pass.
bool check_algebraic_stability(const PolynomialMap &map, const BlockStructure &blocks,
                               const CertificateOptions &options = {});

using ExponentPair = std::pair<unsigned, unsigned>;

struct NewtonDiagram {
    std::vector<std::set<ExponentPair>> sigma;
};

/// The line p*m + q*n = r, slope -p/q, gcd(p, q) = 1.
struct SupportLine {
    long p = 1;
    long q = 1;
    long r = 0;
    friend bool operator==(const SupportLine &, const SupportLine &) = default;
};

/// k = 2 only.
NewtonDiagram newton_diagram(const PolynomialMap &map);
/// Steepest line through (d1, 0) lying above Sigma_1 u Sigma_2. Throws
/// NotAlgebraicallyStable if (d1, 0) is not in Sigma_1 and SlopeZero when every
/// point has n = 0.
SupportLine support_line_D1(const NewtonDiagram &diagram, unsigned d1);
/// Parallel to `slope`, supporting Sigma_2 from above.
SupportLine support_line_D2(const NewtonDiagram &diagram, const SupportLine &slope);
/// Terms of p whose exponents lie on the line.
Polynomial restrict_to_line(const Polynomial &p, const SupportLine &line);

struct NewtonData {
    SupportLine d1;
    SupportLine d2;
    Polynomial p1_d1;
    Polynomial p2_d2;
    /// Resultant of the pulled-back restricted polynomials; zero means a shared component.
    GaussianRational resultant;
    bool verdict = false;
};

struct RegularityReport {
    BlockStructure blocks;
    /// The input map in block order.
    PolynomialMap block_map;
    bool alg_stable = false;
    /// Largest s with levels 1..s passing for the tested map (f, or f o pi).
    std::size_t s_max = 0;
    std::vector<LevelVerdict> levels;
    /// Verdict of the operation that produced the report.
    bool verdict = false;
    std::optional<ErrorCode> failure;
    std::optional<NewtonData> newton;
    /// Blockwise exponents of pi.
    std::optional<std::vector<unsigned>> pi;
    /// f o pi in block order, when pi is present.
    std::optional<PolynomialMap> composed;
    /// alpha_i = d_i^pi / p_i; the block degrees d_i when no pi is used.
    std::vector<mpq_class> alpha;
    std::optional<mpq_class> d_t_predicted;
    std::optional<mpq_class> lambda_predicted;
    /// "product-formula", "affine-family" or "unpredicted".
    std::string prediction_basis = "unpredicted";
};

/// Newton-diagram semi-regularity test for k = 2 with block degrees d1 > d2 >= 1. Failures are
/// reported through `failure` (NotAlgebraicallyStable, SlopeZero or
/// SharedComponent) together with the partial Newton data. Throws
/// MalformedInput outside the precondition.
RegularityReport semi_regularity_2d(const PolynomialMap &map);

/// Tests whether f o pi is s-regular; pexp is blockwise and non-decreasing.
RegularityReport check_pi_regularity(const PolynomialMap &map, const std::vector<unsigned> &pexp, std::size_t s,
                                     const CertificateOptions &options = {});

struct Invariants {
    std::vector<mpq_class> alpha;
    std::optional<mpq_class> d_t;
    std::optional<mpq_class> lambda;
    std::string basis = "unpredicted";
};

/// Product formula d_t = prod alpha_i^{l_i - l_{i-1}}, lambda = alpha_m when
/// alpha_m > 1; for alpha_m = 1 only the family (P(z), a z1 + b z2) with
/// |b| > 1, deg P >= 2 and a z1^{deg P} term is predicted.
Invariants predict_invariants(const RegularityReport &report);

/// True for (P(z), a z1 + b z2) with |b| > 1, deg P = d >= 2 and the z1^d
/// coefficient of P nonzero.
bool is_affine_family(const PolynomialMap &block_map);

/// Full classification: regularity levels, the 2-D Newton construction when
/// f is not regular (or always for k = 2, m = 2), and a user pi for k >= 3.
struct AnalysisOptions {
    CertificateOptions certificate;
    std::optional<std::vector<unsigned>> pi;
};

struct Analysis {
    RegularityReport regular;
    bool is_regular = false;
    /// Semi-regularity report; equal to `regular` with trivial pi when the
    /// map is regular and no Newton construction applies.
    RegularityReport semi;
    bool is_semi_regular = false;
    std::optional<ErrorCode> reason;
};

Analysis analyze(const PolynomialMap &map, const AnalysisOptions &options = {});

/// Pullback factor of the current T_j under f: for j in block i,
/// alpha_i^{j - l_{i-1} + 1} * prod_{r < i} alpha_r^{l_r - l_{r-1}} (j 1-based).
std::vector<mpq_class> predicted_pullback_factors(const RegularityReport &report);

} // namespace polydyn
