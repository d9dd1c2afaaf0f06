#include "polydyn/gaussian_rational.hpp"

#include <cmath>

namespace polydyn {

GaussianRational pow(const GaussianRational &base, unsigned exponent) {
    GaussianRational result(1);
    GaussianRational b = base;
    while (exponent > 0) {
        if (exponent & 1U) result *= b;
        exponent >>= 1U;
        if (exponent > 0) b *= b;
    }
    return result;
}

namespace {

mpq_class exact_rational(double x) {
    // mpq_set_d is exact for finite doubles.
    mpq_class q;
    mpq_set_d(q.get_mpq_t(), x);
    q.canonicalize();
    return q;
}

} // namespace

GaussianRational exact_from_double(std::complex<double> z) {
    return {exact_rational(z.real()), exact_rational(z.imag())};
}

} // namespace polydyn
