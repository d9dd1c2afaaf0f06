#pragma once

// Minimal RAII wrapper over mpfr_t, enough arithmetic for scaled evaluation.

#include <utility>

#include <gmpxx.h>
#include <mpfr.h>

namespace polydyn::detail {

class BigFloat {
  public:
    explicit BigFloat(unsigned bits, double x = 0.0) {
        mpfr_init2(v_, static_cast<mpfr_prec_t>(bits));
        mpfr_set_d(v_, x, MPFR_RNDN);
    }
    BigFloat(unsigned bits, const mpq_class &q) {
        mpfr_init2(v_, static_cast<mpfr_prec_t>(bits));
        mpfr_set_q(v_, q.get_mpq_t(), MPFR_RNDN);
    }
    BigFloat(const BigFloat &o) {
        mpfr_init2(v_, mpfr_get_prec(o.v_));
        mpfr_set(v_, o.v_, MPFR_RNDN);
    }
    BigFloat(BigFloat &&o) noexcept {
        mpfr_init2(v_, MPFR_PREC_MIN);
        mpfr_swap(v_, o.v_);
    }
    BigFloat &operator=(const BigFloat &o) {
        if (this != &o) {
            mpfr_set_prec(v_, mpfr_get_prec(o.v_));
            mpfr_set(v_, o.v_, MPFR_RNDN);
        }
        return *this;
    }
    BigFloat &operator=(BigFloat &&o) noexcept {
        mpfr_swap(v_, o.v_);
        return *this;
    }
    ~BigFloat() { mpfr_clear(v_); }

    unsigned bits() const { return static_cast<unsigned>(mpfr_get_prec(v_)); }
    double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
    bool is_zero() const { return mpfr_zero_p(v_) != 0; }

    friend BigFloat operator+(const BigFloat &a, const BigFloat &b) {
        BigFloat r(a.bits());
        mpfr_add(r.v_, a.v_, b.v_, MPFR_RNDN);
        return r;
    }
    friend BigFloat operator-(const BigFloat &a, const BigFloat &b) {
        BigFloat r(a.bits());
        mpfr_sub(r.v_, a.v_, b.v_, MPFR_RNDN);
        return r;
    }
    friend BigFloat operator*(const BigFloat &a, const BigFloat &b) {
        BigFloat r(a.bits());
        mpfr_mul(r.v_, a.v_, b.v_, MPFR_RNDN);
        return r;
    }
    friend BigFloat operator/(const BigFloat &a, const BigFloat &b) {
        BigFloat r(a.bits());
        mpfr_div(r.v_, a.v_, b.v_, MPFR_RNDN);
        return r;
    }
    friend BigFloat operator-(const BigFloat &a) {
        BigFloat r(a.bits());
        mpfr_neg(r.v_, a.v_, MPFR_RNDN);
        return r;
    }
    BigFloat &operator+=(const BigFloat &b) {
        mpfr_add(v_, v_, b.v_, MPFR_RNDN);
        return *this;
    }
    friend bool operator<(const BigFloat &a, const BigFloat &b) { return mpfr_less_p(a.v_, b.v_) != 0; }

    friend BigFloat exp(const BigFloat &a) {
        BigFloat r(a.bits());
        mpfr_exp(r.v_, a.v_, MPFR_RNDN);
        return r;
    }
    friend BigFloat log(const BigFloat &a) {
        BigFloat r(a.bits());
        mpfr_log(r.v_, a.v_, MPFR_RNDN);
        return r;
    }
    friend BigFloat sqrt(const BigFloat &a) {
        BigFloat r(a.bits());
        mpfr_sqrt(r.v_, a.v_, MPFR_RNDN);
        return r;
    }
    friend BigFloat hypot(const BigFloat &a, const BigFloat &b) {
        BigFloat r(a.bits());
        mpfr_hypot(r.v_, a.v_, b.v_, MPFR_RNDN);
        return r;
    }

  private:
    mpfr_t v_;
};

} // namespace polydyn::detail
