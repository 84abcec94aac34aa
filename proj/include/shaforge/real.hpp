#pragma once

#include <gmpxx.h>
#include <mpfr.h>

#include <algorithm>
#include <string>

namespace shaforge {

inline mpfr_prec_t prec_for_digits(long digits) {
    // log2(10) with headroom; MPFR minimum is 2
    return static_cast<mpfr_prec_t>(digits * 3.3219280948873626 + 16);
}

// value-semantic mpfr_t. precision is fixed at construction; binary ops run at
// the wider operand precision, rounding to nearest. all rounding MPFR_RNDN so
// results are a pure function of inputs and precisions.
class Real {
public:
    explicit Real(mpfr_prec_t prec = 64) { mpfr_init2(v_, std::max<mpfr_prec_t>(prec, 2)); mpfr_set_zero(v_, 1); }
    Real(const Real& o) { mpfr_init2(v_, mpfr_get_prec(o.v_)); mpfr_set(v_, o.v_, MPFR_RNDN); }
    Real(Real&& o) noexcept { mpfr_init2(v_, 2); mpfr_swap(v_, o.v_); }
    Real& operator=(const Real& o) {
        if (this != &o) { mpfr_set_prec(v_, mpfr_get_prec(o.v_)); mpfr_set(v_, o.v_, MPFR_RNDN); }
        return *this;
    }
    Real& operator=(Real&& o) noexcept { mpfr_swap(v_, o.v_); return *this; }
    ~Real() { mpfr_clear(v_); }

    static Real of(long x, mpfr_prec_t prec) { Real r(prec); mpfr_set_si(r.v_, x, MPFR_RNDN); return r; }
    static Real of(const mpz_class& x, mpfr_prec_t prec) { Real r(prec); mpfr_set_z(r.v_, x.get_mpz_t(), MPFR_RNDN); return r; }
    static Real of(double x, mpfr_prec_t prec) { Real r(prec); mpfr_set_d(r.v_, x, MPFR_RNDN); return r; }
    static Real parse(const std::string& s, mpfr_prec_t prec) { Real r(prec); mpfr_set_str(r.v_, s.c_str(), 10, MPFR_RNDN); return r; }
    static Real pi(mpfr_prec_t prec) { Real r(prec); mpfr_const_pi(r.v_, MPFR_RNDN); return r; }

    mpfr_prec_t prec() const { return mpfr_get_prec(v_); }
    mpfr_ptr m() { return v_; }
    mpfr_srcptr m() const { return v_; }

    double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
    bool is_zero() const { return mpfr_zero_p(v_) != 0; }
    int sign() const { return mpfr_sgn(v_); }

    // nearest integer (ties to even, per MPFR_RNDN)
    mpz_class round_z() const {
        mpz_class z;
        mpfr_get_z(z.get_mpz_t(), v_, MPFR_RNDN);
        return z;
    }
    mpz_class floor_z() const {
        mpz_class z;
        mpfr_get_z(z.get_mpz_t(), v_, MPFR_RNDD);
        return z;
    }

    // shortest decimal string with `digits` significant digits
    std::string str(int digits = 17) const {
        char* s = nullptr;
        mpfr_asprintf(&s, "%.*Rg", digits, v_);
        std::string out(s);
        mpfr_free_str(s);
        return out;
    }

private:
    mpfr_t v_;

    friend mpfr_prec_t join_prec(const Real& a, const Real& b);
};

inline mpfr_prec_t join_prec(const Real& a, const Real& b) {
    return std::max(mpfr_get_prec(a.m()), mpfr_get_prec(b.m()));
}

#define SHAFORGE_REAL_BINOP(op, fn)                                     \
    inline Real operator op(const Real& a, const Real& b) {             \
        Real r(join_prec(a, b));                                        \
        fn(r.m(), a.m(), b.m(), MPFR_RNDN);                             \
        return r;                                                       \
    }                                                                   \
    inline Real operator op(const Real& a, long b) {                    \
        Real r(a.prec());                                               \
        fn##_si(r.m(), a.m(), b, MPFR_RNDN);                            \
        return r;                                                       \
    }

SHAFORGE_REAL_BINOP(+, mpfr_add)
SHAFORGE_REAL_BINOP(-, mpfr_sub)
SHAFORGE_REAL_BINOP(*, mpfr_mul)
SHAFORGE_REAL_BINOP(/, mpfr_div)
#undef SHAFORGE_REAL_BINOP

inline Real operator-(const Real& a) { Real r(a.prec()); mpfr_neg(r.m(), a.m(), MPFR_RNDN); return r; }
inline Real operator*(long a, const Real& b) { return b * a; }
inline Real operator/(long a, const Real& b) { Real r(b.prec()); mpfr_si_div(r.m(), a, b.m(), MPFR_RNDN); return r; }
inline Real operator-(long a, const Real& b) { Real r(b.prec()); mpfr_si_sub(r.m(), a, b.m(), MPFR_RNDN); return r; }

inline bool operator<(const Real& a, const Real& b) { return mpfr_cmp(a.m(), b.m()) < 0; }
inline bool operator>(const Real& a, const Real& b) { return mpfr_cmp(a.m(), b.m()) > 0; }
inline bool operator<=(const Real& a, const Real& b) { return mpfr_cmp(a.m(), b.m()) <= 0; }
inline bool operator>=(const Real& a, const Real& b) { return mpfr_cmp(a.m(), b.m()) >= 0; }
inline bool operator==(const Real& a, const Real& b) { return mpfr_cmp(a.m(), b.m()) == 0; }

#define SHAFORGE_REAL_UNFN(name, fn)                    \
    inline Real name(const Real& a) {                   \
        Real r(a.prec());                               \
        fn(r.m(), a.m(), MPFR_RNDN);                    \
        return r;                                       \
    }

SHAFORGE_REAL_UNFN(sqrt, mpfr_sqrt)
SHAFORGE_REAL_UNFN(cbrt, mpfr_cbrt)
SHAFORGE_REAL_UNFN(exp, mpfr_exp)
SHAFORGE_REAL_UNFN(log, mpfr_log)
SHAFORGE_REAL_UNFN(abs, mpfr_abs)
SHAFORGE_REAL_UNFN(cos, mpfr_cos)
SHAFORGE_REAL_UNFN(acos, mpfr_acos)
#undef SHAFORGE_REAL_UNFN

inline Real pow_ui(const Real& a, unsigned long e) {
    Real r(a.prec());
    mpfr_pow_ui(r.m(), a.m(), e, MPFR_RNDN);
    return r;
}

inline Real ldexp(const Real& a, long e) {
    Real r(a.prec());
    mpfr_mul_2si(r.m(), a.m(), e, MPFR_RNDN);
    return r;
}

}  // namespace shaforge
