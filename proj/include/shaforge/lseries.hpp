#pragma once

#include <gmpxx.h>

#include "shaforge/ap_engine.hpp"
#include "shaforge/ec_core.hpp"
#include "shaforge/localdata.hpp"
#include "shaforge/real.hpp"

namespace shaforge {

// instrumented arithmetic-geometric mean of two positive reals
Real agm_mean(const Real& a, const Real& b, unsigned* iterations = nullptr);

// roots of the quartic-free model y^2 = 4x^3 + b2 x^2 + 2 b4 x + b6;
// three real roots (e1 > e2 > e3) or one real root and mu +- i nu
struct CubicRoots {
    int real_count = 3;
    Real e1, e2, e3;
    Real mu, nu;
};
CubicRoots period_cubic_roots(const WeierstrassCurve& curve, unsigned digits);

struct RealPeriod {
    Real omega;
    Real c_infty;  // omega times number of connected real components
    int components = 1;
    unsigned agm_iterations = 0;
};
RealPeriod real_period(const WeierstrassCurve& curve, unsigned digits);

// smallest m certifying the truncated sum is within 5*10^-(k+1) of the
// limit, assuming nothing about the curve beyond |a_n| <= n
mpz_class terms_needed(const mpz_class& conductor, unsigned k);

struct TruncationPlan {
    mpz_class m_main;   // terms for the k-digit literal sum
    mpz_class m_sign;   // terms for the functional-equation sign probe
    mpz_class m_total;  // single-pass length, max of the two
    unsigned k = 0;
    unsigned work_digits = 0;
};
TruncationPlan plan_truncation(const mpz_class& conductor, unsigned k);

struct LTruncation {
    Real s_m;      // 2 * sum_{n <= m_main} a_n/n exp(-2 pi n / sqrt N)
    Real l_value;  // (1 + w) * lambda(1) over the full pass
    int w = 1;     // functional-equation sign
    bool w_certain = false;
    mpz_class m_main;
    mpz_class m_pass;
    unsigned work_digits = 0;
};

// single pass over a_n accumulating lambda(x) = sum a_n/n exp(-2 pi n x / sqrt N)
// at x = 1/2, 1, 2; the sign comes from w = (lambda(2)-lambda(1))/(lambda(1)-lambda(1/2)),
// falling back to an x = 3 probe (own longer pass) and finally to w = +1
LTruncation approximate_l1(const WeierstrassCurve& minimal, const GlobalArithData& g,
                           const ApTable& tab, const TruncationPlan& plan, unsigned workers = 1);

}  // namespace shaforge
