#include "shaforge/lseries.hpp"

#include <cmath>

#include "doctest.h"
#include "shaforge/ap_engine.hpp"
#include "shaforge/localdata.hpp"
#include "shaforge/util.hpp"

using namespace shaforge;

namespace {

const WeierstrassCurve k11a1{0, -1, 1, -10, -20};
const WeierstrassCurve kMx{0, 0, 0, -1, 0};
const WeierstrassCurve k37a1{0, 0, 1, -1, 0};
const WeierstrassCurve k389a1{0, 1, 1, -2, 0};

bool close_to(const Real& x, const std::string& want, double tol) {
    Real w = Real::parse(want, 256);
    return std::abs((x - w).to_double()) <= tol;
}

LTruncation run_l(const WeierstrassCurve& c, unsigned k, unsigned workers = 1) {
    auto g = global_data(c);
    auto plan = plan_truncation(g.conductor, k);
    auto tab = build_ap_table(g.minimal, g, plan.m_total.get_ui());
    return approximate_l1(g.minimal, g, tab, plan, workers);
}

// composite simpson over theta in [0, pi/2) for integrands already reduced to
// int_0^inf h(t) dt with h smooth and ~1/t^2 at infinity
double simpson_tan(double (*h)(double, double, double), double A, double B) {
    const int n = 40000;  // even
    const double half_pi = std::acos(-1.0) / 2;
    double step = half_pi / n;
    double sum = 0;
    for (int i = 0; i <= n; ++i) {
        double theta = i * step;
        double t = std::tan(theta);
        double sec2 = 1.0 / (std::cos(theta) * std::cos(theta));
        double f;
        if (i == n) {
            f = 1.0;  // limit of sec^2 h(tan) as theta -> pi/2 for these kernels
        } else {
            f = sec2 * h(t, A, B);
        }
        double wgt = (i == 0 || i == n) ? 1 : (i % 2 ? 4 : 2);
        sum += wgt * f;
    }
    return sum * step / 3;
}

double kernel_two_real(double t, double alpha, double beta) {
    return 1.0 / std::sqrt((t * t + alpha) * (t * t + beta));
}

double kernel_one_real(double t, double c, double nu) {
    double u = t * t + c;
    return 1.0 / std::sqrt(u * u + nu * nu);
}

}  // namespace

TEST_CASE("agm agrees with the library reference and converges fast") {
    mpfr_prec_t prec = prec_for_digits(60);
    uint64_t seed = 77;
    for (int trial = 0; trial < 200; ++trial) {
        double ea = static_cast<double>(splitmix64(seed) % 120) - 60.0;
        double eb = static_cast<double>(splitmix64(seed) % 120) - 60.0;
        double ma = 1.0 + static_cast<double>(splitmix64(seed) % 1000) / 1001.0;
        double mb = 1.0 + static_cast<double>(splitmix64(seed) % 1000) / 1001.0;
        Real a = Real::of(ma * std::pow(2.0, ea / 4), prec);
        Real b = Real::of(mb * std::pow(2.0, eb / 4), prec);
        unsigned it = 0;
        Real mine = agm_mean(a, b, &it);
        Real ref(prec);
        mpfr_agm(ref.m(), a.m(), b.m(), MPFR_RNDN);
        CHECK(std::abs((mine - ref).to_double() / ref.to_double()) < 1e-55);
        CHECK(it <= 40);
    }
    // equal arguments are a fixed point
    Real x = Real::of(mpz_class(7), prec);
    unsigned it = 0;
    CHECK((agm_mean(x, x, &it) - x).to_double() == 0.0);
    CHECK(it <= 1);
    // extreme spread still converges
    Real tiny = Real::parse("1e-22", prec);
    Real one = Real::of(1L, prec);
    Real m1 = agm_mean(one, tiny, &it);
    CHECK(it <= 50);
    Real ref(prec);
    mpfr_agm(ref.m(), one.m(), tiny.m(), MPFR_RNDN);
    CHECK(std::abs((m1 - ref).to_double() / ref.to_double()) < 1e-50);
}

TEST_CASE("period cubic roots split correctly by discriminant sign") {
    auto cr = period_cubic_roots(kMx, 30);
    REQUIRE(cr.real_count == 3);
    CHECK(std::abs(cr.e1.to_double() - 1.0) < 1e-28);
    CHECK(std::abs(cr.e2.to_double() - 0.0) < 1e-28);
    CHECK(std::abs(cr.e3.to_double() + 1.0) < 1e-28);

    auto c1 = period_cubic_roots(k11a1, 30);
    REQUIRE(c1.real_count == 1);
    CHECK(c1.nu.to_double() > 0);
    // root/trace/norm consistency against the monic cubic x^3 + p x^2 + q x + r
    // for the conductor-11 curve: p = -1, q = -10, r = -79/4
    double e1 = c1.e1.to_double(), mu = c1.mu.to_double(), nu = c1.nu.to_double();
    CHECK(std::abs(e1 + 2 * mu - 1.0) < 1e-13);                   // sum of roots = -p
    CHECK(std::abs(e1 * (mu * mu + nu * nu) - 79.0 / 4) < 1e-12);  // product = -r
}

TEST_CASE("real periods match independent high-precision values") {
    auto p11 = real_period(k11a1, 25);
    CHECK(p11.components == 1);
    CHECK(close_to(p11.omega, "1.2692093042795534217", 1e-18));
    CHECK((p11.c_infty - p11.omega).is_zero());

    auto pmx = real_period(kMx, 25);
    CHECK(pmx.components == 2);
    CHECK(close_to(pmx.omega, "2.6220575542921198105", 1e-18));
    CHECK(close_to(pmx.c_infty, "5.2441151085842396209", 1e-18));

    auto p37 = real_period(k37a1, 25);
    CHECK(p37.components == 2);
    CHECK(close_to(p37.omega, "2.9934586462319596298", 1e-18));
    CHECK(std::abs(p37.c_infty.to_double() - 2 * p37.omega.to_double()) < 1e-15);

    CHECK(p11.agm_iterations <= 40);
    CHECK(pmx.agm_iterations <= 40);
}

TEST_CASE("periods agree with direct quadrature of the invariant differential") {
    // two real-root gaps for y^2 = 4x^3 - 4x: alpha = e1-e2 = 1, beta = e1-e3 = 2
    double om = 2 * simpson_tan(kernel_two_real, 1.0, 2.0);
    auto pmx = real_period(kMx, 25);
    CHECK(std::abs(om - pmx.omega.to_double()) < 1e-9);

    // one real root: omega = 2 * int_0^inf dt / sqrt((t^2+c)^2 + nu^2)
    auto c1 = period_cubic_roots(k11a1, 30);
    double c = (c1.e1 - c1.mu).to_double();
    double nu = c1.nu.to_double();
    double om11 = 2 * simpson_tan(kernel_one_real, c, nu);
    auto p11 = real_period(k11a1, 25);
    CHECK(std::abs(om11 - p11.omega.to_double()) < 1e-9);
}

TEST_CASE("period scales as 1/u under model rescaling") {
    auto base = real_period(kMx, 25);
    auto scaled = real_period(WeierstrassCurve{0, 0, 0, -16, 0}, 25);  // u = 2
    CHECK(std::abs(base.omega.to_double() - 2 * scaled.omega.to_double()) < 1e-20);

    auto b11 = real_period(k11a1, 25);
    // conductor-11 curve scaled by u = 3: a_i multiplied by 3^i
    auto s11 = real_period(WeierstrassCurve{0, -9, 27, -810, -14580}, 25);
    CHECK(std::abs(b11.omega.to_double() - 3 * s11.omega.to_double()) < 1e-20);
}

TEST_CASE("certified term counts hit frozen values") {
    CHECK(terms_needed(11, 10) == 13);
    CHECK(terms_needed(32, 8) == 19);
    CHECK(terms_needed(37, 6) == 16);
    CHECK(terms_needed(11, 13) == 17);
    CHECK(terms_needed(32, 12) == 27);
    CHECK(terms_needed(37, 10) == 25);
    CHECK(terms_needed(1, 1) == 1);
    CHECK(terms_needed(mpz_class("42551829106699251024"), 2) == mpz_class("27774035742"));
    CHECK(terms_needed(mpz_class("42551829106699251024"), 3) == mpz_class("30164569808"));
    CHECK(terms_needed(mpz_class("37011629587668844576720608"), 3) ==
          mpz_class("34753351468767"));
}

TEST_CASE("term counts satisfy the defining tail bound and grow monotonically") {
    for (unsigned long N : {11ul, 32ul, 37ul, 389ul, 5077ul}) {
        for (unsigned k = 2; k <= 9; ++k) {
            mpz_class m = terms_needed(mpz_class(N), k);
            double rt = std::sqrt(static_cast<double>(N));
            double x = 2 * std::acos(-1.0) / rt;
            double tail = 2 * std::exp(-x * (m.get_d() + 1)) / (1 - std::exp(-x));
            CHECK(tail <= 0.5 * std::pow(10.0, -static_cast<double>(k)) * (1 + 1e-9));
            CHECK(terms_needed(mpz_class(N), k + 1) >= m);
        }
        CHECK(terms_needed(mpz_class(4 * N), 5) >= terms_needed(mpz_class(N), 5));
    }
}

TEST_CASE("truncation plans combine main and sign-probe lengths") {
    auto pl = plan_truncation(11, 10);
    CHECK(pl.m_main == 13);
    CHECK(pl.m_total == std::max(pl.m_main, pl.m_sign));
    CHECK(pl.work_digits >= 21);
    auto pl2 = plan_truncation(mpz_class("1832369310703810488288"), 3);
    CHECK(pl2.m_total >= pl2.m_main);
    CHECK(pl2.m_sign > pl2.m_main);  // the half-x probe decays slower at k = 3
}

TEST_CASE("truncated sums match frozen high-precision references") {
    auto l11 = run_l(k11a1, 10);
    CHECK(l11.w == 1);
    CHECK(l11.w_certain);
    CHECK(l11.m_main == 13);
    CHECK(close_to(l11.s_m, "0.2538418608542757948313", 1e-15));
    CHECK(close_to(l11.l_value, "0.2538418608559", 1e-11));

    auto lmx = run_l(kMx, 8);
    CHECK(lmx.w == 1);
    CHECK(lmx.w_certain);
    CHECK(lmx.m_main == 19);
    CHECK(close_to(lmx.s_m, "0.6555143885731067837612", 1e-15));
}

TEST_CASE("odd sign and additive-rank cases are detected") {
    auto l37 = run_l(k37a1, 6);
    CHECK(l37.w == -1);
    CHECK(l37.w_certain);
    CHECK(l37.l_value.is_zero());
    CHECK(close_to(l37.s_m, "0.3837774351", 2e-6));

    auto l389 = run_l(k389a1, 6);
    CHECK(l389.w == 1);
    CHECK(std::abs(l389.l_value.to_double()) < 1e-6);
}

TEST_CASE("a flat probe signal escalates until the sign is certified") {
    // conductor 31824, odd sign, but lambda(1/2) - lambda(1) is only ~0.016,
    // below the floor of the default-length probe pass
    auto l = run_l(WeierstrassCurve{0, -90, 0, 1989, 0}, 3);
    CHECK(l.w == -1);
    CHECK(l.w_certain);
    CHECK(l.l_value.is_zero());
}

TEST_CASE("doubling requested digits refines the same limit") {
    auto a = run_l(kMx, 8);
    auto b = run_l(kMx, 11);
    CHECK(std::abs((a.s_m - b.s_m).to_double()) < 6e-9);
    auto c = run_l(k11a1, 6);
    auto d = run_l(k11a1, 10);
    CHECK(std::abs((c.s_m - d.s_m).to_double()) < 6e-7);
}

TEST_CASE("sum is bit-identical for every worker count") {
    // a family member with a conductor large enough for a multi-block pass
    auto g = global_data(WeierstrassCurve{0, -78826, 0, 3702613, 0});
    auto plan = plan_truncation(g.conductor, 3);
    REQUIRE(plan.m_total.fits_ulong_p());
    REQUIRE(plan.m_total > kSumBlockLen);  // several ordered blocks
    auto tab = build_ap_table(g.minimal, g, plan.m_total.get_ui());
    auto w1 = approximate_l1(g.minimal, g, tab, plan, 1);
    auto w4 = approximate_l1(g.minimal, g, tab, plan, 4);
    auto w16 = approximate_l1(g.minimal, g, tab, plan, 16);
    CHECK(w1.s_m.str(40) == w4.s_m.str(40));
    CHECK(w1.s_m.str(40) == w16.s_m.str(40));
    CHECK((w1.s_m - w4.s_m).is_zero());
    CHECK(w1.w == w4.w);
    CHECK(w1.w == w16.w);
    CHECK((w1.l_value - w16.l_value).is_zero());
}
