#include "shaforge/bsd.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>

#include "shaforge/errors.hpp"
#include "shaforge/intarith.hpp"

namespace shaforge {

namespace {

mpz_class cubic_at(const mpz_class& a, const mpz_class& b, const mpz_class& x) {
    return x * x * x + a * x + b;
}

// one integer zero of x^3+ax+b inside [lo,hi], if the endpoint signs differ
void bisect_root(const mpz_class& a, const mpz_class& b, mpz_class lo, mpz_class hi,
                 std::vector<mpz_class>* out) {
    mpz_class flo = cubic_at(a, b, lo);
    mpz_class fhi = cubic_at(a, b, hi);
    if (flo == 0) out->push_back(lo);
    if (fhi == 0) out->push_back(hi);
    if (sgn(flo) * sgn(fhi) >= 0) return;
    while (hi - lo > 1) {
        mpz_class mid = lo + (hi - lo) / 2;
        mpz_class fm = cubic_at(a, b, mid);
        if (fm == 0) {
            out->push_back(mid);
            return;
        }
        if (sgn(fm) == sgn(flo)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

// floor of the cube root of v >= 0
mpz_class icbrt(const mpz_class& v) {
    mpz_class r;
    mpz_root(r.get_mpz_t(), v.get_mpz_t(), 3);
    return r;
}

}  // namespace

std::vector<mpz_class> integer_cubic_roots(const mpz_class& a, const mpz_class& b) {
    std::vector<mpz_class> out;
    mpz_class disc = -4 * a * a * a - 27 * b * b;
    if (disc == 0) {
        // repeated root; all roots are rational: double root -3b/(2a), simple 3b/a
        if (a == 0) {
            if (b == 0) out.push_back(0);
        } else {
            mpq_class dbl(-3 * b, 2 * a);
            dbl.canonicalize();
            if (dbl.get_den() == 1) out.push_back(dbl.get_num());
            mpq_class sim(3 * b, a);
            sim.canonicalize();
            if (sim.get_den() == 1) out.push_back(sim.get_num());
        }
    } else {
        // all roots lie within the fujiwara bound 2*max(sqrt|a|, cbrt|b|)
        mpz_class bnd = 2 * std::max(isqrt(abs(a)).first, icbrt(abs(b))) + 2;
        if (a < 0) {
            // cut at the critical points +-sqrt(-a/3); each closed piece is
            // monotone between consecutive real roots, so each holds at most one
            mpz_class fl = isqrt(mpz_class((-a) / 3)).first;
            bisect_root(a, b, -bnd, -fl - 1, &out);
            bisect_root(a, b, -fl, fl, &out);
            bisect_root(a, b, fl + 1, bnd, &out);
        } else {
            bisect_root(a, b, -bnd, bnd, &out);
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    for (const mpz_class& r : out) {
        if (cubic_at(a, b, r) != 0) throw InternalError("cubic root verification failed");
    }
    return out;
}

namespace {

// order of an affine point if it is at most cap, else 0
unsigned point_order_le(const WeierstrassCurve& c, const AffinePointQ& p, unsigned cap) {
    AffinePointQ q = p;
    for (unsigned k = 2; k <= cap; ++k) {
        q = point_add(c, q, p);
        if (q.infinity) return k;
    }
    return 0;
}

std::vector<mpz_class> divisors_of(const std::vector<std::pair<mpz_class, unsigned>>& pe,
                                   size_t cap) {
    std::vector<mpz_class> out{1};
    for (const auto& [p, e] : pe) {
        size_t base = out.size();
        if (base * (e + 1) > cap) throw InternalError("torsion divisor set too large");
        mpz_class pk = 1;
        for (unsigned i = 1; i <= e; ++i) {
            pk *= p;
            for (size_t j = 0; j < base; ++j) out.push_back(out[j] * pk);
        }
    }
    return out;
}

bool mazur_admissible(unsigned t) {
    return (t >= 1 && t <= 10) || t == 12 || t == 16;
}

}  // namespace

TorsionInfo torsion_order(const GlobalArithData& g) {
    TorsionInfo info;
    CurveInvariants iv = invariants(g.minimal);
    // integral short model y^2 = x^3 + sa*x + sb with the same torsion orders
    mpz_class sa = -27 * iv.c4;
    mpz_class sb = -54 * iv.c6;
    WeierstrassCurve shortm{0, 0, 0, sa, sb};

    std::vector<mpz_class> two_roots = integer_cubic_roots(sa, sb);
    info.two_torsion = 1 + static_cast<unsigned>(two_roots.size());

    // torsion injects into E(F_p) at every odd prime of good reduction
    uint64_t bound = 0;
    int used = 0;
    for (unsigned long p = 3; p < 500 && used < 30; p += 2) {
        if (!is_prime(mpz_class(p))) continue;
        if (mpz_divisible_ui_p(g.disc_min.get_mpz_t(), p)) continue;
        bound = std::gcd(bound, count_points_mod_p(g.minimal, p));
        ++used;
    }
    info.gcd_bound = bound;
    if (bound == info.two_torsion) {
        info.order = info.two_torsion;
        return info;
    }

    // enumerate integral torsion candidates: y = 0 or y^2 divides the short
    // model discriminant 6^12 * disc_min, i.e. y divides its square radical
    info.enumerated = true;
    std::vector<std::pair<mpz_class, unsigned>> halved;
    bool saw2 = false, saw3 = false;
    for (const auto& [p, e] : g.disc_factors.factors) {
        unsigned ee = e;
        if (p == 2) {
            ee += 12;
            saw2 = true;
        } else if (p == 3) {
            ee += 12;
            saw3 = true;
        }
        if (ee / 2 > 0) halved.emplace_back(p, ee / 2);
    }
    if (!saw2) halved.emplace_back(2, 6);
    if (!saw3) halved.emplace_back(3, 6);
    std::sort(halved.begin(), halved.end());
    std::vector<mpz_class> ys = divisors_of(halved, 2'000'000);

    unsigned points = static_cast<unsigned>(two_roots.size());
    for (const mpz_class& y : ys) {
        std::vector<mpz_class> xs = integer_cubic_roots(sa, sb - y * y);
        for (const mpz_class& x : xs) {
            AffinePointQ cand = AffinePointQ::of(mpq_class(x), mpq_class(y));
            if (point_order_le(shortm, cand, 16) != 0) points += 2;  // (x,y) and (x,-y)
        }
    }
    info.order = 1 + points;

    if (info.order % info.two_torsion != 0 || (bound != 0 && bound % info.order != 0) ||
        !mazur_admissible(info.order)) {
        throw InternalError("torsion enumeration produced inconsistent order");
    }
    return info;
}

std::string sha_status_name(ShaStatus s) {
    switch (s) {
        case ShaStatus::ok:
            return "ok";
        case ShaStatus::apparent_positive_rank:
            return "apparent-positive-rank";
        case ShaStatus::not_a_square:
            return "not-a-square";
        case ShaStatus::budget_exceeded:
            return "budget-exceeded";
        case ShaStatus::unfactored:
            return "unfactored";
    }
    return "unknown";
}

std::string growth_quotient(const mpz_class& sha, const mpz_class& conductor) {
    if (sha < 0 || conductor <= 0) throw InternalError("growth quotient needs positive inputs");
    // d = floor(10^10 * sha / sqrt(N)) computed exactly: largest d with d^2*N <= sha^2*10^20
    mpz_class scaled = sha * sha;
    mpz_class p20;
    mpz_ui_pow_ui(p20.get_mpz_t(), 10, 20);
    scaled *= p20;
    mpz_class d = isqrt(mpz_class(scaled / conductor)).first;
    while ((d + 1) * (d + 1) * conductor <= scaled) ++d;
    while (d > 0 && d * d * conductor > scaled) --d;
    mpz_class p10;
    mpz_ui_pow_ui(p10.get_mpz_t(), 10, 10);
    mpz_class whole = d / p10;
    std::string frac = mpz_class(d % p10).get_str();
    return whole.get_str() + "." + std::string(10 - frac.size(), '0') + frac;
}

unsigned sha_extra_digits(const TorsionInfo& t, const RealPeriod& period, const mpz_class& c_fin,
                          unsigned k) {
    double cond = static_cast<double>(t.order) * static_cast<double>(t.order) /
                  (period.c_infty.to_double() * c_fin.get_d());
    if (std::pow(10.0, -static_cast<double>(k)) * cond < 0.4) return 0;
    return static_cast<unsigned>(std::ceil(std::log10(cond))) + 2;
}

ShaResult analytic_sha(const LTruncation& l, const TorsionInfo& t, const RealPeriod& period,
                       const GlobalArithData& g, unsigned k) {
    ShaResult res;
    long t2 = static_cast<long>(t.order) * static_cast<long>(t.order);
    Real cond = Real::of(t2, l.s_m.prec()) / (period.c_infty * Real::of(g.c_fin, l.s_m.prec()));
    res.value = l.s_m * cond;
    res.tolerance = std::pow(10.0, -(static_cast<double>(k) - 1.0)) * cond.to_double();

    // vanishing central value: the quotient measures rank, not sha
    if (l.w == -1 || std::abs(l.l_value.to_double()) < 10.0 * std::pow(10.0, -static_cast<double>(k))) {
        res.status = ShaStatus::apparent_positive_rank;
        return res;
    }

    mpz_class nearest = res.value.round_z();
    res.sha = nearest;
    if (nearest < 1) {
        res.status = ShaStatus::apparent_positive_rank;
        return res;
    }
    double gap = (res.value - Real::of(nearest, res.value.prec())).to_double();
    if (std::abs(gap) > res.tolerance) {
        res.status = ShaStatus::not_a_square;
        return res;
    }
    auto [root, exact] = isqrt(nearest);
    if (!exact) {
        res.status = ShaStatus::not_a_square;
        return res;
    }
    res.sha_sqrt = root;
    res.gs = growth_quotient(nearest, g.conductor);
    res.status = ShaStatus::ok;
    return res;
}

}  // namespace shaforge
