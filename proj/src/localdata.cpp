#include "shaforge/localdata.hpp"


#include "shaforge/errors.hpp"

namespace shaforge {

namespace {

mpz_class mod_p(const mpz_class& x, const mpz_class& p) { return mod_nonneg(x, p); }

mpz_class exdiv_check(const mpz_class& a, const mpz_class& b) {
    if (!mpz_divisible_p(a.get_mpz_t(), b.get_mpz_t()))
        throw InternalError("inexact division in local algorithm");
    mpz_class q;
    mpz_divexact(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return q;
}

mpz_class invmod(const mpz_class& a, const mpz_class& p) {
    mpz_class r;
    if (!mpz_invert(r.get_mpz_t(), a.get_mpz_t(), p.get_mpz_t()))
        throw InternalError("non-invertible residue");
    return r;
}

unsigned long val_or_big(const mpz_class& x, const mpz_class& p) {
    if (x == 0) return 1u << 30;  // effectively infinite
    return valuation(x, p);
}

// ---- polynomials mod p, ascending coefficients, always reduced ----

using Poly = std::vector<mpz_class>;

void trim(Poly& f) {
    while (!f.empty() && f.back() == 0) f.pop_back();
}

int deg(const Poly& f) { return (int)f.size() - 1; }

Poly reduce(Poly f, const mpz_class& p) {
    for (auto& c : f) c = mod_p(c, p);
    trim(f);
    return f;
}

Poly poly_sub(const Poly& a, const Poly& b, const mpz_class& p) {
    Poly r(std::max(a.size(), b.size()), 0);
    for (size_t i = 0; i < r.size(); i++) {
        if (i < a.size()) r[i] += a[i];
        if (i < b.size()) r[i] -= b[i];
        r[i] = mod_p(r[i], p);
    }
    trim(r);
    return r;
}

Poly poly_mul(const Poly& a, const Poly& b, const mpz_class& p) {
    if (a.empty() || b.empty()) return {};
    Poly r(a.size() + b.size() - 1, 0);
    for (size_t i = 0; i < a.size(); i++)
        for (size_t j = 0; j < b.size(); j++) r[i + j] += a[i] * b[j];
    return reduce(std::move(r), p);
}

// remainder of a by b, b nonzero
Poly poly_rem(Poly a, const Poly& b, const mpz_class& p) {
    a = reduce(std::move(a), p);
    mpz_class lead_inv = invmod(b.back(), p);
    while (deg(a) >= deg(b)) {
        mpz_class q = mod_p(a.back() * lead_inv, p);
        size_t shift = a.size() - b.size();
        for (size_t i = 0; i < b.size(); i++) a[shift + i] = mod_p(a[shift + i] - q * b[i], p);
        trim(a);
    }
    return a;
}

Poly poly_gcd(Poly a, Poly b, const mpz_class& p) {
    a = reduce(std::move(a), p);
    b = reduce(std::move(b), p);
    while (!b.empty()) {
        Poly r = poly_rem(a, b, p);
        a = std::move(b);
        b = std::move(r);
    }
    return a;
}

// T^e mod f (f monic), coefficients mod p
Poly tpow_mod(const mpz_class& e, const Poly& f, const mpz_class& p) {
    Poly acc = {1};
    Poly base = poly_rem({0, 1}, f, p);
    for (long bit = (long)mpz_sizeinbase(e.get_mpz_t(), 2) - 1; bit >= 0; bit--) {
        acc = poly_rem(poly_mul(acc, acc, p), f, p);
        if (mpz_tstbit(e.get_mpz_t(), bit)) acc = poly_rem(poly_mul(acc, base, p), f, p);
    }
    return acc;
}

// number of distinct roots of monic cubic in F_p
unsigned cubic_root_count(const Poly& f, const mpz_class& p) {
    if (p < 5) {
        unsigned n = 0;
        for (mpz_class x = 0; x < p; x++) {
            mpz_class v = mod_p(((f[3] * x + f[2]) * x + f[1]) * x + f[0], p);
            if (v == 0) n++;
        }
        return n;
    }
    Poly xp = tpow_mod(p, f, p);       // T^p mod f
    Poly d = poly_sub(xp, {0, 1}, p);  // T^p - T
    Poly g = poly_gcd(f, d, p);
    return g.empty() ? 3 : (unsigned)deg(g);  // g = 0 means f | T^p - T
}

// classification of Y^2 + A*Y - B over F_p
struct QuadClass {
    enum Kind { rational, irrational, dbl } kind;
    mpz_class rho;  // double root when kind == dbl
};

QuadClass classify_quad(const mpz_class& A, const mpz_class& B, const mpz_class& p) {
    if (p == 2) {
        if (mpz_odd_p(A.get_mpz_t()))
            return {mpz_even_p(B.get_mpz_t()) ? QuadClass::rational : QuadClass::irrational, 0};
        return {QuadClass::dbl, mod_p(B, 2)};
    }
    mpz_class D = mod_p(A * A + 4 * B, p);
    int chi = mpz_legendre(D.get_mpz_t(), p.get_mpz_t());
    if (chi == 1) return {QuadClass::rational, 0};
    if (chi == -1) return {QuadClass::irrational, 0};
    return {QuadClass::dbl, mod_p(-A * invmod(2, p), p)};
}

// classification of a*X^2 + b*X + c over F_p, a nonzero mod p
QuadClass classify_quad2(const mpz_class& a, const mpz_class& b, const mpz_class& c,
                         const mpz_class& p) {
    if (p == 2) {
        if (mpz_odd_p(b.get_mpz_t()))
            return {mpz_even_p(c.get_mpz_t()) ? QuadClass::rational : QuadClass::irrational, 0};
        return {QuadClass::dbl, mod_p(c, 2)};
    }
    mpz_class D = mod_p(b * b - 4 * a * c, p);
    int chi = mpz_legendre(D.get_mpz_t(), p.get_mpz_t());
    if (chi == 1) return {QuadClass::rational, 0};
    if (chi == -1) return {QuadClass::irrational, 0};
    return {QuadClass::dbl, mod_p(-b * invmod(2 * a, p), p)};
}

// translate the (unique) singular point of the reduction to the origin
WeierstrassCurve move_singular_to_origin(const WeierstrassCurve& c, const mpz_class& p) {
    mpz_class x0 = -1, y0 = 0;
    if (p < 5) {
        for (mpz_class x = 0; x < p && x0 < 0; x++)
            for (mpz_class y = 0; y < p; y++) {
                mpz_class F = y * y + c.a1 * x * y + c.a3 * y - x * x * x - c.a2 * x * x -
                              c.a4 * x - c.a6;
                mpz_class Fx = c.a1 * y - 3 * x * x - 2 * c.a2 * x - c.a4;
                mpz_class Fy = 2 * y + c.a1 * x + c.a3;
                if (mod_p(F, p) == 0 && mod_p(Fx, p) == 0 && mod_p(Fy, p) == 0) {
                    x0 = x;
                    y0 = y;
                    break;
                }
            }
        if (x0 < 0) throw InternalError("singular point not found");
    } else {
        CurveInvariants iv = invariants_unchecked(c);
        // x0 = repeated root of g = 4x^3 + b2 x^2 + 2 b4 x + b6 mod p
        Poly g = reduce({iv.b6, 2 * iv.b4, iv.b2, 4}, p);
        Poly gp = reduce({2 * iv.b4, 2 * iv.b2, 12}, p);
        Poly h = poly_gcd(g, gp, p);
        if (deg(h) == 1)
            x0 = mod_p(-h[0] * invmod(h[1], p), p);
        else if (deg(h) == 2)
            x0 = mod_p(-h[1] * invmod(2 * h[2], p), p);
        else
            throw InternalError("no repeated root at bad prime");
        y0 = mod_p(-(c.a1 * x0 + c.a3) * invmod(2, p), p);
    }
    return apply_transform(c, {1, x0, 0, y0});
}

// reach v(a1)>=1, v(a2)>=1, v(a3)>=2, v(a4)>=2, v(a6)>=3
WeierstrassCurve normalize_additive(const WeierstrassCurve& c, const mpz_class& p) {
    auto ok = [&](const WeierstrassCurve& w) {
        return val_or_big(w.a1, p) >= 1 && val_or_big(w.a2, p) >= 1 && val_or_big(w.a3, p) >= 2 &&
               val_or_big(w.a4, p) >= 2 && val_or_big(w.a6, p) >= 3;
    };
    if (p >= 5) {
        mpz_class inv2 = invmod(2, p);
        WeierstrassCurve w = apply_transform(c, {1, 0, mod_p(-c.a1 * inv2, p), 0});
        mpz_class p2 = p * p, inv2b = invmod(2, p2);
        w = apply_transform(w, {1, 0, 0, mod_nonneg(-w.a3 * inv2b, p2)});
        if (!ok(w)) throw InternalError("derived additive normalization failed");
        return w;
    }
    // p = 2, 3: exhaustive shift search; the normalizing change is determined
    // mod p^3 in each of s, r, t, and r must vanish mod p
    long pl = (long)p.get_ui();
    long p3 = pl * pl * pl;
    for (long s = 0; s < p3; s++)
        for (long r = 0; r < p3; r += pl)
            for (long t = 0; t < p3; t++) {
                WeierstrassCurve w = apply_transform(c, {1, r, s, t});
                if (ok(w)) return w;
            }
    throw InternalError("additive normalization not found");
}

LocalData finish(const mpz_class& p, KodairaSeries k, unsigned long n, unsigned long f,
                 unsigned long cp, Reduction red) {
    LocalData ld;
    ld.p = p;
    ld.kodaira = k;
    ld.n = n;
    ld.f_p = f;
    ld.c_p = cp;
    ld.reduction = red;
    return ld;
}

}  // namespace

std::string kodaira_name(const LocalData& ld) {
    switch (ld.kodaira) {
        case KodairaSeries::I0: return "I0";
        case KodairaSeries::In: return "I" + std::to_string(ld.n);
        case KodairaSeries::II: return "II";
        case KodairaSeries::III: return "III";
        case KodairaSeries::IV: return "IV";
        case KodairaSeries::I0star: return "I0*";
        case KodairaSeries::Instar: return "I" + std::to_string(ld.n) + "*";
        case KodairaSeries::IVstar: return "IV*";
        case KodairaSeries::IIIstar: return "III*";
        case KodairaSeries::IIstar: return "II*";
    }
    return "?";
}

LocalData tate_local(const WeierstrassCurve& curve, const mpz_class& p) {
    WeierstrassCurve c = curve;
    for (;;) {  // restarts only when the model is non-minimal at p
        CurveInvariants iv = invariants(c);
        unsigned long vD = val_or_big(iv.disc, p);
        if (vD == 0) return finish(p, KodairaSeries::I0, 0, 0, 1, Reduction::good);

        c = move_singular_to_origin(c, p);
        iv = invariants_unchecked(c);

        if (val_or_big(iv.b2, p) == 0) {
            // multiplicative: I_n with n = v(disc)
            bool split;
            if (p == 2) {
                // tangent quadratic T^2 + a1 T + a2 is separable, so a1 is odd
                split = mpz_even_p(c.a2.get_mpz_t());
            } else {
                split = mpz_legendre(iv.b2.get_mpz_t(), p.get_mpz_t()) == 1;
            }
            unsigned long cp = split ? vD : (vD % 2 == 0 ? 2 : 1);
            return finish(p, KodairaSeries::In, vD, 1,
                          cp, split ? Reduction::split_mult : Reduction::nonsplit_mult);
        }

        if (val_or_big(c.a6, p) < 2)
            return finish(p, KodairaSeries::II, 0, vD, 1, Reduction::additive);
        if (val_or_big(iv.b8, p) < 3)
            return finish(p, KodairaSeries::III, 0, vD - 1, 2, Reduction::additive);
        if (val_or_big(iv.b6, p) < 3) {
            // quadratic Y^2 + (a3/p) Y - (a6/p^2) is separable here
            auto q = classify_quad(exdiv_check(c.a3, p), exdiv_check(c.a6, p * p), p);
            return finish(p, KodairaSeries::IV, 0, vD - 2, q.kind == QuadClass::rational ? 3 : 1,
                          Reduction::additive);
        }

        c = normalize_additive(c, p);
        mpz_class p2 = p * p, p3 = p2 * p;
        mpz_class a21 = exdiv_check(c.a2, p), a42 = exdiv_check(c.a4, p2),
                  a63 = exdiv_check(c.a6, p3);

        // P(T) = T^3 + a21 T^2 + a42 T + a63 over F_p
        mpz_class dP = 18 * a21 * a42 * a63 - 4 * a21 * a21 * a21 * a63 +
                       a21 * a21 * a42 * a42 - 4 * a42 * a42 * a42 - 27 * a63 * a63;
        if (mod_p(dP, p) != 0) {
            Poly P = reduce({a63, a42, a21, 1}, p);
            unsigned nr = cubic_root_count(P, p);
            return finish(p, KodairaSeries::I0star, 0, vD - 4, 1 + nr, Reduction::additive);
        }

        // repeated root; triple iff P = (T - rho)^3
        mpz_class rho;
        bool triple;
        if (p == 2) {
            // (T-rho)^3 = T^3 + rho T^2 + rho T + rho over F_2
            triple = mod_p(a21 - a42, 2) == 0 && mod_p(a42 - a63, 2) == 0;
            rho = mod_p(a21 + (triple ? 0 : 1), 2);
        } else if (p == 3) {
            // (T-rho)^3 = T^3 - rho^3 over F_3
            triple = mod_p(a21, 3) == 0 && mod_p(a42, 3) == 0;
            if (triple) {
                rho = mod_p(-a63, 3);
            } else {
                rho = -1;
                for (mpz_class t = 0; t < 3; t++) {
                    mpz_class pv = mod_p(((t + a21) * t + a42) * t + a63, 3);
                    mpz_class dv = mod_p(3 * t * t + 2 * a21 * t + a42, 3);
                    if (pv == 0 && dv == 0) { rho = t; break; }
                }
                if (rho < 0) throw InternalError("double root of cubic not found mod 3");
            }
        } else {
            triple = mod_p(a21 * a21 - 3 * a42, p) == 0;  // repeated root + this => triple
            if (triple)
                rho = mod_p(-a21 * invmod(3, p), p);
            else
                rho = mod_p((a21 * a42 - 9 * a63) * invmod(2 * (3 * a42 - a21 * a21), p), p);
        }

        if (!triple) {
            // I_n* chain; shift the double root of P to T = 0 (x-shift by rho*p)
            c = apply_transform(c, {1, rho * p, 0, 0});
            unsigned long k = 1;  // testing I_{2k-1}* then I_{2k}*
            mpz_class pk1 = p2;   // p^{k+1}
            for (;;) {
                mpz_class p2k2 = pk1 * pk1;  // p^{2k+2}
                // odd index n = 2k-1: Y^2 + (a3/p^{k+1}) Y - (a6/p^{2k+2})
                auto qo = classify_quad(exdiv_check(c.a3, pk1), exdiv_check(c.a6, p2k2), p);
                if (qo.kind != QuadClass::dbl) {
                    unsigned long n = 2 * k - 1;
                    return finish(p, KodairaSeries::Instar, n, vD - 4 - n,
                                  qo.kind == QuadClass::rational ? 4 : 2, Reduction::additive);
                }
                c = apply_transform(c, {1, 0, 0, qo.rho * pk1});

                // even index n = 2k: a21 X^2 + (a4/p^{k+2}) X + (a6/p^{2k+3})
                mpz_class a21n = exdiv_check(c.a2, p);
                auto qe = classify_quad2(a21n, exdiv_check(c.a4, pk1 * p),
                                         exdiv_check(c.a6, p2k2 * p), p);
                if (qe.kind != QuadClass::dbl) {
                    unsigned long n = 2 * k;
                    return finish(p, KodairaSeries::Instar, n, vD - 4 - n,
                                  qe.kind == QuadClass::rational ? 4 : 2, Reduction::additive);
                }
                c = apply_transform(c, {1, qe.rho * pk1, 0, 0});

                k++;
                pk1 *= p;
                if (2 * k > vD) throw InternalError("I_n* chain exceeded v(disc)");
            }
        }

        // triple root: shift it to T = 0
        c = apply_transform(c, {1, rho * p, 0, 0});
        auto q9 = classify_quad(exdiv_check(c.a3, p2), exdiv_check(c.a6, p2 * p2), p);
        if (q9.kind != QuadClass::dbl)
            return finish(p, KodairaSeries::IVstar, 0, vD - 6,
                          q9.kind == QuadClass::rational ? 3 : 1, Reduction::additive);
        c = apply_transform(c, {1, 0, 0, q9.rho * p2});

        if (val_or_big(c.a4, p) < 4)
            return finish(p, KodairaSeries::IIIstar, 0, vD - 7, 2, Reduction::additive);
        if (val_or_big(c.a6, p) < 6)
            return finish(p, KodairaSeries::IIstar, 0, vD - 8, 1, Reduction::additive);

        // non-minimal at p: rescale and restart
        c = apply_transform(c, {p, 0, 0, 0});
    }
}

GlobalArithData global_data(const WeierstrassCurve& curve, unsigned effort_digits,
                            FactorCache* cache) {
    GlobalArithData g;
    std::tie(g.minimal, g.to_minimal) = minimal_model(curve, effort_digits, cache);
    g.disc_min = invariants(g.minimal).disc;
    g.disc_factors = factor_cached(g.disc_min, effort_digits, cache);
    g.conductor = 1;
    g.c_fin = 1;
    mpz_class pw;
    for (const auto& [q, e] : g.disc_factors.factors) {
        (void)e;
        LocalData ld = tate_local(g.minimal, q);
        if (ld.f_p == 0) throw InternalError("good reduction at divisor of minimal disc");
        mpz_pow_ui(pw.get_mpz_t(), q.get_mpz_t(), ld.f_p);
        g.conductor *= pw;
        g.c_fin *= ld.c_p;
        g.locals.push_back(std::move(ld));
    }
    return g;
}

}  // namespace shaforge
