#include "shaforge/ec_core.hpp"

#include <algorithm>
#include <climits>
#include <cstdlib>
#include <map>
#include <set>
#include <vector>

#include "shaforge/errors.hpp"
#include "shaforge/util.hpp"

namespace shaforge {

namespace {

// exact division with a hard check; LKC and transform algebra rely on it
mpz_class exdiv(const mpz_class& a, const mpz_class& b) {
    if (!mpz_divisible_p(a.get_mpz_t(), b.get_mpz_t()))
        throw InternalError("inexact division in curve algebra");
    mpz_class q;
    mpz_divexact(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return q;
}

}  // namespace

CurveInvariants invariants_unchecked(const WeierstrassCurve& c) {
    CurveInvariants iv;
    iv.b2 = c.a1 * c.a1 + 4 * c.a2;
    iv.b4 = 2 * c.a4 + c.a1 * c.a3;
    iv.b6 = c.a3 * c.a3 + 4 * c.a6;
    iv.b8 = c.a1 * c.a1 * c.a6 + 4 * c.a2 * c.a6 - c.a1 * c.a3 * c.a4 + c.a2 * c.a3 * c.a3 -
            c.a4 * c.a4;
    iv.c4 = iv.b2 * iv.b2 - 24 * iv.b4;
    iv.c6 = -iv.b2 * iv.b2 * iv.b2 + 36 * iv.b2 * iv.b4 - 216 * iv.b6;
    iv.disc = exdiv(iv.c4 * iv.c4 * iv.c4 - iv.c6 * iv.c6, 1728);
    if (iv.disc != 0) {
        mpq_class j(iv.c4 * iv.c4 * iv.c4, iv.disc);
        j.canonicalize();
        iv.j_num = j.get_num();
        iv.j_den = j.get_den();
    } else {
        iv.j_num = 0;
        iv.j_den = 0;
    }
    return iv;
}

CurveInvariants invariants(const WeierstrassCurve& c) {
    CurveInvariants iv = invariants_unchecked(c);
    if (iv.disc == 0) throw SingularCurve("discriminant is zero for " + curve_to_string(c));
    return iv;
}

WeierstrassCurve apply_transform(const WeierstrassCurve& c, const Transform& tr) {
    const mpz_class &u = tr.u, &r = tr.r, &s = tr.s, &t = tr.t;
    mpz_class u2 = u * u, u3 = u2 * u;
    WeierstrassCurve o;
    o.a1 = exdiv(c.a1 + 2 * s, u);
    o.a2 = exdiv(c.a2 - s * c.a1 + 3 * r - s * s, u2);
    o.a3 = exdiv(c.a3 + r * c.a1 + 2 * t, u3);
    o.a4 = exdiv(c.a4 - s * c.a3 + 2 * r * c.a2 - (t + r * s) * c.a1 + 3 * r * r - 2 * s * t,
                 u2 * u2);
    o.a6 = exdiv(c.a6 + r * c.a4 + r * r * c.a2 + r * r * r - t * c.a3 - t * t - r * t * c.a1,
                 u3 * u3);
    return o;
}

namespace {

// Kraus criterion: (c4,c6) with c4^3-c6^2=1728*disc arise from an integral
// model iff v3(c6) != 2 and (c6 = -1 mod 4, or v2(c4) >= 4 with c6 = 0,8 mod 32)
bool kraus_ok_3(const mpz_class& c6) {
    if (c6 == 0) return true;
    return valuation(c6, 3) != 2;
}

bool kraus_ok_2(const mpz_class& c4, const mpz_class& c6) {
    if (mod_nonneg(c6, 4) == 3) return true;
    unsigned long v4 = (c4 == 0) ? 4 : valuation(c4, 2);
    if (v4 < 4) return false;
    unsigned long m32 = mod_nonneg(c6, 32).get_ui();
    return m32 == 0 || m32 == 8;
}

// rebuild a reduced integral model from (c4,c6) satisfying Kraus' conditions,
// then solve the coordinate change from `in` with the given u. Laska's theorem
// guarantees some (a1,a2,a3) in the reduced set works.
bool reconstruct(const WeierstrassCurve& in, const mpz_class& u, const mpz_class& c4,
                 const mpz_class& c6, WeierstrassCurve* out, Transform* tr) {
    mpz_class u2 = u * u, u3 = u2 * u;
    for (int a1v = 0; a1v <= 1; a1v++)
        for (int a2v = -1; a2v <= 1; a2v++)
            for (int a3v = 0; a3v <= 1; a3v++) {
                WeierstrassCurve m;
                m.a1 = a1v;
                m.a2 = a2v;
                m.a3 = a3v;
                mpz_class b2 = m.a1 * m.a1 + 4 * m.a2;
                mpz_class n4 = b2 * b2 - c4;
                if (!mpz_divisible_ui_p(n4.get_mpz_t(), 24)) continue;
                mpz_class b4 = n4 / 24;
                mpz_class n6 = -b2 * b2 * b2 + 36 * b2 * b4 - c6;
                if (!mpz_divisible_ui_p(n6.get_mpz_t(), 216)) continue;
                mpz_class b6 = n6 / 216;
                mpz_class n_a4 = b4 - m.a1 * m.a3;
                if (mpz_odd_p(n_a4.get_mpz_t())) continue;
                m.a4 = n_a4 / 2;
                mpz_class n_a6 = b6 - m.a3 * m.a3;
                if (!mpz_divisible_ui_p(n_a6.get_mpz_t(), 4)) continue;
                m.a6 = n_a6 / 4;
                CurveInvariants mi = invariants_unchecked(m);
                if (mi.c4 != c4 || mi.c6 != c6) continue;

                // solve x = u^2 x' + r, y = u^3 y' + s u^2 x' + t integrally
                mpz_class sn = u * m.a1 - in.a1;
                if (mpz_odd_p(sn.get_mpz_t())) continue;
                mpz_class s = sn / 2;
                mpz_class rn = u2 * m.a2 - in.a2 + s * in.a1 + s * s;
                if (!mpz_divisible_ui_p(rn.get_mpz_t(), 3)) continue;
                mpz_class r = rn / 3;
                mpz_class tn = u3 * m.a3 - in.a3 - r * in.a1;
                if (mpz_odd_p(tn.get_mpz_t())) continue;
                mpz_class t = tn / 2;
                Transform cand{u, r, s, t};
                WeierstrassCurve check = apply_transform(in, cand);
                if (!(check == m)) continue;
                *out = m;
                *tr = cand;
                return true;
            }
    return false;
}

}  // namespace

std::pair<WeierstrassCurve, Transform> minimal_model(const WeierstrassCurve& c,
                                                     unsigned effort_digits, FactorCache* cache) {
    CurveInvariants iv = invariants(c);

    // candidate scaling primes divide every nonzero one of c4, c6, disc
    mpz_class g = abs(iv.disc);
    if (iv.c4 != 0) { mpz_class t; mpz_gcd(t.get_mpz_t(), g.get_mpz_t(), iv.c4.get_mpz_t()); g = t; }
    if (iv.c6 != 0) { mpz_class t; mpz_gcd(t.get_mpz_t(), g.get_mpz_t(), iv.c6.get_mpz_t()); g = t; }

    std::vector<std::pair<mpz_class, unsigned long>> scale;  // (q, d_q)
    if (g > 1) {
        Factorization gf = factor_cached(g, effort_digits, cache);
        for (const auto& [q, e] : gf.factors) {
            (void)e;
            unsigned long d = ULONG_MAX;
            if (iv.c4 != 0) d = std::min(d, valuation(iv.c4, q) / 4);
            if (iv.c6 != 0) d = std::min(d, valuation(iv.c6, q) / 6);
            d = std::min(d, valuation(iv.disc, q) / 12);
            if (d == 0) continue;
            if (q == 2 || q == 3) {
                mpz_class q4, q6;
                while (d > 0) {
                    mpz_pow_ui(q4.get_mpz_t(), q.get_mpz_t(), 4 * d);
                    mpz_pow_ui(q6.get_mpz_t(), q.get_mpz_t(), 6 * d);
                    mpz_class c4d = exdiv(iv.c4, q4), c6d = exdiv(iv.c6, q6);
                    bool ok = (q == 2) ? kraus_ok_2(c4d, c6d) : kraus_ok_3(c6d);
                    if (ok) break;
                    d--;
                }
            }
            if (d > 0) scale.emplace_back(q, d);
        }
    }

    // assemble u, then peel it back prime by prime if reconstruction balks
    // (it should not, by Laska's theorem; the loop is a terminating safety net)
    for (;;) {
        mpz_class u = 1, pw;
        for (const auto& [q, d] : scale) {
            mpz_pow_ui(pw.get_mpz_t(), q.get_mpz_t(), d);
            u *= pw;
        }
        mpz_class u4 = u * u * u * u, u6 = u4 * u * u;
        mpz_class c4m = exdiv(iv.c4, u4), c6m = exdiv(iv.c6, u6);
        WeierstrassCurve out;
        Transform tr;
        if (reconstruct(c, u, c4m, c6m, &out, &tr)) return {out, tr};
        if (scale.empty()) throw InternalError("minimal model reconstruction failed at u=1");
        auto& last = scale.back();
        if (--last.second == 0) scale.pop_back();
    }
}

bool on_curve(const WeierstrassCurve& c, const AffinePointQ& p) {
    if (p.infinity) return true;
    mpq_class lhs = p.y * p.y + c.a1 * p.x * p.y + c.a3 * p.y;
    mpq_class rhs = p.x * p.x * p.x + c.a2 * p.x * p.x + c.a4 * p.x + c.a6;
    return lhs == rhs;
}

AffinePointQ point_neg(const WeierstrassCurve& c, const AffinePointQ& p) {
    if (p.infinity) return p;
    return AffinePointQ::of(p.x, -p.y - c.a1 * p.x - c.a3);
}

AffinePointQ point_add(const WeierstrassCurve& c, const AffinePointQ& p, const AffinePointQ& q) {
    if (p.infinity) return q;
    if (q.infinity) return p;
    mpq_class lambda;
    if (p.x == q.x) {
        if (p.y + q.y + c.a1 * q.x + c.a3 == 0) return AffinePointQ::at_infinity();
        // doubling (p == q here, since distinct points sharing x are negatives)
        lambda = (3 * p.x * p.x + 2 * c.a2 * p.x + c.a4 - c.a1 * p.y) /
                 (2 * p.y + c.a1 * p.x + c.a3);
    } else {
        lambda = (q.y - p.y) / (q.x - p.x);
    }
    mpq_class nu = p.y - lambda * p.x;
    mpq_class x3 = lambda * lambda + c.a1 * lambda - c.a2 - p.x - q.x;
    mpq_class y3 = -(lambda + c.a1) * x3 - nu - c.a3;
    return AffinePointQ::of(x3, y3);
}

AffinePointQ point_mul(const WeierstrassCurve& c, const AffinePointQ& p, unsigned long n) {
    AffinePointQ acc = AffinePointQ::at_infinity();
    AffinePointQ base = p;
    while (n) {
        if (n & 1) acc = point_add(c, acc, base);
        base = point_add(c, base, base);
        n >>= 1;
    }
    return acc;
}

namespace {

// ---- point counting over F_p ----

uint64_t count_p2(const WeierstrassCurve& c) {
    auto r = [](const mpz_class& v) { return mod_nonneg(v, 2).get_ui(); };
    uint64_t a1 = r(c.a1), a2 = r(c.a2), a3 = r(c.a3), a4 = r(c.a4), a6 = r(c.a6);
    uint64_t n = 1;
    for (uint64_t x = 0; x < 2; x++)
        for (uint64_t y = 0; y < 2; y++)
            if ((y * y + a1 * x * y + a3 * y) % 2 ==
                (x * x * x + a2 * x * x + a4 * x + a6) % 2)
                n++;
    return n;
}

// odd p: complete the square; #E = 1 + sum_x (1 + chi(g(x))) with
// g = 4x^3 + b2 x^2 + 2 b4 x + b6
uint64_t count_exhaustive(const WeierstrassCurve& c, uint64_t p) {
    CurveInvariants iv = invariants_unchecked(c);
    uint64_t b2 = mod_nonneg(iv.b2, (long)p).get_ui();
    uint64_t b4 = mod_nonneg(iv.b4, (long)p).get_ui();
    uint64_t b6 = mod_nonneg(iv.b6, (long)p).get_ui();

    // t[v] = 1 + chi(v) in {0,1,2}
    std::vector<uint8_t> t(p, 0);
    t[0] = 1;
    uint64_t sq = 1;
    for (uint64_t z = 1; 2 * z < p + 1; z++) {
        t[sq] = 2;
        sq += 2 * z + 1;
        if (sq >= p) sq -= p;
        if (sq >= p) sq -= p;
    }

    // finite differences of the cubic 4x^3 + b2 x^2 + 2b4 x + b6
    uint64_t g = b6 % p;
    uint64_t dg = (4 + b2 + 2 * b4) % p;       // g(1)-g(0)
    uint64_t d2g = (24 + 2 * b2) % p;          // second difference at 0
    const uint64_t d3g = 24 % p;
    uint64_t n = 1;
    for (uint64_t x = 0; x < p; x++) {
        n += t[g];
        g += dg;
        if (g >= p) g -= p;
        dg += d2g;
        if (dg >= p) dg -= p;
        d2g += d3g;
        if (d2g >= p) d2g -= p;
    }
    return n;
}

struct PtFp {
    uint64_t x = 0, y = 0;
    bool inf = true;
};

struct CurveFp {
    uint64_t a, b, p;  // y^2 = x^3 + a x + b
};

PtFp fp_add(const CurveFp& c, const PtFp& P, const PtFp& Q) {
    if (P.inf) return Q;
    if (Q.inf) return P;
    uint64_t p = c.p;
    uint64_t lam;
    if (P.x == Q.x) {
        if ((P.y + Q.y) % p == 0) return {};
        uint64_t num = (mulmod_u64(3, mulmod_u64(P.x, P.x, p), p) + c.a) % p;
        lam = mulmod_u64(num, invmod_u64((2 * P.y) % p, p), p);
    } else {
        uint64_t num = (Q.y + p - P.y) % p;
        uint64_t den = (Q.x + p - P.x) % p;
        lam = mulmod_u64(num, invmod_u64(den, p), p);
    }
    uint64_t x3 = (mulmod_u64(lam, lam, p) + 2 * p - P.x - Q.x) % p;
    uint64_t y3 = (mulmod_u64(lam, (P.x + p - x3) % p, p) + p - P.y) % p;
    return {x3, y3, false};
}

PtFp fp_mul(const CurveFp& c, PtFp P, uint64_t n) {
    PtFp acc;
    while (n) {
        if (n & 1) acc = fp_add(c, acc, P);
        P = fp_add(c, P, P);
        n >>= 1;
    }
    return acc;
}

// all N in [n0, n1] with N*P = infinity, via baby-step giant-step
std::vector<uint64_t> bsgs_kills(const CurveFp& c, const PtFp& P, uint64_t n0, uint64_t n1) {
    uint64_t width = n1 - n0 + 1;
    uint64_t w = 1;
    while (w * w < width) w++;
    // babies j*P for j in [0, w); keyed by x
    std::map<uint64_t, std::vector<std::pair<uint64_t, uint64_t>>> baby;  // x -> (j, y)
    PtFp B;
    for (uint64_t j = 0; j < w; j++) {
        if (!B.inf) baby[B.x].push_back({j, B.y});
        B = fp_add(c, B, P);
    }
    PtFp wP = fp_mul(c, P, w);
    PtFp R = fp_mul(c, P, n0);
    std::vector<uint64_t> out;
    for (uint64_t i = 0; i * w < width + w; i++) {
        if (R.inf) {
            uint64_t N = n0 + i * w;
            if (N <= n1) out.push_back(N);
        } else if (auto it = baby.find(R.x); it != baby.end()) {
            for (auto& [j, yj] : it->second) {
                // R + j*P = O  <=>  R = -(jP) = (x_j, -y_j)
                if (R.y == (c.p - yj) % c.p) {
                    uint64_t N = n0 + i * w + j;
                    if (N >= n0 && N <= n1) out.push_back(N);
                }
            }
        }
        R = fp_add(c, R, wP);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    // exact verification; false hits are impossible but cheap to rule out
    std::vector<uint64_t> ver;
    for (uint64_t N : out)
        if (fp_mul(c, P, N).inf) ver.push_back(N);
    return ver;
}

uint64_t order_from_kill(const CurveFp& c, const PtFp& P, uint64_t k) {
    // k*P = O; peel primes to reach the exact order
    Factorization f = factor(mpz_class((unsigned long)k));
    uint64_t ord = k;
    for (const auto& [q, e] : f.factors) {
        uint64_t qu = q.get_ui();
        for (unsigned i = 0; i < e; i++) {
            if (ord % qu) break;
            if (!fp_mul(c, P, ord / qu).inf) break;
            ord /= qu;
        }
    }
    return ord;
}

uint64_t gcd_u64(uint64_t a, uint64_t b) {
    while (b) { uint64_t t = a % b; a = b; b = t; }
    return a;
}

// Mestre-style order counting for large p: alternate the curve and its
// quadratic twist until the known group-order divisor isolates a unique
// multiple in the Hasse interval
uint64_t count_bsgs(uint64_t A, uint64_t B, uint64_t p) {
    mpz_class pz((unsigned long)p);
    auto [sp, _] = isqrt(4 * pz);
    uint64_t s = sp.get_ui();
    uint64_t n0 = p + 1 - s, n1 = p + 1 + s;

    // quadratic twist by a non-residue g: y^2 = x^3 + g^2 A x + g^3 B
    uint64_t g = 2;
    while (legendre_u64(g, p) != -1) g++;
    CurveFp E{A % p, B % p, p};
    CurveFp T{mulmod_u64(mulmod_u64(g, g, p), A % p, p),
              mulmod_u64(mulmod_u64(mulmod_u64(g, g, p), g, p), B % p, p), p};

    uint64_t known[2] = {1, 1};  // accumulated lcm of point orders on E, T
    uint64_t seed = p ^ (A * 0x9e3779b97f4a7c15ULL) ^ (B * 0xbf58476d1ce4e5b9ULL);

    for (int round = 0; round < 40; round++) {
        int side = round & 1;
        const CurveFp& C = side ? T : E;
        // deterministic random point
        PtFp P;
        for (int tries = 0; tries < 256; tries++) {
            uint64_t x = splitmix64(seed) % p;
            uint64_t rhs = (mulmod_u64(mulmod_u64(x, x, p), x, p) + mulmod_u64(C.a, x, p) + C.b) % p;
            if (rhs == 0) { P = {x, 0, false}; break; }
            if (legendre_u64(rhs, p) == 1) { P = {x, sqrtmod_u64(rhs, p), false}; break; }
        }
        if (P.inf) continue;

        auto kills = bsgs_kills(C, P, n0, n1);
        if (kills.empty()) throw InternalError("no group-order candidate in Hasse interval");
        uint64_t ord;
        if (kills.size() >= 2) {
            // consecutive multiples of ord(P) differ by exactly ord(P)
            ord = kills[1] - kills[0];
            if (!fp_mul(C, P, ord).inf) ord = order_from_kill(C, P, kills[0]);
        } else {
            ord = order_from_kill(C, P, kills[0]);
        }
        uint64_t& L = known[side];
        L = L / gcd_u64(L, ord) * ord;

        // unique multiple of L in [n0, n1]?
        uint64_t first = ((n0 + L - 1) / L) * L;
        if (first <= n1 && first + L > n1) {
            uint64_t order = first;
            return side ? (2 * p + 2 - order) : order;
        }
    }
    throw InternalError("group order not isolated; exponent pathologically small");
}

}  // namespace

uint64_t count_points_mod_p(const WeierstrassCurve& c, uint64_t p) {
    CurveInvariants iv = invariants_unchecked(c);
    if (mpz_divisible_ui_p(iv.disc.get_mpz_t(), p))
        throw BadReduction("p divides discriminant: p=" + std::to_string(p));
    if (p == 2) return count_p2(c);
    if (p < kExhaustivePointBound) return count_exhaustive(c, p);
    // short model y^2 = x^3 - 27 c4 x - 54 c6, isomorphic for p >= 5
    uint64_t A = mod_nonneg(-27 * iv.c4, (long)p).get_ui();
    uint64_t B = mod_nonneg(-54 * iv.c6, (long)p).get_ui();
    return count_bsgs(A, B, p);
}

WeierstrassCurve parse_curve(const std::string& s) {
    std::string body;
    for (char ch : s)
        if (!isspace((unsigned char)ch)) body += ch;
    if (body.size() < 2 || body.front() != '[' || body.back() != ']')
        throw ParseError("curve must look like [a1,a2,a3,a4,a6]: " + s);
    auto parts = split(body.substr(1, body.size() - 2), ',');
    if (parts.size() != 5) throw ParseError("curve needs 5 coefficients: " + s);
    mpz_class a[5];
    for (int i = 0; i < 5; i++) {
        if (parts[i].empty() || mpz_set_str(a[i].get_mpz_t(), parts[i].c_str(), 10) != 0)
            throw ParseError("bad integer '" + parts[i] + "' in " + s);
    }
    return {a[0], a[1], a[2], a[3], a[4]};
}

std::string curve_to_string(const WeierstrassCurve& c) {
    return "[" + c.a1.get_str() + "," + c.a2.get_str() + "," + c.a3.get_str() + "," +
           c.a4.get_str() + "," + c.a6.get_str() + "]";
}

}  // namespace shaforge
