#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <utility>

#include "shaforge/intarith.hpp"

namespace shaforge {

// integral Weierstrass model y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6
struct WeierstrassCurve {
    mpz_class a1, a2, a3, a4, a6;
    bool operator==(const WeierstrassCurve&) const = default;
};

struct CurveInvariants {
    mpz_class b2, b4, b6, b8;
    mpz_class c4, c6;
    mpz_class disc;          // nonzero
    mpz_class j_num, j_den;  // reduced, j_den > 0
};

// coordinate change x = u^2 x' + r, y = u^3 y' + s u^2 x' + t
struct Transform {
    mpz_class u = 1, r = 0, s = 0, t = 0;
};

struct AffinePointQ {
    bool infinity = true;
    mpq_class x, y;
    static AffinePointQ at_infinity() { return {}; }
    static AffinePointQ of(mpq_class px, mpq_class py) {
        AffinePointQ p;
        p.infinity = false;
        p.x = std::move(px);
        p.y = std::move(py);
        p.x.canonicalize();
        p.y.canonicalize();
        return p;
    }
    bool operator==(const AffinePointQ& o) const {
        if (infinity || o.infinity) return infinity == o.infinity;
        return x == o.x && y == o.y;
    }
};

// throws SingularCurve when disc = 0
CurveInvariants invariants(const WeierstrassCurve& c);

// same formulas without the nonsingularity check (degeneracy probing)
CurveInvariants invariants_unchecked(const WeierstrassCurve& c);

// forward application of [u;r,s,t]; all divisions must be exact
WeierstrassCurve apply_transform(const WeierstrassCurve& c, const Transform& t);

// global minimal model (Laska-Kraus-Connell) plus the transform input -> output
std::pair<WeierstrassCurve, Transform> minimal_model(const WeierstrassCurve& c,
                                                     unsigned effort_digits = 30,
                                                     FactorCache* cache = nullptr);

bool on_curve(const WeierstrassCurve& c, const AffinePointQ& p);
AffinePointQ point_neg(const WeierstrassCurve& c, const AffinePointQ& p);
AffinePointQ point_add(const WeierstrassCurve& c, const AffinePointQ& p, const AffinePointQ& q);
AffinePointQ point_mul(const WeierstrassCurve& c, const AffinePointQ& p, unsigned long n);

// #E(F_p) including infinity; exhaustive below kExhaustivePointBound, BSGS above.
// throws BadReduction when p divides disc of the given model.
inline constexpr uint64_t kExhaustivePointBound = 1u << 16;
uint64_t count_points_mod_p(const WeierstrassCurve& c, uint64_t p);

// text format: [a1,a2,a3,a4,a6]
WeierstrassCurve parse_curve(const std::string& s);
std::string curve_to_string(const WeierstrassCurve& c);

}  // namespace shaforge
