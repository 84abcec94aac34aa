#include "shaforge/family.hpp"

#include "shaforge/errors.hpp"

namespace shaforge {

mpz_class family_scale(unsigned n) {
    mpz_class s;
    mpz_ui_pow_ui(s.get_mpz_t(), 3, 2 * n + 1);
    return s;
}

mpz_class family_torsion_scale(unsigned n) { return 4 * family_scale(n); }

WeierstrassCurve family_curve(int member, unsigned n, const mpz_class& p) {
    mpz_class s = family_scale(n);
    mpz_class t = 4 * s;
    if (p == 0 || p == t) throw DegenerateParameters("family parameters give a singular fiber");
    WeierstrassCurve c;
    switch (member) {
        case 1:
            c.a2 = 2 * p - t;
            c.a4 = p * (p - t);
            break;
        case 2:
            c.a2 = 4 * (2 * s - p);
            c.a4 = 16 * s * s;
            break;
        case 3:
            c.a2 = 2 * (t + p);
            c.a4 = (t - p) * (t - p);
            break;
        case 4:
            c.a2 = 2 * (p - 2 * t);
            c.a4 = p * p;
            break;
        default:
            throw InternalError("family member index must be 1..4");
    }
    return c;
}

std::vector<WeierstrassCurve> family_class(unsigned n, const mpz_class& p) {
    std::vector<WeierstrassCurve> out;
    out.reserve(4);
    for (int i = 1; i <= 4; ++i) out.push_back(family_curve(i, n, p));
    return out;
}

}  // namespace shaforge
