#pragma once

#include <gmpxx.h>

#include <vector>

#include "shaforge/ec_core.hpp"

namespace shaforge {

// scale parameters shared by the scan family
mpz_class family_scale(unsigned n);          // S = 3^(2n+1)
mpz_class family_torsion_scale(unsigned n);  // T = 4 * 3^(2n+1)

// member i in 1..4 of the isogeny class attached to (n, p);
// throws DegenerateParameters when p is 0 or T (singular fibers)
WeierstrassCurve family_curve(int member, unsigned n, const mpz_class& p);

// all four members in index order
std::vector<WeierstrassCurve> family_class(unsigned n, const mpz_class& p);

}  // namespace shaforge
