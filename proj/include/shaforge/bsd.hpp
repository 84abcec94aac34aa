#pragma once

#include <gmpxx.h>

#include <string>
#include <vector>

#include "shaforge/ec_core.hpp"
#include "shaforge/localdata.hpp"
#include "shaforge/lseries.hpp"
#include "shaforge/real.hpp"

namespace shaforge {

// integer roots of X^3 + a X + b, exact bisection on monotone pieces
std::vector<mpz_class> integer_cubic_roots(const mpz_class& a, const mpz_class& b);

struct TorsionInfo {
    unsigned order = 1;        // exact order of the rational torsion subgroup
    unsigned two_torsion = 1;  // order of its 2-torsion part: 1, 2, or 4
    uint64_t gcd_bound = 0;    // gcd of #E(F_p) over small good odd primes
    bool enumerated = false;   // integral-point enumeration was required
};
TorsionInfo torsion_order(const GlobalArithData& g);

enum class ShaStatus { ok, apparent_positive_rank, not_a_square, budget_exceeded, unfactored };
std::string sha_status_name(ShaStatus s);

struct ShaResult {
    ShaStatus status = ShaStatus::ok;
    mpz_class sha;       // rounded analytic order (ok / not_a_square)
    mpz_class sha_sqrt;  // exact square root when the order is a perfect square
    std::string gs;      // truncated growth quotient, set when status == ok
    Real value;          // unrounded quotient
    double tolerance = 0.0;
};

// sha / sqrt(conductor) truncated (not rounded) to 10 decimals, exactly
std::string growth_quotient(const mpz_class& sha, const mpz_class& conductor);

// extra digits needed so the quotient's absolute error stays well under 1/2;
// 0 when k alone suffices
unsigned sha_extra_digits(const TorsionInfo& t, const RealPeriod& period, const mpz_class& c_fin,
                          unsigned k);

ShaResult analytic_sha(const LTruncation& l, const TorsionInfo& t, const RealPeriod& period,
                       const GlobalArithData& g, unsigned k);

}  // namespace shaforge
