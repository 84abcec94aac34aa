#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

namespace shaforge {

struct Factorization {
    int sign = 1;  // value = sign * prod p^e
    mpz_class value;
    std::vector<std::pair<mpz_class, unsigned>> factors;  // primes strictly ascending

    mpz_class reassemble() const;  // sign * prod p^e, for self-checks
};

// deterministic for q < 3.317e24 (fixed Miller-Rabin witness set through 41),
// probabilistic with error < 2^-128 above
bool is_prime(const mpz_class& q);

// trial division to 1e6, perfect-power extraction, then Brent-Pollard rho.
// throws FactorTooHard when a composite cofactor exceeds 10^effort_digits.
Factorization factor(const mpz_class& v, unsigned effort_digits = 30);

// memoizing wrapper; cache key is |value|. shared across an isogeny class so
// common discriminant factors are split once.
using FactorCache = std::map<mpz_class, Factorization>;
Factorization factor_cached(const mpz_class& v, unsigned effort_digits, FactorCache* cache);

// (floor(sqrt(v)), floor^2 == v)
std::pair<mpz_class, bool> isqrt(const mpz_class& v);

bool is_power_of_four(const mpz_class& v);

// x mod m in [0, m)
mpz_class mod_nonneg(const mpz_class& x, const mpz_class& m);

// p-adic valuation; also returns x / p^val through `reduced` if non-null.
// x must be nonzero.
unsigned long valuation(const mpz_class& x, const mpz_class& p, mpz_class* reduced = nullptr);

// ---- 64-bit modular helpers (point counting hot path) ----

uint64_t mulmod_u64(uint64_t a, uint64_t b, uint64_t m);
uint64_t powmod_u64(uint64_t a, uint64_t e, uint64_t m);
uint64_t invmod_u64(uint64_t a, uint64_t p);  // p prime, a != 0 mod p
// legendre symbol, p odd prime: 1, 0, or -1
int legendre_u64(uint64_t a, uint64_t p);
// square root mod odd prime p; a must be a QR. Tonelli-Shanks.
uint64_t sqrtmod_u64(uint64_t a, uint64_t p);

}  // namespace shaforge
