#include "doctest.h"
#include "shaforge/intarith.hpp"
#include "shaforge/errors.hpp"
#include "shaforge/util.hpp"

#include <set>

using namespace shaforge;

TEST_CASE("primality: small and known values") {
    CHECK(is_prime(2));
    CHECK(is_prime(3));
    CHECK(is_prime(97));
    CHECK(!is_prime(1));
    CHECK(!is_prime(0));
    CHECK(!is_prime(561));      // carmichael
    CHECK(!is_prime(1105));
    CHECK(is_prime(6491));
    CHECK(is_prime(107323));
    CHECK(is_prime(8883041));
    CHECK(is_prime(mpz_class("10000000019")));
    CHECK(is_prime(mpz_class("10000000033")));
    CHECK(!is_prime(mpz_class("10000000019") * mpz_class("10000000033")));
    // strong pseudoprime to base 2
    CHECK(!is_prime(2047));
}

TEST_CASE("primality agrees with sieve below 10^4") {
    std::vector<bool> comp(10000, false);
    for (int i = 2; i < 10000; i++)
        if (!comp[i])
            for (int j = 2 * i; j < 10000; j += i) comp[j] = true;
    for (int i = 2; i < 10000; i++) CHECK(is_prime(i) == !comp[i]);
}

TEST_CASE("factor: basic") {
    auto f = factor(60);
    REQUIRE(f.factors.size() == 3);
    CHECK(f.factors[0] == std::make_pair(mpz_class(2), 2u));
    CHECK(f.factors[1] == std::make_pair(mpz_class(3), 1u));
    CHECK(f.factors[2] == std::make_pair(mpz_class(5), 1u));
    CHECK(f.sign == 1);
    CHECK(f.reassemble() == 60);

    auto g = factor(-60);
    CHECK(g.sign == -1);
    CHECK(g.factors == f.factors);
    CHECK(g.reassemble() == -60);

    auto one = factor(1);
    CHECK(one.factors.empty());
    CHECK(one.reassemble() == 1);
}

TEST_CASE("factor: perfect powers and near powers") {
    mpz_class two64 = mpz_class(1) << 64;
    auto f = factor(two64);
    REQUIRE(f.factors.size() == 1);
    CHECK(f.factors[0] == std::make_pair(mpz_class(2), 64u));

    mpz_class p = 1000003;  // prime above trial bound
    auto g = factor(p * p);
    REQUIRE(g.factors.size() == 1);
    CHECK(g.factors[0] == std::make_pair(p, 2u));

    mpz_class h = mpz_class("10000000019");
    auto k = factor(h * h * h);
    REQUIRE(k.factors.size() == 1);
    CHECK(k.factors[0] == std::make_pair(h, 3u));
}

TEST_CASE("factor: semiprimes requiring rho") {
    mpz_class a("10000000019"), b("10000000033");
    auto f = factor(a * b);
    REQUIRE(f.factors.size() == 2);
    CHECK(f.factors[0] == std::make_pair(a, 1u));
    CHECK(f.factors[1] == std::make_pair(b, 1u));

    mpz_class c = 1000003, d = 1000033;
    auto g = factor(c * d * 7);
    REQUIRE(g.factors.size() == 3);
    CHECK(g.factors[0].first == 7);
    CHECK(g.factors[1].first == c);
    CHECK(g.factors[2].first == d);
}

TEST_CASE("factor: frozen 22-digit value splits as expected") {
    // conductor-sized integer whose factorization is known in advance
    mpz_class n("1832369310703810488288");
    auto f = factor(n);
    std::vector<std::pair<mpz_class, unsigned>> want = {
        {2, 5}, {3, 1}, {7, 1}, {31, 1}, {257, 1}, {359, 1}, {107323, 1}, {8883041, 1}};
    CHECK(f.factors == want);
    CHECK(f.reassemble() == n);
}

TEST_CASE("factor: 23-digit value with 2^5*3 prefix") {
    mpz_class n("7441767284139709375008");
    auto f = factor(n, 30);
    REQUIRE(f.factors.size() >= 2);
    CHECK(f.factors[0] == std::make_pair(mpz_class(2), 5u));
    CHECK(f.factors[1] == std::make_pair(mpz_class(3), 1u));
    CHECK(f.reassemble() == n);
    for (auto& [p, e] : f.factors) CHECK(is_prime(p));
}

TEST_CASE("factor: product property on random mixed inputs") {
    uint64_t s = 0x5eedc0de;
    for (int trial = 0; trial < 2000; trial++) {
        mpz_class n = 2 + mpz_class((unsigned long)(splitmix64(s) % 999999999999ULL));
        auto f = factor(n);
        CHECK(f.reassemble() == n);
        mpz_class prod = 1;
        mpz_class prev = 1;
        for (auto& [p, e] : f.factors) {
            CHECK(p > prev);  // sorted strictly ascending
            prev = p;
            CHECK(e >= 1);
            CHECK(is_prime(p));
            for (unsigned i = 0; i < e; i++) prod *= p;
        }
        CHECK(prod == n);
    }
}

TEST_CASE("factor: effort cap throws instead of spinning") {
    // two 20+ digit primes; product is far beyond a 30-digit effort budget
    mpz_class p1, p2, t;
    t = mpz_class("10000000000000000000");           // 10^19
    mpz_nextprime(p1.get_mpz_t(), t.get_mpz_t());
    t = mpz_class("30000000000000000000");
    mpz_nextprime(p2.get_mpz_t(), t.get_mpz_t());
    CHECK_THROWS_AS(factor(p1 * p2, 30), FactorTooHard);
    // same inputs succeed when the budget is raised and rho gets a chance
    // (not run: 20-digit split may exceed the step cap; the point here is the
    //  budget check fires before any expensive work)
}

TEST_CASE("factor_cached reuses results") {
    FactorCache cache;
    mpz_class n("1832369310703810488288");
    auto f1 = factor_cached(n, 30, &cache);
    CHECK(cache.size() == 1);
    auto f2 = factor_cached(-n, 30, &cache);
    CHECK(cache.size() == 1);
    CHECK(f2.sign == -1);
    CHECK(f1.factors == f2.factors);
}

TEST_CASE("isqrt: exact root flag") {
    auto [r1, sq1] = isqrt(mpz_class("1059277340944"));
    CHECK(r1 == 1029212);
    CHECK(sq1);

    auto [r2, sq2] = isqrt(mpz_class("1059277300944"));
    CHECK(!sq2);
    CHECK(r2 * r2 <= mpz_class("1059277300944"));
    CHECK((r2 + 1) * (r2 + 1) > mpz_class("1059277300944"));

    auto [r0, sq0] = isqrt(0);
    CHECK(r0 == 0);
    CHECK(sq0);
}

TEST_CASE("isqrt: floor property on random inputs") {
    uint64_t s = 99;
    for (int i = 0; i < 5000; i++) {
        mpz_class n = mpz_class((unsigned long)(splitmix64(s) >> 8)) *
                      mpz_class((unsigned long)(splitmix64(s) >> 40));
        auto [r, sq] = isqrt(n);
        CHECK(r * r <= n);
        CHECK((r + 1) * (r + 1) > n);
        CHECK(sq == (r * r == n));
    }
}

TEST_CASE("is_power_of_four") {
    CHECK(is_power_of_four(1));
    CHECK(is_power_of_four(4));
    CHECK(is_power_of_four(16));
    CHECK(is_power_of_four(mpz_class(1) << 40));
    CHECK(!is_power_of_four(0));
    CHECK(!is_power_of_four(2));
    CHECK(!is_power_of_four(8));
    CHECK(!is_power_of_four(mpz_class(1) << 41));
    CHECK(!is_power_of_four(-4));
    CHECK(!is_power_of_four(12));
}

TEST_CASE("valuation") {
    mpz_class red;
    CHECK(valuation(48, 2, &red) == 4);
    CHECK(red == 3);
    CHECK(valuation(48, 3, &red) == 1);
    CHECK(red == 16);
    CHECK(valuation(-162, 3, &red) == 4);
    CHECK(red == -2);
    CHECK(valuation(7, 5) == 0);
}

TEST_CASE("mod_nonneg") {
    CHECK(mod_nonneg(7, 3) == 1);
    CHECK(mod_nonneg(-7, 3) == 2);
    CHECK(mod_nonneg(-6, 3) == 0);
    CHECK(mod_nonneg(mpz_class("-1000000000000000000007"), 10) == 3);
}

TEST_CASE("u64 modular helpers") {
    CHECK(mulmod_u64(0xFFFFFFFFFFFFFFC4ULL, 0xFFFFFFFFFFFFFFC4ULL, 0xFFFFFFFFFFFFFFC5ULL) == 1);
    CHECK(powmod_u64(2, 10, 1000000007ULL) == 1024);
    CHECK(powmod_u64(5, 1000000006ULL, 1000000007ULL) == 1);  // fermat
    uint64_t inv = invmod_u64(12345, 1000000007ULL);
    CHECK(mulmod_u64(12345, inv, 1000000007ULL) == 1);

    CHECK(legendre_u64(4, 7) == 1);
    CHECK(legendre_u64(3, 7) == -1);
    CHECK(legendre_u64(14, 7) == 0);

    uint64_t s = 7;
    for (int i = 0; i < 500; i++) {
        uint64_t p = 1000003;
        uint64_t a = splitmix64(s) % p;
        if (a == 0) continue;
        int chi = legendre_u64(a, p);
        CHECK(chi == (powmod_u64(a, (p - 1) / 2, p) == 1 ? 1 : -1));
        if (chi == 1) {
            uint64_t r = sqrtmod_u64(a, p);
            CHECK(mulmod_u64(r, r, p) == a);
        }
    }
    // p = 3 mod 4 branch
    uint64_t r = sqrtmod_u64(2, 7);
    CHECK(mulmod_u64(r, r, 7) == 2);
}
