#include "shaforge/intarith.hpp"

#include <algorithm>
#include <cstdint>

#include "shaforge/errors.hpp"
#include "shaforge/util.hpp"

namespace shaforge {

namespace {

constexpr uint32_t kTrialBound = 1'000'000;

const std::vector<uint32_t>& trial_primes() {
    static const std::vector<uint32_t> primes = [] {
        std::vector<bool> composite(kTrialBound + 1, false);
        std::vector<uint32_t> ps;
        for (uint32_t i = 2; i <= kTrialBound; i++) {
            if (composite[i]) continue;
            ps.push_back(i);
            for (uint64_t j = uint64_t(i) * i; j <= kTrialBound; j += i) composite[j] = true;
        }
        return ps;
    }();
    return primes;
}

// one Miller-Rabin round; n odd > 2, n-1 = d * 2^s, 1 < a < n-1
bool mr_round(const mpz_class& n, const mpz_class& n1, const mpz_class& d, unsigned long s,
              const mpz_class& a) {
    mpz_class x;
    mpz_powm(x.get_mpz_t(), a.get_mpz_t(), d.get_mpz_t(), n.get_mpz_t());
    if (x == 1 || x == n1) return true;
    for (unsigned long i = 1; i < s; i++) {
        x = (x * x) % n;
        if (x == n1) return true;
    }
    return false;
}

// the witness set {2,...,41} decides primality below 3.317e24
const char* kMrDeterministicLimit = "3317044064679887385961981";

mpz_class pow10_z(unsigned d) {
    mpz_class t;
    mpz_ui_pow_ui(t.get_mpz_t(), 10, d);
    return t;
}

// Brent-cycle rho with batched gcd; returns a nontrivial factor or 0 on failure
mpz_class rho_brent(const mpz_class& n, unsigned long c, uint64_t max_steps) {
    const mpz_class cc(static_cast<unsigned long>(c));
    mpz_class y(2), x, ys, q(1), g(1), diff;
    uint64_t r = 1, steps = 0;
    const uint64_t batch = 128;
    while (g == 1) {
        x = y;
        for (uint64_t i = 0; i < r; i++) y = (y * y + cc) % n;
        for (uint64_t k = 0; k < r && g == 1; k += batch) {
            ys = y;
            uint64_t lim = std::min(batch, r - k);
            for (uint64_t i = 0; i < lim; i++) {
                y = (y * y + cc) % n;
                diff = x - y;
                q = (q * abs(diff)) % n;
            }
            mpz_gcd(g.get_mpz_t(), q.get_mpz_t(), n.get_mpz_t());
            steps += lim;
            if (steps > max_steps) return 0;
        }
        r *= 2;
    }
    if (g == n) {
        // batch overshot the collision; replay one step at a time
        do {
            ys = (ys * ys + cc) % n;
            diff = x - ys;
            diff = abs(diff);
            mpz_gcd(g.get_mpz_t(), diff.get_mpz_t(), n.get_mpz_t());
        } while (g == 1);
    }
    if (g == n) return 0;
    return g;
}

}  // namespace

mpz_class Factorization::reassemble() const {
    mpz_class r = 1, pw;
    for (const auto& [p, e] : factors) {
        mpz_pow_ui(pw.get_mpz_t(), p.get_mpz_t(), e);
        r *= pw;
    }
    return sign * r;
}

bool is_prime(const mpz_class& q) {
    if (q < 2) return false;
    for (uint32_t p : trial_primes()) {
        if (p > 100) break;
        if (mpz_divisible_ui_p(q.get_mpz_t(), p)) return q == p;
    }
    if (q < 10201) return true;  // no prime factor <= 100, and q < 101^2

    mpz_class n1 = q - 1, d = n1;
    unsigned long s = mpz_scan1(d.get_mpz_t(), 0);
    mpz_fdiv_q_2exp(d.get_mpz_t(), d.get_mpz_t(), s);

    static const unsigned kWitnesses[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41};
    for (unsigned a : kWitnesses)
        if (!mr_round(q, n1, d, s, mpz_class(a))) return false;

    static const mpz_class det_limit(kMrDeterministicLimit);
    if (q < det_limit) return true;

    // 64 extra rounds with bases derived deterministically from q itself
    uint64_t seed = mpz_fdiv_ui(q.get_mpz_t(), 0xFFFFFFFFFFFFFFC5ull);
    mpz_class span = q - 3;
    for (int i = 0; i < 64; i++) {
        mpz_class a = 2 + mpz_class(mpz_class(splitmix64(seed)) % span);
        if (!mr_round(q, n1, d, s, a)) return false;
    }
    return true;
}

Factorization factor(const mpz_class& v, unsigned effort_digits) {
    if (v == 0) throw InternalError("factor: value must be nonzero");
    if (effort_digits < 20) effort_digits = 20;

    Factorization out;
    out.value = v;
    out.sign = (v < 0) ? -1 : 1;
    mpz_class a = abs(v);

    std::map<mpz_class, unsigned> found;
    for (uint32_t p : trial_primes()) {
        if (mpz_class(p) * p > a) break;
        if (!mpz_divisible_ui_p(a.get_mpz_t(), p)) continue;
        unsigned e = 0;
        while (mpz_divisible_ui_p(a.get_mpz_t(), p)) {
            mpz_divexact_ui(a.get_mpz_t(), a.get_mpz_t(), p);
            e++;
        }
        found[mpz_class(p)] += e;
    }

    const mpz_class hard_limit = pow10_z(effort_digits);
    std::vector<std::pair<mpz_class, unsigned>> stack;
    if (a > 1) stack.emplace_back(a, 1);

    while (!stack.empty()) {
        auto [c, mult] = stack.back();
        stack.pop_back();
        if (is_prime(c)) {
            found[c] += mult;
            continue;
        }
        if (mpz_perfect_power_p(c.get_mpz_t())) {
            // family discriminants are full of squares and fourth powers;
            // peeling the root keeps rho working on the small base
            unsigned long maxe = mpz_sizeinbase(c.get_mpz_t(), 2);
            bool peeled = false;
            for (unsigned long e = 2; e <= maxe; e++) {
                mpz_class root;
                if (mpz_root(root.get_mpz_t(), c.get_mpz_t(), e) != 0) {
                    stack.emplace_back(root, mult * static_cast<unsigned>(e));
                    peeled = true;
                    break;
                }
            }
            if (peeled) continue;
        }
        if (c > hard_limit)
            throw FactorTooHard("composite cofactor " + c.get_str() + " exceeds 10^" +
                                std::to_string(effort_digits));
        mpz_class d = 0;
        for (unsigned long cc = 1; cc <= 8 && d == 0; cc++)
            d = rho_brent(c, cc, uint64_t(1) << 28);
        if (d == 0)
            throw FactorTooHard("rho gave up on " + c.get_str());
        stack.emplace_back(d, mult);
        stack.emplace_back(mpz_class(c / d), mult);
    }

    out.factors.assign(found.begin(), found.end());
    return out;
}

Factorization factor_cached(const mpz_class& v, unsigned effort_digits, FactorCache* cache) {
    if (!cache) return factor(v, effort_digits);
    mpz_class key = abs(v);
    auto it = cache->find(key);
    if (it != cache->end()) {
        Factorization f = it->second;
        f.value = v;
        f.sign = (v < 0) ? -1 : 1;
        return f;
    }
    Factorization f = factor(v, effort_digits);
    Factorization pos = f;
    pos.sign = 1;
    pos.value = key;
    (*cache)[key] = pos;
    return f;
}

std::pair<mpz_class, bool> isqrt(const mpz_class& v) {
    if (v < 0) throw InternalError("isqrt: negative input");
    mpz_class root, rem;
    mpz_sqrtrem(root.get_mpz_t(), rem.get_mpz_t(), v.get_mpz_t());
    return {root, rem == 0};
}

bool is_power_of_four(const mpz_class& v) {
    if (v <= 0) return false;
    if (mpz_popcount(v.get_mpz_t()) != 1) return false;
    return mpz_scan1(v.get_mpz_t(), 0) % 2 == 0;
}

mpz_class mod_nonneg(const mpz_class& x, const mpz_class& m) {
    mpz_class r;
    mpz_mod(r.get_mpz_t(), x.get_mpz_t(), m.get_mpz_t());
    return r;
}

unsigned long valuation(const mpz_class& x, const mpz_class& p, mpz_class* reduced) {
    if (x == 0) throw InternalError("valuation of zero");
    mpz_class red;
    unsigned long v = mpz_remove(red.get_mpz_t(), x.get_mpz_t(), p.get_mpz_t());
    if (reduced) *reduced = red;
    return v;
}

uint64_t mulmod_u64(uint64_t a, uint64_t b, uint64_t m) {
    return static_cast<uint64_t>((static_cast<unsigned __int128>(a) * b) % m);
}

uint64_t powmod_u64(uint64_t a, uint64_t e, uint64_t m) {
    uint64_t r = 1 % m;
    a %= m;
    while (e) {
        if (e & 1) r = mulmod_u64(r, a, m);
        a = mulmod_u64(a, a, m);
        e >>= 1;
    }
    return r;
}

uint64_t invmod_u64(uint64_t a, uint64_t p) { return powmod_u64(a % p, p - 2, p); }

int legendre_u64(uint64_t a, uint64_t p) {
    a %= p;
    if (a == 0) return 0;
    uint64_t r = powmod_u64(a, (p - 1) / 2, p);
    return r == 1 ? 1 : -1;
}

uint64_t sqrtmod_u64(uint64_t a, uint64_t p) {
    a %= p;
    if (a == 0) return 0;
    if ((p & 3) == 3) return powmod_u64(a, (p + 1) / 4, p);
    // Tonelli-Shanks
    uint64_t q = p - 1, s = 0;
    while ((q & 1) == 0) { q >>= 1; s++; }
    uint64_t z = 2;
    while (legendre_u64(z, p) != -1) z++;
    uint64_t m = s;
    uint64_t c = powmod_u64(z, q, p);
    uint64_t t = powmod_u64(a, q, p);
    uint64_t r = powmod_u64(a, (q + 1) / 2, p);
    while (t != 1) {
        uint64_t i = 0, t2 = t;
        while (t2 != 1) { t2 = mulmod_u64(t2, t2, p); i++; }
        uint64_t b = c;
        for (uint64_t j = 0; j + i + 1 < m; j++) b = mulmod_u64(b, b, p);
        m = i;
        c = mulmod_u64(b, b, p);
        t = mulmod_u64(t, c, p);
        r = mulmod_u64(r, b, p);
    }
    return r;
}

}  // namespace shaforge
