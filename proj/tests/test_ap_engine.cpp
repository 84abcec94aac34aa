#include "shaforge/ap_engine.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>

#include "doctest.h"
#include "shaforge/ec_core.hpp"
#include "shaforge/errors.hpp"
#include "shaforge/localdata.hpp"
#include "shaforge/util.hpp"

using namespace shaforge;

namespace {

struct Prepared {
    WeierstrassCurve minimal;
    GlobalArithData g;
};

Prepared prepare(const WeierstrassCurve& c) {
    Prepared p;
    p.g = global_data(c);
    p.minimal = p.g.minimal;
    return p;
}

const WeierstrassCurve k11a1{0, -1, 1, -10, -20};
const WeierstrassCurve kMx{0, 0, 0, -1, 0};

std::vector<int64_t> collect_stream(const ApTable& tab, const GlobalArithData& g, uint64_t m,
                                    unsigned workers) {
    std::vector<int64_t> all;
    all.reserve(m);
    uint64_t expect = 1;
    an_stream(tab, g, m, workers, [&](uint64_t first, const std::vector<int64_t>& v) {
        REQUIRE(first == expect);
        all.insert(all.end(), v.begin(), v.end());
        expect = first + v.size();
    });
    REQUIRE(all.size() == m);
    return all;
}

}  // namespace

TEST_CASE("prime coefficients match direct counts and known values") {
    auto pr = prepare(k11a1);
    // q-expansion prefix of the conductor-11 curve
    const int64_t want[20] = {1, -2, -1, 2, 1,  2, -2, 0, -2, -2,
                              1, -2, 4,  4, -1, -4, -2, 4, 0,  2};
    auto tab = build_ap_table(pr.minimal, pr.g, 20000);
    auto an = collect_stream(tab, pr.g, 20000, 1);
    for (int i = 0; i < 20; ++i) CHECK(an[i] == want[i]);

    // bad prime: split multiplicative at 11
    CHECK(ap_single(pr.minimal, pr.g, 11) == 1);
    CHECK(an[11 - 1] == 1);
    CHECK(an[121 - 1] == 1);    // bad prime powers stay a_p^k
    CHECK(an[22 - 1] == -2);    // multiplicative across the bad prime
    CHECK(an[19946 - 1] == an[2 - 1] * an[9973 - 1]);  // residual prime above sqrt(m)

    // table and stream agree at prime indices
    for (size_t i = 0; i < tab.primes.size(); i += 37)
        CHECK(an[tab.primes[i] - 1] == tab.apv[i]);
}

TEST_CASE("examples pinned by the library contract") {
    auto pr = prepare(kMx);
    CHECK(ap_single(pr.minimal, pr.g, 5) == -2);
    CHECK(ap_single(pr.minimal, pr.g, 2) == 0);  // additive at 2
    auto tab = build_ap_table(pr.minimal, pr.g, 100);
    auto an = collect_stream(tab, pr.g, 100, 1);
    CHECK(an[5 - 1] == -2);
    CHECK(an[9 - 1] == -3);
    CHECK(an[2 - 1] == 0);
    CHECK(an[4 - 1] == 0);
    CHECK(an[1 - 1] == 1);
}

TEST_CASE("large family member from the pinned examples") {
    // member 1 at (n, p) = (20, -1436): T = 4 * 3^41
    mpz_class S;
    mpz_ui_pow_ui(S.get_mpz_t(), 3, 41);
    mpz_class T = 4 * S;
    mpz_class p = -1436;
    WeierstrassCurve e1{0, 2 * p - T, 0, p * (p - T), 0};
    auto pr = prepare(e1);
    CHECK(ap_single(pr.minimal, pr.g, 5) == 2);
    CHECK(ap_single(pr.minimal, pr.g, 6491) == 108);
}

TEST_CASE("hasse bound and bad-prime values across a table") {
    auto pr = prepare(k11a1);
    auto tab = build_ap_table(pr.minimal, pr.g, 50000);
    REQUIRE(tab.primes.size() > 5000);
    for (size_t i = 0; i < tab.primes.size(); ++i) {
        uint64_t p = tab.primes[i];
        int64_t a = tab.apv[i];
        if (p == 11) {
            CHECK(a == 1);
            continue;
        }
        CHECK(static_cast<double>(a) * static_cast<double>(a) <= 4.0 * static_cast<double>(p));
    }
}

TEST_CASE("multiplicativity on random coprime pairs") {
    auto pr = prepare(k11a1);
    const uint64_t m = 20000;
    auto tab = build_ap_table(pr.minimal, pr.g, m);
    auto an = collect_stream(tab, pr.g, m, 1);
    uint64_t seed = 0x5eedf00d;
    int done = 0;
    while (done < 10000) {
        uint64_t a = 1 + splitmix64(seed) % 200;
        uint64_t b = 1 + splitmix64(seed) % (m / a);
        if (std::gcd(a, b) != 1) continue;
        CHECK(an[a * b - 1] == an[a - 1] * an[b - 1]);
        ++done;
    }
}

TEST_CASE("isogenous family members share every coefficient") {
    // all four members at (n, p) = (21, 12)
    mpz_class S;
    mpz_ui_pow_ui(S.get_mpz_t(), 3, 43);
    mpz_class T = 4 * S;
    mpz_class p = 12;
    std::vector<WeierstrassCurve> members = {
        {0, 2 * p - T, 0, p * (p - T), 0},
        {0, 4 * (2 * S - p), 0, 16 * S * S, 0},
        {0, 2 * (T + p), 0, (T - p) * (T - p), 0},
        {0, 2 * (p - 2 * T), 0, p * p, 0},
    };
    std::vector<ApTable> tabs;
    mpz_class conductor;
    for (size_t i = 0; i < members.size(); ++i) {
        auto pr = prepare(members[i]);
        if (i == 0)
            conductor = pr.g.conductor;
        else
            CHECK(pr.g.conductor == conductor);
        tabs.push_back(build_ap_table(pr.minimal, pr.g, 10000));
    }
    for (size_t i = 1; i < tabs.size(); ++i) {
        CHECK(tabs[i].primes == tabs[0].primes);
        CHECK(tabs[i].apv == tabs[0].apv);
    }
}

TEST_CASE("stream output is identical for every worker count") {
    auto pr = prepare(kMx);
    const uint64_t m = 50000;  // four dense blocks
    auto tab = build_ap_table(pr.minimal, pr.g, m);
    auto ref = collect_stream(tab, pr.g, m, 1);
    CHECK(collect_stream(tab, pr.g, m, 4) == ref);
    CHECK(collect_stream(tab, pr.g, m, 16) == ref);
}

TEST_CASE("table build is identical for every worker count") {
    auto pr = prepare(k11a1);
    const uint64_t m = 2200000;  // three enumeration chunks
    auto t1 = build_ap_table(pr.minimal, pr.g, m, 1);
    auto t4 = build_ap_table(pr.minimal, pr.g, m, 4);
    CHECK(t1.primes == t4.primes);
    CHECK(t1.apv == t4.apv);
    REQUIRE(!t1.primes.empty());
    CHECK(t1.primes.back() <= m);
    CHECK(t1.primes.size() == 162662);  // pi(2200000)
}

TEST_CASE("coefficient cache round-trips and rejects mismatches") {
    auto pr = prepare(k11a1);
    const uint64_t m = 5000;
    auto tab = build_ap_table(pr.minimal, pr.g, m);
    std::string curve = curve_to_string(pr.minimal);
    auto dir = std::filesystem::temp_directory_path();
    std::string path = (dir / "shaforge_apc_test.bin").string();

    save_ap_cache(path, curve, tab);
    ApTable back;
    REQUIRE(load_ap_cache(path, curve, m, &back));
    CHECK(back.m == tab.m);
    CHECK(back.primes == tab.primes);
    CHECK(back.apv == tab.apv);

    ApTable scratch;
    CHECK(!load_ap_cache(path, curve, m + 1, &scratch));       // wrong length
    CHECK(!load_ap_cache(path, "[0,0,0,-1,0]", m, &scratch));  // wrong curve
    CHECK(!load_ap_cache(path + ".missing", curve, m, &scratch));

    std::string data = read_file(path);
    // flip one payload byte: crc must catch it
    std::string damaged = data;
    damaged[data.size() / 2] = static_cast<char>(damaged[data.size() / 2] ^ 0x40);
    write_file_atomic(path, damaged);
    CHECK(!load_ap_cache(path, curve, m, &scratch));

    // torn tail
    write_file_atomic(path, data.substr(0, data.size() - 9));
    CHECK(!load_ap_cache(path, curve, m, &scratch));

    // round-trip again after restoring
    write_file_atomic(path, data);
    REQUIRE(load_ap_cache(path, curve, m, &back));
    CHECK(back.apv == tab.apv);
    std::filesystem::remove(path);
}
