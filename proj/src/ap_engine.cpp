#include "shaforge/ap_engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <condition_variable>
#include <cstdio>
#include <map>
#include <memory>
#include <mutex>
#include <thread>

#include "shaforge/errors.hpp"
#include "shaforge/intarith.hpp"
#include "shaforge/util.hpp"

namespace shaforge {

namespace {

// odd-composite marks for [lo, hi) using base primes <= sqrt(hi)
std::vector<uint64_t> primes_in_range(uint64_t lo, uint64_t hi,
                                      const std::vector<uint64_t>& base) {
    std::vector<uint64_t> out;
    if (hi <= lo) return out;
    std::vector<uint8_t> composite(hi - lo, 0);
    for (uint64_t p : base) {
        if (p * p >= hi) break;
        uint64_t start = std::max(p * p, ((lo + p - 1) / p) * p);
        for (uint64_t n = start; n < hi; n += p) composite[n - lo] = 1;
    }
    for (uint64_t n = std::max<uint64_t>(lo, 2); n < hi; ++n)
        if (!composite[n - lo]) out.push_back(n);
    return out;
}

std::vector<uint64_t> base_primes(uint64_t limit) {
    std::vector<uint64_t> out;
    if (limit < 2) return out;
    std::vector<uint8_t> composite(limit + 1, 0);
    for (uint64_t i = 2; i <= limit; ++i) {
        if (composite[i]) continue;
        out.push_back(i);
        for (uint64_t j = i * i; j <= limit; j += i) composite[j] = 1;
    }
    return out;
}

// reduction type at the (few, small enough to fit u64) bad primes <= m
std::map<uint64_t, int64_t> bad_ap_map(const GlobalArithData& g, uint64_t m) {
    std::map<uint64_t, int64_t> out;
    for (const LocalData& ld : g.locals) {
        if (!ld.p.fits_ulong_p()) continue;
        uint64_t p = ld.p.get_ui();
        if (p > m) continue;
        switch (ld.reduction) {
            case Reduction::split_mult: out[p] = 1; break;
            case Reduction::nonsplit_mult: out[p] = -1; break;
            case Reduction::additive: out[p] = 0; break;
            case Reduction::good: throw InternalError("good reduction listed as local datum");
        }
    }
    return out;
}

}  // namespace

int64_t ap_single(const WeierstrassCurve& minimal, const GlobalArithData& g, uint64_t p) {
    for (const LocalData& ld : g.locals) {
        if (ld.p == mpz_class(static_cast<unsigned long>(p))) {
            switch (ld.reduction) {
                case Reduction::split_mult: return 1;
                case Reduction::nonsplit_mult: return -1;
                default: return 0;
            }
        }
    }
    uint64_t count = count_points_mod_p(minimal, p);
    return static_cast<int64_t>(p) + 1 - static_cast<int64_t>(count);
}

ApTable build_ap_table(const WeierstrassCurve& minimal, const GlobalArithData& g, uint64_t m,
                       unsigned workers) {
    ApTable tab;
    tab.m = m;
    if (m < 2) return tab;

    auto base = base_primes(static_cast<uint64_t>(std::sqrt(static_cast<double>(m))) + 2);
    auto bad = bad_ap_map(g, m);

    uint64_t nchunks = (m - 1) / kApChunkLen + 1;
    std::vector<std::vector<uint64_t>> chunk_primes(nchunks);
    std::vector<std::vector<int64_t>> chunk_apv(nchunks);

    auto do_chunk = [&](uint64_t ci) {
        uint64_t lo = 2 + ci * kApChunkLen;
        uint64_t hi = std::min(m + 1, lo + kApChunkLen);
        auto ps = primes_in_range(lo, hi, base);
        std::vector<int64_t> as;
        as.reserve(ps.size());
        for (uint64_t p : ps) {
            auto it = bad.find(p);
            if (it != bad.end()) {
                as.push_back(it->second);
            } else {
                uint64_t count = count_points_mod_p(minimal, p);
                as.push_back(static_cast<int64_t>(p) + 1 - static_cast<int64_t>(count));
            }
        }
        chunk_primes[ci] = std::move(ps);
        chunk_apv[ci] = std::move(as);
    };

    if (workers <= 1 || nchunks == 1) {
        for (uint64_t ci = 0; ci < nchunks; ++ci) do_chunk(ci);
    } else {
        std::atomic<uint64_t> next{0};
        auto run = [&] {
            for (;;) {
                uint64_t ci = next.fetch_add(1);
                if (ci >= nchunks) return;
                do_chunk(ci);
            }
        };
        std::vector<std::thread> pool;
        unsigned n = std::min<unsigned>(workers, static_cast<unsigned>(nchunks));
        pool.reserve(n);
        for (unsigned i = 0; i < n; ++i) pool.emplace_back(run);
        for (auto& t : pool) t.join();
    }

    size_t total = 0;
    for (auto& v : chunk_primes) total += v.size();
    tab.primes.reserve(total);
    tab.apv.reserve(total);
    for (uint64_t ci = 0; ci < nchunks; ++ci) {
        tab.primes.insert(tab.primes.end(), chunk_primes[ci].begin(), chunk_primes[ci].end());
        tab.apv.insert(tab.apv.end(), chunk_apv[ci].begin(), chunk_apv[ci].end());
    }
    return tab;
}

namespace {

// a_{p^e} for e = 1..e_max with p^e <= m; good primes follow the Hecke
// recursion, bad primes are plain powers of +-1/0
struct PrimePowers {
    uint64_t p = 0;
    std::vector<int64_t> a;  // a[e-1] = coefficient at p^e
};

std::vector<PrimePowers> small_prime_powers(const ApTable& tab, const GlobalArithData& g,
                                            uint64_t m) {
    std::vector<PrimePowers> out;
    for (size_t i = 0; i < tab.primes.size(); ++i) {
        uint64_t p = tab.primes[i];
        if (p * p > m) break;
        PrimePowers pp;
        pp.p = p;
        int64_t a_p = tab.apv[i];
        bool bad = mpz_divisible_ui_p(g.disc_min.get_mpz_t(), static_cast<unsigned long>(p)) != 0;
        int64_t prev = 1, cur = a_p;
        uint64_t pe = p;
        for (;;) {
            pp.a.push_back(cur);
            if (pe > m / p) break;
            pe *= p;
            if (bad) {
                cur = cur * a_p;
            } else {
                int64_t nxt = a_p * cur - static_cast<int64_t>(p) * prev;
                prev = cur;
                cur = nxt;
            }
        }
        out.push_back(std::move(pp));
    }
    return out;
}

std::vector<int64_t> fill_block(const ApTable& tab, const std::vector<PrimePowers>& pps,
                                uint64_t first, uint64_t last) {
    size_t len = static_cast<size_t>(last - first + 1);
    std::vector<uint64_t> res(len);
    std::vector<int64_t> coef(len, 1);
    for (size_t i = 0; i < len; ++i) res[i] = first + i;

    for (const PrimePowers& pp : pps) {
        uint64_t p = pp.p;
        if (p * p > last) break;
        uint64_t n0 = ((first + p - 1) / p) * p;
        for (uint64_t n = n0; n <= last; n += p) {
            size_t i = static_cast<size_t>(n - first);
            unsigned e = 0;
            while (res[i] % p == 0) {
                res[i] /= p;
                ++e;
            }
            if (e) coef[i] *= pp.a[e - 1];
        }
    }

    for (size_t i = 0; i < len; ++i) {
        if (res[i] == 1) continue;
        // leftover factor is a single prime above sqrt(last)
        auto it = std::lower_bound(tab.primes.begin(), tab.primes.end(), res[i]);
        if (it == tab.primes.end() || *it != res[i])
            throw InternalError("coefficient table does not cover residual prime");
        coef[i] *= tab.apv[static_cast<size_t>(it - tab.primes.begin())];
    }
    return coef;
}

}  // namespace

void an_stream(const ApTable& tab, const GlobalArithData& g, uint64_t m, unsigned workers,
               const std::function<void(uint64_t, const std::vector<int64_t>&)>& sink) {
    if (m == 0) return;
    if (tab.m < m) throw InternalError("coefficient table shorter than requested stream");
    auto pps = small_prime_powers(tab, g, m);
    uint64_t nblocks = (m - 1) / kSumBlockLen + 1;

    auto block_range = [&](uint64_t b, uint64_t* first, uint64_t* last) {
        *first = 1 + b * kSumBlockLen;
        *last = std::min(m, *first + kSumBlockLen - 1);
    };

    if (workers <= 1 || nblocks == 1) {
        for (uint64_t b = 0; b < nblocks; ++b) {
            uint64_t first, last;
            block_range(b, &first, &last);
            auto coef = fill_block(tab, pps, first, last);
            sink(first, coef);
        }
        return;
    }

    std::mutex mu;
    std::condition_variable cv;
    std::vector<std::unique_ptr<std::vector<int64_t>>> done(nblocks);
    std::atomic<uint64_t> next{0};
    uint64_t emitted = 0;
    const uint64_t window = 4ull * workers;  // bound memory held ahead of the consumer

    auto run = [&] {
        for (;;) {
            uint64_t b = next.fetch_add(1);
            if (b >= nblocks) return;
            {
                std::unique_lock<std::mutex> lk(mu);
                cv.wait(lk, [&] { return b < emitted + window; });
            }
            uint64_t first, last;
            block_range(b, &first, &last);
            auto coef = std::make_unique<std::vector<int64_t>>(fill_block(tab, pps, first, last));
            {
                std::lock_guard<std::mutex> lk(mu);
                done[b] = std::move(coef);
            }
            cv.notify_all();
        }
    };

    std::vector<std::thread> pool;
    unsigned n = std::min<unsigned>(workers, static_cast<unsigned>(nblocks));
    pool.reserve(n);
    for (unsigned i = 0; i < n; ++i) pool.emplace_back(run);

    for (uint64_t b = 0; b < nblocks; ++b) {
        std::unique_ptr<std::vector<int64_t>> coef;
        {
            std::unique_lock<std::mutex> lk(mu);
            cv.wait(lk, [&] { return done[b] != nullptr; });
            coef = std::move(done[b]);
            emitted = b + 1;
        }
        cv.notify_all();
        uint64_t first, last;
        block_range(b, &first, &last);
        sink(first, *coef);
    }
    for (auto& t : pool) t.join();
}

void save_ap_cache(const std::string& path, const std::string& curve_text, const ApTable& tab) {
    std::string body = "APC1|curve=" + curve_text + "|m=" + std::to_string(tab.m) +
                       "|count=" + std::to_string(tab.primes.size()) + "\n";
    uint64_t prev = 0;
    for (size_t i = 0; i < tab.primes.size(); ++i) {
        varint_append(body, tab.primes[i] - prev);
        prev = tab.primes[i];
        varint_append(body, zigzag_encode(tab.apv[i]));
    }
    uint32_t crc = crc32(body);
    for (int i = 0; i < 4; ++i) body.push_back(static_cast<char>((crc >> (8 * i)) & 0xff));
    write_file_atomic(path, body);
}

bool load_ap_cache(const std::string& path, const std::string& curve_text, uint64_t m,
                   ApTable* out) {
    std::string data;
    try {
        data = read_file(path);
    } catch (const IoError&) {
        return false;
    }
    if (data.size() < 4) return false;
    size_t body_len = data.size() - 4;
    std::string_view body(data.data(), body_len);
    uint32_t stored = 0;
    for (int i = 0; i < 4; ++i)
        stored |= static_cast<uint32_t>(static_cast<uint8_t>(data[body_len + i])) << (8 * i);
    if (crc32(body) != stored) return false;

    size_t nl = data.find('\n');
    if (nl == std::string::npos || nl > body_len) return false;
    std::string header = data.substr(0, nl);
    auto fields = split(header, '|');
    if (fields.size() != 4 || fields[0] != "APC1") return false;
    if (fields[1] != "curve=" + curve_text) return false;
    if (fields[2] != "m=" + std::to_string(m)) return false;
    if (fields[3].rfind("count=", 0) != 0) return false;
    uint64_t count = 0;
    try {
        count = std::stoull(fields[3].substr(6));
    } catch (...) {
        return false;
    }

    ApTable tab;
    tab.m = m;
    tab.primes.reserve(count);
    tab.apv.reserve(count);
    size_t pos = nl + 1;
    uint64_t prev = 0;
    for (uint64_t i = 0; i < count; ++i) {
        uint64_t dp = 0, za = 0;
        if (!varint_read(body, pos, dp)) return false;
        if (!varint_read(body, pos, za)) return false;
        prev += dp;
        tab.primes.push_back(prev);
        tab.apv.push_back(zigzag_decode(za));
    }
    if (pos != body_len) return false;
    *out = std::move(tab);
    return true;
}

}  // namespace shaforge
