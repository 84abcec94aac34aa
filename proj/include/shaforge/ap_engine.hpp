#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "shaforge/ec_core.hpp"
#include "shaforge/localdata.hpp"

namespace shaforge {

// a_p for every prime p <= m, ascending; bad primes carry +1/-1/0
struct ApTable {
    uint64_t m = 0;
    std::vector<uint64_t> primes;
    std::vector<int64_t> apv;
};

// chunk length for parallel prime enumeration; output depends only on
// (curve, m) because chunks are fixed and concatenated in index order
inline constexpr uint64_t kApChunkLen = 1ull << 20;

// dense-block length for a_n streaming; fixed so streams are identical
// for every worker count
inline constexpr uint64_t kSumBlockLen = 1ull << 14;

int64_t ap_single(const WeierstrassCurve& minimal, const GlobalArithData& g, uint64_t p);

ApTable build_ap_table(const WeierstrassCurve& minimal, const GlobalArithData& g, uint64_t m,
                       unsigned workers = 1);

// dense a_n blocks covering [1, m] in order: sink(first_n, values) with
// values[i] = a_{first_n + i}
void an_stream(const ApTable& tab, const GlobalArithData& g, uint64_t m, unsigned workers,
               const std::function<void(uint64_t, const std::vector<int64_t>&)>& sink);

// binary cache, magic APC1: header line with curve text and m, then varint
// prime deltas and zigzag a_p values, then crc32 of all preceding bytes
bool load_ap_cache(const std::string& path, const std::string& curve_text, uint64_t m,
                   ApTable* out);
void save_ap_cache(const std::string& path, const std::string& curve_text, const ApTable& tab);

}  // namespace shaforge
