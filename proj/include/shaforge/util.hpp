#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace shaforge {

uint32_t crc32(std::string_view data);

// unsigned LEB128
void varint_append(std::string& out, uint64_t v);
// returns false on truncated input; advances pos past the varint on success
bool varint_read(std::string_view in, size_t& pos, uint64_t& v);

inline uint64_t zigzag_encode(int64_t v) {
    return (static_cast<uint64_t>(v) << 1) ^ static_cast<uint64_t>(v >> 63);
}
inline int64_t zigzag_decode(uint64_t v) {
    return static_cast<int64_t>(v >> 1) ^ -static_cast<int64_t>(v & 1);
}

std::vector<std::string> split(std::string_view s, char sep);

// write to <path>.tmp then rename, so readers never observe a partial file
void write_file_atomic(const std::string& path, std::string_view content);
std::string read_file(const std::string& path);

// deterministic 64-bit mixer, used to seed per-input PRNGs
// splitmix64 generator: advances `state`, returns the next value
uint64_t splitmix64(uint64_t& state);

}  // namespace shaforge
