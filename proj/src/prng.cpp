#include "prng.hpp"

#include <cmath>
#include <numbers>

#include "error.hpp"

namespace splitgauge::prng {

namespace {

constexpr uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

// Stafford variant 13 mix, the SplitMix64 output function.
uint64_t mix64(uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
}

uint64_t fnv1a64(std::string_view bytes) {
    uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

}  // namespace

uint64_t stream_base(uint64_t seed, std::string_view domain) {
    return mix64(seed + kGoldenGamma) ^ fnv1a64(domain);
}

uint64_t Stream::next_u64() {
    ++counter_;
    return mix64(base_ + counter_ * kGoldenGamma);
}

double Stream::next_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

uint64_t Stream::next_below(uint64_t bound) {
    if (bound == 0)
        raise(ErrorKind::internal, "next_below: bound must be nonzero");
    uint64_t x = next_u64();
    __uint128_t m = static_cast<__uint128_t>(x) * bound;
    uint64_t low = static_cast<uint64_t>(m);
    if (low < bound) {
        uint64_t threshold = (0 - bound) % bound;
        while (low < threshold) {
            x = next_u64();
            m = static_cast<__uint128_t>(x) * bound;
            low = static_cast<uint64_t>(m);
        }
    }
    return static_cast<uint64_t>(m >> 64);
}

double Stream::next_gauss() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    // u1 in (0, 1] so the log is finite.
    double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    double u2 = next_unit();
    double r = std::sqrt(-2.0 * std::log(u1));
    double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
}

std::vector<uint32_t> sample_without_replacement(Stream& s, uint64_t n, uint64_t m) {
    if (m > n)
        raise(ErrorKind::capacity,
              "sample_without_replacement: requested " + std::to_string(m) +
                  " of " + std::to_string(n) + " indices");
    std::vector<uint32_t> pool(n);
    for (uint64_t i = 0; i < n; ++i)
        pool[i] = static_cast<uint32_t>(i);
    for (uint64_t i = 0; i < m; ++i) {
        uint64_t j = i + s.next_below(n - i);
        std::swap(pool[i], pool[j]);
    }
    pool.resize(m);
    return pool;
}

}  // namespace splitgauge::prng
