#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace splitgauge::prng {

// Counter-based pseudo-random stream. Every seeded operation in the toolkit
// draws from one of these, keyed by (seed, domain), so results are
// bit-reproducible across platforms and independent of execution order.
//
// The generator is SplitMix64 evaluated in counter mode: the n-th output is
// finalize(base + (n + 1) * GOLDEN_GAMMA) where base is derived from the key.
// Distinct domains give statistically independent streams.
uint64_t stream_base(uint64_t seed, std::string_view domain);

class Stream {
public:
    Stream(uint64_t seed, std::string_view domain, uint64_t start_counter = 0)
        : base_(stream_base(seed, domain)), counter_(start_counter) {}

    uint64_t next_u64();

    // Uniform in [0, 1), 53-bit resolution.
    double next_unit();

    // Uniform in [0, bound), unbiased (Lemire's multiply-shift with rejection).
    // bound must be nonzero.
    uint64_t next_below(uint64_t bound);

    // Standard normal via Box-Muller; consumes two u64 per pair, second value
    // cached. Pairs are exact in the integer stream; the float values depend
    // on libm rounding only.
    double next_gauss();

    uint64_t counter() const { return counter_; }

private:
    uint64_t base_;
    uint64_t counter_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

// Unbiased Fisher-Yates shuffle, in place.
template <typename T>
void shuffle(Stream& s, std::vector<T>& items) {
    for (size_t i = items.size(); i > 1; --i) {
        size_t j = static_cast<size_t>(s.next_below(i));
        std::swap(items[i - 1], items[j]);
    }
}

// m distinct indices drawn uniformly from [0, n), in draw order (partial
// Fisher-Yates). A single call with m = a + b yields two disjoint samples of
// sizes a and b by splitting the prefix.
std::vector<uint32_t> sample_without_replacement(Stream& s, uint64_t n, uint64_t m);

}  // namespace splitgauge::prng
