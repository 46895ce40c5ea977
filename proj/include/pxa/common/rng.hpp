#pragma once

#include <cstdint>
#include <limits>

namespace pxa {

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Purpose tags keep the streams for different noise sources disjoint.
enum class Stream : std::uint64_t {
    shot = 1,
    read = 2,
    fpn = 3,
    dark = 4,
    texture = 5,
    test = 6,
};

constexpr std::uint64_t stream_key(std::uint64_t seed, Stream s, std::uint64_t frame,
                                   std::uint64_t pixel) noexcept {
    std::uint64_t k = splitmix64(seed ^ (static_cast<std::uint64_t>(s) << 56));
    k = splitmix64(k ^ frame);
    return splitmix64(k ^ (pixel * 0xd6e8feb86659fd93ULL));
}

// Counter-based generator: the output sequence depends only on the key, so
// per-pixel draws are independent of evaluation order.
class CounterRng {
public:
    using result_type = std::uint64_t;

    explicit constexpr CounterRng(std::uint64_t key) noexcept : key_(key) {}
    CounterRng(std::uint64_t seed, Stream s, std::uint64_t frame, std::uint64_t pixel) noexcept
        : key_(stream_key(seed, s, frame, pixel)) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept {
        return std::numeric_limits<result_type>::max();
    }

    constexpr result_type operator()() noexcept { return splitmix64(key_ + counter_++); }

    // Uniform double in [0, 1).
    double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace pxa
