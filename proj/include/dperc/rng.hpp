#pragma once

#include <cstdint>
#include <string_view>

namespace dperc {

/// Identifier written into run metadata for every stream produced here.
inline constexpr std::string_view kRngName = "splitmix64-counter";

inline constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ULL;

/// SplitMix64 output finalizer (Stafford variant 13).
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Key of the independent stream number `index` under a run seed.
constexpr std::uint64_t stream_key(std::uint64_t seed, std::uint64_t index) noexcept {
    return mix64(mix64(seed) ^ mix64(index * kGoldenGamma + 0x632be59bd9b4e019ULL));
}

/// Random word at position `counter` of stream `key`. Random access, so the
/// value attached to a lattice edge does not depend on the order of visits.
constexpr std::uint64_t word_at(std::uint64_t key, std::uint64_t counter) noexcept {
    return mix64(key + (counter + 1) * kGoldenGamma);
}

constexpr double to_unit(std::uint64_t w) noexcept {
    return static_cast<double>(w >> 11) * 0x1.0p-53;
}

/// Uniform in [0,1) at position `counter` of stream `key`.
constexpr double uniform_at(std::uint64_t key, std::uint64_t counter) noexcept {
    return to_unit(word_at(key, counter));
}

/// Sequential reader over one counter-based stream.
class CounterStream {
public:
    constexpr CounterStream(std::uint64_t key, std::uint64_t start = 0) noexcept
        : key_(key), counter_(start) {}

    constexpr std::uint64_t next() noexcept { return word_at(key_, counter_++); }
    constexpr double uniform() noexcept { return to_unit(next()); }

    /// Uniform integer in [0, bound), bound > 0 (Lemire's multiply-shift with rejection).
    std::uint64_t below(std::uint64_t bound) noexcept {
        unsigned __int128 m = static_cast<unsigned __int128>(next()) * bound;
        auto low = static_cast<std::uint64_t>(m);
        if (low < bound) {
            const std::uint64_t threshold = (0 - bound) % bound;
            while (low < threshold) {
                m = static_cast<unsigned __int128>(next()) * bound;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    constexpr std::uint64_t position() const noexcept { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_;
};

}  // namespace dperc
