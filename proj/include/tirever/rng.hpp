#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace tirever {

/// SplitMix64 finaliser; used to derive well-separated seeds from small
/// integer keys.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/// A deterministic random stream with value semantics. Streams are derived
/// from a master seed plus a key path, so replication i of a Monte Carlo
/// cell gets the same draws regardless of which worker runs it.
class RandomStream {
public:
    using engine_type = std::mt19937_64;
    using result_type = engine_type::result_type;

    explicit RandomStream(std::uint64_t seed) : engine_(splitmix64(seed)) {}

    static RandomStream derive(std::uint64_t master, std::initializer_list<std::uint64_t> keys) {
        std::uint64_t h = splitmix64(master);
        for (const auto k : keys) h = splitmix64(h ^ splitmix64(k + 0x632BE59BD9B4E019ull));
        return RandomStream(h);
    }

    /// Independent child stream; advances this stream by one draw.
    RandomStream split() { return RandomStream(engine_()); }

    static constexpr result_type min() { return engine_type::min(); }
    static constexpr result_type max() { return engine_type::max(); }
    result_type operator()() { return engine_(); }

    double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
    double normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }

private:
    engine_type engine_;
};

}  // namespace tirever
