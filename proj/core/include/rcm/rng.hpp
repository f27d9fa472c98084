#pragma once

#include <array>
#include <cstdint>

namespace rcm {

// Philox4x32-10 counter-based generator. Every draw is a pure function of
// (seed, counter), so any value can be recomputed out of order.
class Philox {
public:
    using Block = std::array<std::uint32_t, 4>;

    explicit Philox(std::uint64_t seed = 0)
        : key0_(static_cast<std::uint32_t>(seed)), key1_(static_cast<std::uint32_t>(seed >> 32)) {}

    Block operator()(Block ctr) const {
        std::uint32_t k0 = key0_, k1 = key1_;
        for (int round = 0; round < 10; ++round) {
            std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * ctr[0];
            std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * ctr[2];
            ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ k0, static_cast<std::uint32_t>(p1),
                   static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ k1, static_cast<std::uint32_t>(p0)};
            k0 += kW0;
            k1 += kW1;
        }
        return ctr;
    }

    static Philox with_key(std::uint32_t k0, std::uint32_t k1) {
        Philox p;
        p.key0_ = k0;
        p.key1_ = k1;
        return p;
    }

private:
    static constexpr std::uint32_t kM0 = 0xD2511F53u;
    static constexpr std::uint32_t kM1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kW0 = 0x9E3779B9u;
    static constexpr std::uint32_t kW1 = 0xBB67AE85u;
    std::uint32_t key0_ = 0, key1_ = 0;
};

// Independent uniform streams; one per purpose so that draws never collide.
enum class Stream : std::uint32_t {
    HeatBath = 1,
    ClusterActivation = 2,
    ClusterEdge = 3,
    Coupling = 4,
    Derive = 5,
    Synthetic = 6,
};

// Uniform in [0,1) keyed by (seed, step, index, stream).
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed) : philox_(seed), seed_(seed) {}

    double uniform(std::uint64_t step, std::uint32_t index, Stream stream) const {
        auto b = philox_({index, static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(step),
                          static_cast<std::uint32_t>(step >> 32)});
        std::uint64_t bits = (static_cast<std::uint64_t>(b[0]) << 32 | b[1]) >> 11;
        return static_cast<double>(bits) * 0x1.0p-53;
    }

    std::uint64_t seed() const { return seed_; }

private:
    Philox philox_;
    std::uint64_t seed_;
};

// Child seed for independent chains or runs.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    Philox ph(seed);
    auto b = ph({static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(Stream::Derive),
                 static_cast<std::uint32_t>(index >> 32), 0x5eedu});
    return static_cast<std::uint64_t>(b[0]) << 32 | b[1];
}

}  // namespace rcm
