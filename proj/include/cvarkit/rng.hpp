#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace cvarkit {

// Philox4x32-10 block function (Salmon et al., Random123).
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr,
                                           std::array<std::uint32_t, 2> key);

// 64-bit FNV-1a, used to turn stream names into counter words.
constexpr std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

// Counter-based generator. The key is the run seed; the counter holds
// (draw index, substream index, stream name hash), so every
// (seed, stream, substream) triple is an independent, reproducible sequence
// regardless of thread scheduling.
//
// Streams used by the library:
//   "scenarios"  portfolio Monte Carlo rows (substream = row)
//   "prices"     hedging price paths (substream = path)
//   "phi"        recovery measurement maps (substream = trial/n pair)
//   "signal"     recovery ground-truth signals (substream = trial)
//   "hyperplane" projection experiment normals (substream = trial)
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::string_view stream, std::uint64_t substream = 0)
        : CounterRng(seed, fnv1a64(stream), substream) {}
    CounterRng(std::uint64_t seed, std::uint64_t stream_hash, std::uint64_t substream);

    std::uint64_t next_u64();
    // Uniform on [0, 1) with 53 random bits.
    double uniform();
    // Uniform on (0, 1].
    double uniform_pos() { return 1.0 - uniform(); }
    // Standard normal via Box-Muller (both variates used).
    double normal();
    // Gamma(shape, 1) via Marsaglia-Tsang; boosted for shape < 1.
    double gamma(double shape);

private:
    std::array<std::uint32_t, 2> key_;
    std::uint64_t substream_;
    std::uint64_t stream_hash_;
    std::uint64_t block_ = 0;
    std::array<std::uint32_t, 4> buf_{};
    int buf_pos_ = 4;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

// Seed used when neither --seed nor CVARKIT_SEED is given.
inline constexpr std::uint64_t kDefaultSeed = 20160901ULL;

}  // namespace cvarkit
