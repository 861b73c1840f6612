#include "cvarkit/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cvarkit {

namespace {

constexpr std::uint32_t kM0 = 0xD2511F53u;
constexpr std::uint32_t kM1 = 0xCD9E8D57u;
constexpr std::uint32_t kW0 = 0x9E3779B9u;
constexpr std::uint32_t kW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> c,
                                           std::array<std::uint32_t, 2> k) {
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            k[0] += kW0;
            k[1] += kW1;
        }
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kM0, c[0], hi0, lo0);
        mulhilo(kM1, c[2], hi1, lo1);
        c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    }
    return c;
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream_hash, std::uint64_t substream)
    : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
      substream_(substream),
      stream_hash_(stream_hash ^ (substream >> 32) * 0x9E3779B97F4A7C15ULL) {}

std::uint64_t CounterRng::next_u64() {
    if (buf_pos_ >= 4) {
        if (block_ > 0xFFFFFFFFULL) throw std::length_error("CounterRng: substream exhausted");
        std::array<std::uint32_t, 4> ctr = {
            static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(substream_),
            static_cast<std::uint32_t>(stream_hash_), static_cast<std::uint32_t>(stream_hash_ >> 32)};
        buf_ = philox4x32_10(ctr, key_);
        ++block_;
        buf_pos_ = 0;
    }
    std::uint64_t lo = buf_[buf_pos_];
    std::uint64_t hi = buf_[buf_pos_ + 1];
    buf_pos_ += 2;
    return (hi << 32) | lo;
}

double CounterRng::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double CounterRng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u1 = uniform_pos();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double t = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(t);
    has_spare_ = true;
    return r * std::cos(t);
}

double CounterRng::gamma(double shape) {
    if (!(shape > 0.0)) throw std::invalid_argument("gamma: shape must be positive");
    if (shape < 1.0) {
        double g = gamma(shape + 1.0);
        return g * std::pow(uniform_pos(), 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double z = normal();
        double v = 1.0 + c * z;
        if (v <= 0.0) continue;
        v = v * v * v;
        double u = uniform_pos();
        if (std::log(u) < 0.5 * z * z + d - d * v + d * std::log(v)) return d * v;
    }
}

}  // namespace cvarkit
