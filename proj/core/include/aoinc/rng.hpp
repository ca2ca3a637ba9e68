// rng.hpp - xoshiro256++ generator with splitmix64 seeding and per-stream
// derivation. Substreams are addressed by a 64-bit stream id: the state is
// produced by a splitmix64 sequence seeded with
//     seed XOR ((stream_id + 1) * 0x9E3779B97F4A7C15)
// so that (seed, stream_id) pairs give statistically independent streams.
// The simulator reserves stream ids per run: 0 arrivals, 1 splitting,
// 2 + i for subsystem i; sweep row r uses ids offset by r * connected block.
#pragma once

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>

namespace aoinc {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

class Xoshiro256pp {
  public:
    explicit Xoshiro256pp(std::uint64_t seed, std::uint64_t stream_id = 0) {
        std::uint64_t sm = seed ^ ((stream_id + 1) * 0x9E3779B97F4A7C15ULL);
        for (auto& word : state_) word = splitmix64(sm);
    }

    std::uint64_t next() {
        const std::uint64_t result = std::rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = std::rotl(state_[3], 45);
        return result;
    }

    // Uniform on the open interval (0,1): never 0, never 1.
    double uniform01() { return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53; }

    double exponential(double mean) { return -mean * std::log(uniform01()); }

    // Sum of `stages` independent exponentials with the given rate.
    double erlang(int stages, double rate) {
        double s = 0.0;
        for (int i = 0; i < stages; ++i) s += exponential(1.0 / rate);
        return s;
    }

    // Index i with probability cumulative[i] - cumulative[i-1]; cumulative
    // is non-decreasing with back() == 1 (within rounding).
    template <typename Vec>
    std::size_t categorical(const Vec& cumulative) {
        const double u = uniform01();
        std::size_t i = 0;
        while (i + 1 < cumulative.size() && u > cumulative[i]) ++i;
        return i;
    }

  private:
    std::array<std::uint64_t, 4> state_;
};

}  // namespace aoinc
