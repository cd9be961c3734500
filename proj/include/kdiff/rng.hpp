#pragma once

#include <array>
#include <cstdint>

namespace kdiff {

/// Philox 4x32-10 block (Salmon et al., "Parallel random numbers: as easy as
/// 1, 2, 3", SC 2011). A block is a pure function of (counter, key): streams
/// carry no state, so any draw can be regenerated from its coordinates alone.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::uint32_t key0, std::uint32_t key1);

/// One logical random stream, keyed by (seed, stream id). Draws are addressed
/// by (step, slot); the same coordinates always produce the same variate, no
/// matter in which order or on which thread they are evaluated.
class CounterStream {
public:
    CounterStream(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {}

    /// Uniform on [0, 1) with 53 random mantissa bits.
    double uniform01(std::uint32_t step, std::uint32_t slot) const;

    /// Uniform angle on [-pi, pi).
    double uniform_angle(std::uint32_t step, std::uint32_t slot) const;

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
};

/// Sequential draw cursor over one (stream, step): hands out consecutive
/// slots. Used where a step may consume a variable number of variates
/// (e.g. resampling).
class RngCursor {
public:
    RngCursor(const CounterStream& s, std::uint32_t step) : stream_(s), step_(step) {}
    double next() { return stream_.uniform01(step_, slot_++); }
    std::uint32_t slots_used() const { return slot_; }

private:
    CounterStream stream_;
    std::uint32_t step_;
    std::uint32_t slot_ = 0;
};

} // namespace kdiff
