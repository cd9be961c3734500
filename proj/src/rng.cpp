#include "kdiff/rng.hpp"

#include <numbers>

namespace kdiff {
namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    const std::uint64_t prod = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(prod >> 32);
    lo = static_cast<std::uint32_t>(prod);
}

} // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::uint32_t key0, std::uint32_t key1) {
    for (int round = 0; round < 10; ++round) {
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kPhiloxM0, ctr[0], hi0, lo0);
        mulhilo(kPhiloxM1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key0, lo1, hi0 ^ ctr[3] ^ key1, lo0};
        key0 += kPhiloxW0;
        key1 += kPhiloxW1;
    }
    return ctr;
}

double CounterStream::uniform01(std::uint32_t step, std::uint32_t slot) const {
    const auto words = philox4x32({static_cast<std::uint32_t>(stream_),
                                   static_cast<std::uint32_t>(stream_ >> 32), step, slot},
                                  static_cast<std::uint32_t>(seed_),
                                  static_cast<std::uint32_t>(seed_ >> 32));
    const std::uint64_t bits =
        (static_cast<std::uint64_t>(words[1]) << 32) | static_cast<std::uint64_t>(words[0]);
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

double CounterStream::uniform_angle(std::uint32_t step, std::uint32_t slot) const {
    return -std::numbers::pi + 2.0 * std::numbers::pi * uniform01(step, slot);
}

} // namespace kdiff
