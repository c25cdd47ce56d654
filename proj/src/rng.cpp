#include "entbound/rng.hpp"

#include <cmath>
#include <numbers>

namespace entbound {
namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

inline std::uint64_t splitmix(std::uint64_t z) {
    z += kGolden;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace

RngStream gaussian_stream(std::uint64_t seed, std::uint64_t stream_id) {
    RngStream s;
    s.seed = seed;
    s.stream_id = stream_id;
    s.key_ = splitmix(splitmix(seed) ^ (stream_id + 0x6a09e667f3bcc909ULL));
    return s;
}

std::uint64_t next_u64(RngStream& s) {
    const std::uint64_t c = s.counter++;
    return splitmix(splitmix(s.key_ + c * kGolden));
}

double next_uniform(RngStream& s) {
    // 53-bit mantissa, shifted into (0, 1] so the log in Box-Muller is safe.
    return (static_cast<double>(next_u64(s) >> 11) + 1.0) * 0x1.0p-53;
}

double next_normal(RngStream& s) {
    if (s.has_spare) {
        s.has_spare = false;
        return s.spare;
    }
    const double u1 = next_uniform(s);
    const double u2 = next_uniform(s);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    s.spare = r * std::sin(a);
    s.has_spare = true;
    return r * std::cos(a);
}

}  // namespace entbound
