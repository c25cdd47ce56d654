#pragma once

#include <cstdint>

namespace entbound {

// Counter-based Gaussian stream. The output sequence is a pure function of
// (seed, stream_id): word k of the stream is a double application of the
// splitmix64 finalizer to a key derived from the pair, so distinct streams
// are decorrelated without shared state. One stream per logical task;
// streams are value types and are never shared across tasks.
struct RngStream {
    std::uint64_t seed = 0;
    std::uint64_t stream_id = 0;
    std::uint64_t counter = 0;
    // Box-Muller produces normals in pairs; the spare is cached here.
    bool has_spare = false;
    double spare = 0.0;

private:
    std::uint64_t key_ = 0;
    friend RngStream gaussian_stream(std::uint64_t seed, std::uint64_t stream_id);
    friend std::uint64_t next_u64(RngStream& s);
};

RngStream gaussian_stream(std::uint64_t seed, std::uint64_t stream_id);

// Raw 64-bit word; advances the counter.
std::uint64_t next_u64(RngStream& s);

// Uniform on (0, 1].
double next_uniform(RngStream& s);

// Standard normal draw (Box-Muller on the underlying uniforms).
double next_normal(RngStream& s);

}  // namespace entbound
