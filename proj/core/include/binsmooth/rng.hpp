#pragma once

#include <cstdint>
#include <string_view>

namespace binsmooth {

/**
 * Deterministic random stream: xoshiro256++ seeded through splitmix64.
 *
 * Substreams are derived from (master seed, stream index, purpose tag), so a
 * simulation replicate or a Gaussian draw index always sees the same stream
 * regardless of thread count or execution order.  The derivation is
 *
 *   key = splitmix64(splitmix64(master ^ fnv1a(purpose)) ^ (stream + 1))
 *
 * and the four xoshiro words are the next four splitmix64 outputs from key.
 */
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    static Rng substream(std::uint64_t master, std::uint64_t stream, std::string_view purpose);

    std::uint64_t next_u64();

    /// Uniform on the open interval (0,1); 53-bit resolution, never 0 or 1.
    double uniform01();

    double uniform(double a, double b);

    /// Standard normal via the inverse-CDF applied to uniform01().
    double normal();

private:
    std::uint64_t state_[4];
};

/// Inverse standard normal CDF (Wichura's AS 241, double precision).
double normal_quantile(double p);

/// Standard normal CDF.
double normal_cdf(double z);

} // namespace binsmooth
