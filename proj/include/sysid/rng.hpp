#pragma once

#include <cmath>
#include <cstdint>

namespace sysid::rng {

// splitmix64 finalizer (Steele, Lea, Flood 2014).
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Counter-based draw: every random number is a pure function of
// (seed, stream, step, lane). Streams are trial indices, steps are time
// indices, lanes index coordinates within one noise vector. No generator
// state is carried between draws, so trials can run on any thread in any
// order and still reproduce bit-identically.
inline std::uint64_t draw_u64(std::uint64_t seed, std::uint64_t stream,
                              std::uint64_t step, std::uint64_t lane) {
    std::uint64_t h = mix64(seed);
    h = mix64(h ^ stream);
    h = mix64(h ^ step);
    h = mix64(h ^ lane);
    return h;
}

// Uniform on the open interval (0,1); never returns 0 or 1, so it is safe
// to feed into log().
inline double draw_unit(std::uint64_t seed, std::uint64_t stream,
                        std::uint64_t step, std::uint64_t lane) {
    return (static_cast<double>(draw_u64(seed, stream, step, lane) >> 11) + 0.5) *
           0x1.0p-53;
}

// Standard normal via Box-Muller; consumes lanes 2k and 2k+1.
inline double draw_gaussian(std::uint64_t seed, std::uint64_t stream,
                            std::uint64_t step, std::uint64_t lane) {
    const double u1 = draw_unit(seed, stream, step, 2 * lane);
    const double u2 = draw_unit(seed, stream, step, 2 * lane + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

inline double draw_rademacher(std::uint64_t seed, std::uint64_t stream,
                              std::uint64_t step, std::uint64_t lane) {
    return (draw_u64(seed, stream, step, lane) & 1ULL) ? 1.0 : -1.0;
}

// Uniform on [-sqrt(3), sqrt(3)]: zero mean, unit variance.
inline double draw_uniform_isotropic(std::uint64_t seed, std::uint64_t stream,
                                     std::uint64_t step, std::uint64_t lane) {
    const double u = draw_unit(seed, stream, step, lane);
    return (2.0 * u - 1.0) * std::sqrt(3.0);
}

}  // namespace sysid::rng
