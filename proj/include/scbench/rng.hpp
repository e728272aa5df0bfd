#ifndef SCBENCH_RNG_HPP
#define SCBENCH_RNG_HPP

#include <cstdint>
#include <random>
#include <vector>

/**
 * @file rng.hpp
 * @brief Portable seeded random number generation.
 *
 * The engine is `std::mt19937_64`, whose output sequence is fixed by the standard.
 * The standard library's distributions are implementation-defined, so all variates are derived here
 * from the raw 64-bit stream with fixed algorithms:
 *
 * - uniform reals take the top 53 bits of one draw;
 * - bounded integers use rejection sampling on the raw stream;
 * - normals use the Box-Muller transform (both variates of a pair are used);
 * - gammas use Marsaglia-Tsang;
 * - Poissons use multiplication of uniforms below a mean of 10 and Hormann's PTRS above it.
 */

namespace scbench {

/**
 * Mix `(seed, stream)` into an independent sub-seed with the splitmix64 finalizer.
 * Used wherever work is split into restarts or permutations so each unit has its own stream.
 */
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /** Uniform on [0, 1). */
    double uniform();

    /** Uniform integer on [0, n); `n` must be positive. */
    std::uint64_t below(std::uint64_t n);

    double normal();

    /** Gamma with the given shape and unit scale. */
    double gamma(double shape);

    std::uint64_t poisson(double mean);

    template<typename T>
    void shuffle(std::vector<T>& values) {
        for (std::size_t i = values.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(values[i - 1], values[j]);
        }
    }

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0;
};

}

#endif
