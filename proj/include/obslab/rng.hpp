#pragma once

#include <cstdint>
#include <vector>

// Self-contained generator so that seeded experiment outputs are
// byte-identical across standard libraries (std::normal_distribution is
// implementation-defined).

namespace obslab {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ULL) {}

    // splitmix64
    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // uniform in [0,1)
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Box-Muller; one draw per call, no cached spare (keeps replay trivial).
    double normal();

    // Uniform on the unit sphere in R^dim.
    std::vector<double> unit_vector(std::size_t dim);

private:
    std::uint64_t state_;
};

} // namespace obslab
