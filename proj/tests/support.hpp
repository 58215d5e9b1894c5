#pragma once

#include <cstdint>
#include <random>

namespace testsupport {

// mt19937_64 plus manual double conversion; distributions from <random>
// are implementation-defined, the engine itself is not, so this stays
// reproducible across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t u64() { return engine_(); }
    std::uint64_t below(std::uint64_t n) { return u64() % n; }
    double unit() { return static_cast<double>(u64() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }

private:
    std::mt19937_64 engine_;
};

}  // namespace testsupport
