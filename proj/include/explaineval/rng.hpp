#pragma once
// Deterministic cross-platform randomness. Standard distributions are
// implementation-defined, so draws are hand-rolled on top of splitmix64.

#include <cstdint>
#include <string_view>

namespace explaineval {

// splitmix64: tiny, well-mixed, and identical everywhere.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next();

    // Uniform in [0, n); n must be positive. Modulo bias is negligible for
    // the small n used here and keeps the draw count fixed.
    std::uint64_t uniform_index(std::uint64_t n);

    // Uniform in [0, 1).
    double uniform01();

    // Standard normal via Box-Muller (fresh pair per call; second value
    // discarded so the draw count per call is constant).
    double normal(double mean = 0.0, double sd = 1.0);

private:
    std::uint64_t state_;
};

// Independent sub-stream: hash the parent seed with a purpose tag so draw
// order in one stream never perturbs another.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag);

}  // namespace explaineval
