#pragma once

#include <cstdint>
#include <random>

#include "evscale/dataset.hpp"

namespace evscale {

// Seeded samplers with behavior pinned by this code (the standard library's
// distribution objects are implementation-defined, which would break
// byte-identical reruns across toolchains).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // Uniform on [0, 1) with 53 random bits.
    double uniform();
    // Uniform on (0, 1), never exactly zero.
    double uniform_pos();
    double normal();  // polar Box-Muller
    double gamma(double shape, double scale);  // Marsaglia-Tsang
    std::int64_t poisson(double mean);  // inversion below 10, PTRS above

private:
    std::mt19937_64 engine_;
    bool have_spare_normal_ = false;
    double spare_normal_ = 0.0;
};

// NB2 draw with mean mu and dispersion r via the gamma-Poisson mixture.
std::int64_t sample_negbin(Rng& rng, double mu, double r);

struct SyntheticSpec {
    double y0 = 2.0;
    double beta = 1.1;
    double r = 1.5;
    int n_rows = 3000;
    double n_min = 1e2;  // populations log-uniform on [n_min, n_max]
    double n_max = 1e7;
    std::uint64_t seed = 1;
};

// Counts drawn NB2(mu = y0 * N^beta, r) over log-uniform populations.
Dataset sample_negbin_dataset(const SyntheticSpec& spec);

}  // namespace evscale
