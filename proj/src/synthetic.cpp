#include "evscale/synthetic.hpp"

#include <cmath>

#include "evscale/errors.hpp"

namespace evscale {

double Rng::uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::uniform_pos() {
    double u;
    do {
        u = uniform();
    } while (u == 0.0);
    return u;
}

double Rng::normal() {
    if (have_spare_normal_) {
        have_spare_normal_ = false;
        return spare_normal_;
    }
    double u, v, s;
    do {
        u = 2.0 * uniform() - 1.0;
        v = 2.0 * uniform() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_normal_ = v * m;
    have_spare_normal_ = true;
    return u * m;
}

// Marsaglia-Tsang squeeze method.
double Rng::gamma(double shape, double scale) {
    if (!(shape > 0.0) || !(scale > 0.0)) throw Error("gamma: shape and scale must be positive");
    if (shape < 1.0) {
        const double u = uniform_pos();
        return gamma(shape + 1.0, scale) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = uniform_pos();
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v * scale;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v * scale;
    }
}

std::int64_t Rng::poisson(double mean) {
    if (!(mean >= 0.0)) throw Error("poisson: mean must be non-negative");
    if (mean == 0.0) return 0;
    if (mean < 10.0) {
        // Inversion by multiplication of uniforms.
        const double limit = std::exp(-mean);
        std::int64_t k = 0;
        double prod = uniform_pos();
        while (prod > limit) {
            ++k;
            prod *= uniform_pos();
        }
        return k;
    }
    // Hormann's PTRS transformed rejection, valid for mean >= 10.
    const double b = 0.931 + 2.53 * std::sqrt(mean);
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double v_r = 0.9277 - 3.6224 / (b - 2.0);
    const double log_mean = std::log(mean);
    for (;;) {
        const double u = uniform() - 0.5;
        const double v = uniform_pos();
        const double us = 0.5 - std::fabs(u);
        const double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
        if (us >= 0.07 && v <= v_r) return static_cast<std::int64_t>(kf);
        if (kf < 0.0 || (us < 0.013 && v > us)) continue;
        const double lhs = std::log(v * inv_alpha / (a / (us * us) + b));
        const double rhs = kf * log_mean - mean - std::lgamma(kf + 1.0);
        if (lhs <= rhs) return static_cast<std::int64_t>(kf);
    }
}

std::int64_t sample_negbin(Rng& rng, double mu, double r) {
    if (!(mu >= 0.0)) throw Error("sample_negbin: mean must be non-negative");
    if (!(r > 0.0)) throw Error("sample_negbin: dispersion must be positive");
    if (mu == 0.0) return 0;
    const double g = rng.gamma(r, mu / r);
    return rng.poisson(g);
}

Dataset sample_negbin_dataset(const SyntheticSpec& spec) {
    if (spec.n_rows < 3) throw Error("sample_negbin_dataset: need at least 3 rows");
    if (!(spec.n_min >= 1.0) || !(spec.n_max >= spec.n_min))
        throw Error("sample_negbin_dataset: population range must satisfy 1 <= n_min <= n_max");
    Rng rng(spec.seed);
    Dataset data;
    data.label = "Synthetic";
    data.rows.reserve(static_cast<std::size_t>(spec.n_rows));
    const double lo = std::log(spec.n_min), hi = std::log(spec.n_max);
    for (int i = 0; i < spec.n_rows; ++i) {
        const double ln = lo + (hi - lo) * rng.uniform();
        const auto population = std::max<std::int64_t>(1, std::llround(std::exp(ln)));
        const double mu = spec.y0 * std::pow(static_cast<double>(population), spec.beta);
        data.rows.push_back({population, sample_negbin(rng, mu, spec.r)});
    }
    return data;
}

}  // namespace evscale
