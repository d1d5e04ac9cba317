#include "evscale/mathutil.hpp"

#include <cmath>
#include <stdexcept>

namespace evscale {

namespace {
constexpr double kLnSqrt2Pi = 0.91893853320467274178;  // log sqrt(2 pi)
}

// AS 241 algorithm PPND16 (Wichura 1988).
double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("normal_quantile: p must be in (0,1)");
    const double q = p - 0.5;
    double r;
    if (std::fabs(q) <= 0.425) {
        r = 0.180625 - q * q;
        return q *
               (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                     6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
                   1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
                 1.3314166789178437745e2) * r + 3.3871328727963666080e0) /
               (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                     3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
                   5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
                 4.2313330701600911252e1) * r + 1.0);
    }
    r = (q < 0.0) ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double x;
    if (r <= 5.0) {
        r -= 1.6;
        x = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                  2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
                3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
              4.63033784615654529590e0) * r + 1.42343711074968357734e0) /
            (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                  1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
              2.05319162663775882187e0) * r + 1.0);
    } else {
        r -= 5.0;
        x = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                  1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
              5.46378491116411436990e0) * r + 6.65790464350110377720e0) /
            (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                  1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
                1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
              5.99832206555887937690e-1) * r + 1.0);
    }
    return (q < 0.0) ? -x : x;
}

double log_normal_upper_tail(double z) {
    if (z < 0.0) throw std::invalid_argument("log_normal_upper_tail: z must be >= 0");
    if (z < 30.0) {
        // erfc stays normal down to ~1e-300 over this range.
        return std::log(0.5 * std::erfc(z / std::sqrt(2.0)));
    }
    // Asymptotic: log phi(z)/z + log(1 - 1/z^2 + 3/z^4 - 15/z^6)
    const double z2 = z * z;
    const double series = -1.0 / z2 + 3.0 / (z2 * z2) - 15.0 / (z2 * z2 * z2);
    return -0.5 * z2 - kLnSqrt2Pi - std::log(z) + std::log1p(series);
}

double log_two_sided_normal_p(double w) {
    const double z = std::fabs(w);
    if (z == 0.0) return 0.0;  // p = 1
    return std::log(2.0) + log_normal_upper_tail(z);
}

double log_chisq_sf(double x, int df) {
    if (x < 0.0) throw std::invalid_argument("log_chisq_sf: x must be >= 0");
    switch (df) {
        case 1:
            // P(chi2_1 > x) = 2 P(Z > sqrt(x))
            if (x == 0.0) return 0.0;
            return std::log(2.0) + log_normal_upper_tail(std::sqrt(x));
        case 2:
            return -0.5 * x;
        default:
            throw std::invalid_argument("log_chisq_sf: df must be 1 or 2");
    }
}

double golden_section_max(const std::function<double(double)>& f, double lo, double hi,
                          double xtol, int max_iter) {
    if (!(lo < hi)) return lo;
    constexpr double invphi = 0.6180339887498948482;
    double a = lo, b = hi;
    double x1 = b - invphi * (b - a);
    double x2 = a + invphi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int it = 0; it < max_iter && (b - a) > xtol; ++it) {
        if (f1 >= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - invphi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + invphi * (b - a);
            f2 = f(x2);
        }
    }
    return 0.5 * (a + b);
}

}  // namespace evscale
