#pragma once

#include <functional>

namespace evscale {

// Standard normal quantile (Wichura's AS 241, double precision).
double normal_quantile(double p);

// log of the standard normal upper tail P(Z > z) for z >= 0. Switches to the
// asymptotic expansion where erfc underflows, so it stays finite out to
// z ~ 1e7.
double log_normal_upper_tail(double z);

// Two-sided normal p-value of |w| on the natural-log scale.
double log_two_sided_normal_p(double w);

// log survival function of the chi-square distribution, df in {1, 2}.
// Covers every nested comparison in this project (slope-only tests have
// df 1, the quadratic-vs-null test df 2).
double log_chisq_sf(double x, int df);

// Maximize f over [lo, hi] by golden-section search. Returns argmax; the
// maximum itself is f(argmax). xtol is an absolute tolerance on the abscissa.
double golden_section_max(const std::function<double(double)>& f, double lo, double hi,
                          double xtol = 1e-10, int max_iter = 200);

}  // namespace evscale
