#pragma once

#include <map>
#include <string>
#include <vector>

#include "evscale/glm.hpp"

namespace evscale {

struct WaldResult {
    double beta_hat = 0.0;
    double null_value = 0.0;
    double se = 0.0;
    double w = 0.0;      // (beta_hat - null_value) / se
    double log_p = 0.0;  // natural log of the two-sided p-value
    double p_value = 1.0;

    // "< 1e-99" below representable precision, otherwise the value itself.
    std::string format_p() const;
};

struct ComparisonEntry {
    Family family = Family::PowerLawPoisson;
    double rmsd = 0.0;
    double r2_mcf = 0.0;
    double lambda_lr = 0.0;
    double bic = 0.0;
    int k = 0;       // free parameter count
    int lrt_df = 0;  // k - k_null
};

struct ModelComparison {
    std::vector<ComparisonEntry> entries;  // input order
    std::vector<std::size_t> ranking;      // indices into entries, ascending BIC
    std::vector<bool> decisive;            // per adjacent ranked pair, dBIC > 6

    static constexpr double kDecisiveDeltaBic = 6.0;
};

// lambda_LR = 2 (logL_fit - logL_null). Throws MismatchedData when the fits
// come from different data.
double likelihood_ratio(const ScalingFit& fit, const ScalingFit& null_fit);

// McFadden pseudo R^2 = 1 - logL_fit / logL_null.
double mcfadden_r2(const ScalingFit& fit, const ScalingFit& null_fit);

// BIC = k ln(n_obs) - 2 logL.
double bic(const ScalingFit& fit);

// Wald test of the scaling exponent against null_value.
WaldResult wald_test(const ScalingFit& fit, double null_value);

// Symmetric normal-theory interval beta +- z_{level} * SE.
std::pair<double, double> confidence_interval(const ScalingFit& fit, double level);

// Root mean squared deviation of predictions on the count scale.
double rmsd(const ScalingFit& fit, const Dataset& data);

// Assembles the model-comparison table: one entry per fit, ranked ascending
// by BIC, with decisive flags where adjacent ranked models differ by more
// than 6 BIC.
ModelComparison compare_models(const std::vector<ScalingFit>& fits,
                               const std::map<Family, ScalingFit>& nulls,
                               const Dataset& data);

}  // namespace evscale
