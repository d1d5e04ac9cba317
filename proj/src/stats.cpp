#include "evscale/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "evscale/mathutil.hpp"

namespace evscale {

namespace {

void require_same_data(const ScalingFit& a, const ScalingFit& b, const char* op) {
    if (a.n_obs != b.n_obs)
        throw MismatchedData(std::string(op) + ": fits have different n_obs (" +
                             std::to_string(a.n_obs) + " vs " + std::to_string(b.n_obs) + ")");
    if (a.dataset != b.dataset)
        throw MismatchedData(std::string(op) + ": fits come from different datasets ('" +
                             a.dataset + "' vs '" + b.dataset + "')");
}

Family null_counterpart(Family f) {
    switch (f) {
        case Family::PowerLawPoisson: return Family::NullPoisson;
        case Family::PowerLawNegBin: return Family::NullNegBin;
        case Family::GaussianLinear:
        case Family::GaussianQuadratic: return Family::NullGaussian;
        default:
            throw MismatchedData("no null counterpart defined for " + family_name(f));
    }
}

}  // namespace

std::string WaldResult::format_p() const {
    // Mirror the reporting convention for underflowing p-values.
    const double log10_p = log_p / std::log(10.0);
    if (log10_p < -99.0) return "< 1e-99";
    if (log10_p < -9.0) return "< 1e-9";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3g", p_value);
    return buf;
}

double likelihood_ratio(const ScalingFit& fit, const ScalingFit& null_fit) {
    require_same_data(fit, null_fit, "likelihood_ratio");
    return 2.0 * (fit.log_likelihood - null_fit.log_likelihood);
}

double mcfadden_r2(const ScalingFit& fit, const ScalingFit& null_fit) {
    require_same_data(fit, null_fit, "mcfadden_r2");
    if (null_fit.log_likelihood == 0.0)
        throw MismatchedData("mcfadden_r2: null log-likelihood is zero");
    return 1.0 - fit.log_likelihood / null_fit.log_likelihood;
}

double bic(const ScalingFit& fit) {
    return fit.n_params * std::log(static_cast<double>(fit.n_obs)) - 2.0 * fit.log_likelihood;
}

WaldResult wald_test(const ScalingFit& fit, double null_value) {
    WaldResult res;
    res.beta_hat = fit.param("beta");
    res.null_value = null_value;
    res.se = fit.se("beta");
    if (res.se == 0.0) throw MissingSE("wald_test: zero standard error");
    res.w = (res.beta_hat - null_value) / res.se;
    res.log_p = log_two_sided_normal_p(res.w);
    res.p_value = std::exp(res.log_p);
    return res;
}

std::pair<double, double> confidence_interval(const ScalingFit& fit, double level) {
    if (!(level > 0.0 && level < 1.0))
        throw Error("confidence_interval: level must be in (0, 1)");
    const double beta = fit.param("beta");
    const double se = fit.se("beta");
    const double z = normal_quantile(0.5 + level / 2.0);
    return {beta - z * se, beta + z * se};
}

double rmsd(const ScalingFit& fit, const Dataset& data) {
    data.validate();
    const auto rows = canonical_rows(data);
    double ss = 0.0;
    for (const Row& r : rows) {
        const double e = static_cast<double>(r.count) -
                         predict(fit, static_cast<double>(r.population), /*allow_unconverged=*/true);
        ss += e * e;
    }
    return std::sqrt(ss / static_cast<double>(rows.size()));
}

ModelComparison compare_models(const std::vector<ScalingFit>& fits,
                               const std::map<Family, ScalingFit>& nulls, const Dataset& data) {
    if (fits.empty()) throw Error("compare_models: no fits given");
    ModelComparison cmp;
    cmp.entries.reserve(fits.size());
    for (const ScalingFit& fit : fits) {
        if (fit.n_obs != static_cast<int>(data.rows.size()) || fit.dataset != data.label)
            throw MismatchedData("compare_models: fit for " + family_name(fit.family) +
                                 " does not match the dataset");
        const auto it = nulls.find(null_counterpart(fit.family));
        if (it == nulls.end())
            throw MissingFit("compare_models: missing null fit for " + family_name(fit.family));
        const ScalingFit& null_fit = it->second;
        ComparisonEntry e;
        e.family = fit.family;
        e.rmsd = rmsd(fit, data);
        e.r2_mcf = mcfadden_r2(fit, null_fit);
        e.lambda_lr = likelihood_ratio(fit, null_fit);
        e.bic = bic(fit);
        e.k = fit.n_params;
        e.lrt_df = fit.n_params - null_fit.n_params;
        cmp.entries.push_back(e);
    }
    cmp.ranking.resize(cmp.entries.size());
    for (std::size_t i = 0; i < cmp.ranking.size(); ++i) cmp.ranking[i] = i;
    std::stable_sort(cmp.ranking.begin(), cmp.ranking.end(), [&](std::size_t a, std::size_t b) {
        return cmp.entries[a].bic < cmp.entries[b].bic;
    });
    for (std::size_t i = 0; i + 1 < cmp.ranking.size(); ++i) {
        const double delta =
            cmp.entries[cmp.ranking[i + 1]].bic - cmp.entries[cmp.ranking[i]].bic;
        cmp.decisive.push_back(delta > ModelComparison::kDecisiveDeltaBic);
    }
    return cmp;
}

}  // namespace evscale
