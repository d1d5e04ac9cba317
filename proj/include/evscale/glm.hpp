#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "evscale/dataset.hpp"

namespace evscale {

enum class Family {
    PowerLawPoisson,
    PowerLawNegBin,
    GaussianLinear,
    GaussianQuadratic,
    LogLogOLS,
    NullPoisson,
    NullNegBin,
    NullGaussian,
};

std::string family_name(Family f);
Family family_from_name(std::string_view name);

struct FitOptions {
    int max_iterations = 60;   // total IRLS iterations across profile rounds
    double tolerance = 1e-8;   // relative deviance / log-likelihood change
    // Dispersion search window and coarse-scan resolution for r profiling.
    double dispersion_min = 1e-3;
    double dispersion_max = 1e6;
    int dispersion_steps = 41;

    void validate() const;
};

// A fitted model. `params` is a named vector; `covariance` is aligned with
// it except for the power-law families, where it covers (log_y0, beta) and
// the dispersion is held fixed at its profiled optimum.
struct ScalingFit {
    Family family = Family::PowerLawPoisson;
    std::string dataset;  // label of the data the fit came from

    std::vector<std::string> param_names;
    Eigen::VectorXd params;
    std::optional<double> dispersion;  // NB2 r
    double log_likelihood = 0.0;
    Eigen::MatrixXd covariance;
    int n_obs = 0;
    int n_params = 0;  // free parameters counted for BIC (includes r / sigma2)
    bool converged = false;
    int iterations = 0;

    bool dispersion_boundary = false;  // profiled r stuck at the search edge
    bool degenerate_variance = false;  // Gaussian/OLS perfect fit, sigma2 == 0
    std::int64_t excluded_zeros = 0;   // log-log OLS: rows dropped for Y == 0
    double excluded_fraction = 0.0;

    std::vector<double> loglik_trace;  // per-iteration log-likelihood

    double param(std::string_view name) const;
    bool has_param(std::string_view name) const;
    // Standard error from the covariance diagonal; throws MissingSE when the
    // entry is missing, negative or non-finite.
    double se(std::string_view name) const;
};

// Power-law mean Y0 * N^beta fitted under Poisson errors by IRLS (log link).
ScalingFit fit_powerlaw_poisson(const Dataset& data, const FitOptions& opts = {});

// Power-law mean under NB2 errors (Var = mu + mu^2/r). Alternates IRLS for
// (log Y0, beta) at fixed r with a 1-D profile search over r until the joint
// log-likelihood stabilizes. Covariance conditions on the final r.
ScalingFit fit_powerlaw_negbin(const Dataset& data, const FitOptions& opts = {});

// Gaussian mean a*N + b, sigma2 = mean squared residual (MLE).
ScalingFit fit_gaussian_linear(const Dataset& data);

// Gaussian mean a*N^2 + b*N + c.
ScalingFit fit_gaussian_quadratic(const Dataset& data);

// OLS of log Y on log N after dropping Y == 0 rows; the dropped count is
// recorded on the fit. Predictions back-transform with exp and carry no
// retransformation bias correction.
ScalingFit fit_loglog_ols(const Dataset& data);

enum class NullFamily { Poisson, NegBin, Gaussian };

// Intercept-only counterpart of the same distributional family.
ScalingFit fit_null(NullFamily family, const Dataset& data, const FitOptions& opts = {});

// The family's mean function at population N. Throws UnconvergedFit unless
// the fit converged or the caller opts in.
double predict(const ScalingFit& fit, double population, bool allow_unconverged = false);

}  // namespace evscale
