#include "evscale/glm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "evscale/mathutil.hpp"

namespace evscale {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMinMu = 1e-12;

struct CountDesign {
    Eigen::VectorXd x;  // log N
    Eigen::VectorXd y;
    int n = 0;
};

CountDesign prep_counts(const Dataset& data, const char* op) {
    data.validate();
    const auto rows = canonical_rows(data);
    CountDesign d;
    d.n = static_cast<int>(rows.size());
    d.x.resize(d.n);
    d.y.resize(d.n);
    bool any_positive = false;
    for (int i = 0; i < d.n; ++i) {
        d.x[i] = std::log(static_cast<double>(rows[i].population));
        d.y[i] = static_cast<double>(rows[i].count);
        if (rows[i].count > 0) any_positive = true;
    }
    if (!any_positive)
        throw DegenerateData(std::string(op) + ": all counts are zero, scaling exponent unidentifiable");
    if (d.x.minCoeff() == d.x.maxCoeff())
        throw DegenerateData(std::string(op) + ": all populations identical, scaling exponent unidentifiable");
    return d;
}

double poisson_loglik(const Eigen::VectorXd& x, const Eigen::VectorXd& y, double b0, double b1) {
    double ll = 0.0;
    for (int i = 0; i < x.size(); ++i) {
        const double eta = b0 + b1 * x[i];
        const double mu = std::exp(eta);
        if (!std::isfinite(mu)) return -kInf;
        ll += y[i] * eta - mu - std::lgamma(y[i] + 1.0);
    }
    return std::isfinite(ll) ? ll : -kInf;
}

double poisson_deviance(const Eigen::VectorXd& x, const Eigen::VectorXd& y, double b0, double b1) {
    double dev = 0.0;
    for (int i = 0; i < x.size(); ++i) {
        const double mu = std::exp(b0 + b1 * x[i]);
        const double t = (y[i] > 0.0 ? y[i] * std::log(y[i] / mu) : 0.0) - (y[i] - mu);
        dev += t;
    }
    return 2.0 * dev;
}

double negbin_loglik(const Eigen::VectorXd& x, const Eigen::VectorXd& y, double b0, double b1,
                     double r) {
    double ll = 0.0;
    const double lr = std::log(r);
    const double lg_r = std::lgamma(r);
    for (int i = 0; i < x.size(); ++i) {
        const double eta = b0 + b1 * x[i];
        const double mu = std::exp(eta);
        if (!std::isfinite(mu)) return -kInf;
        const double lrm = std::log(r + mu);
        ll += std::lgamma(y[i] + r) - lg_r - std::lgamma(y[i] + 1.0) + r * (lr - lrm) +
              y[i] * (eta - lrm);
    }
    return std::isfinite(ll) ? ll : -kInf;
}

double negbin_deviance(const Eigen::VectorXd& x, const Eigen::VectorXd& y, double b0, double b1,
                       double r) {
    double dev = 0.0;
    for (int i = 0; i < x.size(); ++i) {
        const double mu = std::exp(b0 + b1 * x[i]);
        const double t = (y[i] > 0.0 ? y[i] * std::log(y[i] / mu) : 0.0) -
                         (y[i] + r) * std::log((y[i] + r) / (mu + r));
        dev += t;
    }
    return 2.0 * dev;
}

// OLS of log(y + 1) on x; the power-law starting point.
Eigen::Vector2d init_log_linear(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    const int n = static_cast<int>(x.size());
    Eigen::VectorXd z(n);
    for (int i = 0; i < n; ++i) z[i] = std::log(y[i] + 1.0);
    const double xm = x.mean(), zm = z.mean();
    double sxx = 0.0, sxz = 0.0;
    for (int i = 0; i < n; ++i) {
        sxx += (x[i] - xm) * (x[i] - xm);
        sxz += (x[i] - xm) * (z[i] - zm);
    }
    const double slope = sxz / sxx;
    return {zm - slope * xm, slope};
}

// One weighted least-squares pass followed by step halving so the
// log-likelihood never decreases. Returns false when no uphill step exists.
template <typename LogLik>
bool irls_step(const Eigen::VectorXd& x, const Eigen::VectorXd& y, Eigen::Vector2d& b,
               const Eigen::VectorXd& weights, const LogLik& loglik, double& ll_cur) {
    const int n = static_cast<int>(x.size());
    Eigen::Matrix2d s = Eigen::Matrix2d::Zero();
    Eigen::Vector2d t = Eigen::Vector2d::Zero();
    for (int i = 0; i < n; ++i) {
        const double eta = b[0] + b[1] * x[i];
        const double mu = std::max(std::exp(eta), kMinMu);
        const double w = std::max(weights[i], kMinMu);
        const double z = eta + (y[i] - mu) / mu;
        s(0, 0) += w;
        s(0, 1) += w * x[i];
        s(1, 1) += w * x[i] * x[i];
        t[0] += w * z;
        t[1] += w * z * x[i];
    }
    s(1, 0) = s(0, 1);
    const double det = s(0, 0) * s(1, 1) - s(0, 1) * s(0, 1);
    if (!(std::fabs(det) > 0.0))
        throw DegenerateData("IRLS normal equations singular");
    Eigen::Vector2d bn;
    bn[0] = (s(1, 1) * t[0] - s(0, 1) * t[1]) / det;
    bn[1] = (s(0, 0) * t[1] - s(0, 1) * t[0]) / det;

    Eigen::Vector2d step = bn - b;
    double scale = 1.0;
    for (int h = 0; h < 50; ++h) {
        const Eigen::Vector2d cand = b + scale * step;
        const double ll = loglik(cand);
        if (ll >= ll_cur - 1e-12) {
            b = cand;
            ll_cur = ll;
            return true;
        }
        scale *= 0.5;
    }
    return false;
}

struct ProfileResult {
    double r = 1.0;
    double loglik = -kInf;
    bool at_edge = false;
};

// Coarse log-spaced scan over [lo, hi] then golden-section refinement around
// the best bracket. f maximizes the log-likelihood in r at fixed slope.
ProfileResult profile_dispersion(const std::function<double(double)>& f, double lo, double hi,
                                 int steps) {
    const double llo = std::log(lo), lhi = std::log(hi);
    steps = std::max(steps, 5);
    int best = 0;
    double best_ll = -kInf;
    std::vector<double> grid(steps);
    for (int k = 0; k < steps; ++k) {
        grid[k] = llo + (lhi - llo) * k / (steps - 1);
        const double ll = f(std::exp(grid[k]));
        if (ll > best_ll) {
            best_ll = ll;
            best = k;
        }
    }
    ProfileResult res;
    res.at_edge = (best == 0 || best == steps - 1);
    const double a = grid[std::max(best - 1, 0)];
    const double b = grid[std::min(best + 1, steps - 1)];
    const double lr = golden_section_max([&](double t) { return f(std::exp(t)); }, a, b, 1e-10);
    res.r = std::exp(lr);
    res.loglik = f(res.r);
    if (best_ll > res.loglik) {  // golden landed worse than the scan point
        res.r = std::exp(grid[best]);
        res.loglik = best_ll;
    }
    return res;
}

Eigen::Matrix2d invert_2x2(const Eigen::Matrix2d& m) {
    const double det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    if (!(std::fabs(det) > 0.0)) throw DegenerateData("Fisher information singular");
    Eigen::Matrix2d inv;
    inv << m(1, 1) / det, -m(0, 1) / det, -m(1, 0) / det, m(0, 0) / det;
    // exact symmetry
    inv(1, 0) = inv(0, 1);
    return inv;
}

// Gaussian density log-likelihood at the MLE variance: -n/2 (log(2 pi s2) + 1).
double gaussian_loglik_mle(int n, double sigma2) {
    return -0.5 * n * (std::log(2.0 * M_PI * sigma2) + 1.0);
}

// Perfect fits leave sigma2 at rounding noise; snap those to exactly zero.
bool variance_is_degenerate(double sigma2, double mean_sq_y) {
    return sigma2 <= 1e-12 * mean_sq_y + 1e-300;
}

ScalingFit gaussian_polynomial_fit(const Dataset& data, int degree) {
    data.validate();
    const auto rows = canonical_rows(data);
    const int n = static_cast<int>(rows.size());
    std::set<std::int64_t> distinct;
    for (const Row& r : rows) distinct.insert(r.population);
    if (static_cast<int>(distinct.size()) < degree + 1)
        throw DegenerateData("need at least " + std::to_string(degree + 1) +
                             " distinct populations for a degree-" + std::to_string(degree) +
                             " Gaussian fit");

    // Columns scaled by max N to keep the normal equations conditioned; the
    // coefficients are unscaled afterwards.
    double nmax = 0.0;
    for (const Row& r : rows) nmax = std::max(nmax, static_cast<double>(r.population));
    const int p = degree + 1;
    Eigen::MatrixXd xs(n, p);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) {
        const double u = static_cast<double>(rows[i].population) / nmax;
        for (int j = 0; j < p; ++j) xs(i, j) = std::pow(u, degree - j);
        y[i] = static_cast<double>(rows[i].count);
    }
    const Eigen::VectorXd coef_scaled = xs.colPivHouseholderQr().solve(y);
    const Eigen::VectorXd resid = y - xs * coef_scaled;
    const double ssr = resid.squaredNorm();
    const double sigma2 = ssr / n;

    Eigen::VectorXd scale_back(p);
    for (int j = 0; j < p; ++j) scale_back[j] = std::pow(nmax, -(degree - j));

    ScalingFit fit;
    fit.family = (degree == 1) ? Family::GaussianLinear : Family::GaussianQuadratic;
    fit.dataset = data.label;
    fit.param_names = (degree == 1) ? std::vector<std::string>{"a", "b", "sigma2"}
                                    : std::vector<std::string>{"a", "b", "c", "sigma2"};
    fit.params.resize(p + 1);
    for (int j = 0; j < p; ++j) fit.params[j] = coef_scaled[j] * scale_back[j];
    fit.n_obs = n;
    fit.n_params = p + 1;  // coefficients plus sigma2
    fit.converged = true;
    fit.iterations = 0;

    const double mean_sq_y = y.squaredNorm() / n;
    if (variance_is_degenerate(sigma2, mean_sq_y)) {
        fit.params[p] = 0.0;
        fit.degenerate_variance = true;
        fit.log_likelihood = kInf;
        fit.covariance = Eigen::MatrixXd::Zero(p + 1, p + 1);
    } else {
        fit.params[p] = sigma2;
        fit.log_likelihood = gaussian_loglik_mle(n, sigma2);
        const Eigen::MatrixXd xtx_inv =
            (xs.transpose() * xs).ldlt().solve(Eigen::MatrixXd::Identity(p, p));
        Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(p + 1, p + 1);
        for (int j = 0; j < p; ++j)
            for (int k = 0; k < p; ++k)
                cov(j, k) = sigma2 * xtx_inv(j, k) * scale_back[j] * scale_back[k];
        cov(p, p) = 2.0 * sigma2 * sigma2 / n;
        fit.covariance = 0.5 * (cov + cov.transpose());
    }
    fit.loglik_trace.push_back(fit.log_likelihood);
    return fit;
}

}  // namespace

std::string family_name(Family f) {
    switch (f) {
        case Family::PowerLawPoisson: return "powerlaw_poisson";
        case Family::PowerLawNegBin: return "powerlaw_negbin";
        case Family::GaussianLinear: return "gaussian_linear";
        case Family::GaussianQuadratic: return "gaussian_quadratic";
        case Family::LogLogOLS: return "loglog_ols";
        case Family::NullPoisson: return "null_poisson";
        case Family::NullNegBin: return "null_negbin";
        case Family::NullGaussian: return "null_gaussian";
    }
    throw Error("unknown family");
}

Family family_from_name(std::string_view name) {
    for (Family f : {Family::PowerLawPoisson, Family::PowerLawNegBin, Family::GaussianLinear,
                     Family::GaussianQuadratic, Family::LogLogOLS, Family::NullPoisson,
                     Family::NullNegBin, Family::NullGaussian}) {
        if (family_name(f) == name) return f;
    }
    throw Error("unknown family name: " + std::string(name));
}

void FitOptions::validate() const {
    if (max_iterations < 1) throw Error("max_iterations must be >= 1");
    if (!(tolerance > 0.0)) throw Error("tolerance must be > 0");
    if (!(dispersion_min > 0.0) || !(dispersion_max > dispersion_min))
        throw Error("dispersion search window must satisfy 0 < min < max");
    if (dispersion_steps < 5) throw Error("dispersion_steps must be >= 5");
}

double ScalingFit::param(std::string_view name) const {
    for (std::size_t i = 0; i < param_names.size(); ++i)
        if (param_names[i] == name) return params[static_cast<Eigen::Index>(i)];
    throw Error("fit has no parameter named '" + std::string(name) + "'");
}

bool ScalingFit::has_param(std::string_view name) const {
    for (const auto& p : param_names)
        if (p == name) return true;
    return false;
}

double ScalingFit::se(std::string_view name) const {
    for (std::size_t i = 0; i < param_names.size(); ++i) {
        if (param_names[i] != name) continue;
        const auto k = static_cast<Eigen::Index>(i);
        if (covariance.rows() <= k || covariance.cols() <= k)
            throw MissingSE("covariance does not cover parameter '" + std::string(name) + "'");
        const double v = covariance(k, k);
        if (!std::isfinite(v) || v < 0.0)
            throw MissingSE("covariance for '" + std::string(name) + "' is not usable");
        return std::sqrt(v);
    }
    throw MissingSE("fit has no parameter named '" + std::string(name) + "'");
}

ScalingFit fit_powerlaw_poisson(const Dataset& data, const FitOptions& opts) {
    opts.validate();
    const CountDesign d = prep_counts(data, "fit_powerlaw_poisson");

    Eigen::Vector2d b = init_log_linear(d.x, d.y);
    auto loglik = [&](const Eigen::Vector2d& c) { return poisson_loglik(d.x, d.y, c[0], c[1]); };
    double ll = loglik(b);
    double dev = poisson_deviance(d.x, d.y, b[0], b[1]);

    ScalingFit fit;
    fit.family = Family::PowerLawPoisson;
    fit.dataset = data.label;
    fit.loglik_trace.push_back(ll);

    Eigen::VectorXd w(d.n);
    for (int it = 0; it < opts.max_iterations; ++it) {
        for (int i = 0; i < d.n; ++i) w[i] = std::exp(b[0] + b[1] * d.x[i]);
        if (!irls_step(d.x, d.y, b, w, loglik, ll)) {
            fit.iterations = it + 1;
            fit.converged = true;  // no uphill step exists; at the optimum
            break;
        }
        fit.loglik_trace.push_back(ll);
        const double dev_new = poisson_deviance(d.x, d.y, b[0], b[1]);
        fit.iterations = it + 1;
        if (std::fabs(dev_new - dev) / (0.1 + std::fabs(dev_new)) < opts.tolerance) {
            fit.converged = true;
            dev = dev_new;
            break;
        }
        dev = dev_new;
    }

    fit.param_names = {"log_y0", "beta"};
    fit.params.resize(2);
    fit.params << b[0], b[1];
    fit.log_likelihood = ll;
    fit.n_obs = d.n;
    fit.n_params = 2;

    // Observed information; for the Poisson log link it coincides with the
    // expected information X' diag(mu) X.
    Eigen::Matrix2d info = Eigen::Matrix2d::Zero();
    for (int i = 0; i < d.n; ++i) {
        const double mu = std::exp(b[0] + b[1] * d.x[i]);
        info(0, 0) += mu;
        info(0, 1) += mu * d.x[i];
        info(1, 1) += mu * d.x[i] * d.x[i];
    }
    info(1, 0) = info(0, 1);
    fit.covariance = invert_2x2(info);
    return fit;
}

ScalingFit fit_powerlaw_negbin(const Dataset& data, const FitOptions& opts) {
    opts.validate();
    const CountDesign d = prep_counts(data, "fit_powerlaw_negbin");

    Eigen::Vector2d b = init_log_linear(d.x, d.y);

    // Method-of-moments start for r from Pearson residuals at the initial mean.
    double sum_mu2 = 0.0, sum_excess = 0.0;
    for (int i = 0; i < d.n; ++i) {
        const double mu = std::exp(b[0] + b[1] * d.x[i]);
        sum_mu2 += mu * mu;
        sum_excess += (d.y[i] - mu) * (d.y[i] - mu) - mu;
    }
    double lo = opts.dispersion_min, hi = opts.dispersion_max;
    double r = (sum_excess > 0.0) ? sum_mu2 / sum_excess : hi;
    r = std::clamp(r, lo, hi);

    auto nbll = [&](const Eigen::Vector2d& c, double rr) {
        return negbin_loglik(d.x, d.y, c[0], c[1], rr);
    };
    double ll = nbll(b, r);

    ScalingFit fit;
    fit.family = Family::PowerLawNegBin;
    fit.dataset = data.label;
    fit.loglik_trace.push_back(ll);

    bool widened = false;
    Eigen::VectorXd w(d.n);
    constexpr int kMaxRounds = 100;
    for (int round = 0; round < kMaxRounds; ++round) {
        const double ll_round_start = ll;

        // IRLS for (log Y0, beta) at fixed r.
        auto loglik_b = [&](const Eigen::Vector2d& c) { return nbll(c, r); };
        double dev = negbin_deviance(d.x, d.y, b[0], b[1], r);
        while (fit.iterations < opts.max_iterations) {
            for (int i = 0; i < d.n; ++i) {
                const double mu = std::exp(b[0] + b[1] * d.x[i]);
                w[i] = r * mu / (r + mu);
            }
            const bool moved = irls_step(d.x, d.y, b, w, loglik_b, ll);
            ++fit.iterations;
            fit.loglik_trace.push_back(ll);
            if (!moved) break;
            const double dev_new = negbin_deviance(d.x, d.y, b[0], b[1], r);
            const bool done = std::fabs(dev_new - dev) / (0.1 + std::fabs(dev_new)) < opts.tolerance;
            dev = dev_new;
            if (done) break;
        }

        // Profile the dispersion at the current slope.
        auto prof = [&](double rr) { return nbll(b, rr); };
        ProfileResult pr = profile_dispersion(prof, lo, hi, opts.dispersion_steps);
        if (pr.at_edge && !widened) {
            widened = true;
            lo = std::max(lo / 100.0, 1e-12);
            hi = hi * 100.0;
            pr = profile_dispersion(prof, lo, hi, opts.dispersion_steps);
        }
        fit.dispersion_boundary = pr.at_edge;
        if (pr.loglik >= ll) {
            r = pr.r;
            ll = pr.loglik;
        }
        fit.loglik_trace.push_back(ll);

        if (std::fabs(ll - ll_round_start) / (0.1 + std::fabs(ll)) < opts.tolerance) {
            fit.converged = true;
            break;
        }
        if (fit.iterations >= opts.max_iterations) break;  // NonConvergence: partial fit
    }

    fit.param_names = {"log_y0", "beta"};
    fit.params.resize(2);
    fit.params << b[0], b[1];
    fit.dispersion = r;
    fit.log_likelihood = ll;
    fit.n_obs = d.n;
    fit.n_params = 3;  // log_y0, beta, r

    // Observed information for (log Y0, beta) at the profiled r:
    // -d2 l / d eta2 = r mu (r + y) / (r + mu)^2.
    Eigen::Matrix2d info = Eigen::Matrix2d::Zero();
    for (int i = 0; i < d.n; ++i) {
        const double mu = std::exp(b[0] + b[1] * d.x[i]);
        const double wi = r * mu * (r + d.y[i]) / ((r + mu) * (r + mu));
        info(0, 0) += wi;
        info(0, 1) += wi * d.x[i];
        info(1, 1) += wi * d.x[i] * d.x[i];
    }
    info(1, 0) = info(0, 1);
    fit.covariance = invert_2x2(info);
    return fit;
}

ScalingFit fit_gaussian_linear(const Dataset& data) { return gaussian_polynomial_fit(data, 1); }

ScalingFit fit_gaussian_quadratic(const Dataset& data) { return gaussian_polynomial_fit(data, 2); }

ScalingFit fit_loglog_ols(const Dataset& data) {
    data.validate();
    const auto rows = canonical_rows(data);
    std::vector<double> lx, ly;
    for (const Row& r : rows) {
        if (r.count == 0) continue;
        lx.push_back(std::log(static_cast<double>(r.population)));
        ly.push_back(std::log(static_cast<double>(r.count)));
    }
    const auto n_total = static_cast<std::int64_t>(rows.size());
    const auto n_kept = static_cast<std::int64_t>(lx.size());
    if (n_kept < 3)
        throw DegenerateData("log-log OLS: only " + std::to_string(n_kept) +
                             " rows remain after excluding zero counts");
    if (std::set<double>(lx.begin(), lx.end()).size() < 2)
        throw DegenerateData("log-log OLS: populations identical after zero exclusion");

    const int n = static_cast<int>(n_kept);
    double xm = 0.0, ym = 0.0;
    for (int i = 0; i < n; ++i) {
        xm += lx[i];
        ym += ly[i];
    }
    xm /= n;
    ym /= n;
    double sxx = 0.0, sxy = 0.0;
    for (int i = 0; i < n; ++i) {
        sxx += (lx[i] - xm) * (lx[i] - xm);
        sxy += (lx[i] - xm) * (ly[i] - ym);
    }
    const double beta = sxy / sxx;
    const double intercept = ym - beta * xm;
    double ssr = 0.0, mean_sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double e = ly[i] - intercept - beta * lx[i];
        ssr += e * e;
        mean_sq += ly[i] * ly[i];
    }
    mean_sq /= n;
    const double sigma2 = ssr / n;

    ScalingFit fit;
    fit.family = Family::LogLogOLS;
    fit.dataset = data.label;
    fit.param_names = {"log_y0", "beta", "sigma2"};
    fit.params.resize(3);
    fit.n_obs = n;
    fit.n_params = 3;
    fit.converged = true;
    fit.iterations = 0;
    fit.excluded_zeros = n_total - n_kept;
    fit.excluded_fraction = static_cast<double>(fit.excluded_zeros) / static_cast<double>(n_total);

    if (variance_is_degenerate(sigma2, mean_sq)) {
        fit.params << intercept, beta, 0.0;
        fit.degenerate_variance = true;
        fit.log_likelihood = kInf;
        fit.covariance = Eigen::MatrixXd::Zero(3, 3);
    } else {
        fit.params << intercept, beta, sigma2;
        fit.log_likelihood = gaussian_loglik_mle(n, sigma2);
        Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(3, 3);
        // sigma2 (X'X)^-1 for (intercept, slope) in centered form.
        cov(0, 0) = sigma2 * (1.0 / n + xm * xm / sxx);
        cov(0, 1) = cov(1, 0) = -sigma2 * xm / sxx;
        cov(1, 1) = sigma2 / sxx;
        cov(2, 2) = 2.0 * sigma2 * sigma2 / n;
        fit.covariance = cov;
    }
    fit.loglik_trace.push_back(fit.log_likelihood);
    return fit;
}

ScalingFit fit_null(NullFamily family, const Dataset& data, const FitOptions& opts) {
    opts.validate();
    data.validate();
    const auto rows = canonical_rows(data);
    const int n = static_cast<int>(rows.size());
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) y[i] = static_cast<double>(rows[i].count);
    const double mean = y.mean();

    ScalingFit fit;
    fit.dataset = data.label;
    fit.n_obs = n;
    fit.converged = true;
    fit.iterations = 0;

    switch (family) {
        case NullFamily::Poisson: {
            if (mean <= 0.0) throw DegenerateData("Poisson null: all counts zero");
            fit.family = Family::NullPoisson;
            fit.param_names = {"log_mu"};
            fit.params.resize(1);
            fit.params << std::log(mean);
            double ll = 0.0;
            for (int i = 0; i < n; ++i)
                ll += y[i] * std::log(mean) - mean - std::lgamma(y[i] + 1.0);
            fit.log_likelihood = ll;
            fit.n_params = 1;
            fit.covariance = Eigen::MatrixXd::Constant(1, 1, 1.0 / (n * mean));
            break;
        }
        case NullFamily::NegBin: {
            if (mean <= 0.0) throw DegenerateData("NB null: all counts zero");
            fit.family = Family::NullNegBin;
            fit.param_names = {"log_mu"};
            fit.params.resize(1);
            fit.params << std::log(mean);
            // mu-hat is the sample mean for any r, so only r needs profiling.
            const Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
            auto prof = [&](double rr) {
                return negbin_loglik(x, y, std::log(mean), 0.0, rr);
            };
            double lo = opts.dispersion_min, hi = opts.dispersion_max;
            ProfileResult pr = profile_dispersion(prof, lo, hi, opts.dispersion_steps);
            if (pr.at_edge) {
                pr = profile_dispersion(prof, std::max(lo / 100.0, 1e-12), hi * 100.0,
                                        opts.dispersion_steps);
            }
            fit.dispersion_boundary = pr.at_edge;
            fit.dispersion = pr.r;
            fit.log_likelihood = pr.loglik;
            fit.n_params = 2;
            double info = 0.0;
            for (int i = 0; i < n; ++i)
                info += pr.r * mean * (pr.r + y[i]) / ((pr.r + mean) * (pr.r + mean));
            fit.covariance = Eigen::MatrixXd::Constant(1, 1, 1.0 / info);
            break;
        }
        case NullFamily::Gaussian: {
            fit.family = Family::NullGaussian;
            fit.param_names = {"mean", "sigma2"};
            fit.params.resize(2);
            double ssr = 0.0, mean_sq = 0.0;
            for (int i = 0; i < n; ++i) {
                ssr += (y[i] - mean) * (y[i] - mean);
                mean_sq += y[i] * y[i];
            }
            mean_sq /= n;
            const double sigma2 = ssr / n;
            fit.n_params = 2;
            if (variance_is_degenerate(sigma2, mean_sq)) {
                fit.params << mean, 0.0;
                fit.degenerate_variance = true;
                fit.log_likelihood = kInf;
                fit.covariance = Eigen::MatrixXd::Zero(2, 2);
            } else {
                fit.params << mean, sigma2;
                fit.log_likelihood = gaussian_loglik_mle(n, sigma2);
                Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(2, 2);
                cov(0, 0) = sigma2 / n;
                cov(1, 1) = 2.0 * sigma2 * sigma2 / n;
                fit.covariance = cov;
            }
            break;
        }
    }
    fit.loglik_trace.push_back(fit.log_likelihood);
    return fit;
}

double predict(const ScalingFit& fit, double population, bool allow_unconverged) {
    if (!fit.converged && !allow_unconverged)
        throw UnconvergedFit("predict called on an unconverged " + family_name(fit.family) +
                             " fit");
    if (!(population > 0.0)) throw Error("predict: population must be positive");
    switch (fit.family) {
        case Family::PowerLawPoisson:
        case Family::PowerLawNegBin:
        case Family::LogLogOLS:
            return std::exp(fit.param("log_y0") + fit.param("beta") * std::log(population));
        case Family::GaussianLinear:
            return fit.param("a") * population + fit.param("b");
        case Family::GaussianQuadratic:
            return fit.param("a") * population * population + fit.param("b") * population +
                   fit.param("c");
        case Family::NullPoisson:
        case Family::NullNegBin:
            return std::exp(fit.param("log_mu"));
        case Family::NullGaussian:
            return fit.param("mean");
    }
    throw Error("predict: unknown family");
}

}  // namespace evscale
