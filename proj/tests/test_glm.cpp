#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "evscale/glm.hpp"
#include "evscale/synthetic.hpp"
#include "oracles.hpp"

using namespace evscale;

namespace {

Dataset make(std::vector<Row> rows, std::string label = "test") {
    Dataset d;
    d.rows = std::move(rows);
    d.label = std::move(label);
    return d;
}

// N in {10, ..., 1e6}, Y = round(0.5 * N^0.8).
Dataset powerlaw_six() {
    return make({{10, 3}, {100, 20}, {1000, 126}, {10000, 792}, {100000, 5000}, {1000000, 31548}});
}

// Hand-picked overdispersed counts; both small-data NB oracle checks use
// these rows (dispersion optimum is interior, verified by the grid search).
Dataset overdispersed_eight() {
    return make({{50, 2}, {120, 1}, {300, 9}, {800, 30}, {2000, 12}, {5000, 80}, {12000, 35},
                 {30000, 260}});
}

bool trace_monotone(const std::vector<double>& trace) {
    for (std::size_t i = 0; i + 1 < trace.size(); ++i)
        if (trace[i + 1] < trace[i] - 1e-10) return false;
    return true;
}

}  // namespace

TEST_SUITE_BEGIN("glm");

TEST_CASE("poisson power law matches the dense grid-search oracle") {
    const Dataset data = powerlaw_six();
    const ScalingFit fit = fit_powerlaw_poisson(data);
    REQUIRE(fit.converged);

    const auto grid = oracle::grid_search_poisson(data, -5.0, 5.0, -1.0, 3.0);
    // Frozen from the oracle itself: log Y0 ~ log 0.5, beta ~ 0.8.
    CHECK(grid.beta == doctest::Approx(0.8).epsilon(0.01));
    CHECK(grid.log_y0 == doctest::Approx(std::log(0.5)).epsilon(0.05));

    CHECK(oracle::sigfig_match(fit.param("log_y0"), grid.log_y0, 3));
    CHECK(oracle::sigfig_match(fit.param("beta"), grid.beta, 3));
    CHECK(fit.log_likelihood >= grid.loglik - 1e-6);
    CHECK(fit.n_params == 2);
}

TEST_CASE("poisson on count independent of population drives beta to zero") {
    const Dataset data = make({{10, 7}, {1000, 7}, {100000, 7}, {10000000, 7}});
    const ScalingFit fit = fit_powerlaw_poisson(data);
    REQUIRE(fit.converged);
    CHECK(fit.param("beta") == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(std::exp(fit.param("log_y0")) == doctest::Approx(7.0).epsilon(1e-8));
}

TEST_CASE("poisson degenerate data") {
    CHECK_THROWS_AS(fit_powerlaw_poisson(make({{10, 0}, {100, 0}, {1000, 0}})), DegenerateData);
    CHECK_THROWS_AS(fit_powerlaw_poisson(make({{50, 1}, {50, 2}, {50, 3}})), DegenerateData);
    CHECK_THROWS_AS(fit_powerlaw_poisson(make({{10, 1}, {100, 2}})), DegenerateData);
    CHECK_THROWS_AS(fit_powerlaw_poisson(make({{0, 1}, {100, 2}, {1000, 3}})), DegenerateData);
}

TEST_CASE("negbin power law matches the 3-D grid-search oracle") {
    const Dataset data = overdispersed_eight();
    const ScalingFit fit = fit_powerlaw_negbin(data);
    REQUIRE(fit.converged);
    REQUIRE(fit.dispersion.has_value());
    CHECK_FALSE(fit.dispersion_boundary);

    const auto grid = oracle::grid_search_negbin(data, -6.0, 4.0, -0.5, 2.5, 1e-3, 1e6);
    CHECK(oracle::sigfig_match(fit.param("log_y0"), grid.log_y0, 3));
    CHECK(oracle::sigfig_match(fit.param("beta"), grid.beta, 3));
    CHECK(oracle::sigfig_match(*fit.dispersion, grid.r, 3));
    CHECK(fit.log_likelihood >= grid.loglik - 1e-6);
    CHECK(fit.n_params == 3);
}

TEST_CASE("negbin recovers the generating parameters on one synthetic draw") {
    SyntheticSpec spec;
    spec.seed = 41;
    const Dataset data = sample_negbin_dataset(spec);
    const ScalingFit fit = fit_powerlaw_negbin(data);
    REQUIRE(fit.converged);
    const double se = fit.se("beta");
    CHECK(std::fabs(fit.param("beta") - spec.beta) < 3.0 * se);
    CHECK(*fit.dispersion > 0.5);
    CHECK(*fit.dispersion < 5.0);
    CHECK(trace_monotone(fit.loglik_trace));
}

TEST_CASE("negbin near-poisson data pushes the dispersion to the boundary flag") {
    // Exact Poisson-looking counts: tiny, equidispersed.
    const Dataset data = powerlaw_six();
    const ScalingFit fit = fit_powerlaw_negbin(data);
    CHECK(fit.dispersion_boundary);
    // The slope still matches the Poisson fit closely.
    const ScalingFit pois = fit_powerlaw_poisson(data);
    CHECK(fit.param("beta") == doctest::Approx(pois.param("beta")).epsilon(1e-3));
}

TEST_CASE("scale consistency: N -> c N shifts log_y0 by -beta log c only") {
    const Dataset base = overdispersed_eight();
    Dataset scaled = base;
    const double c = 10.0;
    for (Row& r : scaled.rows) r.population *= 10;

    for (bool nb : {false, true}) {
        const ScalingFit f0 = nb ? fit_powerlaw_negbin(base) : fit_powerlaw_poisson(base);
        const ScalingFit f1 = nb ? fit_powerlaw_negbin(scaled) : fit_powerlaw_poisson(scaled);
        CHECK(f1.param("beta") == doctest::Approx(f0.param("beta")).epsilon(1e-6));
        CHECK(f1.param("log_y0") ==
              doctest::Approx(f0.param("log_y0") - f0.param("beta") * std::log(c)).epsilon(1e-6));
        CHECK(f1.log_likelihood == doctest::Approx(f0.log_likelihood).epsilon(1e-6));
        if (nb) CHECK(*f1.dispersion == doctest::Approx(*f0.dispersion).epsilon(1e-4));
    }
}

TEST_CASE("row permutation leaves estimates bit-identical") {
    Dataset data = overdispersed_eight();
    Dataset shuffled = data;
    std::mt19937 rng(7);
    std::shuffle(shuffled.rows.begin(), shuffled.rows.end(), rng);

    const ScalingFit a = fit_powerlaw_negbin(data);
    const ScalingFit b = fit_powerlaw_negbin(shuffled);
    CHECK(a.param("log_y0") == b.param("log_y0"));
    CHECK(a.param("beta") == b.param("beta"));
    CHECK(*a.dispersion == *b.dispersion);
    CHECK(a.log_likelihood == b.log_likelihood);

    const ScalingFit pa = fit_powerlaw_poisson(data);
    const ScalingFit pb = fit_powerlaw_poisson(shuffled);
    CHECK(pa.param("log_y0") == pb.param("log_y0"));
    CHECK(pa.param("beta") == pb.param("beta"));
}

TEST_CASE("IRLS and profile iterations never decrease the log-likelihood") {
    CHECK(trace_monotone(fit_powerlaw_poisson(powerlaw_six()).loglik_trace));
    CHECK(trace_monotone(fit_powerlaw_negbin(overdispersed_eight()).loglik_trace));
    SyntheticSpec spec;
    spec.seed = 11;
    spec.n_rows = 500;
    CHECK(trace_monotone(fit_powerlaw_negbin(sample_negbin_dataset(spec)).loglik_trace));
}

TEST_CASE("reported SEs match the finite-difference Hessian of the log-likelihood") {
    const Dataset pdata = powerlaw_six();
    const ScalingFit pois = fit_powerlaw_poisson(pdata);
    Eigen::VectorXd at(2);
    at << pois.param("log_y0"), pois.param("beta");
    auto pll = [&](const Eigen::VectorXd& v) { return oracle::poisson_loglik(pdata, v[0], v[1]); };
    const Eigen::MatrixXd hess_p = oracle::fd_hessian(pll, at, 1e-5);
    const Eigen::MatrixXd cov_p = (-hess_p).inverse();
    for (int i : {0, 1})
        CHECK(std::sqrt(cov_p(i, i)) ==
              doctest::Approx(std::sqrt(pois.covariance(i, i))).epsilon(0.02));

    // Small counts keep the lgamma sums well inside double precision; with
    // counts ~1e8 the second difference at step 1e-5 drowns in rounding.
    const Dataset ndata = overdispersed_eight();
    const ScalingFit nb = fit_powerlaw_negbin(ndata);
    REQUIRE(nb.converged);
    Eigen::VectorXd bt(2);
    bt << nb.param("log_y0"), nb.param("beta");
    const double r = *nb.dispersion;
    auto nll = [&](const Eigen::VectorXd& v) { return oracle::negbin_loglik(ndata, v[0], v[1], r); };
    const Eigen::MatrixXd hess_n = oracle::fd_hessian(nll, bt, 1e-5);
    const Eigen::MatrixXd cov_n = (-hess_n).inverse();
    for (int i : {0, 1})
        CHECK(std::sqrt(cov_n(i, i)) ==
              doctest::Approx(std::sqrt(nb.covariance(i, i))).epsilon(0.02));
}

TEST_CASE("gaussian linear closed forms") {
    const ScalingFit exact = fit_gaussian_linear(make({{1, 2}, {2, 4}, {3, 6}}));
    CHECK(exact.param("a") == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(exact.param("b") == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(exact.param("sigma2") == 0.0);
    CHECK(exact.degenerate_variance);

    const ScalingFit fit = fit_gaussian_linear(make({{1, 1}, {2, 2}, {3, 2}}));
    CHECK(fit.param("a") == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(fit.param("b") == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK_FALSE(fit.degenerate_variance);
    CHECK(fit.n_params == 3);
    // logL consistent with the MLE sigma2 under the Gaussian density.
    const double s2 = fit.param("sigma2");
    CHECK(fit.log_likelihood ==
          doctest::Approx(-1.5 * (std::log(2.0 * M_PI * s2) + 1.0)).epsilon(1e-12));

    CHECK_THROWS_AS(fit_gaussian_linear(make({{5, 1}, {5, 2}, {5, 3}})), DegenerateData);
}

TEST_CASE("gaussian quadratic closed forms") {
    const ScalingFit parab = fit_gaussian_quadratic(make({{1, 1}, {2, 4}, {3, 9}, {4, 16}}));
    CHECK(parab.param("a") == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(parab.param("b") == doctest::Approx(0.0).epsilon(1e-7));
    CHECK(parab.param("c") == doctest::Approx(0.0).epsilon(1e-7));
    CHECK(parab.degenerate_variance);

    // 5-point set against a direct normal-equations solve.
    const Dataset data = make({{1, 2}, {2, 3}, {3, 9}, {4, 12}, {5, 28}});
    const ScalingFit fit = fit_gaussian_quadratic(data);
    Eigen::MatrixXd x(5, 3);
    Eigen::VectorXd y(5);
    for (int i = 0; i < 5; ++i) {
        const double n = static_cast<double>(data.rows[i].population);
        x(i, 0) = n * n;
        x(i, 1) = n;
        x(i, 2) = 1.0;
        y[i] = static_cast<double>(data.rows[i].count);
    }
    const Eigen::Vector3d coef = (x.transpose() * x).fullPivLu().solve(x.transpose() * y);
    CHECK(fit.param("a") == doctest::Approx(coef[0]).epsilon(1e-9));
    CHECK(fit.param("b") == doctest::Approx(coef[1]).epsilon(1e-9));
    CHECK(fit.param("c") == doctest::Approx(coef[2]).epsilon(1e-9));
    CHECK(fit.n_params == 4);

    CHECK_THROWS_AS(fit_gaussian_quadratic(make({{1, 1}, {1, 2}, {2, 3}, {2, 4}})),
                    DegenerateData);
}

TEST_CASE("log-log OLS excludes zero counts and records the fraction") {
    const ScalingFit ident = fit_loglog_ols(make({{10, 10}, {100, 100}, {1000, 1000}}));
    CHECK(ident.param("beta") == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(ident.param("log_y0") == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(ident.excluded_zeros == 0);
    CHECK(ident.degenerate_variance);  // exact identity line

    const ScalingFit fit = fit_loglog_ols(
        make({{10, 0}, {20, 0}, {50, 3}, {100, 8}, {1000, 60}, {10000, 420}}));
    CHECK(fit.excluded_zeros == 2);
    CHECK(fit.excluded_fraction == doctest::Approx(2.0 / 6.0));
    CHECK(fit.n_obs == 4);

    CHECK_THROWS_AS(fit_loglog_ols(make({{10, 0}, {20, 0}, {50, 0}, {100, 8}, {1000, 60}})),
                    DegenerateData);
}

TEST_CASE("null fits") {
    const Dataset data = make({{5, 1}, {50, 2}, {500, 3}});
    const ScalingFit pois = fit_null(NullFamily::Poisson, data);
    CHECK(std::exp(pois.param("log_mu")) == doctest::Approx(2.0).epsilon(1e-12));
    double ll = 0.0;
    for (const Row& r : data.rows)
        ll += r.count * std::log(2.0) - 2.0 - std::lgamma(static_cast<double>(r.count) + 1.0);
    CHECK(pois.log_likelihood == doctest::Approx(ll).epsilon(1e-12));
    CHECK(pois.n_params == 1);

    // NB null: mu is the sample mean; r must match a dense 1-D grid oracle.
    const Dataset over = overdispersed_eight();
    const ScalingFit nb = fit_null(NullFamily::NegBin, over);
    const double mean = [&] {
        double s = 0;
        for (const Row& r : over.rows) s += static_cast<double>(r.count);
        return s / static_cast<double>(over.rows.size());
    }();
    CHECK(std::exp(nb.param("log_mu")) == doctest::Approx(mean).epsilon(1e-12));
    double best_r = 0, best_ll = -1e300;
    for (int k = 0; k <= 200000; ++k) {
        const double r = std::exp(std::log(1e-3) + (std::log(1e6) - std::log(1e-3)) * k / 200000.0);
        const double cand = oracle::negbin_loglik(over, std::log(mean), 0.0, r);
        if (cand > best_ll) {
            best_ll = cand;
            best_r = r;
        }
    }
    CHECK(oracle::sigfig_match(*nb.dispersion, best_r, 3));
    CHECK(nb.n_params == 2);

    const ScalingFit gauss = fit_null(NullFamily::Gaussian, make({{1, 1}, {2, 1}, {3, 1}}));
    CHECK(gauss.param("mean") == doctest::Approx(1.0));
    CHECK(gauss.param("sigma2") == 0.0);
    CHECK(gauss.degenerate_variance);

    CHECK_THROWS_AS(fit_null(NullFamily::Poisson, make({{1, 0}, {2, 0}, {3, 0}})),
                    DegenerateData);
}

TEST_CASE("fitted log-likelihood dominates the null counterpart") {
    const Dataset data = overdispersed_eight();
    CHECK(fit_powerlaw_poisson(data).log_likelihood >=
          fit_null(NullFamily::Poisson, data).log_likelihood);
    CHECK(fit_powerlaw_negbin(data).log_likelihood >=
          fit_null(NullFamily::NegBin, data).log_likelihood);
    CHECK(fit_gaussian_linear(data).log_likelihood >=
          fit_null(NullFamily::Gaussian, data).log_likelihood);
}

TEST_CASE("predict evaluates the family mean") {
    ScalingFit pl;
    pl.family = Family::PowerLawNegBin;
    pl.param_names = {"log_y0", "beta"};
    pl.params.resize(2);
    pl.params << std::log(2.0), 1.0;
    pl.converged = true;
    CHECK(predict(pl, 50.0) == doctest::Approx(100.0).epsilon(1e-12));

    pl.params << 0.0, 0.77;
    CHECK(predict(pl, 1e6) == doctest::Approx(std::pow(10.0, 0.77 * 6.0)).epsilon(1e-10));

    ScalingFit lin;
    lin.family = Family::GaussianLinear;
    lin.param_names = {"a", "b", "sigma2"};
    lin.params.resize(3);
    lin.params << 0.5, 2.0 / 3.0, 1.0;
    lin.converged = true;
    CHECK(predict(lin, 4.0) == doctest::Approx(8.0 / 3.0).epsilon(1e-12));

    pl.converged = false;
    CHECK_THROWS_AS(predict(pl, 10.0), UnconvergedFit);
    CHECK(predict(pl, 10.0, true) == doctest::Approx(std::pow(10.0, 0.77)));

    // Power-law means stay positive for any N >= 1.
    pl.converged = true;
    pl.params << -20.0, 0.01;
    for (double n : {1.0, 10.0, 1e7}) CHECK(predict(pl, n) > 0.0);
}

TEST_CASE("iteration cap returns a partial fit flagged unconverged") {
    SyntheticSpec spec;
    spec.seed = 5;
    spec.n_rows = 200;
    spec.n_max = 1e5;
    const Dataset data = sample_negbin_dataset(spec);
    FitOptions opts;
    opts.max_iterations = 1;
    const ScalingFit fit = fit_powerlaw_negbin(data, opts);
    CHECK_FALSE(fit.converged);
    CHECK(fit.iterations == 1);
    CHECK(std::isfinite(fit.log_likelihood));
    CHECK(fit.params.size() == 2);
}

TEST_CASE("log-log predictions back-transform without bias correction") {
    const ScalingFit fit = fit_loglog_ols(make({{10, 10}, {100, 100}, {1000, 1000}}));
    CHECK(predict(fit, 100.0) ==
          doctest::Approx(std::exp(fit.param("log_y0") + fit.param("beta") * std::log(100.0))));
    CHECK(predict(fit, 100.0) == doctest::Approx(100.0).epsilon(1e-9));
}

TEST_CASE("covariance matrices are symmetric with positive diagonal") {
    for (const ScalingFit& fit :
         {fit_powerlaw_poisson(powerlaw_six()), fit_powerlaw_negbin(overdispersed_eight()),
          fit_gaussian_linear(make({{1, 1}, {2, 2}, {3, 2}}))}) {
        const Eigen::MatrixXd& c = fit.covariance;
        CHECK((c - c.transpose()).cwiseAbs().maxCoeff() == 0.0);
        for (Eigen::Index i = 0; i < c.rows(); ++i) CHECK(c(i, i) >= 0.0);
    }
}

TEST_SUITE_END();
