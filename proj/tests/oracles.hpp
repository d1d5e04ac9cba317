#pragma once

// Independent oracles for the test suites. Everything here recomputes from
// first principles (own density formulas, dense grid search, winding-number
// containment) so it cannot share a bug with the library's fitting path.

#include <Eigen/Dense>
#include <functional>

#include "evscale/dataset.hpp"
#include "evscale/ingest.hpp"

namespace oracle {

double poisson_loglik(const evscale::Dataset& data, double log_y0, double beta);
double negbin_loglik(const evscale::Dataset& data, double log_y0, double beta, double r);

struct Grid2Result {
    double log_y0 = 0, beta = 0, loglik = 0;
};

struct Grid3Result {
    double log_y0 = 0, beta = 0, r = 0, loglik = 0;
};

// Zooming dense grid search: each pass lays points x points over the current
// box, then re-centers a box two grid steps wide around the maximum.
Grid2Result grid_search_poisson(const evscale::Dataset& data, double b0_lo, double b0_hi,
                                double b1_lo, double b1_hi, int points = 41, int passes = 6);

// As above with a third log-spaced dimension for the NB dispersion.
Grid3Result grid_search_negbin(const evscale::Dataset& data, double b0_lo, double b0_hi,
                               double b1_lo, double b1_hi, double r_lo, double r_hi,
                               int points = 31, int passes = 6);

// Central-difference Hessian with fixed step.
Eigen::MatrixXd fd_hessian(const std::function<double(const Eigen::VectorXd&)>& f,
                           const Eigen::VectorXd& at, double step = 1e-5);

// Winding-number containment over outer rings minus holes.
bool winding_contains(double lon, double lat, const evscale::CountyShape& shape);

// Do a and b agree to `digits` significant figures?
bool sigfig_match(double a, double b, int digits);

}  // namespace oracle
