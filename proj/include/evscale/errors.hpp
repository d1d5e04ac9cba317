#pragma once

#include <stdexcept>
#include <string>

namespace evscale {

// Base for all library errors. The CLI maps subclasses onto exit codes:
// data/config problems -> 1, convergence failures -> 2, I/O -> 3.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Input data cannot identify the requested model (all counts zero, constant
// regressor, too few rows, ...).
struct DegenerateData : Error {
    using Error::Error;
};

// Two artifacts that must come from the same data do not (different n_obs or
// dataset labels).
struct MismatchedData : Error {
    using Error::Error;
};

// Covariance is absent or singular where a standard error is required.
struct MissingSE : Error {
    using Error::Error;
};

// A required fit artifact was not found on disk.
struct MissingFit : Error {
    using Error::Error;
};

// Charge-time fraction outside the open interval (0, 1).
struct AlphaOutOfRange : Error {
    using Error::Error;
};

// A downstream computation needs a converged fit and the caller did not opt
// into unconverged predictions.
struct UnconvergedFit : Error {
    using Error::Error;
};

struct MalformedRow : Error {
    std::size_t line;
    MalformedRow(std::size_t line_no, const std::string& what)
        : Error("line " + std::to_string(line_no) + ": " + what), line(line_no) {}
};

struct DuplicateFips : Error {
    std::string fips;
    explicit DuplicateFips(const std::string& code)
        : Error("duplicate fips code: " + code), fips(code) {}
};

struct MalformedJson : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

}  // namespace evscale
