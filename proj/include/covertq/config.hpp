#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace covertq {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Numerical tolerances shared by every module. Tests reference these
/// values instead of repeating literals.
struct Tolerances {
    double hermitian = 1e-12;       // max |M - M^dagger| entrywise
    double trace = 1e-10;           // |Tr rho - 1|
    double psd = 1e-10;             // smallest admissible eigenvalue is -psd
    double tail = 1e-10;            // truncated probability mass per constituent
    double eig_floor = 1e-14;       // eigenvalues below are zero inside logarithms
    double support = 1e-12;         // weight outside sigma's support that counts as a violation
    double reconstruction = 1e-10;  // eigendecomposition residual
    double qubit_norm = 1e-12;      // | |l1|^2 + |l2|^2 - 1 |
};

const Tolerances& tolerances();

/// Largest Hilbert-space dimension a dense state may have. Default 4096,
/// overridden by the COVERTQ_MAX_DIM environment variable.
std::size_t max_dimension();

// Error hierarchy. The CLI maps DomainError/ConfigError to exit 1,
// NumericalError (and subclasses) to exit 2 and InfeasibleError to exit 3.

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class PreconditionError : public DomainError {
public:
    using DomainError::DomainError;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class NumericalError : public Error {
public:
    using Error::Error;
};

class ResourceError : public NumericalError {
public:
    ResourceError(const std::string& what, std::size_t requested, std::size_t limit)
        : NumericalError(what), requested_(requested), limit_(limit) {}
    std::size_t requested() const noexcept { return requested_; }
    std::size_t limit() const noexcept { return limit_; }

private:
    std::size_t requested_;
    std::size_t limit_;
};

class CutoffError : public NumericalError {
public:
    CutoffError(const std::string& what, int suggested)
        : NumericalError(what), suggested_(suggested) {}
    int suggested_cutoff() const noexcept { return suggested_; }

private:
    int suggested_;
};

class InfeasibleError : public Error {
public:
    InfeasibleError(const std::string& what, double floor)
        : Error(what), floor_(floor) {}
    double floor() const noexcept { return floor_; }

private:
    double floor_;
};

}  // namespace covertq
