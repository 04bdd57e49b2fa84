#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace cmetric {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using PointList = std::vector<Vector>;

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A parameter outside its admissible range (e.g. a nonpositive kernel scale).
class InvalidParameter : public Error {
public:
    using Error::Error;
};

/// A violated precondition: dimension mismatch, duplicate points, a point
/// that is not an equilibrium, an asymmetric matrix where one is required.
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// Cholesky factorization of the collocation matrix broke down.
class FactorizationError : public Error {
public:
    FactorizationError(const std::string& what, std::ptrdiff_t pivot)
        : Error(what), pivot_(pivot) {}

    /// Zero-based index of the leading minor that was not positive.
    std::ptrdiff_t pivot() const noexcept { return pivot_; }

private:
    std::ptrdiff_t pivot_;
};

/// Largest absolute entry of A - A^T.
inline double asymmetry(const Matrix& a) {
    return (a - a.transpose()).cwiseAbs().maxCoeff();
}

}  // namespace cmetric
