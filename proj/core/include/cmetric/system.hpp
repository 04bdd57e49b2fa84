#pragma once

#include "cmetric/types.hpp"

#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace cmetric {

enum class Stability { stable, unstable };

/// An equilibrium whose spectral condition is checked before collocation.
struct KnownEquilibrium {
    Vector point;
    Stability stability = Stability::stable;
};

/// Autonomous ODE x' = f(x) with its exact Jacobian.
///
/// The callables must be pure and reentrant; they are invoked concurrently
/// during assembly and evaluation.
struct DynamicalSystem {
    std::string label;
    int dimension = 0;
    std::function<Vector(const Vector&)> rhs;
    std::function<Matrix(const Vector&)> jacobian;
    std::vector<KnownEquilibrium> equilibria;

    Vector f(const Vector& x) const;
    Matrix Df(const Vector& x) const;
};

/// Spatial derivatives of a symmetric matrix field: entry a is dM/dx_a.
using MatrixGradient = std::vector<Matrix>;

/// Known solution M of F(M) = -C, used for error measurements.
struct ExactMetric {
    std::string label;
    std::function<Matrix(const Vector&)> value;
    std::function<MatrixGradient(const Vector&)> gradient;
};

/// A system together with the right-hand side C and, when available, the
/// exact metric.
struct ProblemSetup {
    DynamicalSystem system;
    std::optional<ExactMetric> exact;
    Matrix rhs;
};

/// x' = -x + y, y' = x - 2y with C = I and exact metric [[1, 1/2], [1/2, 1/2]].
ProblemSetup linear_example();

struct EquilibriumCheck {
    bool satisfied = false;
    /// Some eigenvalue has |Re| <= 1e-12.
    bool indeterminate = false;
    std::vector<std::complex<double>> eigenvalues;
};

/// Checks that every eigenvalue of Df(x0) has strictly negative real part
/// (strictly positive for Stability::unstable). Throws PreconditionError if
/// |f(x0)| > 1e-10.
EquilibriumCheck check_equilibrium_condition(const DynamicalSystem& sys, const Vector& x0,
                                             Stability sign = Stability::stable);

struct JacobianConsistency {
    bool consistent = false;
    double max_deviation = 0.0;   // relative to max(1, |Df|_max)
};

/// Compares Df with central differences of f at random points of [lo, hi]^n.
JacobianConsistency check_jacobian_consistency(const DynamicalSystem& sys, double lo = -1.0,
                                               double hi = 1.0, int samples = 20,
                                               std::uint64_t seed = 1, double tolerance = 1e-5);

/// Named systems for the command-line front end. Registration runs the
/// Jacobian consistency check and rejects inconsistent systems.
class SystemRegistry {
public:
    using Factory = std::function<ProblemSetup()>;

    /// Registry preloaded with "linear-example".
    static SystemRegistry with_builtins();

    void register_system(const std::string& name, Factory factory);
    bool contains(const std::string& name) const;
    ProblemSetup make(const std::string& name) const;
    std::vector<std::string> names() const;

private:
    std::map<std::string, Factory> factories_;
};

}  // namespace cmetric
