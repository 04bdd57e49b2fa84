#pragma once

#include "cmetric/collocation.hpp"
#include "cmetric/kernel.hpp"
#include "cmetric/system.hpp"
#include "cmetric/types.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace cmetric {

/// S(x) through the closed form of the optimal recovery.
Matrix eval_S(const RecoverySolution& sol, const Vector& x);

/// F(S)(x) = Df(x)^T S(x) + S(x) Df(x) + S'(x).
Matrix eval_FS(const RecoverySolution& sol, const Vector& x);

/// S'(x), the orbital derivative of S alone (entries grad S_ij(x) . f(x)).
Matrix eval_orbital_derivative(const RecoverySolution& sol, const Vector& x);

/// S(x) assembled term by term from the Riesz representers (slow reference
/// path, used to cross-check eval_S).
Matrix eval_S_from_representers(const RecoverySolution& sol, const Vector& x);

enum class Definiteness { positive_definite, negative_definite, indefinite, indeterminate };

const char* to_string(Definiteness d) noexcept;

/// 2 x 2: trace/determinant test. Larger n: extreme eigenvalues. The decisive
/// quantity within tol of zero gives indeterminate. Throws PreconditionError
/// for asymmetric input.
Definiteness definiteness(const Matrix& a, double tol = 0.0);

/// Eigenvalue-based classification for any n.
Definiteness definiteness_by_eigenvalues(const Matrix& a, double tol = 0.0);

struct FieldSample {
    Vector x;
    Matrix S;
    Matrix FS;
    double trace_S = 0.0;
    double det_S = 0.0;
    double trace_FS = 0.0;
    double neg_det_FS = 0.0;
    double min_eig_S = 0.0;
    double max_eig_FS = 0.0;
};

/// Samples S and F(S) on the given points in order.
std::vector<FieldSample> field_export(const RecoverySolution& sol, const PointList& grid,
                                      unsigned threads = 1);

/// A symmetric matrix field and its image under F.
struct MetricField {
    std::function<Matrix(const Vector&)> S;
    std::function<Matrix(const Vector&)> FS;
};

MetricField as_field(const RecoverySolution& sol);

struct ErrorReport {
    double e = 0.0;     // max |S_ij - M_ij|
    double e_s = 0.0;   // max |F(S)_ij - F(M)_ij|
};

ErrorReport error_report(const MetricField& approx, const ExactMetric& exact,
                         const DynamicalSystem& sys, const PointList& check_grid);

ErrorReport error_report(const RecoverySolution& sol, const ExactMetric& exact,
                         const PointList& check_grid);

struct ConvergenceRow {
    double alpha = 0.0;
    std::size_t points = 0;
    std::size_t unknowns = 0;
    double e_s = 0.0;
    std::optional<double> ratio_s;   // e_s(2 alpha) / e_s(alpha)
    double e = 0.0;
    std::optional<double> ratio;
    double relative_residual = 0.0;
    double seconds = 0.0;
};

struct ConvergenceReport {
    std::vector<ConvergenceRow> rows;
    /// 2^(sigma - 1 - n/2)
    double reference_ratio = 0.0;
};

struct ConvergenceOptions {
    AssemblyOptions assembly;
    SolveOptions solve;
    /// Called with each solution before its errors are measured.
    std::function<void(double alpha, const RecoverySolution&)> inspect;
};

/// Solves on the grids of spacing alphas[t] over [lower, upper] and measures
/// the errors on check_grid. Alphas must be strictly decreasing.
ConvergenceReport convergence_study(const ProblemSetup& setup, const RadialKernel& kernel,
                                    const std::vector<double>& alphas, const Vector& lower,
                                    const Vector& upper, const PointList& check_grid,
                                    const ConvergenceOptions& options = {});

/// m points x + v with v^T S_x v = level, via the eigendecomposition of S_x.
PointList ellipse_points(const Vector& x, const Matrix& s_x, double level, int m);

}  // namespace cmetric
