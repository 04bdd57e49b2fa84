#pragma once

#include "cmetric/kernel.hpp"
#include "cmetric/operator.hpp"
#include "cmetric/system.hpp"
#include "cmetric/types.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace cmetric {

/// Tensor-product grid lower + offset + k * spacing on every axis, up to
/// upper - offset. The reduced edge length must be a multiple of spacing.
struct GridSpec {
    Vector lower;
    Vector upper;
    double spacing = 1.0;
    double offset = 0.0;
};

/// Grid nodes in lexicographic order (first coordinate slowest).
PointList make_grid(const GridSpec& spec);

/// Number of nodes make_grid would produce along each axis.
std::vector<std::size_t> grid_shape(const GridSpec& spec);

/// Minimum pairwise distance.
double separation_distance(const PointList& points);

/// Largest distance from a probe-grid node in [lower, upper] to the nearest
/// point; a lower bound of the fill distance that converges as the probe
/// spacing goes to zero.
double fill_distance_estimate(const PointList& points, const Vector& lower, const Vector& upper,
                              double probe_spacing);

/// Collocation points with cached f and Df, and the functional ordering:
/// row = k * m + (offset of (i, j) among the upper-triangular pairs).
class CollocationSet {
public:
    CollocationSet(DynamicalSystem system, const PointList& points);

    const DynamicalSystem& system() const noexcept { return system_; }
    const std::vector<CollocationPointData>& data() const noexcept { return data_; }
    std::size_t size() const noexcept { return data_.size(); }
    int dimension() const noexcept { return system_.dimension; }
    /// n(n+1)/2
    int functionals_per_point() const noexcept { return m_; }
    std::size_t functional_count() const noexcept { return data_.size() * m_; }
    FunctionalIndex functional(std::size_t row) const;
    std::size_t row(const FunctionalIndex& idx) const;
    PointList points() const;

private:
    DynamicalSystem system_;
    std::vector<CollocationPointData> data_;
    int m_;
    std::vector<std::pair<int, int>> pairs_;
};

struct AssemblyOptions {
    unsigned threads = 1;
    /// Verify the spectral condition at the system's known equilibria that
    /// lie in the bounding box of the points.
    bool check_equilibria = true;
};

struct Assembly {
    CollocationSet set;
    Matrix gram;   // full symmetric storage
};

/// Builds the collocation matrix. Throws PreconditionError on duplicate
/// points (naming the pair) or on a failed equilibrium condition.
Assembly assemble(const DynamicalSystem& sys, const RadialKernel& kernel, const PointList& points,
                  const AssemblyOptions& options = {});

struct SolveOptions {
    /// On factorization failure retry once with eps = 1e-10 trace(A)/dim
    /// added to the diagonal.
    bool regularize = false;
};

struct SolverDiagnostics {
    double relative_residual = 0.0;   // |A gamma - b| / |b| against the unregularized A
    bool regularized = false;
    double regularization = 0.0;
    std::string status;
};

/// Optimal recovery S(x) = sum_k (J_k B_k + B_k J_k^T) phi(x_k, x) + B_k grad_1 phi(x_k, x) . f_k.
/// Immutable once constructed.
class RecoverySolution {
public:
    RecoverySolution(CollocationSet set, RadialKernel kernel, Vector gamma, Matrix rhs,
                     SolverDiagnostics diagnostics);

    const CollocationSet& set() const noexcept { return set_; }
    const RadialKernel& kernel() const noexcept { return kernel_; }
    const Vector& gamma() const noexcept { return gamma_; }
    /// Symmetric coefficient matrices: beta_ii = gamma_ii, beta_ij = beta_ji = gamma_ij / 2.
    const std::vector<Matrix>& beta() const noexcept { return beta_; }
    /// J_k beta_k + beta_k J_k^T per point.
    const std::vector<Matrix>& sandwiched_beta() const noexcept { return sandwiched_; }
    const Matrix& rhs() const noexcept { return rhs_; }
    const SolverDiagnostics& diagnostics() const noexcept { return diagnostics_; }

private:
    CollocationSet set_;
    RadialKernel kernel_;
    Vector gamma_;
    std::vector<Matrix> beta_;
    std::vector<Matrix> sandwiched_;
    Matrix rhs_;
    SolverDiagnostics diagnostics_;
};

/// Solves A gamma = b with b stacking -C_ij per functional. Consumes the
/// assembled matrix (factorized in place). Throws FactorizationError when A
/// is numerically not positive definite and regularization is off or fails.
RecoverySolution solve(Assembly assembly, const RadialKernel& kernel, const Matrix& rhs,
                       const SolveOptions& options = {});

}  // namespace cmetric
