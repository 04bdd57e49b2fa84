#pragma once

#include "cmetric/kernel.hpp"
#include "cmetric/system.hpp"
#include "cmetric/types.hpp"

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace cmetric {

/// f and Df cached at one collocation point.
struct CollocationPointData {
    Vector x;
    Vector f;
    Matrix J;

    static CollocationPointData at(const DynamicalSystem& sys, const Vector& x);
};

/// The functional M -> e_i^T F(M)(x_k) e_j, with 0-based i <= j.
struct FunctionalIndex {
    std::size_t k = 0;
    int i = 0;
    int j = 0;
};

/// Upper-triangular component pairs (i, j), i <= j, in lexicographic order.
std::vector<std::pair<int, int>> component_pairs(int n);

/// F(M)(x) = Df(x)^T M + M Df(x) + G with G_ij = grad M_ij(x) . f(x).
///
/// `gradient[a]` holds dM/dx_a. Throws PreconditionError when M or any
/// gradient slice is asymmetric beyond 1e-12.
Matrix apply_F(const DynamicalSystem& sys, const Matrix& value, const MatrixGradient& gradient,
               const Vector& x);

/// H_ij = F(y -> phi(y, x) E_{mu nu})(x_k)_ij, the operator applied to one
/// column of the tensor kernel in its first argument.
Matrix representer_column(const RadialKernel& kernel, const CollocationPointData& cp,
                          const Vector& x, int mu, int nu);

/// Riesz representer of e_i^T F(.)(x_k) e_j evaluated at x, expanded in the
/// orthonormal basis of symmetric matrices.
Matrix riesz_representer(const RadialKernel& kernel, const CollocationPointData& cp, int i, int j,
                         const Vector& x);

/// Precomputed per-point operator data for fast Gram assembly.
///
/// block(l, k, out) writes the m x m block (m = n(n+1)/2) of the collocation
/// matrix whose rows are the functionals at point l and whose columns are the
/// Riesz representers of the functionals at point k, row-major.
class GramBlockEvaluator {
public:
    GramBlockEvaluator(const RadialKernel& kernel, std::span<const CollocationPointData> points);

    int block_size() const noexcept { return m_; }

    /// Returns false (and writes zeros) when the points are outside each
    /// other's support.
    bool block(std::size_t l, std::size_t k, std::span<double> out) const;

private:
    const RadialKernel& kernel_;
    std::span<const CollocationPointData> points_;
    int n_;
    int m_;
    std::vector<std::pair<int, int>> pairs_;
    // Per point, per functional b: P_b = J B_b + B_b J^T and Q_b = J^T B_b + B_b J,
    // stored row-major n x n.
    std::vector<double> p_;
    std::vector<double> q_;
    std::vector<double> jac_;
    std::vector<double> basis_;   // B_b = (E_ij + E_ji)/2
};

/// lambda_l^{(p,q)} applied to the Riesz representer of lambda_k^{(i,j)}.
double gram_entry(const RadialKernel& kernel, const CollocationPointData& cp_l,
                  const FunctionalIndex& idx_l, const CollocationPointData& cp_k,
                  const FunctionalIndex& idx_k);

}  // namespace cmetric
