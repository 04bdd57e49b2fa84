#include "cmetric/operator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace cmetric {

CollocationPointData CollocationPointData::at(const DynamicalSystem& sys, const Vector& x) {
    return {x, sys.f(x), sys.Df(x)};
}

std::vector<std::pair<int, int>> component_pairs(int n) {
    std::vector<std::pair<int, int>> out;
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            out.emplace_back(i, j);
        }
    }
    return out;
}

Matrix apply_F(const DynamicalSystem& sys, const Matrix& value, const MatrixGradient& gradient,
               const Vector& x) {
    const int n = sys.dimension;
    if (value.rows() != n || value.cols() != n) {
        throw PreconditionError("apply_F: matrix has wrong shape");
    }
    if (gradient.size() != static_cast<std::size_t>(n)) {
        throw PreconditionError("apply_F: gradient must have one slice per coordinate");
    }
    if (asymmetry(value) > 1e-12) {
        throw PreconditionError("apply_F: matrix argument is not symmetric");
    }
    for (const auto& slice : gradient) {
        if (slice.rows() != n || slice.cols() != n || asymmetry(slice) > 1e-12) {
            throw PreconditionError("apply_F: gradient slice is not a symmetric n x n matrix");
        }
    }

    const Matrix jac = sys.Df(x);
    const Vector fx = sys.f(x);
    Matrix out = jac.transpose() * value + value * jac;
    for (int a = 0; a < n; ++a) {
        out += fx[a] * gradient[static_cast<std::size_t>(a)];
    }
    return out;
}

Matrix representer_column(const RadialKernel& kernel, const CollocationPointData& cp,
                          const Vector& x, int mu, int nu) {
    const int n = static_cast<int>(cp.x.size());
    if (mu < 0 || mu >= n || nu < 0 || nu >= n) {
        throw PreconditionError("representer_column: component index out of range");
    }
    const double phi = kernel.phi(cp.x, x);
    const double orbital = kernel.grad1_phi(cp.x, x).dot(cp.f);

    Matrix h = Matrix::Zero(n, n);
    // (J^T E_{mu nu})_ij = J_{mu i} delta_{j nu}, (E_{mu nu} J)_ij = delta_{i mu} J_{nu j}
    h.col(nu) += phi * cp.J.row(mu).transpose();
    h.row(mu) += phi * cp.J.row(nu);
    h(mu, nu) += orbital;
    return h;
}

Matrix riesz_representer(const RadialKernel& kernel, const CollocationPointData& cp, int i, int j,
                         const Vector& x) {
    const int n = static_cast<int>(cp.x.size());
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    Matrix v = Matrix::Zero(n, n);
    for (int mu = 0; mu < n; ++mu) {
        for (int nu = mu; nu < n; ++nu) {
            if (mu == nu) {
                v(mu, mu) += representer_column(kernel, cp, x, mu, mu)(i, j);
            } else {
                const double coeff = inv_sqrt2 * (representer_column(kernel, cp, x, mu, nu)(i, j) +
                                                  representer_column(kernel, cp, x, nu, mu)(i, j));
                v(mu, nu) += coeff * inv_sqrt2;
                v(nu, mu) += coeff * inv_sqrt2;
            }
        }
    }
    return v;
}

GramBlockEvaluator::GramBlockEvaluator(const RadialKernel& kernel,
                                       std::span<const CollocationPointData> points)
    : kernel_(kernel), points_(points) {
    if (points.empty()) {
        throw PreconditionError("GramBlockEvaluator: no points");
    }
    n_ = static_cast<int>(points.front().x.size());
    pairs_ = component_pairs(n_);
    m_ = static_cast<int>(pairs_.size());

    const std::size_t nn = static_cast<std::size_t>(n_ * n_);
    basis_.assign(static_cast<std::size_t>(m_) * nn, 0.0);
    for (int b = 0; b < m_; ++b) {
        const auto [i, j] = pairs_[static_cast<std::size_t>(b)];
        basis_[b * nn + i * n_ + j] += 0.5;
        basis_[b * nn + j * n_ + i] += 0.5;
    }

    p_.resize(points.size() * m_ * nn);
    q_.resize(points.size() * m_ * nn);
    jac_.resize(points.size() * nn);
    for (std::size_t k = 0; k < points.size(); ++k) {
        const auto& pt = points[k];
        if (pt.x.size() != n_ || pt.f.size() != n_ || pt.J.rows() != n_ || pt.J.cols() != n_) {
            throw PreconditionError("GramBlockEvaluator: inconsistent point dimensions");
        }
        const Matrix& jac = pt.J;
        for (int r = 0; r < n_; ++r) {
            for (int c = 0; c < n_; ++c) {
                jac_[k * nn + r * n_ + c] = jac(r, c);
            }
        }
        for (int b = 0; b < m_; ++b) {
            const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
                basis(&basis_[b * nn], n_, n_);
            const Matrix p = jac * basis + basis * jac.transpose();
            const Matrix q = jac.transpose() * basis + basis * jac;
            const std::size_t off = (k * m_ + b) * nn;
            for (int r = 0; r < n_; ++r) {
                for (int c = 0; c < n_; ++c) {
                    p_[off + r * n_ + c] = p(r, c);
                    q_[off + r * n_ + c] = q(r, c);
                }
            }
        }
    }
}

bool GramBlockEvaluator::block(std::size_t l, std::size_t k, std::span<double> out) const {
    const std::size_t mm = static_cast<std::size_t>(m_ * m_);
    if (out.size() < mm) {
        throw PreconditionError("GramBlockEvaluator: output span too small");
    }
    const auto& pl = points_[l];
    const auto& pk = points_[k];
    const int n = n_;
    const std::size_t nn = static_cast<std::size_t>(n * n);

    double r2 = 0.0, dfk = 0.0, dfl = 0.0, fkfl = 0.0;
    for (int a = 0; a < n; ++a) {
        const double d = pl.x[a] - pk.x[a];
        r2 += d * d;
        dfk += d * pk.f[a];
        dfl += d * pl.f[a];
        fkfl += pk.f[a] * pl.f[a];
    }
    const double support = kernel_.support_radius();
    if (r2 >= support * support) {
        std::fill_n(out.begin(), mm, 0.0);
        return false;
    }
    const double r = std::sqrt(r2);
    const double phi = kernel_.psi(r);
    const double psi1 = kernel_.psi1(r);
    const double psi2 = kernel_.psi2(r);

    // Kernel derivatives contracted with the vector field, d = x_l - x_k:
    //   gk = grad_1 phi(x_k, x_l) . f_k,  gl = grad_2 phi(x_k, x_l) . f_l,
    //   h  = f_k^T (d^2 phi / dx dy)(x_k, x_l) f_l.
    const double gk = -psi1 * dfk;
    const double gl = psi1 * dfl;
    const double h = -psi2 * dfk * dfl - psi1 * fkfl;

    const double* jl = &jac_[l * nn];
    for (int a = 0; a < m_; ++a) {
        const auto [p, q] = pairs_[static_cast<std::size_t>(a)];
        const double* ql_base = &q_[l * m_ * nn];
        for (int b = 0; b < m_; ++b) {
            const double* pkb = &p_[(k * m_ + b) * nn];
            const double* qlb = ql_base + b * nn;
            const double* bb = &basis_[b * nn];
            // (J_l^T P + P J_l)_pq
            double sandwich = 0.0;
            for (int t = 0; t < n; ++t) {
                sandwich += jl[t * n + p] * pkb[t * n + q] + pkb[p * n + t] * jl[t * n + q];
            }
            out[a * m_ + b] = phi * sandwich + gk * qlb[p * n + q] + gl * pkb[p * n + q] +
                              h * bb[p * n + q];
        }
    }
    return true;
}

double gram_entry(const RadialKernel& kernel, const CollocationPointData& cp_l,
                  const FunctionalIndex& idx_l, const CollocationPointData& cp_k,
                  const FunctionalIndex& idx_k) {
    const int n = static_cast<int>(cp_l.x.size());
    if (idx_l.i > idx_l.j || idx_k.i > idx_k.j || idx_l.j >= n || idx_k.j >= n || idx_l.i < 0 ||
        idx_k.i < 0) {
        throw PreconditionError("gram_entry: functional index must satisfy 0 <= i <= j < n");
    }
    const std::vector<CollocationPointData> pair{cp_l, cp_k};
    const GramBlockEvaluator eval(kernel, pair);
    const int m = eval.block_size();
    std::vector<double> block(static_cast<std::size_t>(m * m));
    eval.block(0, 1, block);

    const auto position = [n](int i, int j) {
        // offset of (i, j) in the lexicographic upper-triangular enumeration
        return i * n - i * (i - 1) / 2 + (j - i);
    };
    return block[static_cast<std::size_t>(position(idx_l.i, idx_l.j) * m +
                                          position(idx_k.i, idx_k.j))];
}

}  // namespace cmetric
