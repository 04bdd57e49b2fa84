#include "cmetric/collocation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <thread>

extern "C" {
void dpotrf_(const char* uplo, const int* n, double* a, const int* lda, int* info, std::size_t);
void dpotrs_(const char* uplo, const int* n, const int* nrhs, const double* a, const int* lda,
             double* b, const int* ldb, int* info, std::size_t);
}

namespace cmetric {

namespace {

std::string format_point(const Vector& x) {
    std::ostringstream os;
    os << '(';
    for (Eigen::Index a = 0; a < x.size(); ++a) {
        os << (a ? ", " : "") << x[a];
    }
    os << ')';
    return os.str();
}

void require_distinct(const PointList& points) {
    std::vector<std::size_t> order(points.size());
    std::iota(order.begin(), order.end(), 0);
    const auto less = [&](std::size_t lhs, std::size_t rhs) {
        return std::lexicographical_compare(points[lhs].begin(), points[lhs].end(),
                                            points[rhs].begin(), points[rhs].end());
    };
    std::sort(order.begin(), order.end(), less);
    for (std::size_t t = 1; t < order.size(); ++t) {
        const auto i = order[t - 1], j = order[t];
        if (points[i] == points[j]) {
            throw PreconditionError("collocation points " + std::to_string(std::min(i, j)) +
                                    " and " + std::to_string(std::max(i, j)) +
                                    " coincide at " + format_point(points[i]));
        }
    }
}

void require_equilibrium_conditions(const DynamicalSystem& sys, const PointList& points) {
    Vector lo = points.front(), hi = points.front();
    for (const auto& x : points) {
        lo = lo.cwiseMin(x);
        hi = hi.cwiseMax(x);
    }
    for (const auto& eq : sys.equilibria) {
        if ((eq.point.array() < lo.array()).any() || (eq.point.array() > hi.array()).any()) {
            continue;
        }
        const auto check = check_equilibrium_condition(sys, eq.point, eq.stability);
        if (!check.satisfied) {
            throw PreconditionError("system '" + sys.label + "': equilibrium " +
                                    format_point(eq.point) +
                                    (check.indeterminate ? " has an eigenvalue on the imaginary axis"
                                                         : " violates the eigenvalue condition"));
        }
    }
}

}  // namespace

CollocationSet::CollocationSet(DynamicalSystem system, const PointList& points)
    : system_(std::move(system)) {
    if (points.empty()) {
        throw PreconditionError("collocation set: no points");
    }
    pairs_ = component_pairs(system_.dimension);
    m_ = static_cast<int>(pairs_.size());
    data_.reserve(points.size());
    for (const auto& x : points) {
        data_.push_back(CollocationPointData::at(system_, x));
    }
}

FunctionalIndex CollocationSet::functional(std::size_t row) const {
    if (row >= functional_count()) {
        throw PreconditionError("functional row out of range");
    }
    const auto [i, j] = pairs_[row % static_cast<std::size_t>(m_)];
    return {row / static_cast<std::size_t>(m_), i, j};
}

std::size_t CollocationSet::row(const FunctionalIndex& idx) const {
    const auto it = std::find(pairs_.begin(), pairs_.end(), std::pair{idx.i, idx.j});
    if (it == pairs_.end() || idx.k >= data_.size()) {
        throw PreconditionError("functional index out of range");
    }
    return idx.k * static_cast<std::size_t>(m_) + static_cast<std::size_t>(it - pairs_.begin());
}

PointList CollocationSet::points() const {
    PointList out;
    out.reserve(data_.size());
    for (const auto& d : data_) {
        out.push_back(d.x);
    }
    return out;
}

Assembly assemble(const DynamicalSystem& sys, const RadialKernel& kernel, const PointList& points,
                  const AssemblyOptions& options) {
    if (points.empty()) {
        throw PreconditionError("assemble: no points");
    }
    for (const auto& x : points) {
        if (x.size() != sys.dimension) {
            throw PreconditionError("assemble: point dimension does not match the system");
        }
    }
    require_distinct(points);
    if (options.check_equilibria) {
        require_equilibrium_conditions(sys, points);
    }

    CollocationSet set(sys, points);
    const std::size_t n_points = set.size();
    const auto m = static_cast<std::size_t>(set.functionals_per_point());
    const auto dim = static_cast<Eigen::Index>(set.functional_count());
    Matrix gram(dim, dim);

    const GramBlockEvaluator evaluator(kernel, set.data());
    // Every block row l is owned by exactly one worker, so placement does not
    // depend on the thread count.
    const auto fill_rows = [&](std::size_t first, std::size_t stride) {
        std::vector<double> block(m * m);
        for (std::size_t l = first; l < n_points; l += stride) {
            for (std::size_t k = 0; k <= l; ++k) {
                evaluator.block(l, k, block);
                for (std::size_t a = 0; a < m; ++a) {
                    for (std::size_t b = 0; b < m; ++b) {
                        const auto row = static_cast<Eigen::Index>(l * m + a);
                        const auto col = static_cast<Eigen::Index>(k * m + b);
                        gram(row, col) = block[a * m + b];
                    }
                }
            }
        }
    };

    const unsigned threads = std::max(1u, options.threads);
    if (threads == 1) {
        fill_rows(0, 1);
    } else {
        std::vector<std::jthread> workers;
        for (unsigned t = 0; t < threads; ++t) {
            workers.emplace_back(fill_rows, t, threads);
        }
    }
    for (Eigen::Index j = 1; j < dim; ++j) {
        for (Eigen::Index i = 0; i < j; ++i) {
            gram(i, j) = gram(j, i);
        }
    }
    return {std::move(set), std::move(gram)};
}

RecoverySolution::RecoverySolution(CollocationSet set, RadialKernel kernel, Vector gamma,
                                   Matrix rhs, SolverDiagnostics diagnostics)
    : set_(std::move(set)),
      kernel_(std::move(kernel)),
      gamma_(std::move(gamma)),
      rhs_(std::move(rhs)),
      diagnostics_(std::move(diagnostics)) {
    const int n = set_.dimension();
    if (gamma_.size() != static_cast<Eigen::Index>(set_.functional_count())) {
        throw PreconditionError("recovery solution: coefficient count does not match functionals");
    }
    beta_.reserve(set_.size());
    sandwiched_.reserve(set_.size());
    for (std::size_t k = 0; k < set_.size(); ++k) {
        Matrix b = Matrix::Zero(n, n);
        for (int p = 0; p < set_.functionals_per_point(); ++p) {
            const auto idx = set_.functional(k * set_.functionals_per_point() + p);
            const double g = gamma_[static_cast<Eigen::Index>(k * set_.functionals_per_point() + p)];
            if (idx.i == idx.j) {
                b(idx.i, idx.i) = g;
            } else {
                b(idx.i, idx.j) = 0.5 * g;
                b(idx.j, idx.i) = 0.5 * g;
            }
        }
        const Matrix& jac = set_.data()[k].J;
        const Matrix p = jac * b + b * jac.transpose();
        sandwiched_.push_back(0.5 * (p + p.transpose()));
        beta_.push_back(std::move(b));
    }
}

RecoverySolution solve(Assembly assembly, const RadialKernel& kernel, const Matrix& rhs,
                       const SolveOptions& options) {
    const int n = assembly.set.dimension();
    if (rhs.rows() != n || rhs.cols() != n) {
        throw PreconditionError("solve: right-hand side must be n x n");
    }
    if (asymmetry(rhs) > 1e-12) {
        throw PreconditionError("solve: right-hand side matrix is not symmetric");
    }
    if (Eigen::LLT<Matrix>(rhs).info() != Eigen::Success) {
        throw PreconditionError("solve: right-hand side matrix is not positive definite");
    }

    Matrix& a = assembly.gram;
    const auto dim = static_cast<int>(a.rows());
    if (a.cols() != dim || static_cast<std::size_t>(dim) != assembly.set.functional_count()) {
        throw PreconditionError("solve: matrix size does not match the collocation set");
    }

    Vector b(dim);
    for (int row = 0; row < dim; ++row) {
        const auto idx = assembly.set.functional(static_cast<std::size_t>(row));
        b[row] = -rhs(idx.i, idx.j);
    }

    // The factorization overwrites the lower triangle only; the strict upper
    // triangle plus this diagonal still describe the original matrix.
    const Vector diagonal = a.diagonal();
    SolverDiagnostics diag;
    const char uplo = 'L';

    int info = 0;
    dpotrf_(&uplo, &dim, a.data(), &dim, &info, 1);
    if (info != 0) {
        if (info < 0 || !options.regularize) {
            throw FactorizationError("solve: collocation matrix is not numerically positive definite "
                                     "(leading minor " + std::to_string(info) + ")",
                                     info - 1);
        }
        const double eps = 1e-10 * diagonal.sum() / dim;
        for (int j = 0; j < dim; ++j) {
            for (int i = j + 1; i < dim; ++i) {
                a(i, j) = a(j, i);
            }
        }
        a.diagonal() = diagonal.array() + eps;
        const int failed_at = info;
        dpotrf_(&uplo, &dim, a.data(), &dim, &info, 1);
        if (info != 0) {
            throw FactorizationError("solve: factorization failed even with regularization " +
                                     std::to_string(eps) + " (leading minor " +
                                     std::to_string(info) + ")",
                                     info - 1);
        }
        diag.regularized = true;
        diag.regularization = eps;
        diag.status = "regularized after failure at leading minor " + std::to_string(failed_at);
    } else {
        diag.status = "ok";
    }

    Vector gamma = b;
    const int nrhs = 1;
    dpotrs_(&uplo, &dim, &nrhs, a.data(), &dim, gamma.data(), &dim, &info, 1);
    if (info != 0) {
        throw FactorizationError("solve: triangular solve failed", info - 1);
    }

    Vector residual = -b;
    for (int j = 0; j < dim; ++j) {
        const double gj = gamma[j];
        double acc = diagonal[j] * gj;
        const double* column = a.data() + static_cast<std::size_t>(j) * dim;
        for (int i = 0; i < j; ++i) {
            acc += column[i] * gamma[i];
            residual[i] += column[i] * gj;
        }
        residual[j] += acc;
    }
    diag.relative_residual = residual.norm() / b.norm();

    return RecoverySolution(std::move(assembly.set), kernel, std::move(gamma), rhs, std::move(diag));
}

}  // namespace cmetric
