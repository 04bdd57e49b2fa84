#include "cmetric/evaluate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <thread>

namespace cmetric {

namespace {

Matrix symmetrized(const Matrix& a) {
    return 0.5 * (a + a.transpose());
}

// Accumulates S(x) and, when requested, the orbital derivative S'(x).
void accumulate(const RecoverySolution& sol, const Vector& x, Matrix& s, Matrix* orbital) {
    const auto& set = sol.set();
    const auto& kernel = sol.kernel();
    const int n = set.dimension();
    if (x.size() != n) {
        throw PreconditionError("evaluation point has the wrong dimension");
    }
    s.setZero(n, n);
    Vector fx;
    if (orbital) {
        orbital->setZero(n, n);
        fx = set.system().f(x);
    }
    const double support2 = kernel.support_radius() * kernel.support_radius();
    const auto& data = set.data();
    for (std::size_t k = 0; k < data.size(); ++k) {
        const auto& cp = data[k];
        double r2 = 0.0, dfk = 0.0;
        for (int a = 0; a < n; ++a) {
            const double d = x[a] - cp.x[a];
            r2 += d * d;
            dfk += d * cp.f[a];
        }
        if (r2 >= support2) {
            continue;
        }
        const double r = std::sqrt(r2);
        const double psi = kernel.psi(r);
        const double psi1 = kernel.psi1(r);
        // grad_1 phi(x_k, x) . f_k with x_k - x = -d
        const double g = -psi1 * dfk;
        s.noalias() += psi * sol.sandwiched_beta()[k];
        s.noalias() += g * sol.beta()[k];
        if (orbital) {
            double dfx = 0.0, fkfx = 0.0;
            for (int a = 0; a < n; ++a) {
                dfx += (x[a] - cp.x[a]) * fx[a];
                fkfx += cp.f[a] * fx[a];
            }
            const double psi2 = kernel.psi2(r);
            const double g2 = psi1 * dfx;   // grad_2 phi(x_k, x) . f(x)
            const double h = -psi2 * dfk * dfx - psi1 * fkfx;
            orbital->noalias() += g2 * sol.sandwiched_beta()[k];
            orbital->noalias() += h * sol.beta()[k];
        }
    }
}

}  // namespace

Matrix eval_S(const RecoverySolution& sol, const Vector& x) {
    Matrix s;
    accumulate(sol, x, s, nullptr);
    return s;
}

Matrix eval_orbital_derivative(const RecoverySolution& sol, const Vector& x) {
    Matrix s, orbital;
    accumulate(sol, x, s, &orbital);
    return orbital;
}

Matrix eval_FS(const RecoverySolution& sol, const Vector& x) {
    Matrix s, orbital;
    accumulate(sol, x, s, &orbital);
    const Matrix jac = sol.set().system().Df(x);
    return symmetrized(jac.transpose() * s + s * jac + orbital);
}

Matrix eval_S_from_representers(const RecoverySolution& sol, const Vector& x) {
    const auto& set = sol.set();
    const int n = set.dimension();
    Matrix s = Matrix::Zero(n, n);
    for (std::size_t row = 0; row < set.functional_count(); ++row) {
        const auto idx = set.functional(row);
        s += sol.gamma()[static_cast<Eigen::Index>(row)] *
             riesz_representer(sol.kernel(), set.data()[idx.k], idx.i, idx.j, x);
    }
    return s;
}

const char* to_string(Definiteness d) noexcept {
    switch (d) {
        case Definiteness::positive_definite: return "positive_definite";
        case Definiteness::negative_definite: return "negative_definite";
        case Definiteness::indefinite: return "indefinite";
        case Definiteness::indeterminate: return "indeterminate";
    }
    return "unknown";
}

Definiteness definiteness_by_eigenvalues(const Matrix& a, double tol) {
    if (a.rows() != a.cols() || a.rows() == 0) {
        throw PreconditionError("definiteness: matrix must be square and nonempty");
    }
    if (asymmetry(a) > 1e-12 * std::max(1.0, a.cwiseAbs().maxCoeff())) {
        throw PreconditionError("definiteness: matrix is not symmetric");
    }
    const Eigen::SelfAdjointEigenSolver<Matrix> solver(a, Eigen::EigenvaluesOnly);
    const double lo = solver.eigenvalues().minCoeff();
    const double hi = solver.eigenvalues().maxCoeff();
    if (lo > tol) {
        return Definiteness::positive_definite;
    }
    if (hi < -tol) {
        return Definiteness::negative_definite;
    }
    if (lo < -tol && hi > tol) {
        return Definiteness::indefinite;
    }
    return Definiteness::indeterminate;
}

Definiteness definiteness(const Matrix& a, double tol) {
    if (a.rows() != 2 || a.cols() != 2) {
        return definiteness_by_eigenvalues(a, tol);
    }
    if (std::abs(a(0, 1) - a(1, 0)) > 1e-12 * std::max(1.0, a.cwiseAbs().maxCoeff())) {
        throw PreconditionError("definiteness: matrix is not symmetric");
    }
    const double det = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
    const double trace = a(0, 0) + a(1, 1);
    if (std::abs(det) <= tol) {
        return Definiteness::indeterminate;
    }
    if (det < 0.0) {
        return Definiteness::indefinite;
    }
    if (std::abs(trace) <= tol) {
        return Definiteness::indeterminate;
    }
    return trace > 0.0 ? Definiteness::positive_definite : Definiteness::negative_definite;
}

std::vector<FieldSample> field_export(const RecoverySolution& sol, const PointList& grid,
                                      unsigned threads) {
    std::vector<FieldSample> out(grid.size());
    const auto work = [&](std::size_t first, std::size_t stride) {
        for (std::size_t p = first; p < grid.size(); p += stride) {
            FieldSample sample;
            sample.x = grid[p];
            sample.S = eval_S(sol, grid[p]);
            sample.FS = eval_FS(sol, grid[p]);
            sample.trace_S = sample.S.trace();
            sample.det_S = sample.S.determinant();
            sample.trace_FS = sample.FS.trace();
            sample.neg_det_FS = -sample.FS.determinant();
            sample.min_eig_S = Eigen::SelfAdjointEigenSolver<Matrix>(sample.S, Eigen::EigenvaluesOnly)
                                   .eigenvalues()
                                   .minCoeff();
            sample.max_eig_FS = Eigen::SelfAdjointEigenSolver<Matrix>(sample.FS, Eigen::EigenvaluesOnly)
                                    .eigenvalues()
                                    .maxCoeff();
            out[p] = std::move(sample);
        }
    };
    threads = std::max(1u, threads);
    if (threads == 1) {
        work(0, 1);
    } else {
        std::vector<std::jthread> workers;
        for (unsigned t = 0; t < threads; ++t) {
            workers.emplace_back(work, t, threads);
        }
    }
    return out;
}

MetricField as_field(const RecoverySolution& sol) {
    return {[&sol](const Vector& x) { return eval_S(sol, x); },
            [&sol](const Vector& x) { return eval_FS(sol, x); }};
}

ErrorReport error_report(const MetricField& approx, const ExactMetric& exact,
                         const DynamicalSystem& sys, const PointList& check_grid) {
    if (check_grid.empty()) {
        throw PreconditionError("error report: empty check grid");
    }
    ErrorReport out;
    for (const auto& x : check_grid) {
        const Matrix m = exact.value(x);
        const Matrix fm = apply_F(sys, m, exact.gradient(x), x);
        out.e = std::max(out.e, (approx.S(x) - m).cwiseAbs().maxCoeff());
        out.e_s = std::max(out.e_s, (approx.FS(x) - fm).cwiseAbs().maxCoeff());
    }
    return out;
}

ErrorReport error_report(const RecoverySolution& sol, const ExactMetric& exact,
                         const PointList& check_grid) {
    return error_report(as_field(sol), exact, sol.set().system(), check_grid);
}

ConvergenceReport convergence_study(const ProblemSetup& setup, const RadialKernel& kernel,
                                    const std::vector<double>& alphas, const Vector& lower,
                                    const Vector& upper, const PointList& check_grid,
                                    const ConvergenceOptions& options) {
    if (!setup.exact) {
        throw PreconditionError("convergence study: system '" + setup.system.label +
                                "' has no exact metric");
    }
    if (alphas.empty()) {
        throw InvalidParameter("convergence study: no grid spacings given");
    }
    for (std::size_t t = 1; t < alphas.size(); ++t) {
        if (!(alphas[t] < alphas[t - 1])) {
            throw InvalidParameter("convergence study: spacings must be strictly decreasing");
        }
    }

    ConvergenceReport report;
    report.reference_ratio =
        std::pow(2.0, kernel.smoothness() - 1.0 - 0.5 * setup.system.dimension);

    for (const double alpha : alphas) {
        const std::string tag = "alpha = " + std::to_string(alpha) + ": ";
        const auto start = std::chrono::steady_clock::now();
        ConvergenceRow row;
        row.alpha = alpha;
        try {
            const PointList grid = make_grid({lower, upper, alpha, 0.0});
            auto assembly = assemble(setup.system, kernel, grid, options.assembly);
            row.points = assembly.set.size();
            row.unknowns = assembly.set.functional_count();
            const RecoverySolution sol = solve(std::move(assembly), kernel, setup.rhs, options.solve);
            if (options.inspect) options.inspect(alpha, sol);
            const ErrorReport err = error_report(sol, *setup.exact, check_grid);
            row.e = err.e;
            row.e_s = err.e_s;
            row.relative_residual = sol.diagnostics().relative_residual;
        } catch (const FactorizationError& ex) {
            throw FactorizationError(tag + ex.what(), ex.pivot());
        } catch (const PreconditionError& ex) {
            throw PreconditionError(tag + ex.what());
        } catch (const InvalidParameter& ex) {
            throw InvalidParameter(tag + ex.what());
        }
        if (!report.rows.empty()) {
            row.ratio_s = report.rows.back().e_s / row.e_s;
            row.ratio = report.rows.back().e / row.e;
        }
        row.seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        report.rows.push_back(row);
    }
    return report;
}

PointList ellipse_points(const Vector& x, const Matrix& s_x, double level, int m) {
    if (x.size() != 2 || s_x.rows() != 2 || s_x.cols() != 2) {
        throw PreconditionError("ellipse: only defined in two dimensions");
    }
    if (!(level > 0.0)) {
        throw InvalidParameter("ellipse: level must be positive");
    }
    if (m < 1) {
        throw InvalidParameter("ellipse: need at least one sample");
    }
    if (definiteness_by_eigenvalues(s_x) != Definiteness::positive_definite) {
        throw PreconditionError("ellipse: matrix is not positive definite");
    }
    const Eigen::SelfAdjointEigenSolver<Matrix> eig(s_x);
    const Vector axis0 = eig.eigenvectors().col(0) * std::sqrt(level / eig.eigenvalues()[0]);
    const Vector axis1 = eig.eigenvectors().col(1) * std::sqrt(level / eig.eigenvalues()[1]);

    PointList out;
    out.reserve(static_cast<std::size_t>(m));
    for (int t = 0; t < m; ++t) {
        const double theta = 2.0 * std::numbers::pi * t / m;
        out.push_back(x + std::cos(theta) * axis0 + std::sin(theta) * axis1);
    }
    return out;
}

}  // namespace cmetric
