#include "cmetric/system.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace cmetric {

Vector DynamicalSystem::f(const Vector& x) const {
    if (x.size() != dimension) {
        throw PreconditionError("system '" + label + "': point has dimension " +
                                std::to_string(x.size()) + ", expected " +
                                std::to_string(dimension));
    }
    return rhs(x);
}

Matrix DynamicalSystem::Df(const Vector& x) const {
    if (x.size() != dimension) {
        throw PreconditionError("system '" + label + "': point has dimension " +
                                std::to_string(x.size()) + ", expected " +
                                std::to_string(dimension));
    }
    return jacobian(x);
}

ProblemSetup linear_example() {
    Matrix a(2, 2);
    a << -1.0, 1.0,
          1.0, -2.0;

    DynamicalSystem sys;
    sys.label = "linear-example";
    sys.dimension = 2;
    sys.rhs = [a](const Vector& x) -> Vector { return a * x; };
    sys.jacobian = [a](const Vector&) -> Matrix { return a; };
    sys.equilibria.push_back({Vector::Zero(2), Stability::stable});

    Matrix m(2, 2);
    m << 1.0, 0.5,
         0.5, 0.5;

    ExactMetric exact;
    exact.label = "constant";
    exact.value = [m](const Vector&) -> Matrix { return m; };
    exact.gradient = [](const Vector& x) -> MatrixGradient {
        return MatrixGradient(static_cast<std::size_t>(x.size()), Matrix::Zero(2, 2));
    };

    return {std::move(sys), std::move(exact), Matrix::Identity(2, 2)};
}

EquilibriumCheck check_equilibrium_condition(const DynamicalSystem& sys, const Vector& x0,
                                             Stability sign) {
    const double residual = sys.f(x0).norm();
    if (residual > 1e-10) {
        throw PreconditionError("system '" + sys.label + "': point is not an equilibrium (|f| = " +
                                std::to_string(residual) + ")");
    }

    Eigen::EigenSolver<Matrix> solver(sys.Df(x0), false);
    EquilibriumCheck out;
    out.satisfied = true;
    for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
        const std::complex<double> ev = solver.eigenvalues()[i];
        out.eigenvalues.push_back(ev);
        if (std::abs(ev.real()) <= 1e-12) {
            out.indeterminate = true;
            out.satisfied = false;
        } else if ((sign == Stability::stable) != (ev.real() < 0.0)) {
            out.satisfied = false;
        }
    }
    std::sort(out.eigenvalues.begin(), out.eigenvalues.end(),
              [](auto lhs, auto rhs) { return lhs.real() < rhs.real(); });
    return out;
}

JacobianConsistency check_jacobian_consistency(const DynamicalSystem& sys, double lo, double hi,
                                               int samples, std::uint64_t seed,
                                               double tolerance) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coord(lo, hi);
    const int n = sys.dimension;
    const double h = 1e-6;

    JacobianConsistency out;
    for (int s = 0; s < samples; ++s) {
        Vector x(n);
        for (int i = 0; i < n; ++i) {
            x[i] = coord(rng);
        }
        const Matrix jac = sys.Df(x);
        Matrix fd(n, n);
        for (int j = 0; j < n; ++j) {
            Vector xp = x, xm = x;
            xp[j] += h;
            xm[j] -= h;
            fd.col(j) = (sys.f(xp) - sys.f(xm)) / (2.0 * h);
        }
        const double scale = std::max(1.0, jac.cwiseAbs().maxCoeff());
        out.max_deviation = std::max(out.max_deviation, (fd - jac).cwiseAbs().maxCoeff() / scale);
    }
    out.consistent = out.max_deviation <= tolerance;
    return out;
}

SystemRegistry SystemRegistry::with_builtins() {
    SystemRegistry registry;
    registry.register_system("linear-example", &linear_example);
    return registry;
}

void SystemRegistry::register_system(const std::string& name, Factory factory) {
    const ProblemSetup setup = factory();
    const auto check = check_jacobian_consistency(setup.system);
    if (!check.consistent) {
        throw InvalidParameter("system '" + name + "': Jacobian disagrees with finite differences (" +
                               std::to_string(check.max_deviation) + ")");
    }
    factories_[name] = std::move(factory);
}

bool SystemRegistry::contains(const std::string& name) const {
    return factories_.count(name) != 0;
}

ProblemSetup SystemRegistry::make(const std::string& name) const {
    const auto it = factories_.find(name);
    if (it == factories_.end()) {
        throw InvalidParameter("unknown system '" + name + "'");
    }
    return it->second();
}

std::vector<std::string> SystemRegistry::names() const {
    std::vector<std::string> out;
    for (const auto& [name, _] : factories_) {
        out.push_back(name);
    }
    return out;
}

}  // namespace cmetric
