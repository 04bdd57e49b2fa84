#include "cmetric/kernel.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace cmetric {

namespace {

using IntPoly = std::vector<std::int64_t>;

IntPoly derivative(const IntPoly& p) {
    IntPoly d;
    for (std::size_t i = 1; i < p.size(); ++i) {
        d.push_back(static_cast<std::int64_t>(i) * p[i]);
    }
    return d;
}

IntPoly add(IntPoly a, const IntPoly& b) {
    if (a.size() < b.size()) {
        a.resize(b.size(), 0);
    }
    for (std::size_t i = 0; i < b.size(); ++i) {
        a[i] += b[i];
    }
    return a;
}

IntPoly scale(IntPoly p, std::int64_t factor) {
    for (auto& v : p) {
        v *= factor;
    }
    return p;
}

// (1 - s) p(s)
IntPoly times_one_minus_s(const IntPoly& p) {
    IntPoly out(p.size() + 1, 0);
    for (std::size_t i = 0; i < p.size(); ++i) {
        out[i] += p[i];
        out[i + 1] -= p[i];
    }
    return out;
}

// p(s) / s, exact; requires p(0) == 0.
IntPoly divide_by_s(const IntPoly& p, const char* what) {
    if (p.empty()) {
        return {};
    }
    if (p[0] != 0) {
        throw InvalidParameter(std::string("radial kernel: ") + what +
                               " does not vanish at the origin; profile is not smooth enough");
    }
    return IntPoly(p.begin() + 1, p.end());
}

// Given g(s) = (1 - s)^power q(s), returns the q-part of
// g'(s) = (1 - s)^(power - 1) [-power q(s) + (1 - s) q'(s)].
IntPoly derivative_factor(int power, const IntPoly& q) {
    return add(scale(q, -power), times_one_minus_s(derivative(q)));
}

std::vector<double> to_double(const IntPoly& p) {
    return {p.begin(), p.end()};
}

}  // namespace

double TruncatedPower::operator()(double s) const {
    if (s >= 1.0) {
        return 0.0;
    }
    double poly = 0.0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) {
        poly = poly * s + *it;
    }
    const double t = 1.0 - s;
    double factor = 1.0;
    for (int i = 0; i < power; ++i) {
        factor *= t;
    }
    return factor * poly;
}

RadialKernel::RadialKernel(double c, double sigma, int power, std::vector<std::int64_t> q)
    : c_(c), sigma_(sigma) {
    if (!(c > 0.0) || !std::isfinite(c)) {
        throw InvalidParameter("radial kernel: shape parameter c must be positive, got " +
                               std::to_string(c));
    }
    if (!(sigma > 0.0)) {
        throw InvalidParameter("radial kernel: smoothness must be positive");
    }
    if (power < 2 || q.empty()) {
        throw InvalidParameter("radial kernel: need (1 - s)^l q(s) with l >= 2 and nonempty q");
    }

    // psi'(r) = c (1-s)^(l-1) a(s), so psi'(r)/r = c^2 (1-s)^(l-1) a(s)/s.
    const IntPoly q1 = divide_by_s(derivative_factor(power, q), "psi'");
    // psi1 as a function of s is u(s) = (1-s)^(l-1) q1(s), and
    // psi2(r) = psi1'(r)/r = c^4 (1-s)^(l-2) b(s)/s.
    const IntPoly q2 = divide_by_s(derivative_factor(power - 1, q1), "psi1'");

    psi_ = {power, to_double(q)};
    psi1_ = {power - 1, to_double(q1)};
    psi2_ = {power - 2, to_double(q2)};
}

double RadialKernel::psi(double r) const {
    return psi_(c_ * r);
}

double RadialKernel::psi1(double r) const {
    return c_ * c_ * psi1_(c_ * r);
}

double RadialKernel::psi2(double r) const {
    const double c2 = c_ * c_;
    return c2 * c2 * psi2_(c_ * r);
}

namespace {

void require_same_dimension(const Vector& x, const Vector& y) {
    if (x.size() != y.size()) {
        throw PreconditionError("radial kernel: dimension mismatch (" + std::to_string(x.size()) +
                                " vs " + std::to_string(y.size()) + ")");
    }
}

}  // namespace

double RadialKernel::phi(const Vector& x, const Vector& y) const {
    require_same_dimension(x, y);
    return psi((x - y).norm());
}

Vector RadialKernel::grad1_phi(const Vector& x, const Vector& y) const {
    require_same_dimension(x, y);
    const Vector d = x - y;
    return psi1(d.norm()) * d;
}

Matrix RadialKernel::hess12_phi(const Vector& x, const Vector& y) const {
    require_same_dimension(x, y);
    const Vector d = x - y;
    const double r = d.norm();
    Matrix h = -psi2(r) * d * d.transpose();
    h.diagonal().array() -= psi1(r);
    return h;
}

RadialKernel wendland_c8(double c) {
    return RadialKernel(c, 5.5, 10, {25, 250, 1050, 2250, 2145});
}

}  // namespace cmetric
