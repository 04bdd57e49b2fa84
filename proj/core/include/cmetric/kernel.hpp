#pragma once

#include "cmetric/types.hpp"

#include <cstdint>
#include <vector>

namespace cmetric {

/// Polynomial in s = c*r of the form (1 - s)^power * sum_i coeffs[i] * s^i.
struct TruncatedPower {
    int power = 0;
    std::vector<double> coeffs;

    double operator()(double s) const;
};

/// Compactly supported radial kernel phi(x, y) = psi(|x - y|).
///
/// The profile is psi(r) = (1 - cr)_+^l * q(cr) with an integer polynomial q.
/// The helpers psi1(r) = psi'(r)/r and psi2(r) = (psi''(r) - psi'(r)/r)/r^2
/// are derived at construction by exact integer polynomial arithmetic, so the
/// divisions by r never happen numerically and all three are finite at r = 0.
///
/// Instances are immutable and safe to share across threads.
class RadialKernel {
public:
    /// Builds psi(r) = (1 - cr)_+^power * q(cr) where q has integer
    /// coefficients q[0] + q[1] s + ... Throws InvalidParameter when c <= 0 or
    /// when the profile is not smooth enough at the origin for psi1 and psi2
    /// to exist as polynomials.
    RadialKernel(double c, double sigma, int power, std::vector<std::int64_t> q);

    double shape_parameter() const noexcept { return c_; }
    double support_radius() const noexcept { return 1.0 / c_; }
    /// Sobolev order of the native space.
    double smoothness() const noexcept { return sigma_; }

    double psi(double r) const;
    double psi1(double r) const;
    double psi2(double r) const;

    const TruncatedPower& psi_profile() const noexcept { return psi_; }
    const TruncatedPower& psi1_profile() const noexcept { return psi1_; }
    const TruncatedPower& psi2_profile() const noexcept { return psi2_; }

    double phi(const Vector& x, const Vector& y) const;
    /// Gradient of phi in its first argument: psi1(r) (x - y).
    Vector grad1_phi(const Vector& x, const Vector& y) const;
    /// Mixed Hessian d^2 phi / dx_i dy_j = -psi2(r) (x-y)(x-y)^T - psi1(r) I.
    Matrix hess12_phi(const Vector& x, const Vector& y) const;

private:
    double c_;
    double sigma_;
    TruncatedPower psi_;
    TruncatedPower psi1_;   // scaled by c^2
    TruncatedPower psi2_;   // scaled by c^4
};

/// Wendland's C^8 function on R^2,
/// (1 - cr)_+^10 (2145 (cr)^4 + 2250 (cr)^3 + 1050 (cr)^2 + 250 cr + 25),
/// reproducing H^5.5(R^2).
RadialKernel wendland_c8(double c);

}  // namespace cmetric
