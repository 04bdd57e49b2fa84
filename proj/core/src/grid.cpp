#include "cmetric/collocation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace cmetric {

std::vector<std::size_t> grid_shape(const GridSpec& spec) {
    if (spec.lower.size() == 0 || spec.lower.size() != spec.upper.size()) {
        throw InvalidParameter("grid: lower and upper bounds must have the same nonzero dimension");
    }
    if (!(spec.spacing > 0.0) || !std::isfinite(spec.spacing)) {
        throw InvalidParameter("grid: spacing must be positive");
    }
    if (spec.offset < 0.0) {
        throw InvalidParameter("grid: offset must be nonnegative");
    }
    std::vector<std::size_t> shape;
    for (Eigen::Index a = 0; a < spec.lower.size(); ++a) {
        const double edge = spec.upper[a] - spec.lower[a];
        if (!(edge > 0.0)) {
            throw InvalidParameter("grid: upper bound must exceed lower bound on every axis");
        }
        if (spec.spacing > edge) {
            throw InvalidParameter("grid: spacing " + std::to_string(spec.spacing) +
                                   " exceeds box edge " + std::to_string(edge));
        }
        const double steps = (edge - 2.0 * spec.offset) / spec.spacing;
        const double rounded = std::round(steps);
        if (steps < 0.0 || std::abs(steps - rounded) > 1e-10) {
            throw InvalidParameter("grid: spacing does not divide the box edge on axis " +
                                   std::to_string(a));
        }
        shape.push_back(static_cast<std::size_t>(rounded) + 1);
    }
    return shape;
}

PointList make_grid(const GridSpec& spec) {
    const auto shape = grid_shape(spec);
    const std::size_t d = shape.size();
    std::size_t total = 1;
    for (auto s : shape) {
        total *= s;
    }

    PointList out;
    out.reserve(total);
    std::vector<std::size_t> counter(d, 0);
    for (std::size_t p = 0; p < total; ++p) {
        Vector x(static_cast<Eigen::Index>(d));
        for (std::size_t a = 0; a < d; ++a) {
            x[a] = spec.lower[a] + spec.offset + static_cast<double>(counter[a]) * spec.spacing;
        }
        out.push_back(std::move(x));
        for (std::size_t a = d; a-- > 0;) {
            if (++counter[a] < shape[a]) {
                break;
            }
            counter[a] = 0;
        }
    }
    return out;
}

double separation_distance(const PointList& points) {
    if (points.size() < 2) {
        throw PreconditionError("separation distance needs at least two points");
    }
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < points.size(); ++i) {
        for (std::size_t j = i + 1; j < points.size(); ++j) {
            best = std::min(best, (points[i] - points[j]).squaredNorm());
        }
    }
    return std::sqrt(best);
}

double fill_distance_estimate(const PointList& points, const Vector& lower, const Vector& upper,
                              double probe_spacing) {
    if (points.empty()) {
        throw PreconditionError("fill distance needs at least one point");
    }
    if (!(probe_spacing > 0.0)) {
        throw InvalidParameter("fill distance: probe spacing must be positive");
    }
    if (lower.size() != upper.size() || lower.size() != points.front().size()) {
        throw PreconditionError("fill distance: dimension mismatch");
    }
    const Eigen::Index d = lower.size();
    std::vector<std::size_t> shape;
    for (Eigen::Index a = 0; a < d; ++a) {
        shape.push_back(static_cast<std::size_t>(std::ceil((upper[a] - lower[a]) / probe_spacing - 1e-12)) + 1);
    }

    double worst = 0.0;
    std::vector<std::size_t> counter(static_cast<std::size_t>(d), 0);
    Vector probe(d);
    while (true) {
        for (Eigen::Index a = 0; a < d; ++a) {
            probe[a] = std::min(upper[a], lower[a] + static_cast<double>(counter[a]) * probe_spacing);
        }
        double nearest = std::numeric_limits<double>::infinity();
        for (const auto& x : points) {
            nearest = std::min(nearest, (x - probe).squaredNorm());
            if (nearest <= worst) {
                break;   // cannot raise the maximum
            }
        }
        worst = std::max(worst, nearest);

        std::size_t a = static_cast<std::size_t>(d);
        while (a-- > 0) {
            if (++counter[a] < shape[a]) {
                break;
            }
            counter[a] = 0;
        }
        if (a == static_cast<std::size_t>(-1)) {
            break;
        }
    }
    return std::sqrt(worst);
}

}  // namespace cmetric
