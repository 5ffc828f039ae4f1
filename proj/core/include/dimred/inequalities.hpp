#pragma once

#include <span>

namespace dimred {

struct InequalitySides {
    double lhs = 0.0;
    double rhs = 0.0;

    /// lhs <= rhs up to `slack` relative to max(1, |rhs|).
    bool holds(double slack = 1e-12) const;
};

/// (x + sum y_i)^p versus (1+eps)^(p-1) x^p + ((1+eps) r / eps)^(p-1) sum y_i^p,
/// for nonnegative x, y_i.
InequalitySides sum_power_sides(double x, std::span<const double> ys, double eps, double p);

/// ||u - w||^p versus (1+eps)^(p-1) ||u - v||^p + ((1+eps)/eps)^(p-1) ||v - w||^p.
InequalitySides relaxed_triangle_sides(std::span<const double> u, std::span<const double> v,
                                       std::span<const double> w, double eps, double p);

/// The same with coefficient (1+eps) on ||u - v||^p. Fails for p > 2, e.g.
/// collinear points with ||v - w|| = eps ||u - v||.
InequalitySides relaxed_triangle_literal_sides(std::span<const double> u, std::span<const double> v,
                                               std::span<const double> w, double eps, double p);

/// ||u - w||^2 versus 2 ||u - v||^2 + 2 ||v - w||^2.
InequalitySides squared_triangle_sides(std::span<const double> u, std::span<const double> v,
                                       std::span<const double> w);

}  // namespace dimred
