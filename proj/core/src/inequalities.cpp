#include "dimred/inequalities.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dimred/linalg.hpp"

namespace dimred {

namespace {

void check(double eps, double p) {
    if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
    if (!(p >= 1.0)) throw std::invalid_argument("p must be at least 1");
}

}  // namespace

bool InequalitySides::holds(double slack) const { return lhs <= rhs + slack * std::max(1.0, std::abs(rhs)); }

InequalitySides sum_power_sides(double x, std::span<const double> ys, double eps, double p) {
    check(eps, p);
    if (ys.empty()) throw std::invalid_argument("need at least one y");
    if (x < 0.0 || std::any_of(ys.begin(), ys.end(), [](double y) { return y < 0.0; }))
        throw std::invalid_argument("x and y must be nonnegative");
    double sum = x, powers = 0.0;
    for (double y : ys) {
        sum += y;
        powers += std::pow(y, p);
    }
    const double r = static_cast<double>(ys.size());
    return {std::pow(sum, p),
            std::pow(1.0 + eps, p - 1.0) * std::pow(x, p) + std::pow((1.0 + eps) * r / eps, p - 1.0) * powers};
}

InequalitySides relaxed_triangle_sides(std::span<const double> u, std::span<const double> v,
                                       std::span<const double> w, double eps, double p) {
    check(eps, p);
    return {std::pow(distance(u, w), p), std::pow(1.0 + eps, p - 1.0) * std::pow(distance(u, v), p) +
                                             std::pow((1.0 + eps) / eps, p - 1.0) * std::pow(distance(v, w), p)};
}

InequalitySides relaxed_triangle_literal_sides(std::span<const double> u, std::span<const double> v,
                                               std::span<const double> w, double eps, double p) {
    check(eps, p);
    return {std::pow(distance(u, w), p), (1.0 + eps) * std::pow(distance(u, v), p) +
                                             std::pow((1.0 + eps) / eps, p - 1.0) * std::pow(distance(v, w), p)};
}

InequalitySides squared_triangle_sides(std::span<const double> u, std::span<const double> v,
                                       std::span<const double> w) {
    return {squared_distance(u, w), 2.0 * squared_distance(u, v) + 2.0 * squared_distance(v, w)};
}

}  // namespace dimred
