#pragma once

#include <span>
#include <vector>

namespace dimred {

using Vector = std::vector<double>;

double dot(std::span<const double> a, std::span<const double> b);
double squared_norm(std::span<const double> a);
double norm(std::span<const double> a);
double squared_distance(std::span<const double> a, std::span<const double> b);
double distance(std::span<const double> a, std::span<const double> b);

Vector subtract(std::span<const double> a, std::span<const double> b);
Vector scaled(std::span<const double> a, double factor);
/// a*x + b*y
Vector linear_combination(double a, std::span<const double> x, double b, std::span<const double> y);

}  // namespace dimred
