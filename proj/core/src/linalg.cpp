#include "dimred/linalg.hpp"

#include <cassert>
#include <cmath>

namespace dimred {

double dot(std::span<const double> a, std::span<const double> b) {
    assert(a.size() == b.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
    return sum;
}

double squared_norm(std::span<const double> a) { return dot(a, a); }

double norm(std::span<const double> a) { return std::sqrt(squared_norm(a)); }

double squared_distance(std::span<const double> a, std::span<const double> b) {
    assert(a.size() == b.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double diff = a[i] - b[i];
        sum += diff * diff;
    }
    return sum;
}

double distance(std::span<const double> a, std::span<const double> b) {
    return std::sqrt(squared_distance(a, b));
}

Vector subtract(std::span<const double> a, std::span<const double> b) {
    assert(a.size() == b.size());
    Vector out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
    return out;
}

Vector scaled(std::span<const double> a, double factor) {
    Vector out(a.begin(), a.end());
    for (double& v : out) v *= factor;
    return out;
}

Vector linear_combination(double a, std::span<const double> x, double b, std::span<const double> y) {
    assert(x.size() == y.size());
    Vector out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = a * x[i] + b * y[i];
    return out;
}

}  // namespace dimred
