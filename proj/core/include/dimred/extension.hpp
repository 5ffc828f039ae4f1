#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dimred/clustering.hpp"
#include "dimred/corelemma.hpp"

namespace dimred {

/// Edge (a, b) iff ||phi(a) - phi(b)|| > ||a - b||.
struct ExpansionGraph {
    std::size_t n = 0;
    std::vector<std::pair<std::size_t, std::size_t>> edges;  // a < b, lexicographic
    std::vector<std::size_t> degrees;

    std::size_t max_degree() const;
    bool has_edge(std::size_t a, std::size_t b) const;
};

ExpansionGraph build_expansion_graph(std::span<const Vector> X, std::span<const Vector> phiX);

/// max degree <= theta * n
bool everywhere_sparse(const ExpansionGraph& graph, double theta);

/// 2 (1+eps)^2 theta / eps
double theta_prime(double eps, double theta);

/// g_x = (1+eps)^2 ||x - u||^2 - ||phi(x) - v||^2, so F(v, lambda) = sum lambda_x g_x.
std::vector<double> saddle_coefficients(std::span<const double> v, std::span<const double> u,
                                        std::span<const Vector> X, std::span<const Vector> phiX, double eps);

double saddle_objective(std::span<const double> v, std::span<const double> u, std::span<const Vector> X,
                        std::span<const Vector> phiX, double eps, std::span<const double> lambda);

struct LambdaSolution {
    std::vector<double> lambda;
    double value = 0.0;
};

/// Minimum of sum lambda_x g_x over the simplex with every lambda_x <= eta:
/// the smallest coefficients are filled to eta in ascending order (ties by
/// index), the pivot takes the remainder. Throws if eta * n < 1.
LambdaSolution min_lambda_over_box(std::span<const double> g, double eta);

LambdaSolution min_lambda_oracle(std::span<const double> v, std::span<const double> u, std::span<const Vector> X,
                                 std::span<const Vector> phiX, double eps, double eta);

struct ExtensionOptions {
    /// Sparsity level of the expansion graph; defaults to max degree / n.
    std::optional<double> theta;
    /// Convergence slack on the saddle value; defaults to 1e-8 (1 + max_x g_x at v = phi-mean).
    std::optional<double> tol;
    std::size_t max_iters = 100000;
    /// Step scale c in c / sqrt(iteration); defaults to the spread of phi(X).
    std::optional<double> step_scale;
};

struct ExtensionSolution {
    Vector v;
    Vector u;
    double eps = 0.0;
    double theta = 0.0;
    double theta_prime = 0.0;
    double eta = 0.0;              // +inf when theta = 0
    Subset violating;              // ||phi(x) - v|| > (1+eps) ||x - u||
    double saddle_value = 0.0;     // min over Lambda_eta of F(v, .)
    std::size_t iterations = 0;
    bool converged = false;
    bool fallback = false;         // Lambda_eta empty; minimized max_x excess instead
    double tol = 0.0;

    double violating_fraction(std::size_t n) const {
        return n == 0 ? 0.0 : static_cast<double>(violating.size()) / static_cast<double>(n);
    }
};

/// Maximizes v -> min over Lambda_eta of F(v, lambda) by normalized
/// supergradient ascent with steps c / sqrt(k). Stops once the value is
/// nonnegative, or once it is within tol and has stopped improving.
ExtensionSolution robust_extension(std::span<const Vector> X, std::span<const Vector> phiX,
                                   std::span<const double> u, double eps, const ExtensionOptions& options = {});

/// (1+eps)-preserved fraction of X seen from each point (the point itself counts).
std::vector<double> preservation_fractions(std::span<const Vector> X, std::span<const Vector> phiX, double eps);

struct CostTransferReport {
    double p = 0.0;
    double theta = 0.0;
    bool hypothesis_ok = false;     // theta <= 4^-(p+1)
    bool sparse = false;            // expansion graph theta everywhere-sparse
    std::size_t max_degree = 0;
    double cost_X = 0.0;
    double cost_phiX = 0.0;
    double factor = 0.0;            // 1 + 3^(p+2) theta^(1/(p+1))
    bool stated_holds = false;      // cost_X <= factor * cost_phiX
    bool proven_holds = false;      // cost_phiX <= factor * cost_X
    std::optional<double> eps;
    std::optional<bool> preservation_ok;  // every point preserves >= (1 - theta) of X
    std::optional<double> sandwich_factor;  // (1+eps)^p * factor
    std::optional<bool> sandwich_holds;
};

/// Single-cluster cost comparison of X and phi(X). Inequalities are always
/// evaluated; hypothesis flags are reported next to them.
CostTransferReport cost_transfer_check(std::span<const Vector> X, std::span<const Vector> phiX, double p,
                                       double theta, std::optional<double> eps = std::nullopt,
                                       const CenterOptions& options = {});

struct ReroutingCheck {
    std::size_t checked = 0;       // points meeting the |I_x cap X~| >= n/2 hypothesis
    std::size_t violations = 0;
    double worst_slack = 0.0;      // min over checked points of rhs - lhs
};

/// Pointwise rerouting bound ||phi x - v||^p <= (1+eps)^p ||x - u||^p
/// + 3^p/eps^(p-1) * 2/n * sum over X~ of ||x' - u||^p, with X~ the points
/// satisfying the extension inequality at (u, v).
ReroutingCheck rerouting_check(std::span<const Vector> X, std::span<const Vector> phiX, std::span<const double> u,
                               std::span<const double> v, double eps, double p);

/// lhs = ||a - b||^2, rhs = 2 sum_x lambda_x (||x - a||^2 + ||x - b||^2).
std::pair<double, double> convex_triangle_sides(std::span<const Vector> points, std::span<const double> lambda,
                                                std::span<const double> a, std::span<const double> b);

struct ExtensionInstance {
    std::vector<Vector> X;
    std::vector<Vector> phiX;
    Vector u;
    double eps = 0.5;
    std::optional<double> theta;
};

std::string to_json(const ExtensionInstance& instance);
ExtensionInstance extension_instance_from_json(std::string_view text);
std::string to_json(const ExtensionSolution& solution);
std::string to_json(const CostTransferReport& report);

}  // namespace dimred
