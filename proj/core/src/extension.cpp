#include "dimred/extension.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "json.hpp"

namespace dimred {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_instance(std::span<const Vector> X, std::span<const Vector> phiX) {
    if (X.size() != phiX.size()) throw std::invalid_argument("X and phi(X) must have the same size");
    for (std::size_t i = 1; i < X.size(); ++i)
        if (X[i].size() != X[0].size() || phiX[i].size() != phiX[0].size())
            throw std::invalid_argument("points must share one dimension");
}

Vector mean_of(std::span<const Vector> pts) {
    Vector m(pts.front().size(), 0.0);
    for (const auto& p : pts)
        for (std::size_t j = 0; j < m.size(); ++j) m[j] += p[j];
    for (auto& x : m) x /= static_cast<double>(pts.size());
    return m;
}

Subset violators(std::span<const Vector> X, std::span<const Vector> phiX, std::span<const double> u,
                 std::span<const double> v, double eps) {
    Subset s;
    for (std::size_t i = 0; i < X.size(); ++i)
        if (distance(phiX[i], v) > (1.0 + eps) * distance(X[i], u)) s.push_back(i);
    return s;
}

// Minimizes max_x (||phi x - v|| - (1+eps) ||x - u||) when Lambda_eta is empty.
ExtensionSolution fallback_solve(std::span<const Vector> X, std::span<const Vector> phiX,
                                 std::span<const double> u, double eps, double c, std::size_t max_iters,
                                 ExtensionSolution sol) {
    const std::size_t n = X.size();
    std::vector<double> radius(n);
    for (std::size_t i = 0; i < n; ++i) radius[i] = (1.0 + eps) * distance(X[i], u);
    auto excess = [&](const Vector& v, std::size_t& arg) {
        double worst = -kInf;
        for (std::size_t i = 0; i < n; ++i) {
            const double e = distance(phiX[i], v) - radius[i];
            if (e > worst) {
                worst = e;
                arg = i;
            }
        }
        return worst;
    };
    Vector v = mean_of(phiX);
    Vector best_v = v;
    std::size_t arg = 0;
    double best = excess(v, arg);
    std::size_t k = 1;
    for (; k <= max_iters && best > 0.0; ++k) {
        const double h = excess(v, arg);
        if (h < best) {
            best = h;
            best_v = v;
        }
        const auto dir = subtract(v, phiX[arg]);
        const double len = norm(dir);
        if (len == 0.0) break;
        const double step = c / std::sqrt(static_cast<double>(k));
        for (std::size_t j = 0; j < v.size(); ++j) v[j] -= step * dir[j] / len;
    }
    sol.fallback = true;
    sol.v = best_v;
    sol.saddle_value = -best;
    sol.iterations = std::min(k, max_iters);
    sol.converged = best <= 0.0;
    sol.violating = violators(X, phiX, u, best_v, eps);
    return sol;
}

}  // namespace

std::size_t ExpansionGraph::max_degree() const {
    return degrees.empty() ? 0 : *std::max_element(degrees.begin(), degrees.end());
}

bool ExpansionGraph::has_edge(std::size_t a, std::size_t b) const {
    if (a > b) std::swap(a, b);
    return std::binary_search(edges.begin(), edges.end(), std::make_pair(a, b));
}

ExpansionGraph build_expansion_graph(std::span<const Vector> X, std::span<const Vector> phiX) {
    check_instance(X, phiX);
    ExpansionGraph g;
    g.n = X.size();
    g.degrees.assign(g.n, 0);
    for (std::size_t a = 0; a < g.n; ++a)
        for (std::size_t b = a + 1; b < g.n; ++b)
            if (distance(phiX[a], phiX[b]) > distance(X[a], X[b])) {
                g.edges.emplace_back(a, b);
                ++g.degrees[a];
                ++g.degrees[b];
            }
    return g;
}

bool everywhere_sparse(const ExpansionGraph& graph, double theta) {
    if (theta < 0.0) throw std::invalid_argument("theta must be nonnegative");
    return static_cast<double>(graph.max_degree()) <= theta * static_cast<double>(graph.n);
}

double theta_prime(double eps, double theta) {
    if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
    return 2.0 * (1.0 + eps) * (1.0 + eps) * theta / eps;
}

std::vector<double> saddle_coefficients(std::span<const double> v, std::span<const double> u,
                                        std::span<const Vector> X, std::span<const Vector> phiX, double eps) {
    const double s = (1.0 + eps) * (1.0 + eps);
    std::vector<double> g(X.size());
    for (std::size_t i = 0; i < X.size(); ++i) g[i] = s * squared_distance(X[i], u) - squared_distance(phiX[i], v);
    return g;
}

double saddle_objective(std::span<const double> v, std::span<const double> u, std::span<const Vector> X,
                        std::span<const Vector> phiX, double eps, std::span<const double> lambda) {
    const auto g = saddle_coefficients(v, u, X, phiX, eps);
    return dot(g, lambda);
}

LambdaSolution min_lambda_over_box(std::span<const double> g, double eta) {
    const std::size_t n = g.size();
    if (n == 0) throw std::invalid_argument("empty coefficient vector");
    if (!(eta * static_cast<double>(n) >= 1.0 - 1e-12)) throw std::invalid_argument("Lambda_eta is empty (eta * n < 1)");
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return g[a] < g[b]; });
    LambdaSolution sol;
    sol.lambda.assign(n, 0.0);
    const double cap = std::min(eta, 1.0);
    double remaining = 1.0;
    for (auto i : order) {
        if (remaining <= 0.0) break;
        const double w = std::min(cap, remaining);
        sol.lambda[i] = w;
        sol.value += w * g[i];
        remaining -= w;
    }
    return sol;
}

LambdaSolution min_lambda_oracle(std::span<const double> v, std::span<const double> u, std::span<const Vector> X,
                                 std::span<const Vector> phiX, double eps, double eta) {
    return min_lambda_over_box(saddle_coefficients(v, u, X, phiX, eps), eta);
}

ExtensionSolution robust_extension(std::span<const Vector> X, std::span<const Vector> phiX,
                                   std::span<const double> u, double eps, const ExtensionOptions& options) {
    check_instance(X, phiX);
    if (X.empty()) throw std::invalid_argument("robust_extension needs at least one point");
    if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
    if (u.size() != X[0].size()) throw std::invalid_argument("u must live in the space of X");
    const std::size_t n = X.size();
    const double nd = static_cast<double>(n);

    ExtensionSolution sol;
    sol.u.assign(u.begin(), u.end());
    sol.eps = eps;
    sol.theta = options.theta ? *options.theta
                              : static_cast<double>(build_expansion_graph(X, phiX).max_degree()) / nd;
    sol.theta_prime = theta_prime(eps, sol.theta);
    sol.eta = sol.theta_prime > 0.0 ? 1.0 / (sol.theta_prime * nd) : kInf;

    const Vector centroid = mean_of(phiX);
    double spread = 0.0;
    for (const auto& y : phiX) spread = std::max(spread, distance(y, centroid));
    const double c = options.step_scale ? *options.step_scale : (spread > 0.0 ? spread : 1.0);

    if (sol.eta * nd < 1.0) return fallback_solve(X, phiX, u, eps, c, options.max_iters, sol);

    double scale = 0.0;
    for (double g : saddle_coefficients(centroid, u, X, phiX, eps)) scale = std::max(scale, std::abs(g));
    sol.tol = options.tol ? *options.tol : 1e-8 * (1.0 + scale);

    // Starting candidates: the centroid, an inverse-distance blend, and the
    // image of the point nearest to u.
    std::vector<Vector> starts{centroid};
    {
        Vector blend(centroid.size(), 0.0);
        double total = 0.0;
        std::size_t nearest = 0;
        double nearest_d = kInf;
        for (std::size_t i = 0; i < n; ++i) {
            const double d2 = squared_distance(X[i], u);
            if (d2 < nearest_d) {
                nearest_d = d2;
                nearest = i;
            }
            const double w = 1.0 / (d2 + 1e-12);
            total += w;
            for (std::size_t j = 0; j < blend.size(); ++j) blend[j] += w * phiX[i][j];
        }
        for (auto& b : blend) b /= total;
        starts.push_back(std::move(blend));
        starts.push_back(phiX[nearest]);
    }
    Vector v = starts.front();
    double best = -kInf;
    for (const auto& s : starts) {
        const double val = min_lambda_oracle(s, u, X, phiX, eps, sol.eta).value;
        if (val > best) {
            best = val;
            v = s;
        }
    }
    Vector best_v = v;
    best = -kInf;

    constexpr std::size_t kStallWindow = 1000;
    std::size_t last_improvement = 0;
    std::size_t k = 1;
    for (; k <= options.max_iters; ++k) {
        const auto inner = min_lambda_oracle(v, u, X, phiX, eps, sol.eta);
        if (inner.value > best) {
            best = inner.value;
            best_v = v;
            last_improvement = k;
        }
        if (best >= 0.0) break;
        if (best >= -sol.tol && k - last_improvement > kStallWindow) break;
        Vector s(v.size(), 0.0);
        for (std::size_t i = 0; i < n; ++i)
            if (inner.lambda[i] > 0.0)
                for (std::size_t j = 0; j < s.size(); ++j) s[j] += 2.0 * inner.lambda[i] * (phiX[i][j] - v[j]);
        const double len = norm(s);
        if (len == 0.0) break;  // v maximizes F(., lambda*), hence the concave min as well
        const double step = c / std::sqrt(static_cast<double>(k));
        for (std::size_t j = 0; j < v.size(); ++j) v[j] += step * s[j] / len;
    }
    sol.v = best_v;
    sol.saddle_value = best;
    sol.iterations = std::min(k, options.max_iters);
    sol.converged = best >= -sol.tol;
    sol.violating = violators(X, phiX, u, best_v, eps);
    return sol;
}

std::vector<double> preservation_fractions(std::span<const Vector> X, std::span<const Vector> phiX, double eps) {
    check_instance(X, phiX);
    const std::size_t n = X.size();
    std::vector<double> frac(n, 1.0);
    for (std::size_t a = 0; a < n; ++a) {
        std::size_t kept = 0;
        for (std::size_t b = 0; b < n; ++b)
            if (a == b || classify_images(X[a], X[b], phiX[a], phiX[b], eps).preserved) ++kept;
        frac[a] = static_cast<double>(kept) / static_cast<double>(n);
    }
    return frac;
}

CostTransferReport cost_transfer_check(std::span<const Vector> X, std::span<const Vector> phiX, double p,
                                       double theta, std::optional<double> eps, const CenterOptions& options) {
    check_instance(X, phiX);
    if (X.empty()) throw std::invalid_argument("cost transfer needs at least one point");
    if (p < 1.0) throw std::invalid_argument("p must be at least 1");
    CostTransferReport r;
    r.p = p;
    r.theta = theta;
    r.hypothesis_ok = theta <= std::pow(4.0, -(p + 1.0));
    const auto graph = build_expansion_graph(X, phiX);
    r.max_degree = graph.max_degree();
    r.sparse = everywhere_sparse(graph, theta);
    r.cost_X = center_and_cost(X, {}, p, options).cost;
    r.cost_phiX = center_and_cost(phiX, {}, p, options).cost;
    r.factor = 1.0 + std::pow(3.0, p + 2.0) * std::pow(theta, 1.0 / (p + 1.0));
    r.stated_holds = r.cost_X <= r.factor * r.cost_phiX;
    r.proven_holds = r.cost_phiX <= r.factor * r.cost_X;
    if (eps) {
        r.eps = eps;
        const auto frac = preservation_fractions(X, phiX, *eps);
        r.preservation_ok = std::all_of(frac.begin(), frac.end(), [&](double f) { return f >= 1.0 - theta; });
        r.sandwich_factor = std::pow(1.0 + *eps, p) * r.factor;
        r.sandwich_holds = r.cost_X <= *r.sandwich_factor * r.cost_phiX && r.cost_phiX <= *r.sandwich_factor * r.cost_X;
    }
    return r;
}

ReroutingCheck rerouting_check(std::span<const Vector> X, std::span<const Vector> phiX, std::span<const double> u,
                               std::span<const double> v, double eps, double p) {
    check_instance(X, phiX);
    const std::size_t n = X.size();
    std::vector<char> good(n);
    double good_mass = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        good[i] = distance(phiX[i], v) <= (1.0 + eps) * distance(X[i], u);
        if (good[i]) good_mass += std::pow(distance(X[i], u), p);
    }
    const double tail = std::pow(3.0, p) / std::pow(eps, p - 1.0) * 2.0 / static_cast<double>(n) * good_mass;
    ReroutingCheck out;
    out.worst_slack = kInf;
    for (std::size_t x = 0; x < n; ++x) {
        std::size_t support = 0;
        for (std::size_t y = 0; y < n; ++y)
            if (good[y] && distance(phiX[x], phiX[y]) <= distance(X[x], X[y])) ++support;
        if (2 * support < n) continue;
        ++out.checked;
        const double lhs = std::pow(distance(phiX[x], v), p);
        const double rhs = std::pow(1.0 + eps, p) * std::pow(distance(X[x], u), p) + tail;
        out.worst_slack = std::min(out.worst_slack, rhs - lhs);
        if (lhs > rhs * (1.0 + 1e-12)) ++out.violations;
    }
    if (out.checked == 0) out.worst_slack = 0.0;
    return out;
}

std::pair<double, double> convex_triangle_sides(std::span<const Vector> points, std::span<const double> lambda,
                                                std::span<const double> a, std::span<const double> b) {
    double rhs = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i)
        rhs += lambda[i] * (squared_distance(points[i], a) + squared_distance(points[i], b));
    return {squared_distance(a, b), 2.0 * rhs};
}

std::string to_json(const ExtensionInstance& instance) {
    nlohmann::json j;
    j["X"] = instance.X;
    j["phiX"] = instance.phiX;
    j["u"] = instance.u;
    j["eps"] = instance.eps;
    if (instance.theta) j["theta"] = *instance.theta;
    return j.dump();
}

ExtensionInstance extension_instance_from_json(std::string_view text) {
    const auto j = nlohmann::json::parse(text);
    ExtensionInstance in;
    in.X = j.at("X").get<std::vector<Vector>>();
    in.phiX = j.at("phiX").get<std::vector<Vector>>();
    in.u = j.at("u").get<Vector>();
    in.eps = j.at("eps").get<double>();
    if (j.contains("theta")) in.theta = j.at("theta").get<double>();
    check_instance(in.X, in.phiX);
    return in;
}

std::string to_json(const ExtensionSolution& s) {
    nlohmann::json j;
    j["v"] = s.v;
    j["S"] = s.violating;
    j["saddle_value"] = s.saddle_value;
    j["iterations"] = s.iterations;
    j["converged"] = s.converged;
    j["fallback"] = s.fallback;
    j["eps"] = s.eps;
    j["theta"] = s.theta;
    j["theta_prime"] = s.theta_prime;
    if (std::isfinite(s.eta)) j["eta"] = s.eta;
    else j["eta"] = nullptr;
    j["tol"] = s.tol;
    return j.dump();
}

std::string to_json(const CostTransferReport& r) {
    nlohmann::json j;
    j["p"] = r.p;
    j["theta"] = r.theta;
    j["hypothesis_ok"] = r.hypothesis_ok;
    j["sparse"] = r.sparse;
    j["max_degree"] = r.max_degree;
    j["cost_X"] = r.cost_X;
    j["cost_phiX"] = r.cost_phiX;
    j["factor"] = r.factor;
    j["stated_holds"] = r.stated_holds;
    j["proven_holds"] = r.proven_holds;
    if (r.eps) {
        j["eps"] = *r.eps;
        j["preservation_ok"] = *r.preservation_ok;
        j["sandwich_factor"] = *r.sandwich_factor;
        j["sandwich_holds"] = *r.sandwich_holds;
    }
    return j.dump();
}

}  // namespace dimred
