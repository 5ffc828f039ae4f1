#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dimred/clustering.hpp"
#include "dimred/projection.hpp"

namespace dimred {

struct DatasetSpec {
    std::string generator = "blobs";  // blobs | lower_bound | file
    // blobs
    std::size_t clusters = 2;
    std::size_t per_cluster = 4;
    std::size_t m = 10;
    double spread = 1.0;
    double separation = 20.0;
    // lower_bound (uses m too)
    std::size_t pairs = 8;
    double gap = 1000.0;
    bool orthogonal = false;
    // file
    std::string path;
};

enum class ExperimentMode { preservation, adversarial, costbound };
enum class ExhaustiveMode { automatic, on, off };

struct ExperimentConstants {
    double C = 1.0;                       // standard_dimension constant
    double c = 0.5;                       // sub-Gaussian tail constant
    std::optional<double> c_prime;        // dimension floor for standardness
    double pruning_delta_scale = 1e3;     // delta <= theta^7 / (scale k^6), pruning form
    double core_delta_scale = 1e4;        // same, core-existence form
};

struct ExperimentConfig {
    std::string name = "experiment";
    ExperimentMode mode = ExperimentMode::preservation;
    DatasetSpec dataset;
    Family family = Family::gaussian;
    double eps = 0.2;
    double p = 2.0;
    std::size_t k = 2;
    double alpha = 0.1;
    std::size_t trials = 100;
    std::vector<std::size_t> d_grid{4, 16, 64};
    std::uint64_t seed = 0;
    ExperimentConstants constants;
    std::optional<double> theta;          // costbound mode; defaults to theorem_theta
    bool theorem_mode = false;            // enforce eps in (0, 1/4)
    ExhaustiveMode exhaustive = ExhaustiveMode::automatic;
    std::size_t sampled_clusterings = 200;
    std::size_t heuristic_restarts = 8;
    std::size_t delta_trials = 2000;
    unsigned workers = 1;
    std::string output_dir = "results";

    void validate() const;
};

ExperimentConfig experiment_config_from_json(std::string_view text);
std::string to_json(const ExperimentConfig& config);
std::string_view to_string(ExperimentMode mode);
ExperimentMode parse_mode(std::string_view name);

/// DIMRED_OUTPUT_DIR overrides config.output_dir when set and nonempty.
std::filesystem::path resolve_output_dir(const ExperimentConfig& config);

/// Builds the configured dataset; generator randomness uses derive_seed(seed, 0xda7a).
Dataset make_dataset(const ExperimentConfig& config);

struct ThetaChoice {
    double theta = 0.0;    // min(eps^(p+1) / 3^((p+1)^2), alpha eps^p / (6 (1+eps)^p))
    double literal = 0.0;  // the same with the first term multiplied instead of divided
};
ThetaChoice theorem_theta(double eps, double p, double alpha);

/// (1+eps)^(3p-2) (1 + 3^(p+2) theta^(1/(p+1)))
double cost_bound_A(double eps, double p, double theta);
/// 3 (1+eps)^p theta / (alpha eps^(p-1))
double cost_bound_c(double alpha, double eps, double p, double theta);
/// theta^7 / (scale k^6)
double delta_requirement(double theta, std::size_t k, double scale);

/// projected / original, with 0/0 = 1 and x/0 = +inf for x > 0.
double cost_ratio(double original, double projected);

struct DAggregate {
    std::size_t d = 0;
    std::size_t trials = 0;
    double q10 = 0.0;
    double q50 = 0.0;
    double q90 = 0.0;
    double pass_fraction = 0.0;
};

struct PreservationRow {
    std::size_t trial = 0;
    std::size_t d = 0;
    std::uint64_t map_seed = 0;
    double max_ratio = 1.0;     // max over clusterings of projected / original cost
    double max_inverse = 1.0;   // max over clusterings of original / projected cost
    double deviation = 0.0;     // max(max_ratio, max_inverse) - 1
    bool band = true;           // (1-eps) cost <= projected <= (1+eps) cost for every clustering
    bool ineq8 = true;          // projected <= (1+eps)^(3p) cost for every clustering
    bool ineq9 = true;          // (1-eps) cost <= (1+eps)^(3p-1) projected for every clustering
    std::vector<std::size_t> worst_high;
    std::vector<std::size_t> worst_low;
};

struct PreservationResult {
    ExperimentConfig config;
    bool exhaustive = false;
    std::size_t clusterings = 0;  // per trial (sampled mode adds one projected optimum)
    std::vector<PreservationRow> rows;
    std::vector<DAggregate> aggregates;  // quantiles of deviation, pass = band
    std::optional<std::size_t> smallest_passing_d;
};

/// Every enumerated (or sampled) clustering is costed before and after one
/// fresh map per (trial, d); the map seed is derive_seed(seed, trial, d).
PreservationResult run_preservation(const ExperimentConfig& config);

struct AdversarialRow {
    std::size_t trial = 0;
    std::size_t d = 0;
    std::uint64_t map_seed = 0;
    double opt_original = 0.0;
    double opt_projected = 0.0;
    double opt_ratio = 1.0;      // opt_projected / opt_original
    double cost_original = 0.0;  // cost in the original space of the projected optimum
    double ratio = 1.0;          // opt_projected / cost_original
    bool band = true;
    bool ineq8 = true;
    bool ineq9 = true;
};

struct AdversarialResult {
    ExperimentConfig config;
    bool exact = false;
    std::vector<AdversarialRow> rows;
    std::vector<DAggregate> aggregates;  // quantiles of opt_ratio, pass = ineq8 and ineq9
    std::vector<double> failure_rate;    // per d, 1 - pass
};

/// Clustering chosen after seeing the map: the optimum of the projected data.
AdversarialResult run_adversarial(const ExperimentConfig& config);

struct CostBoundRow {
    std::size_t trial = 0;
    std::size_t d = 0;
    std::uint64_t map_seed = 0;
    std::size_t clusterings = 0;
    bool upper_holds = true;    // projected <= A (cost + c cost*)
    bool lower_holds = true;    // cost <= A (projected + c cost*)
    double worst_upper = 0.0;   // max of projected / (A (cost + c cost*))
    double worst_lower = 0.0;   // max of cost / (A (projected + c cost*))
};

struct CostBoundResult {
    ExperimentConfig config;
    double theta = 0.0;
    double theta_literal = 0.0;
    double A = 0.0;
    double c = 0.0;
    double optimal_cost = 0.0;
    std::vector<double> delta_hat;       // per d
    std::vector<double> delta_std_error;
    std::vector<double> violation_rate;
    std::vector<double> violation_bound; // alpha + C(k,2) delta_hat
    std::vector<bool> within_bound;      // rate <= bound + 3 sigma
    std::vector<CostBoundRow> rows;
    std::vector<DAggregate> aggregates;  // quantiles of max(worst_upper, worst_lower)
};

/// Audit of the two-sided additive cost bounds with constants A and c,
/// against the brute-force (or heuristic) optimum as reference.
CostBoundResult run_costbound_audit(const ExperimentConfig& config);

std::string to_csv(const PreservationResult& result);
std::string to_csv(const AdversarialResult& result);
std::string to_csv(const CostBoundResult& result);
std::string to_json(const PreservationResult& result);
std::string to_json(const AdversarialResult& result);
std::string to_json(const CostBoundResult& result);

/// Reads the "aggregates" array back from any result JSON.
std::vector<DAggregate> aggregates_from_json(std::string_view text);

/// Linear-interpolated quantile of an unsorted sample (q in [0,1]).
double quantile(std::vector<double> values, double q);

}  // namespace dimred
