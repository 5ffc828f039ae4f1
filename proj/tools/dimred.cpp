#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dimred/clustering.hpp"
#include "dimred/corelemma.hpp"
#include "dimred/dataset_io.hpp"
#include "dimred/experiment.hpp"
#include "dimred/extension.hpp"
#include "dimred/partitions.hpp"
#include "dimred/projection.hpp"
#include "dimred/random.hpp"
#include "dimred/report.hpp"
#include "dimred/tailcheck.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace dimred;
using json = nlohmann::json;

namespace {

// Exit codes: 0 all checks pass, 1 a check failed, 2 bad input.
constexpr int kFailedCheck = 1;
constexpr int kBadInput = 2;

void emit(const std::string& text, const std::string& out) {
    if (out.empty() || out == "-") std::cout << text << '\n';
    else write_text_file(out, text);
}

Family family_option(const std::string& name) { return parse_family(name); }

// --- sample -----------------------------------------------------------------

struct SampleArgs {
    std::string family = "gaussian";
    std::size_t m = 16;
    std::size_t d = 4;
    std::uint64_t seed = 0;
    std::string out;
};

int run_sample(const SampleArgs& a) {
    const auto map = sample_map(family_option(a.family), a.m, a.d, a.seed);
    if (!a.out.empty() && fs::path(a.out).extension() == ".bin") {
        write_binary(map, a.out);
        return 0;
    }
    emit(to_json(map), a.out);
    return 0;
}

// --- tails ------------------------------------------------------------------

struct TailArgs {
    TailConfig config;
    std::string family = "gaussian";
    std::string name = "tails";
    std::string output_dir;
    double sigmas = 3.0;
};

int run_tails(TailArgs a) {
    a.config.family = family_option(a.family);
    const auto report = make_tail_report(a.config);
    bool ok = true;
    for (const auto& pt : report.tail)
        if (pt.empirical > pt.bound + a.sigmas * pt.std_error) ok = false;
    if (report.above_dimension_floor && !*report.above_dimension_floor) ok = false;
    if (!a.output_dir.empty()) {
        for (const auto& path : emit_report(make_bundle(report, a.name), a.output_dir)) std::cerr << path.string() << '\n';
    }
    std::cout << to_json(report) << '\n';
    return ok ? 0 : kFailedCheck;
}

// --- cluster ----------------------------------------------------------------

struct ClusterArgs {
    std::string data;
    std::size_t k = 2;
    double p = 2.0;
    std::string method = "auto";  // auto | exact | heuristic
    std::uint64_t seed = 0;
    std::size_t restarts = 8;
    unsigned workers = 1;
    std::string out;
};

int run_cluster(const ClusterArgs& a) {
    const auto data = load_dataset(a.data);
    const bool small = data.size() <= kEnumerationGuard || a.k + 1 >= data.size();
    std::string method = a.method;
    if (method == "auto") method = small ? "exact" : "heuristic";
    ClusteringResult result;
    if (method == "exact") result = optimal_clustering_exact(data, a.k, a.p, {}, a.workers);
    else if (method == "heuristic") result = lloyd_heuristic(data, a.k, a.p, a.seed, a.restarts);
    else throw std::invalid_argument("unknown method '" + a.method + "'");

    json j = json::parse(to_json(result.clustering));
    j["cost"] = result.cost;
    j["p"] = a.p;
    j["method"] = method;
    if (method == "heuristic") j["seed"] = a.seed;
    emit(j.dump(2), a.out);
    return 0;
}

// --- extend -----------------------------------------------------------------

struct ExtendArgs {
    std::string instance;
    std::optional<double> theta;
    std::optional<double> eps;
    std::size_t max_iters = 100000;
    std::string out;
};

int run_extend(const ExtendArgs& a) {
    auto inst = extension_instance_from_json(read_text_file(a.instance));
    if (a.eps) inst.eps = *a.eps;
    ExtensionOptions opt;
    opt.theta = a.theta ? a.theta : inst.theta;
    opt.max_iters = a.max_iters;
    const auto sol = robust_extension(inst.X, inst.phiX, inst.u, inst.eps, opt);
    emit(to_json(sol), a.out);
    const bool sparse_ok = !std::isfinite(sol.theta_prime) || sol.violating_fraction(inst.X.size()) <= sol.theta_prime;
    return sol.converged && sparse_ok ? 0 : kFailedCheck;
}

// --- verify-core ------------------------------------------------------------

struct CoreArgs {
    std::string data;
    std::string clustering;
    std::string family = "gaussian";
    std::size_t d = 16;
    std::size_t trials = 200;
    double eps = 0.5;
    double theta = 0.2;
    double p = 2.0;
    std::uint64_t seed = 0;
    unsigned workers = 1;
    std::string out;
};

int run_verify_core(const CoreArgs& a) {
    const auto data = load_dataset(a.data);
    const auto clustering = clustering_from_json(read_text_file(a.clustering));
    clustering.validate(data.size());
    std::vector<Vector> centers;
    for (const auto& members : clustering.members()) {
        std::vector<Vector> pts;
        for (auto x : members) pts.push_back(data.points[x]);
        const auto c = center_and_cost(pts, {}, a.p);
        centers.push_back(c.center_defined ? c.center : Vector(data.dim, 0.0));
    }
    std::vector<ProjectionMap> maps;
    const Family family = family_option(a.family);
    for (std::size_t t = 0; t < a.trials; ++t)
        maps.push_back(sample_map(family, data.dim, a.d, derive_seed(a.seed, t)));
    const auto verdict = verify_core(data, clustering, centers, maps, a.eps, a.theta, a.workers);
    emit(to_json(verdict), a.out);
    return verdict.passed() ? 0 : kFailedCheck;
}

// --- experiment -------------------------------------------------------------

struct ExperimentArgs {
    std::string config;
    std::optional<std::string> name;
    std::optional<std::string> mode;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> trials;
    std::optional<double> eps;
    std::optional<unsigned> workers;
    std::vector<std::size_t> d_grid;
    std::optional<std::string> output_dir;
    std::string formats = "csv,json,svg";
};

ReportFormats parse_formats(const std::string& list) {
    ReportFormats f{false, false, false};
    std::size_t start = 0;
    while (start <= list.size()) {
        const auto end = std::min(list.find(',', start), list.size());
        const auto item = list.substr(start, end - start);
        if (item == "csv") f.csv = true;
        else if (item == "json") f.json = true;
        else if (item == "svg") f.svg = true;
        else if (!item.empty()) throw std::invalid_argument("unknown format '" + item + "'");
        start = end + 1;
    }
    return f;
}

double fraction_at_largest_d(const std::vector<DAggregate>& aggregates) {
    const auto it = std::max_element(aggregates.begin(), aggregates.end(),
                                     [](const DAggregate& x, const DAggregate& y) { return x.d < y.d; });
    return it == aggregates.end() ? 0.0 : it->pass_fraction;
}

int run_experiment(const ExperimentArgs& a) {
    ExperimentConfig c = a.config.empty() ? ExperimentConfig{} : experiment_config_from_json(read_text_file(a.config));
    if (a.name) c.name = *a.name;
    if (a.mode) c.mode = parse_mode(*a.mode);
    if (a.seed) c.seed = *a.seed;
    if (a.trials) c.trials = *a.trials;
    if (a.eps) c.eps = *a.eps;
    if (a.workers) c.workers = *a.workers;
    if (!a.d_grid.empty()) c.d_grid = a.d_grid;
    if (a.output_dir) c.output_dir = *a.output_dir;
    c.validate();

    const auto formats = parse_formats(a.formats);
    const auto dir = resolve_output_dir(c);
    ReportBundle bundle;
    bool ok = true;
    switch (c.mode) {
        case ExperimentMode::preservation: {
            const auto r = run_preservation(c);
            ok = fraction_at_largest_d(r.aggregates) >= 1.0 - c.alpha;
            bundle = make_bundle(r);
            break;
        }
        case ExperimentMode::adversarial: {
            const auto r = run_adversarial(c);
            ok = fraction_at_largest_d(r.aggregates) >= 1.0 - c.alpha;
            bundle = make_bundle(r);
            break;
        }
        case ExperimentMode::costbound: {
            const auto r = run_costbound_audit(c);
            for (bool b : r.within_bound) ok = ok && b;
            bundle = make_bundle(r);
            break;
        }
    }
    for (const auto& path : emit_report(bundle, dir, formats)) std::cout << path.string() << '\n';
    std::cout << (ok ? "checks passed" : "checks failed") << '\n';
    return ok ? 0 : kFailedCheck;
}

// --- report -----------------------------------------------------------------

struct ReportArgs {
    std::string input;
    std::string out;
};

int run_report(const ReportArgs& a) {
    const auto text = read_text_file(a.input);
    const auto j = json::parse(text);
    const auto aggregates = aggregates_from_json(text);
    const auto& config = j.at("config");
    const std::string name = config.value("name", std::string("experiment"));
    const std::uint64_t seed = config.at("seed").get<std::uint64_t>();
    std::string out = a.out;
    if (out.empty()) out = (fs::path(a.input).replace_extension(".svg")).string();
    write_text_file(out, svg_quantile_plot(name, seed, aggregates));
    for (const auto& g : aggregates)
        std::printf("d=%zu trials=%zu q10=%.6g q50=%.6g q90=%.6g pass=%.3f\n", g.d, g.trials, g.q10, g.q50, g.q90,
                    g.pass_fraction);
    std::cout << out << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Random projections and clustering cost preservation"};
    app.require_subcommand(1);
    int code = 0;

    SampleArgs sample;
    auto* s = app.add_subcommand("sample", "Sample a projection map and write it as JSON or raw binary");
    s->add_option("--family", sample.family, "gaussian | rademacher | subspace");
    s->add_option("-m,--source-dim", sample.m)->required();
    s->add_option("-d,--target-dim", sample.d)->required();
    s->add_option("--seed", sample.seed);
    s->add_option("-o,--out", sample.out, "Output path; .bin writes raw doubles");
    s->callback([&] { code = run_sample(sample); });

    TailArgs tails;
    auto* t = app.add_subcommand("tails", "Estimate delta, rho and the norm tail of a projection family");
    t->add_option("--family", tails.family);
    t->add_option("-m,--source-dim", tails.config.m);
    t->add_option("-d,--target-dim", tails.config.d);
    t->add_option("--eps", tails.config.eps);
    t->add_option("-p", tails.config.p);
    t->add_option("--trials", tails.config.trials);
    t->add_option("--seed", tails.config.seed);
    t->add_option("--t-grid", tails.config.t_grid)->delimiter(',');
    t->add_option("-c", tails.config.c, "Tail constant in exp(-c t^2 d)");
    t->add_option("--c-prime", tails.config.c_prime, "Dimension floor constant");
    t->add_option("--workers", tails.config.workers);
    t->add_option("--name", tails.name);
    t->add_option("--output-dir", tails.output_dir, "Write CSV/JSON/SVG here");
    t->callback([&] { code = run_tails(tails); });

    ClusterArgs cluster;
    auto* c = app.add_subcommand("cluster", "Optimal or heuristic l_p k-clustering of a dataset");
    c->add_option("data", cluster.data, "CSV or JSON dataset")->required()->check(CLI::ExistingFile);
    c->add_option("-k", cluster.k);
    c->add_option("-p", cluster.p);
    c->add_option("--method", cluster.method, "auto | exact | heuristic");
    c->add_option("--seed", cluster.seed);
    c->add_option("--restarts", cluster.restarts);
    c->add_option("--workers", cluster.workers);
    c->add_option("-o,--out", cluster.out);
    c->callback([&] { code = run_cluster(cluster); });

    ExtendArgs extend;
    auto* e = app.add_subcommand("extend", "Robust one-point extension for an instance file");
    e->add_option("instance", extend.instance)->required()->check(CLI::ExistingFile);
    e->add_option("--theta", extend.theta, "Sparsity level; defaults to the instance value");
    e->add_option("--eps", extend.eps);
    e->add_option("--max-iters", extend.max_iters);
    e->add_option("-o,--out", extend.out);
    e->callback([&] { code = run_extend(extend); });

    CoreArgs core;
    auto* v = app.add_subcommand("verify-core", "Check the non-distorted core over sampled maps");
    v->add_option("data", core.data)->required()->check(CLI::ExistingFile);
    v->add_option("clustering", core.clustering)->required()->check(CLI::ExistingFile);
    v->add_option("--family", core.family);
    v->add_option("-d,--target-dim", core.d);
    v->add_option("--trials", core.trials);
    v->add_option("--eps", core.eps);
    v->add_option("--theta", core.theta);
    v->add_option("-p", core.p, "Exponent used to place the centers");
    v->add_option("--seed", core.seed);
    v->add_option("--workers", core.workers);
    v->add_option("-o,--out", core.out);
    v->callback([&] { code = run_verify_core(core); });

    ExperimentArgs exp;
    auto* x = app.add_subcommand("experiment", "Run an experiment from a JSON config");
    x->add_option("config", exp.config, "Config file (see docs/config_schema.md)")->check(CLI::ExistingFile);
    x->add_option("--name", exp.name);
    x->add_option("--mode", exp.mode, "preservation | adversarial | costbound");
    x->add_option("--seed", exp.seed);
    x->add_option("--trials", exp.trials);
    x->add_option("--eps", exp.eps);
    x->add_option("--workers", exp.workers);
    x->add_option("--d-grid", exp.d_grid)->delimiter(',');
    x->add_option("--output-dir", exp.output_dir);
    x->add_option("--formats", exp.formats, "Comma list of csv, json, svg");
    x->callback([&] { code = run_experiment(exp); });

    ReportArgs report;
    auto* r = app.add_subcommand("report", "Redraw the quantile plot of a result JSON");
    r->add_option("input", report.input)->required()->check(CLI::ExistingFile);
    r->add_option("-o,--out", report.out);
    r->callback([&] { code = run_report(report); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        return app.exit(err) == 0 ? 0 : kBadInput;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << '\n';
        return kBadInput;
    }
    return code;
}
