#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gwire/config.hpp"
#include "gwire/error.hpp"
#include "gwire/graph.hpp"
#include "gwire/io.hpp"
#include "gwire/kernels.hpp"
#include "gwire/metrics.hpp"
#include "gwire/parallel.hpp"
#include "gwire/random.hpp"
#include "gwire/selection.hpp"
#include "gwire/solver.hpp"
#include "gwire/synthetic.hpp"

#ifndef GWIRE_VERSION
#define GWIRE_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using nlohmann::json;
using namespace gwire;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_numerical = 1;
constexpr int exit_input = 2;

struct Manifest {
    std::string command;
    json config = json::object();
    json inputs = json::object();
    std::uint64_t seed = 0;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

    void add_input(const std::string& path) { inputs[path] = io::sha256_file(path); }

    void write(const fs::path& dir, const std::vector<std::string>& outputs) const {
        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        io::write_json((dir / "manifest.json").string(), {{"command", command},
                                                          {"config", config},
                                                          {"inputs", inputs},
                                                          {"seed", seed},
                                                          {"version", GWIRE_VERSION},
                                                          {"outputs", outputs},
                                                          {"wall_time_seconds", wall}});
    }
};

fs::path prepare_out(const std::string& out) {
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) fail(ErrorCode::io, "cannot create output directory " + out + ": " + ec.message());
    return fs::path(out);
}

json index_json(const std::vector<Index>& v) {
    json a = json::array();
    for (Index i : v) a.push_back(i);
    return a;
}

json vector_json(const Vector& v) {
    json a = json::array();
    for (Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

json vector_json(const std::vector<double>& v) {
    json a = json::array();
    for (double x : v) a.push_back(std::isfinite(x) ? json(x) : json(nullptr));
    return a;
}

// Shared data inputs of fit and dim.
struct DataArgs {
    std::string x_path;
    std::string responses_path;
    std::string metric;
    bool bound = false;
    std::string kernel = "wire";
    int slices = 10;
    std::string penalty = "gwire";
    std::string graph_path;
    double glasso_penalty = 0.0;
    double threshold = -1.0;
    std::string weights = "sqrt-size";

    void attach(CLI::App* cmd) {
        cmd->add_option("--x", x_path, "Predictor CSV (header line, n rows, p columns)")->required();
        cmd->add_option("--responses", responses_path, "Response JSON array of length n")->required();
        cmd->add_option("--metric", metric, "Expected response type")
            ->check(CLI::IsMember({"euclidean", "sphere", "quantile", "pmf", "gaussian_loc"}));
        cmd->add_flag("--bound", bound, "Apply m / (1 + m) to response distances");
        cmd->add_option("--kernel", kernel, "Kernel matrix")->check(CLI::IsMember({"wire", "sir", "cume"}));
        cmd->add_option("--slices", slices, "SIR slice count");
        cmd->add_option("--penalty", penalty, "Penalty")->check(CLI::IsMember({"gwire", "swire1", "swire2"}));
        cmd->add_option("--graph", graph_path,
                        "Neighborhood graph: JSON adjacency lists, or CSV precision matrix. "
                        "Without it GWIRE uses a graphical lasso estimate");
        cmd->add_option("--glasso-penalty", glasso_penalty, "Penalty for the estimated graph (default 2 sqrt(log p / n) mean diag S)");
        cmd->add_option("--threshold", threshold, "Zero threshold when reading a precision matrix");
        cmd->add_option("--weights", weights, "Group weights")->check(CLI::IsMember({"sqrt-size", "unit"}));
    }

    json config() const {
        return {{"x", x_path},         {"responses", responses_path},
                {"metric", metric},    {"bound", bound},
                {"kernel", kernel},    {"slices", slices},
                {"penalty", penalty},  {"graph", graph_path.empty() ? json(nullptr) : json(graph_path)},
                {"glasso_penalty", glasso_penalty}, {"weights", weights}};
    }
};

struct LoadedData {
    io::CsvMatrix x;
    selection::KernelBuilder builder = selection::KernelBuilder::wire(Matrix(0, 0), metrics::DistanceMatrix{});
    solver::PenaltySpec penalty;
    json graph_info = json::object();
};

LoadedData load(const DataArgs& a, const Tolerances& tol, int jobs, Manifest& manifest) {
    LoadedData out;
    out.x = io::read_csv_matrix(a.x_path);
    manifest.add_input(a.x_path);
    const Index n = out.x.values.rows();
    const Index p = out.x.values.cols();

    const json rj = io::read_json(a.responses_path);
    manifest.add_input(a.responses_path);
    std::vector<metrics::ResponseObject> responses;
    try {
        responses = metrics::responses_from_json(rj);
    } catch (const Error& e) {
        fail(e.code(), a.responses_path + ": " + e.what());
    }
    if (static_cast<Index>(responses.size()) != n)
        fail(ErrorCode::shape, a.responses_path + ": " + std::to_string(responses.size()) + " responses but " +
                                   a.x_path + " has " + std::to_string(n) + " rows");
    if (!a.metric.empty())
        for (std::size_t i = 0; i < responses.size(); ++i)
            if (metrics::type_tag(responses[i]) != a.metric)
                fail(ErrorCode::incompatible_response, a.responses_path + ": response " + std::to_string(i) +
                                                           " has type " + metrics::type_tag(responses[i]) +
                                                           ", expected " + a.metric);

    const kernels::KernelKind kind = kernels::kernel_kind_from_string(a.kernel);
    if (kind == kernels::KernelKind::wire) {
        out.builder = selection::KernelBuilder::wire(out.x.values, metrics::pairwise_distances(responses, a.bound, jobs));
    } else {
        std::vector<double> y;
        y.reserve(responses.size());
        for (std::size_t i = 0; i < responses.size(); ++i) {
            const auto* e = std::get_if<metrics::EuclideanVector>(&responses[i]);
            if (e == nullptr || e->values.size() != 1)
                fail(ErrorCode::incompatible_response,
                     a.responses_path + ": kernel " + a.kernel + " needs scalar responses (response " +
                         std::to_string(i) + ")");
            y.push_back(e->values[0]);
        }
        out.builder = selection::KernelBuilder::scalar(out.x.values, std::move(y), kind, a.slices);
    }

    if (a.penalty == "swire1") {
        out.penalty = solver::ElementwiseL1{};
        return out;
    }
    if (a.penalty == "swire2") {
        out.penalty = solver::RowGroup{};
        return out;
    }

    const double zero = a.threshold >= 0.0 ? a.threshold : tol.precision_zero;
    graph::NeighborhoodGraph g;
    if (a.graph_path.empty()) {
        const SymmetricMatrix s = kernels::sample_covariance(out.x.values);
        const double pen = a.glasso_penalty > 0.0 ? a.glasso_penalty : graph::default_glasso_penalty(s, n);
        const graph::GlassoResult gl = graph::glasso(s, pen, tol.glasso_tol, tol.glasso_max_iter);
        g = graph::neighborhoods_from_precision(gl.precision, zero);
        std::cerr << "note: no --graph given; using a graphical lasso estimate (penalty " << pen << ", "
                  << g.edge_count() << " edges)\n";
        out.graph_info = {{"source", "glasso"}, {"glasso_penalty", pen}, {"glasso_converged", gl.converged}};
    } else if (fs::path(a.graph_path).extension() == ".json") {
        try {
            g = graph::graph_from_json(io::read_json(a.graph_path));
        } catch (const Error& e) {
            fail(e.code(), a.graph_path + ": " + e.what());
        }
        manifest.add_input(a.graph_path);
        out.graph_info = {{"source", "adjacency"}};
    } else {
        const io::CsvMatrix omega = io::read_csv_matrix(a.graph_path);
        manifest.add_input(a.graph_path);
        if (omega.values.rows() != omega.values.cols())
            fail(ErrorCode::shape, a.graph_path + ": precision matrix must be square, got " +
                                       std::to_string(omega.values.rows()) + "x" + std::to_string(omega.values.cols()));
        g = graph::neighborhoods_from_precision(SymmetricMatrix(omega.values), zero);
        out.graph_info = {{"source", "precision"}};
    }
    if (g.p() != p)
        fail(ErrorCode::shape, "graph has " + std::to_string(g.p()) + " predictors but " + a.x_path + " has " +
                                   std::to_string(p) + " columns");
    g = graph::tau_weights(g, a.weights);
    out.graph_info["edges"] = g.edge_count();
    out.penalty = solver::Graphical{std::move(g)};
    return out;
}

json names_of(const std::vector<Index>& idx, const std::vector<std::string>& header) {
    json a = json::array();
    for (Index i : idx) a.push_back(header[static_cast<std::size_t>(i)]);
    return a;
}

std::vector<std::string> direction_header(Index d) {
    std::vector<std::string> h;
    for (Index k = 1; k <= d; ++k) h.push_back("beta" + std::to_string(k));
    return h;
}

json ladle_json(const selection::LadleResult& r) {
    json w = json::array();
    for (const auto& s : r.warnings) w.push_back(s);
    return {{"d_hat", r.d_hat},
            {"f", vector_json(r.f_values)},
            {"h", vector_json(r.h_values)},
            {"f0", vector_json(r.f0_values)},
            {"eigenvalues", vector_json(r.eigenvalues)},
            {"bootstrap_count", r.bootstrap_count},
            {"pilot_lambda", r.pilot_lambda},
            {"active_set", index_json(r.active_set)},
            {"warnings", w}};
}

std::string ladle_curves(const selection::LadleResult& r) {
    std::ostringstream s;
    s << "k,f,h,f_plus_h,f0,eigenvalue\n";
    for (std::size_t k = 0; k < r.f_values.size(); ++k) {
        s << k << ',' << io::format_double(r.f_values[k]) << ',' << io::format_double(r.h_values[k]) << ','
          << io::format_double(r.f_values[k] + r.h_values[k]) << ',' << io::format_double(r.f0_values[k]) << ','
          << io::format_double(k < r.eigenvalues.size() ? r.eigenvalues[k] : 0.0) << '\n';
    }
    return s.str();
}

std::string joined_argv(int argc, char** argv) {
    std::string s;
    for (int i = 0; i < argc; ++i) {
        if (i) s += ' ';
        s += argv[i];
    }
    return s;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sparse Frechet sufficient dimension reduction with graphical predictor structure"};
    app.set_version_flag("--version", GWIRE_VERSION);
    app.require_subcommand(1);

    int jobs = 0;
    std::uint64_t seed = 1;
    app.add_option("--jobs", jobs, "Worker threads (default: all cores)")->capture_default_str();
    app.add_option("--seed", seed, "Seed for every random draw")->capture_default_str();

    // fit
    auto* fit_cmd = app.add_subcommand("fit", "Fit B_hat, the active set and directions");
    DataArgs fit_data;
    fit_data.attach(fit_cmd);
    std::optional<double> lambda;
    bool use_cv = false;
    std::optional<Index> d_fixed;
    bool use_ladle = false;
    int folds = 10, grid_size = 30, boot = 100;
    std::string fit_out;
    auto* lambda_opt = fit_cmd->add_option("--lambda", lambda, "Penalty level");
    auto* cv_flag = fit_cmd->add_flag("--cv", use_cv, "Choose lambda by cross-validation (default)");
    lambda_opt->excludes(cv_flag);
    auto* d_opt = fit_cmd->add_option("--d", d_fixed, "Structural dimension (default 1)");
    auto* ladle_flag = fit_cmd->add_flag("--ladle", use_ladle, "Estimate d with the ladle estimator");
    d_opt->excludes(ladle_flag);
    fit_cmd->add_option("--folds", folds, "Cross-validation folds")->capture_default_str();
    fit_cmd->add_option("--grid-size", grid_size, "Lambda grid size")->capture_default_str();
    fit_cmd->add_option("--boot", boot, "Ladle bootstrap replicates")->capture_default_str();
    fit_cmd->add_option("--out", fit_out, "Output directory")->required();

    // dim
    auto* dim_cmd = app.add_subcommand("dim", "Estimate the structural dimension (ladle)");
    DataArgs dim_data;
    dim_data.attach(dim_cmd);
    int dim_boot = 100;
    double pilot_fraction = 0.2;
    std::string dim_out;
    dim_cmd->add_option("--boot", dim_boot, "Bootstrap replicates")->capture_default_str();
    dim_cmd->add_option("--pilot-fraction", pilot_fraction, "Pilot lambda as a fraction of lambda_max")
        ->capture_default_str();
    dim_cmd->add_option("--out", dim_out, "Output directory")->required();

    // simulate
    auto* sim_cmd = app.add_subcommand("simulate", "Run a synthetic scenario");
    std::string config_path, sim_out;
    std::optional<int> example, reps, sim_boot, sim_folds, sim_slices;
    std::optional<Index> n_opt, p_opt;
    std::optional<std::string> covariance, method, graph_source;
    std::optional<double> sim_glasso_penalty, lambda_fraction;
    bool sim_ladle = false, no_cv = false;
    sim_cmd->add_option("--config", config_path, "Scenario file of key = value lines");
    sim_cmd->add_option("--example", example, "Example 1-4");
    sim_cmd->add_option("--n", n_opt, "Sample size");
    sim_cmd->add_option("--p", p_opt, "Predictor count");
    sim_cmd->add_option("--covariance", covariance, "sigma1 or sigma2");
    sim_cmd->add_option("--method", method, "gwire, swire1, swire2, gsir or gcume");
    sim_cmd->add_option("--graph", graph_source, "oracle or glasso");
    sim_cmd->add_option("--reps", reps, "Replicates");
    sim_cmd->add_flag("--ladle", sim_ladle, "Estimate d with the ladle instead of using the true d");
    sim_cmd->add_flag("--no-cv", no_cv, "Use lambda = lambda-fraction * lambda_max instead of cross-validation");
    sim_cmd->add_option("--lambda-fraction", lambda_fraction, "Fixed lambda fraction when --no-cv");
    sim_cmd->add_option("--boot", sim_boot, "Ladle bootstrap replicates");
    sim_cmd->add_option("--folds", sim_folds, "Cross-validation folds");
    sim_cmd->add_option("--slices", sim_slices, "SIR slices");
    sim_cmd->add_option("--glasso-penalty", sim_glasso_penalty, "Penalty for glasso graphs");
    sim_cmd->add_option("--out", sim_out, "Output directory")->required();

    // glasso
    auto* gl_cmd = app.add_subcommand("glasso", "Estimate a sparse precision matrix and its neighborhoods");
    std::string gl_x, gl_out;
    double gl_penalty = 0.0;
    double gl_threshold = -1.0;
    gl_cmd->add_option("--x", gl_x, "Predictor CSV")->required();
    gl_cmd->add_option("--penalty", gl_penalty, "l1 penalty (default 2 sqrt(log p / n) mean diag S)");
    gl_cmd->add_option("--threshold", gl_threshold, "Zero threshold for neighborhoods");
    gl_cmd->add_option("--out", gl_out, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_input;
    }

    try {
        const Tolerances tol = Tolerances::from_env();
        Manifest manifest;
        manifest.command = joined_argv(argc, argv);
        manifest.seed = seed;
        const int workers = jobs > 0 ? jobs : default_jobs();
        solver::AdmmConfig admm = solver::AdmmConfig::from(tol);
        admm.validate();

        if (*fit_cmd) {
            if (folds < 2) fail(ErrorCode::configuration, "--folds must be at least 2");
            if (grid_size < 2) fail(ErrorCode::configuration, "--grid-size must be at least 2");
            if (boot < 1) fail(ErrorCode::configuration, "--boot must be at least 1");
            const fs::path out = prepare_out(fit_out);
            LoadedData data = load(fit_data, tol, workers, manifest);
            const kernels::KernelEstimates full = data.builder.full();
            const Index p = full.sigma_hat.dim();
            const double lmax = solver::lambda_max(full.lambda_hat, data.penalty);

            json result = {{"n", full.n}, {"p", p}, {"lambda_max", lmax}, {"graph", data.graph_info}};
            Index d = d_fixed.value_or(1);
            if (d < 1 || d > p) fail(ErrorCode::configuration, "--d must be between 1 and " + std::to_string(p));
            if (use_ladle) {
                selection::LadleOptions lo;
                lo.boot = boot;
                lo.seed = child_seed(seed, 3);
                lo.jobs = workers;
                lo.admm = admm;
                const selection::LadleResult lr = selection::ladle(data.builder, data.penalty, lo);
                result["ladle"] = ladle_json(lr);
                d = std::max<Index>(lr.d_hat, 1);
            }
            double lam = 0.0;
            if (lambda) {
                if (!(*lambda >= 0.0)) fail(ErrorCode::configuration, "--lambda must be >= 0");
                lam = *lambda;
            } else {
                selection::CvOptions co;
                co.folds = folds;
                co.grid_size = grid_size;
                co.seed = child_seed(seed, 2);
                co.jobs = workers;
                co.admm = admm;
                const selection::CvResult cv = selection::cross_validate(data.builder, data.penalty, d, co);
                json warnings = json::array();
                for (const auto& w : cv.warnings) warnings.push_back(w);
                result["cv"] = {{"lambda_grid", vector_json(cv.lambda_grid)},
                                {"scores", vector_json(cv.scores)},
                                {"chosen_lambda", cv.chosen_lambda},
                                {"infinite_cells", cv.infinite_cells},
                                {"warnings", warnings}};
                lam = cv.chosen_lambda;
            }

            const solver::FitResult fit = solver::AdmmSolver(full, data.penalty, admm).fit(lam);
            result["lambda"] = lam;
            result["d"] = d;
            result["penalty"] = solver::penalty_name(data.penalty);
            result["kernel"] = kernels::to_string(full.kind);
            result["active_set"] = index_json(fit.active_set);
            result["active_names"] = names_of(fit.active_set, data.x.header);
            result["eigenvalues"] = vector_json(fit.eigenvalues);
            result["iterations"] = fit.iterations;
            result["converged"] = fit.converged;
            result["kkt_residual"] = fit.kkt_residual;
            if (!fit.converged) std::cerr << "warning: ADMM stopped at max_iter without converging\n";

            std::vector<std::string> outputs{"fit.json", "b_hat.csv", "directions.csv", "manifest.json"};
            if (static_cast<Index>(fit.active_set.size()) >= 1) {
                const solver::Directions dirs = solver::extract_directions(fit.b_hat, d);
                io::write_csv_matrix((out / "directions.csv").string(), dirs.directions.columns(),
                                     direction_header(d));
                result["directions"] = "directions.csv";
            } else {
                std::cerr << "note: empty active set; no directions written\n";
                io::write_text((out / "directions.csv").string(), "");
                result["directions"] = nullptr;
            }
            io::write_text((out / "b_hat.csv").string(), io::triplets(fit.b_hat.matrix()));
            io::write_json((out / "fit.json").string(), result);

            manifest.config = fit_data.config();
            manifest.config["lambda"] = lambda ? json(*lambda) : json("cv");
            manifest.config["d"] = use_ladle ? json("ladle") : json(d);
            manifest.config["folds"] = folds;
            manifest.config["grid_size"] = grid_size;
            manifest.config["boot"] = boot;
            manifest.config["jobs"] = workers;
            manifest.write(out, outputs);
        } else if (*dim_cmd) {
            if (dim_boot < 1) fail(ErrorCode::configuration, "--boot must be at least 1");
            if (!(pilot_fraction > 0.0 && pilot_fraction <= 1.0))
                fail(ErrorCode::configuration, "--pilot-fraction must be in (0, 1]");
            const fs::path out = prepare_out(dim_out);
            LoadedData data = load(dim_data, tol, workers, manifest);
            selection::LadleOptions lo;
            lo.boot = dim_boot;
            lo.seed = child_seed(seed, 3);
            lo.jobs = workers;
            lo.pilot_fraction = pilot_fraction;
            lo.admm = admm;
            const selection::LadleResult lr = selection::ladle(data.builder, data.penalty, lo);
            json result = ladle_json(lr);
            result["active_names"] = names_of(lr.active_set, data.x.header);
            io::write_json((out / "ladle.json").string(), result);
            io::write_text((out / "ladle_curves.csv").string(), ladle_curves(lr));
            manifest.config = dim_data.config();
            manifest.config["boot"] = dim_boot;
            manifest.config["pilot_fraction"] = pilot_fraction;
            manifest.config["jobs"] = workers;
            manifest.write(out, {"ladle.json", "ladle_curves.csv", "manifest.json"});
        } else if (*sim_cmd) {
            const fs::path out_dir = fs::path(sim_out);
            std::pair<synthetic::ScenarioSpec, synthetic::RunOptions> sc;
            if (!config_path.empty()) {
                const std::string text = io::read_text(config_path);
                try {
                    sc = synthetic::parse_scenario(text);
                } catch (const Error& e) {
                    fail(e.code(), config_path + ": " + e.what());
                }
                manifest.add_input(config_path);
            }
            auto& [spec, opt] = sc;
            spec.seed = seed;
            if (example) spec.example_id = *example;
            if (n_opt) spec.n = *n_opt;
            if (p_opt) spec.p = *p_opt;
            if (covariance) spec.covariance = synthetic::covariance_from_string(*covariance);
            if (reps) spec.replicates = *reps;
            if (method) opt.method = synthetic::method_from_string(*method);
            if (graph_source) opt.graph = synthetic::graph_source_from_string(*graph_source);
            if (sim_ladle) opt.use_true_d = false;
            if (no_cv) opt.cross_validate = false;
            if (lambda_fraction) opt.fixed_lambda_fraction = *lambda_fraction;
            if (sim_boot) opt.boot = *sim_boot;
            if (sim_folds) opt.folds = *sim_folds;
            if (sim_slices) opt.slices = *sim_slices;
            if (sim_glasso_penalty) opt.glasso_penalty = *sim_glasso_penalty;
            opt.jobs = workers;
            opt.tolerances = tol;
            spec.validate();
            prepare_out(sim_out);

            const synthetic::ExperimentReport report = synthetic::run_scenario(spec, opt);
            json rj = report.to_json();
            io::write_json((out_dir / "report.json").string(), rj);
            io::write_text((out_dir / "replicates.csv").string(), report.to_csv());
            manifest.config = {{"scenario", rj["scenario"]}, {"options", rj["options"]},
                               {"lambda_fraction", opt.fixed_lambda_fraction}, {"jobs", workers}};
            manifest.write(out_dir, {"report.json", "replicates.csv", "manifest.json"});
            std::cout << "general loss " << report.general_loss().mean << " (" << report.general_loss().sd
                      << "), true recovery " << report.true_recovery().mean << ", failed " << report.failed()
                      << "/" << spec.replicates << "\n";
            if (report.failed() == spec.replicates) {
                std::cerr << "error: every replicate failed; first: " << report.records.front().error << "\n";
                return exit_numerical;
            }
        } else if (*gl_cmd) {
            const fs::path out = prepare_out(gl_out);
            const io::CsvMatrix x = io::read_csv_matrix(gl_x);
            manifest.add_input(gl_x);
            const SymmetricMatrix s = kernels::sample_covariance(x.values);
            const double pen = gl_penalty > 0.0 ? gl_penalty : graph::default_glasso_penalty(s, x.values.rows());
            const graph::GlassoResult g = graph::glasso(s, pen, tol.glasso_tol, tol.glasso_max_iter);
            if (!g.converged) std::cerr << "warning: graphical lasso did not converge\n";
            const double zero = gl_threshold >= 0.0 ? gl_threshold : tol.precision_zero;
            const graph::NeighborhoodGraph ng = graph::neighborhoods_from_precision(g.precision, zero);
            io::write_csv_matrix((out / "precision.csv").string(), g.precision.matrix(), x.header);
            json adj = graph::to_json(ng);
            adj["names"] = x.header;
            adj["penalty"] = pen;
            adj["iterations"] = g.iterations;
            adj["converged"] = g.converged;
            adj["edges"] = ng.edge_count();
            io::write_json((out / "adjacency.json").string(), adj);
            manifest.config = {{"x", gl_x}, {"penalty", pen}, {"threshold", zero},
                               {"tol", tol.glasso_tol}, {"max_iter", tol.glasso_max_iter}};
            manifest.write(out, {"precision.csv", "adjacency.json", "manifest.json"});
        }
        return exit_ok;
    } catch (const Error& e) {
        std::cerr << "error (" << to_string(e.code()) << "): " << e.what() << "\n";
        return e.is_numerical() ? exit_numerical : exit_input;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_input;
    }
}
