#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "gwire/error.hpp"
#include "gwire/graph.hpp"
#include "gwire/kernels.hpp"
#include "gwire/linalg.hpp"
#include "gwire/metrics.hpp"
#include "gwire/selection.hpp"
#include "gwire/solver.hpp"
#include "gwire/synthetic.hpp"

namespace py = pybind11;
using namespace gwire;

namespace {

std::vector<metrics::ResponseObject> parse_responses(const std::string& text) {
    return metrics::responses_from_json(nlohmann::json::parse(text));
}

graph::NeighborhoodGraph make_graph(const std::vector<std::vector<Index>>& neighbors,
                                    const std::optional<std::vector<double>>& weights) {
    if (weights) return graph::NeighborhoodGraph(neighbors, *weights);
    return graph::NeighborhoodGraph::from_adjacency(neighbors);
}

solver::PenaltySpec make_penalty(const std::string& name, const std::optional<std::vector<std::vector<Index>>>& neighbors,
                                 const std::optional<std::vector<double>>& weights) {
    if (name == "swire1") return solver::ElementwiseL1{};
    if (name == "swire2") return solver::RowGroup{};
    if (name != "gwire") fail(ErrorCode::configuration, "unknown penalty '" + name + "'");
    if (!neighbors) fail(ErrorCode::configuration, "the gwire penalty needs neighbors");
    return solver::Graphical{make_graph(*neighbors, weights)};
}

selection::KernelBuilder make_builder(const Matrix& x, const std::optional<Matrix>& distances,
                                      const std::optional<std::vector<double>>& y, const std::string& kernel,
                                      int slices) {
    const kernels::KernelKind kind = kernels::kernel_kind_from_string(kernel);
    if (kind == kernels::KernelKind::wire) {
        if (!distances) fail(ErrorCode::configuration, "the wire kernel needs a distance matrix");
        return selection::KernelBuilder::wire(x, metrics::DistanceMatrix(*distances));
    }
    if (!y) fail(ErrorCode::configuration, "kernel " + kernel + " needs a scalar response y");
    return selection::KernelBuilder::scalar(x, *y, kind, slices);
}

solver::AdmmConfig admm_config(double rho, double eps_primal, double eps_dual, int max_iter, bool scale) {
    solver::AdmmConfig c;
    c.rho = rho;
    c.eps_primal = eps_primal;
    c.eps_dual = eps_dual;
    c.max_iter = max_iter;
    c.scale_tolerances = scale;
    c.validate();
    return c;
}

py::dict fit_dict(const solver::FitResult& f) {
    py::dict d;
    d["b_hat"] = f.b_hat.matrix();
    d["active_set"] = f.active_set;
    d["eigenvalues"] = f.eigenvalues;
    d["iterations"] = f.iterations;
    d["converged"] = f.converged;
    d["kkt_residual"] = f.kkt_residual;
    d["lambda"] = f.lambda;
    d["v_blocks"] = f.state.blocks;
    if (f.directions) d["directions"] = f.directions->columns();
    return d;
}

} // namespace

PYBIND11_MODULE(_gwire, m) {
    m.doc() = "GWIRE core";
    m.attr("__version__") = GWIRE_VERSION;

    static PyObject* error_type = py::exception<Error>(m, "GwireError").ptr();
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::object exc = py::reinterpret_borrow<py::object>(error_type)(std::string(to_string(e.code())) + ": " + e.what());
            exc.attr("code") = std::string(to_string(e.code()));
            exc.attr("numerical") = e.is_numerical();
            PyErr_SetObject(error_type, exc.ptr());
        }
    });

    // matrix-core
    m.def("sym_eig", [](const Matrix& a) {
        const EigenDecomposition e = sym_eig(SymmetricMatrix(a));
        return py::make_tuple(e.values, e.vectors);
    }, py::arg("a"), "Eigenvalues (non-increasing) and sign-fixed eigenvectors.");
    m.def("sym_inv_sqrt", [](const Matrix& a) { return sym_inv_sqrt(SymmetricMatrix(a)).matrix(); }, py::arg("m"));
    m.def("norms", [](const Matrix& a) {
        const MatrixNorms n = norms(a);
        return py::make_tuple(n.frobenius, n.max_abs, n.row_sum_inf);
    }, py::arg("a"));
    m.def("cholesky_sample", [](const Matrix& sigma, Index n, std::uint64_t seed) {
        return cholesky_sample(SymmetricMatrix(sigma), n, seed);
    }, py::arg("sigma"), py::arg("n"), py::arg("seed"));

    // metrics
    m.def("_distance", [](const std::string& a, const std::string& b) {
        return metrics::distance(metrics::from_json(nlohmann::json::parse(a)),
                                 metrics::from_json(nlohmann::json::parse(b)));
    });
    m.def("_pairwise_distances", [](const std::string& responses, bool bound, int jobs) {
        const auto r = parse_responses(responses);
        return metrics::pairwise_distances(r, bound, jobs).matrix();
    });
    m.def("bounded_transform", &metrics::bounded_transform, py::arg("m"));

    // kernels
    m.def("sample_covariance", [](const Matrix& x) { return kernels::sample_covariance(x).matrix(); }, py::arg("x"));
    m.def("wire_kernel", [](const Matrix& x, const Matrix& d) {
        return kernels::wire_kernel(x, metrics::DistanceMatrix(d)).matrix();
    }, py::arg("x"), py::arg("d"));
    m.def("sir_kernel", [](const Matrix& x, const std::vector<double>& y, int slices) {
        return kernels::sir_kernel(x, y, slices).matrix();
    }, py::arg("x"), py::arg("y"), py::arg("slices") = 10);
    m.def("cume_kernel", [](const Matrix& x, const std::vector<double>& y) {
        return kernels::cume_kernel(x, y).matrix();
    }, py::arg("x"), py::arg("y"));

    // graph
    m.def("neighborhoods_from_precision", [](const Matrix& omega, double threshold) {
        const graph::NeighborhoodGraph g = graph::neighborhoods_from_precision(SymmetricMatrix(omega), threshold);
        return py::make_tuple(g.all_neighbors(), g.weights());
    }, py::arg("omega"), py::arg("threshold") = 1e-8);
    m.def("glasso", [](const Matrix& s, double penalty, double tol, int max_iter) {
        const graph::GlassoResult r = graph::glasso(SymmetricMatrix(s), penalty, tol, max_iter);
        py::dict d;
        d["precision"] = r.precision.matrix();
        d["covariance"] = r.covariance.matrix();
        d["iterations"] = r.iterations;
        d["converged"] = r.converged;
        d["objective"] = r.objective;
        return d;
    }, py::arg("sigma_hat"), py::arg("penalty"), py::arg("tol") = 1e-6, py::arg("max_iter") = 500);
    m.def("default_glasso_penalty", [](const Matrix& s, Index n) {
        return graph::default_glasso_penalty(SymmetricMatrix(s), n);
    }, py::arg("sigma_hat"), py::arg("n"));

    // solver
    m.def("lambda_max", [](const Matrix& lambda_hat, const std::string& penalty,
                           const std::optional<std::vector<std::vector<Index>>>& neighbors,
                           const std::optional<std::vector<double>>& weights) {
        return solver::lambda_max(SymmetricMatrix(lambda_hat), make_penalty(penalty, neighbors, weights));
    }, py::arg("lambda_hat"), py::arg("penalty") = "gwire", py::arg("neighbors") = py::none(),
       py::arg("weights") = py::none());
    m.def("theta_update", [](const Matrix& sigma_hat, const Matrix& lambda_hat, const Matrix& v_sym, const Matrix& w,
                             double rho) {
        return solver::theta_update(sym_eig(SymmetricMatrix(sigma_hat)), SymmetricMatrix(lambda_hat), v_sym, w, rho);
    }, py::arg("sigma_hat"), py::arg("lambda_hat"), py::arg("v_sym"), py::arg("w"), py::arg("rho") = 1.0);
    m.def("fit", [](const Matrix& sigma_hat, const Matrix& lambda_hat, double lambda, const std::string& penalty,
                    const std::optional<std::vector<std::vector<Index>>>& neighbors,
                    const std::optional<std::vector<double>>& weights, std::optional<Index> d, double rho,
                    double eps_primal, double eps_dual, int max_iter, bool scale_tolerances) {
        kernels::KernelEstimates k{SymmetricMatrix(sigma_hat), SymmetricMatrix(lambda_hat), 0,
                                   kernels::KernelKind::wire};
        solver::FitResult f = solver::admm_fit(k, make_penalty(penalty, neighbors, weights), lambda,
                                               admm_config(rho, eps_primal, eps_dual, max_iter, scale_tolerances));
        if (d) f.directions = solver::extract_directions(f.b_hat, *d).directions;
        return fit_dict(f);
    }, py::arg("sigma_hat"), py::arg("lambda_hat"), py::arg("lam"), py::arg("penalty") = "gwire",
       py::arg("neighbors") = py::none(), py::arg("weights") = py::none(), py::arg("d") = py::none(),
       py::arg("rho") = 1.0, py::arg("eps_primal") = 1e-3, py::arg("eps_dual") = 1e-3, py::arg("max_iter") = 3000,
       py::arg("scale_tolerances") = true);
    m.def("extract_directions", [](const Matrix& b_hat, Index d) {
        const solver::Directions r = solver::extract_directions(SymmetricMatrix(b_hat), d);
        return py::make_tuple(r.directions.columns(), r.eigenvalues);
    }, py::arg("b_hat"), py::arg("d"));

    // selection
    m.def("ladle", [](const Matrix& x, const std::optional<Matrix>& distances, const std::optional<std::vector<double>>& y,
                      const std::string& kernel, int slices, const std::string& penalty,
                      const std::optional<std::vector<std::vector<Index>>>& neighbors, int boot, std::uint64_t seed,
                      int jobs) {
        selection::LadleOptions o;
        o.boot = boot;
        o.seed = seed;
        o.jobs = jobs;
        const selection::LadleResult r = selection::ladle(make_builder(x, distances, y, kernel, slices),
                                                          make_penalty(penalty, neighbors, std::nullopt), o);
        py::dict out;
        out["d_hat"] = r.d_hat;
        out["f"] = r.f_values;
        out["h"] = r.h_values;
        out["f0"] = r.f0_values;
        out["eigenvalues"] = r.eigenvalues;
        out["bootstrap_count"] = r.bootstrap_count;
        out["active_set"] = r.active_set;
        return out;
    }, py::arg("x"), py::arg("distances") = py::none(), py::arg("y") = py::none(), py::arg("kernel") = "wire",
       py::arg("slices") = 10, py::arg("penalty") = "gwire", py::arg("neighbors") = py::none(), py::arg("boot") = 100,
       py::arg("seed") = 0, py::arg("jobs") = 1);
    m.def("cross_validate", [](const Matrix& x, const std::optional<Matrix>& distances,
                               const std::optional<std::vector<double>>& y, Index d, const std::string& kernel,
                               int slices, const std::string& penalty,
                               const std::optional<std::vector<std::vector<Index>>>& neighbors, int folds,
                               int grid_size, std::uint64_t seed, int jobs) {
        selection::CvOptions o;
        o.folds = folds;
        o.grid_size = grid_size;
        o.seed = seed;
        o.jobs = jobs;
        const selection::CvResult r = selection::cross_validate(make_builder(x, distances, y, kernel, slices),
                                                                make_penalty(penalty, neighbors, std::nullopt), d, o);
        py::dict out;
        out["lambda_grid"] = r.lambda_grid;
        out["scores"] = r.scores;
        out["chosen_lambda"] = r.chosen_lambda;
        out["lambda_max"] = r.lambda_max;
        return out;
    }, py::arg("x"), py::arg("distances") = py::none(), py::arg("y") = py::none(), py::arg("d") = 1,
       py::arg("kernel") = "wire", py::arg("slices") = 10, py::arg("penalty") = "gwire",
       py::arg("neighbors") = py::none(), py::arg("folds") = 10, py::arg("grid_size") = 30, py::arg("seed") = 0,
       py::arg("jobs") = 1);
    m.def("standardize_directions", [](const Matrix& beta, const Matrix& sigma_hat) {
        return selection::standardize_directions(DirectionMatrix(beta), SymmetricMatrix(sigma_hat)).columns();
    }, py::arg("beta"), py::arg("sigma_hat"));

    // synthetic
    m.def("_generate", [](int example, Index n, Index p, const std::string& covariance, std::uint64_t seed) {
        synthetic::ScenarioSpec s;
        s.example_id = example;
        s.n = n;
        s.p = p;
        s.covariance = synthetic::covariance_from_string(covariance);
        s.seed = seed;
        s.replicates = 1;
        const synthetic::SimulatedData data = synthetic::generate(s, seed);
        py::dict out;
        out["x"] = data.x;
        out["beta"] = data.beta;
        out["support"] = data.support;
        out["d"] = data.d;
        if (!data.y.empty()) out["y"] = data.y;
        if (!data.responses.empty()) out["responses"] = metrics::responses_to_json(data.responses).dump();
        return out;
    });
    m.def("covariance", [](const std::string& kind, Index p) {
        return synthetic::covariance(synthetic::covariance_from_string(kind), p).matrix();
    }, py::arg("kind"), py::arg("p"));
    m.def("precision", [](const std::string& kind, Index p) {
        return synthetic::precision(synthetic::covariance_from_string(kind), p).matrix();
    }, py::arg("kind"), py::arg("p"));
    m.def("general_loss", &synthetic::general_loss, py::arg("beta_hat"), py::arg("beta_true"));
    m.def("_run_scenario", [](const std::string& config, int jobs) {
        auto [spec, opt] = synthetic::parse_scenario(config);
        opt.jobs = jobs;
        synthetic::ExperimentReport r;
        {
            py::gil_scoped_release release;
            r = synthetic::run_scenario(spec, opt);
        }
        return r.to_json().dump();
    });
}
