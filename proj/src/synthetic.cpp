#include "gwire/synthetic.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>
#include <sstream>

#include "gwire/error.hpp"
#include "gwire/kernels.hpp"
#include "gwire/parallel.hpp"
#include "gwire/random.hpp"
#include "gwire/selection.hpp"
#include "gwire/solver.hpp"

namespace gwire::synthetic {

namespace {

constexpr Index structured = 25;

void require_p(Index p) {
    if (p < structured)
        fail(ErrorCode::configuration, "covariance structures need p >= 25, got " + std::to_string(p));
}

Matrix indicator(Index p, Index first, Index last, double value) {
    Matrix b = Matrix::Zero(p, 1);
    for (Index i = first; i < last; ++i) b(i, 0) = value;
    return b;
}

} // namespace

void ScenarioSpec::validate() const {
    if (example_id < 1 || example_id > 4)
        fail(ErrorCode::configuration, "example must be 1, 2, 3 or 4, got " + std::to_string(example_id));
    require_p(p);
    if (n < 2) fail(ErrorCode::configuration, "n must be at least 2");
    if (replicates < 1) fail(ErrorCode::configuration, "replicates must be at least 1");
    if (quantile_grid < 0 || quantile_grid == 1) fail(ErrorCode::configuration, "quantile_grid must be 0 or >= 2");
}

SymmetricMatrix make_sigma1(Index p) {
    require_p(p);
    Matrix s = Matrix::Identity(p, p);
    for (Index b = 0; b < 5; ++b)
        for (Index i = 0; i < 5; ++i)
            for (Index j = 0; j < 5; ++j) s(5 * b + i, 5 * b + j) = (i == j ? 1.16 : 1.0);
    return SymmetricMatrix(std::move(s));
}

namespace {

// (0.16 I + J)^-1 = (I - J / 5.16) / 0.16
Matrix omega1(Index p) {
    Matrix o = Matrix::Identity(p, p);
    for (Index b = 0; b < 5; ++b)
        for (Index i = 0; i < 5; ++i)
            for (Index j = 0; j < 5; ++j) o(5 * b + i, 5 * b + j) = ((i == j ? 1.0 : 0.0) - 1.0 / 5.16) / 0.16;
    return o;
}

} // namespace

SymmetricMatrix make_omega2(Index p) {
    require_p(p);
    Matrix o = omega1(p);
    o(4, 5) = o(5, 4) = 0.1;
    o(9, 10) = o(10, 9) = 0.1;
    return SymmetricMatrix(std::move(o));
}

SymmetricMatrix make_sigma2(Index p) {
    const SymmetricMatrix o = make_omega2(p);
    Eigen::LLT<Matrix> llt(o.matrix());
    if (llt.info() != Eigen::Success) fail(ErrorCode::decomposition, "Omega^(2) is not positive definite");
    return SymmetricMatrix(Matrix(llt.solve(Matrix::Identity(p, p))));
}

SymmetricMatrix covariance(CovarianceKind kind, Index p) {
    return kind == CovarianceKind::sigma1 ? make_sigma1(p) : make_sigma2(p);
}

SymmetricMatrix precision(CovarianceKind kind, Index p) {
    if (kind == CovarianceKind::sigma2) return make_omega2(p);
    require_p(p);
    return SymmetricMatrix(omega1(p));
}

std::vector<double> sphere_response(double u1, double u2, double eps) {
    const double c = std::cos(eps);
    return {c * std::sin(u1) * std::sin(u2), c * std::sin(u1) * std::cos(u2), c * std::cos(u1), std::sin(eps)};
}

namespace {

std::vector<Index> first_ten() {
    std::vector<Index> s(10);
    std::iota(s.begin(), s.end(), Index{0});
    return s;
}

Matrix draw_x(const ScenarioSpec& spec, std::uint64_t seed) {
    return cholesky_sample(covariance(spec.covariance, spec.p), spec.n, child_seed(seed, 0));
}

} // namespace

SimulatedData gen_example1(const ScenarioSpec& spec, std::uint64_t seed, double noise_sd) {
    SimulatedData out;
    out.x = draw_x(spec, seed);
    out.beta = indicator(spec.p, 0, 10, 1.0);
    out.support = first_ten();
    out.d = 1;
    Rng rng(child_seed(seed, 1));
    std::normal_distribution<double> normal;
    const Vector index = out.x * out.beta.col(0);
    const std::vector<double> grid =
        spec.quantile_grid > 0 ? metrics::interior_grid(static_cast<std::size_t>(spec.quantile_grid))
                               : std::vector<double>{};
    out.responses.reserve(static_cast<std::size_t>(spec.n));
    for (Index i = 0; i < spec.n; ++i) {
        const double mu = index(i) + noise_sd * normal(rng);
        out.responses.push_back(spec.quantile_grid > 0 ? metrics::gaussian_quantile_function(mu, 1.0, grid)
                                                       : metrics::make_gaussian_location(mu, 1.0));
    }
    return out;
}

SimulatedData gen_example2(const ScenarioSpec& spec, std::uint64_t seed, double noise_sd) {
    SimulatedData out;
    out.x = draw_x(spec, seed);
    out.beta = Matrix::Zero(spec.p, 2);
    out.beta.col(0) = indicator(spec.p, 0, 5, 0.2);
    out.beta.col(1) = indicator(spec.p, 5, 10, 0.2);
    out.support = first_ten();
    out.d = 2;
    Rng rng(child_seed(seed, 1));
    std::normal_distribution<double> normal;
    const Matrix shifted = out.x.array() + 1.0;
    const Matrix u = shifted * out.beta;
    out.responses.reserve(static_cast<std::size_t>(spec.n));
    for (Index i = 0; i < spec.n; ++i)
        out.responses.push_back(metrics::make_sphere_point(sphere_response(u(i, 0), u(i, 1), noise_sd * normal(rng))));
    return out;
}

SimulatedData gen_example3(const ScenarioSpec& spec, std::uint64_t seed) {
    SimulatedData out;
    out.x = draw_x(spec, seed);
    out.beta = indicator(spec.p, 0, 10, 1.0);
    out.support = first_ten();
    out.d = 1;
    Rng rng(child_seed(seed, 1));
    std::normal_distribution<double> normal;
    const Vector u = out.x * out.beta.col(0);
    out.y.resize(static_cast<std::size_t>(spec.n));
    for (Index i = 0; i < spec.n; ++i) out.y[static_cast<std::size_t>(i)] = std::exp(u(i) + 0.5 * normal(rng));
    return out;
}

SimulatedData gen_example4(const ScenarioSpec& spec, std::uint64_t seed) {
    SimulatedData out;
    out.x = draw_x(spec, seed);
    out.beta = Matrix::Zero(spec.p, 2);
    out.beta.col(0) = indicator(spec.p, 0, 5, 1.0);
    out.beta.col(1) = indicator(spec.p, 5, 10, 1.0);
    out.support = first_ten();
    out.d = 2;
    Rng rng(child_seed(seed, 1));
    std::normal_distribution<double> normal;
    const Matrix u = out.x * out.beta;
    out.y.resize(static_cast<std::size_t>(spec.n));
    for (Index i = 0; i < spec.n; ++i) {
        const double sign = u(i, 1) > 0 ? 1.0 : (u(i, 1) < 0 ? -1.0 : 0.0);
        out.y[static_cast<std::size_t>(i)] = std::exp(u(i, 0)) * sign + 0.2 * normal(rng);
    }
    return out;
}

SimulatedData generate(const ScenarioSpec& spec, std::uint64_t seed) {
    spec.validate();
    switch (spec.example_id) {
    case 1: return gen_example1(spec, seed);
    case 2: return gen_example2(spec, seed);
    case 3: return gen_example3(spec, seed);
    default: return gen_example4(spec, seed);
    }
}

namespace {

Matrix orthonormal_basis(const Matrix& b, const char* which) {
    Eigen::ColPivHouseholderQR<Matrix> qr(b);
    qr.setThreshold(1e-10);
    if (qr.rank() < b.cols())
        fail(ErrorCode::degenerate_directions, std::string("general_loss: ") + which + " is rank deficient");
    return qr.householderQ() * Matrix::Identity(b.rows(), b.cols());
}

} // namespace

double general_loss(const Matrix& beta_hat, const Matrix& beta_true) {
    if (beta_hat.rows() != beta_true.rows() || beta_hat.cols() != beta_true.cols())
        fail(ErrorCode::shape, "general_loss: direction matrices are " + std::to_string(beta_hat.rows()) + "x" +
                                   std::to_string(beta_hat.cols()) + " and " + std::to_string(beta_true.rows()) +
                                   "x" + std::to_string(beta_true.cols()));
    if (beta_hat.cols() < 1) fail(ErrorCode::shape, "general_loss: need at least one direction");
    const Matrix a = orthonormal_basis(beta_hat, "beta_hat");
    const Matrix b = orthonormal_basis(beta_true, "beta");
    return (a * a.transpose() - b * b.transpose()).norm();
}

SelectionMetrics selection_metrics(const std::vector<Index>& s_hat, const std::vector<Index>& s_true, Index p) {
    const std::set<Index> est(s_hat.begin(), s_hat.end());
    const std::set<Index> truth(s_true.begin(), s_true.end());
    for (Index i : est)
        if (i < 0 || i >= p) fail(ErrorCode::invalid_input, "selection_metrics: index out of range");
    for (Index i : truth)
        if (i < 0 || i >= p) fail(ErrorCode::invalid_input, "selection_metrics: index out of range");
    SelectionMetrics m;
    for (Index i : est)
        if (!truth.count(i)) ++m.false_positive;
    for (Index i : truth)
        if (!est.count(i)) ++m.false_negative;
    m.true_recovery = (m.false_positive == 0 && m.false_negative == 0) ? 1 : 0;
    return m;
}

std::string to_string(Method m) {
    switch (m) {
    case Method::gwire: return "gwire";
    case Method::swire1: return "swire1";
    case Method::swire2: return "swire2";
    case Method::gsir: return "gsir";
    case Method::gcume: return "gcume";
    }
    return "gwire";
}

std::string to_string(GraphSource g) { return g == GraphSource::oracle ? "oracle" : "glasso"; }
std::string to_string(CovarianceKind c) { return c == CovarianceKind::sigma1 ? "sigma1" : "sigma2"; }

Method method_from_string(const std::string& s) {
    if (s == "gwire") return Method::gwire;
    if (s == "swire1") return Method::swire1;
    if (s == "swire2") return Method::swire2;
    if (s == "gsir") return Method::gsir;
    if (s == "gcume") return Method::gcume;
    fail(ErrorCode::configuration, "unknown method '" + s + "' (expected gwire, swire1, swire2, gsir or gcume)");
}

GraphSource graph_source_from_string(const std::string& s) {
    if (s == "oracle") return GraphSource::oracle;
    if (s == "glasso") return GraphSource::glasso;
    fail(ErrorCode::configuration, "unknown graph source '" + s + "' (expected oracle or glasso)");
}

CovarianceKind covariance_from_string(const std::string& s) {
    if (s == "sigma1") return CovarianceKind::sigma1;
    if (s == "sigma2") return CovarianceKind::sigma2;
    fail(ErrorCode::configuration, "unknown covariance '" + s + "' (expected sigma1 or sigma2)");
}

namespace {

selection::KernelBuilder build_kernels(const ScenarioSpec& spec, const RunOptions& opt, const SimulatedData& data) {
    if (opt.method == Method::gsir || opt.method == Method::gcume) {
        if (spec.example_id <= 2)
            fail(ErrorCode::configuration, to_string(opt.method) + " needs a scalar response (examples 3 and 4)");
        return selection::KernelBuilder::scalar(data.x, data.y,
                                                opt.method == Method::gsir ? kernels::KernelKind::sir
                                                                           : kernels::KernelKind::cume,
                                                opt.slices);
    }
    if (spec.example_id <= 2) {
        const bool bound = spec.example_id == 1;
        return selection::KernelBuilder::wire(data.x, metrics::pairwise_distances(data.responses, bound));
    }
    std::vector<metrics::ResponseObject> scalar;
    scalar.reserve(data.y.size());
    for (double v : data.y) scalar.push_back(metrics::make_euclidean({v}));
    return selection::KernelBuilder::wire(data.x, metrics::pairwise_distances(scalar, false));
}

solver::PenaltySpec make_penalty(const ScenarioSpec& spec, const RunOptions& opt, const SimulatedData& data) {
    if (opt.method == Method::swire1) return solver::ElementwiseL1{};
    if (opt.method == Method::swire2) return solver::RowGroup{};
    const Tolerances& tol = opt.tolerances;
    const double zero = tol.precision_zero;
    if (opt.graph == GraphSource::oracle)
        return solver::Graphical{graph::neighborhoods_from_precision(precision(spec.covariance, spec.p), zero)};
    const SymmetricMatrix s = kernels::sample_covariance(data.x);
    const double pen = opt.glasso_penalty > 0.0 ? opt.glasso_penalty : graph::default_glasso_penalty(s, data.x.rows());
    const graph::GlassoResult g = graph::glasso(s, pen, tol.glasso_tol, tol.glasso_max_iter);
    return solver::Graphical{graph::neighborhoods_from_precision(g.precision, zero)};
}

Summary summarize(const std::vector<double>& v) {
    Summary s;
    if (v.empty()) return s;
    s.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    if (v.size() > 1) {
        double ss = 0.0;
        for (double x : v) ss += (x - s.mean) * (x - s.mean);
        s.sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
    }
    return s;
}

template <class F>
Summary summarize_by(const std::vector<ReplicateRecord>& records, F field) {
    std::vector<double> v;
    for (const auto& r : records)
        if (r.ok) v.push_back(field(r));
    return summarize(v);
}

nlohmann::json summary_json(const Summary& s) { return {{"mean", s.mean}, {"sd", s.sd}}; }

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

} // namespace

ReplicateRecord run_replicate(const ScenarioSpec& spec, const RunOptions& opt, int replicate) {
    ReplicateRecord rec;
    rec.replicate = replicate;
    const auto start = std::chrono::steady_clock::now();
    try {
        const std::uint64_t seed = child_seed(spec.seed, static_cast<std::uint64_t>(replicate));
        const SimulatedData data = generate(spec, seed);
        const selection::KernelBuilder builder = build_kernels(spec, opt, data);
        const solver::PenaltySpec penalty = make_penalty(spec, opt, data);
        const solver::AdmmConfig admm = solver::AdmmConfig::from(opt.tolerances);

        Index d = data.d;
        if (!opt.use_true_d) {
            selection::LadleOptions lo;
            lo.boot = opt.boot;
            lo.seed = child_seed(seed, 3);
            lo.admm = admm;
            const selection::LadleResult lr = selection::ladle(builder, penalty, lo);
            rec.d_hat = lr.d_hat;
            d = std::max<Index>(lr.d_hat, 1);
        }

        const kernels::KernelEstimates full = builder.full();
        if (opt.cross_validate) {
            selection::CvOptions co;
            co.folds = opt.folds;
            co.grid_size = opt.grid_size;
            co.seed = child_seed(seed, 2);
            co.admm = admm;
            rec.lambda = selection::cross_validate(builder, penalty, d, co).chosen_lambda;
        } else {
            rec.lambda = opt.fixed_lambda_fraction * solver::lambda_max(full.lambda_hat, penalty);
        }

        solver::AdmmConfig final_cfg = admm;
        final_cfg.compute_kkt = false;
        const solver::FitResult fit = solver::AdmmSolver(full, penalty, final_cfg).fit(rec.lambda);
        const solver::Directions dirs = solver::extract_directions(fit.b_hat, std::min<Index>(d, spec.p));
        if (dirs.directions.rank() == data.d) {
            rec.general_loss = general_loss(dirs.directions.columns(), data.beta);
        } else {
            // d_hat differs from the true d: projection distance of the spans
            const Matrix a = dirs.directions.columns();
            Eigen::ColPivHouseholderQR<Matrix> qr(data.beta);
            const Matrix b = qr.householderQ() * Matrix::Identity(spec.p, data.beta.cols());
            rec.general_loss = (a * a.transpose() - b * b.transpose()).norm();
        }
        const SelectionMetrics m = selection_metrics(fit.active_set, data.support, spec.p);
        rec.true_recovery = m.true_recovery;
        rec.false_positive = m.false_positive;
        rec.false_negative = m.false_negative;
    } catch (const Error& e) {
        rec.ok = false;
        rec.error = "replicate " + std::to_string(replicate) + ": " + e.what();
    }
    rec.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rec;
}

ExperimentReport run_scenario(const ScenarioSpec& spec, const RunOptions& options) {
    spec.validate();
    if ((options.method == Method::gsir || options.method == Method::gcume) && spec.example_id <= 2)
        fail(ErrorCode::configuration, to_string(options.method) + " needs a scalar response (examples 3 and 4)");
    ExperimentReport report;
    report.spec = spec;
    report.options = options;
    report.records.resize(static_cast<std::size_t>(spec.replicates));
    parallel_for(report.records.size(), options.jobs,
                 [&](std::size_t r) { report.records[r] = run_replicate(spec, options, static_cast<int>(r)); });
    return report;
}

int ExperimentReport::failed() const {
    return static_cast<int>(std::count_if(records.begin(), records.end(), [](const auto& r) { return !r.ok; }));
}

Summary ExperimentReport::general_loss() const {
    return summarize_by(records, [](const ReplicateRecord& r) { return r.general_loss; });
}
Summary ExperimentReport::true_recovery() const {
    return summarize_by(records, [](const ReplicateRecord& r) { return static_cast<double>(r.true_recovery); });
}
Summary ExperimentReport::false_positive() const {
    return summarize_by(records, [](const ReplicateRecord& r) { return static_cast<double>(r.false_positive); });
}
Summary ExperimentReport::false_negative() const {
    return summarize_by(records, [](const ReplicateRecord& r) { return static_cast<double>(r.false_negative); });
}

std::optional<double> ExperimentReport::correct_d_rate(Index true_d) const {
    int total = 0, hit = 0;
    for (const auto& r : records)
        if (r.ok && r.d_hat) {
            ++total;
            hit += *r.d_hat == true_d ? 1 : 0;
        }
    if (total == 0) return std::nullopt;
    return static_cast<double>(hit) / total;
}

nlohmann::json ExperimentReport::to_json() const {
    nlohmann::json recs = nlohmann::json::array();
    for (const auto& r : records) {
        nlohmann::json j = {{"replicate", r.replicate}, {"ok", r.ok}};
        if (r.ok) {
            j["general_loss"] = r.general_loss;
            j["true_recovery"] = r.true_recovery;
            j["false_positive"] = r.false_positive;
            j["false_negative"] = r.false_negative;
            j["lambda"] = r.lambda;
            if (r.d_hat) j["d_hat"] = *r.d_hat;
        } else {
            j["error"] = r.error;
        }
        recs.push_back(std::move(j));
    }
    nlohmann::json out = {
        {"scenario",
         {{"example", spec.example_id},
          {"n", spec.n},
          {"p", spec.p},
          {"covariance", to_string(spec.covariance)},
          {"seed", spec.seed},
          {"replicates", spec.replicates},
          {"quantile_grid", spec.quantile_grid}}},
        {"options",
         {{"method", to_string(options.method)},
          {"graph", to_string(options.graph)},
          {"use_true_d", options.use_true_d},
          {"cv", options.cross_validate},
          {"folds", options.folds},
          {"grid_size", options.grid_size},
          {"boot", options.boot},
          {"slices", options.slices}}},
        {"failed", failed()},
        {"general_loss", summary_json(general_loss())},
        {"true_recovery", summary_json(true_recovery())},
        {"false_positive", summary_json(false_positive())},
        {"false_negative", summary_json(false_negative())},
        {"records", recs},
    };
    if (!options.use_true_d) {
        const Index d = spec.example_id == 1 || spec.example_id == 3 ? 1 : 2;
        if (auto rate = correct_d_rate(d)) out["correct_d_rate"] = *rate;
    }
    return out;
}

std::string ExperimentReport::to_csv() const {
    std::ostringstream os;
    os << "replicate,ok,general_loss,true_recovery,false_positive,false_negative,d_hat,lambda,wall_time,error\n";
    for (const auto& r : records) {
        std::string err = r.error;
        std::replace(err.begin(), err.end(), '"', '\'');
        os << r.replicate << ',' << (r.ok ? 1 : 0) << ',' << fmt(r.general_loss) << ',' << r.true_recovery << ','
           << r.false_positive << ',' << r.false_negative << ',' << (r.d_hat ? std::to_string(*r.d_hat) : "") << ','
           << fmt(r.lambda) << ',' << fmt(r.wall_time) << ",\"" << err << "\"\n";
    }
    return os.str();
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

bool parse_bool(const std::string& v, int line) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    fail(ErrorCode::invalid_input, "scenario line " + std::to_string(line) + ": expected a boolean, got '" + v + "'");
}

} // namespace

std::pair<ScenarioSpec, RunOptions> parse_scenario(const std::string& text) {
    ScenarioSpec spec;
    RunOptions opt;
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const std::string content = trim(raw.substr(0, raw.find('#')));
        if (content.empty()) continue;
        const auto eq = content.find('=');
        if (eq == std::string::npos)
            fail(ErrorCode::invalid_input, "scenario line " + std::to_string(line) + ": expected key = value");
        const std::string key = trim(content.substr(0, eq));
        const std::string val = trim(content.substr(eq + 1));
        try {
            if (key == "example") spec.example_id = std::stoi(val);
            else if (key == "n") spec.n = std::stol(val);
            else if (key == "p") spec.p = std::stol(val);
            else if (key == "covariance") spec.covariance = covariance_from_string(val);
            else if (key == "seed") spec.seed = std::stoull(val);
            else if (key == "replicates") spec.replicates = std::stoi(val);
            else if (key == "quantile_grid") spec.quantile_grid = std::stoi(val);
            else if (key == "method") opt.method = method_from_string(val);
            else if (key == "graph") opt.graph = graph_source_from_string(val);
            else if (key == "use_true_d") opt.use_true_d = parse_bool(val, line);
            else if (key == "cv") opt.cross_validate = parse_bool(val, line);
            else if (key == "lambda_fraction") opt.fixed_lambda_fraction = std::stod(val);
            else if (key == "folds") opt.folds = std::stoi(val);
            else if (key == "grid_size") opt.grid_size = std::stoi(val);
            else if (key == "boot") opt.boot = std::stoi(val);
            else if (key == "slices") opt.slices = std::stoi(val);
            else if (key == "glasso_penalty") opt.glasso_penalty = std::stod(val);
            else fail(ErrorCode::configuration, "scenario line " + std::to_string(line) + ": unknown key '" + key + "'");
        } catch (const std::logic_error&) {
            fail(ErrorCode::invalid_input,
                 "scenario line " + std::to_string(line) + ": cannot parse value '" + val + "' for '" + key + "'");
        }
    }
    spec.validate();
    return {spec, opt};
}

} // namespace gwire::synthetic
