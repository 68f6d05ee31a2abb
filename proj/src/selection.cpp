#include "gwire/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>

#include "gwire/error.hpp"
#include "gwire/parallel.hpp"
#include "gwire/random.hpp"

namespace gwire::selection {

KernelBuilder KernelBuilder::wire(Matrix x, metrics::DistanceMatrix d) {
    if (d.size() != x.rows())
        fail(ErrorCode::shape, "distance matrix is " + std::to_string(d.size()) + "x" + std::to_string(d.size()) +
                                   " but X has " + std::to_string(x.rows()) + " rows");
    KernelBuilder b;
    b.x_ = std::move(x);
    b.d_ = std::move(d);
    b.kind_ = kernels::KernelKind::wire;
    return b;
}

KernelBuilder KernelBuilder::scalar(Matrix x, std::vector<double> y, kernels::KernelKind kind, int slices) {
    if (kind == kernels::KernelKind::wire)
        fail(ErrorCode::configuration, "KernelBuilder::scalar needs the sir or cume kernel");
    if (static_cast<Index>(y.size()) != x.rows())
        fail(ErrorCode::shape, std::to_string(y.size()) + " responses for " + std::to_string(x.rows()) + " rows");
    KernelBuilder b;
    b.x_ = std::move(x);
    b.y_ = std::move(y);
    b.kind_ = kind;
    b.slices_ = slices;
    return b;
}

kernels::KernelEstimates KernelBuilder::full() const {
    if (kind_ == kernels::KernelKind::wire) return kernels::estimate_wire(x_, d_);
    return kernels::estimate_scalar(x_, y_, kind_, slices_);
}

kernels::KernelEstimates KernelBuilder::subset(std::span<const Index> rows) const {
    Matrix xs(static_cast<Index>(rows.size()), x_.cols());
    for (Index r = 0; r < xs.rows(); ++r) xs.row(r) = x_.row(rows[static_cast<std::size_t>(r)]);
    if (kind_ == kernels::KernelKind::wire) return kernels::estimate_wire(xs, d_.reindex(rows));
    std::vector<double> ys(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) ys[r] = y_[static_cast<std::size_t>(rows[r])];
    return kernels::estimate_scalar(xs, ys, kind_, slices_);
}

Index nonzero_eigenvalue_count(const Vector& eigenvalues, double tol) {
    return static_cast<Index>((eigenvalues.array().abs() > tol).count());
}

DirectionMatrix standardize_directions(const DirectionMatrix& beta, const SymmetricMatrix& sigma_hat) {
    if (beta.dim() != sigma_hat.dim())
        fail(ErrorCode::shape, "standardize_directions: beta has " + std::to_string(beta.dim()) +
                                   " rows but Sigma_hat is " + std::to_string(sigma_hat.dim()) + "x" +
                                   std::to_string(sigma_hat.dim()));
    const Matrix& b = beta.columns();
    try {
        const SymmetricMatrix root = sym_inv_sqrt(SymmetricMatrix(Matrix(b.transpose() * sigma_hat.matrix() * b)));
        return DirectionMatrix(b * root.matrix());
    } catch (const Error& e) {
        if (e.code() != ErrorCode::singular_matrix) throw;
        fail(ErrorCode::degenerate_directions, "standardize_directions: beta^T Sigma beta is singular");
    }
}

std::vector<double> lambda_grid(double lambda_max, int size, double ratio) {
    if (!(lambda_max > 0.0) || !std::isfinite(lambda_max))
        fail(ErrorCode::degenerate_fit, "lambda grid needs lambda_max > 0; the kernel matrix is zero");
    if (size < 1 || !(ratio > 0.0) || !(ratio <= 1.0))
        fail(ErrorCode::configuration, "lambda grid needs size >= 1 and ratio in (0, 1]");
    std::vector<double> grid(static_cast<std::size_t>(size));
    if (size == 1) {
        grid[0] = lambda_max;
        return grid;
    }
    const double lo = std::log(ratio * lambda_max);
    const double hi = std::log(lambda_max);
    for (int k = 0; k < size; ++k)
        grid[static_cast<std::size_t>(k)] = std::exp(lo + (hi - lo) * k / (size - 1));
    grid.front() = ratio * lambda_max;
    grid.back() = lambda_max;
    return grid;
}

std::vector<int> fold_assignment(Index n, int folds, std::uint64_t seed) {
    if (folds < 2) fail(ErrorCode::configuration, "cross-validation needs at least 2 folds");
    if (n < folds)
        fail(ErrorCode::configuration, "cross-validation: " + std::to_string(n) + " observations for " +
                                           std::to_string(folds) + " folds");
    std::vector<Index> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), Index{0});
    Rng rng(seed);
    // Fisher-Yates with explicit draws
    for (Index i = n - 1; i > 0; --i) {
        std::uniform_int_distribution<Index> pick(0, i);
        std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(pick(rng))]);
    }
    std::vector<int> label(static_cast<std::size_t>(n));
    const Index base = n / folds;
    const Index extra = n % folds;
    Index pos = 0;
    for (int f = 0; f < folds; ++f) {
        const Index size = base + (f < extra ? 1 : 0);
        for (Index k = 0; k < size; ++k) label[static_cast<std::size_t>(perm[static_cast<std::size_t>(pos++)])] = f;
    }
    return label;
}

namespace {

// Top-k eigenvectors as a p x k block.
Matrix leading(const EigenDecomposition& eig, Index k) { return eig.vectors.leftCols(k); }

} // namespace

LadleResult ladle(const KernelBuilder& data, const solver::PenaltySpec& penalty, const LadleOptions& options) {
    if (options.boot < 1) fail(ErrorCode::configuration, "ladle needs at least one bootstrap replicate");
    const kernels::KernelEstimates full = data.full();
    const double lam = options.pilot_fraction * solver::lambda_max(full.lambda_hat, penalty);

    solver::AdmmConfig cfg = options.admm;
    cfg.compute_kkt = false;
    const solver::FitResult pilot = solver::AdmmSolver(full, penalty, cfg).fit(lam);
    if (pilot.active_set.empty())
        fail(ErrorCode::degenerate_fit, "ladle: the pilot fit at lambda = " + std::to_string(lam) +
                                            " selected no predictor; use a smaller pilot lambda");

    const Index s = static_cast<Index>(pilot.active_set.size());
    const EigenDecomposition pilot_eig = sym_eig(pilot.b_hat);

    const Index n = data.n();
    std::vector<std::vector<Index>> draws(static_cast<std::size_t>(options.boot), std::vector<Index>(n));
    {
        Rng rng(options.seed);
        std::uniform_int_distribution<Index> pick(0, n - 1);
        for (auto& d : draws)
            for (auto& i : d) i = pick(rng);
    }

    // det_terms[b][k-1] = 1 - |det(beta(k)^T beta_b(k))|
    std::vector<std::optional<std::vector<double>>> det_terms(static_cast<std::size_t>(options.boot));
    std::vector<std::string> failures(static_cast<std::size_t>(options.boot));
    parallel_for(static_cast<std::size_t>(options.boot), options.jobs, [&](std::size_t b) {
        try {
            const kernels::KernelEstimates kb = data.subset(draws[b]);
            const solver::FitResult fit = solver::AdmmSolver(kb, penalty, cfg).fit(lam);
            const EigenDecomposition eig = sym_eig(fit.b_hat);
            std::vector<double> terms(static_cast<std::size_t>(std::max<Index>(s - 1, 0)));
            for (Index k = 1; k < s; ++k) {
                const Matrix cross = leading(pilot_eig, k).transpose() * leading(eig, k);
                terms[static_cast<std::size_t>(k - 1)] = 1.0 - std::abs(cross.determinant());
            }
            det_terms[b] = std::move(terms);
        } catch (const Error& e) {
            failures[b] = "bootstrap replicate " + std::to_string(b) + " skipped: " + e.what();
        }
    });

    LadleResult out;
    out.pilot_lambda = lam;
    out.active_set = pilot.active_set;
    for (const auto& f : failures)
        if (!f.empty()) out.warnings.push_back(f);
    for (const auto& t : det_terms)
        if (t) ++out.bootstrap_count;
    if (out.bootstrap_count == 0) fail(ErrorCode::degenerate_fit, "ladle: every bootstrap replicate failed");

    out.f0_values.assign(static_cast<std::size_t>(s), 0.0);
    for (Index k = 1; k < s; ++k) {
        double sum = 0.0;
        for (const auto& t : det_terms)
            if (t) sum += (*t)[static_cast<std::size_t>(k - 1)];
        out.f0_values[static_cast<std::size_t>(k)] = sum / out.bootstrap_count;
    }
    const double f0_total = std::accumulate(out.f0_values.begin(), out.f0_values.end(), 0.0);

    out.eigenvalues.resize(static_cast<std::size_t>(s));
    for (Index k = 0; k < s; ++k) out.eigenvalues[static_cast<std::size_t>(k)] = std::max(pilot_eig.values(k), 0.0);
    const double phi_total = std::accumulate(out.eigenvalues.begin(), out.eigenvalues.end(), 0.0);

    out.f_values.resize(static_cast<std::size_t>(s));
    out.h_values.resize(static_cast<std::size_t>(s));
    double best = std::numeric_limits<double>::infinity();
    for (Index k = 0; k < s; ++k) {
        const auto ku = static_cast<std::size_t>(k);
        out.f_values[ku] = out.f0_values[ku] / (1.0 + f0_total);
        out.h_values[ku] = out.eigenvalues[ku] / (1.0 + phi_total);
        const double g = out.f_values[ku] + out.h_values[ku];
        if (g < best) {
            best = g;
            out.d_hat = k;
        }
    }
    return out;
}

CvResult cross_validate(const KernelBuilder& data, const solver::PenaltySpec& penalty, Index d,
                        const CvOptions& options) {
    if (d < 1 || d > data.p())
        fail(ErrorCode::configuration, "cross_validate: d = " + std::to_string(d) + " outside [1, " +
                                           std::to_string(data.p()) + "]");
    const kernels::KernelEstimates full = data.full();
    CvResult out;
    out.lambda_max = solver::lambda_max(full.lambda_hat, penalty);
    out.lambda_grid = lambda_grid(out.lambda_max, options.grid_size, options.min_ratio);

    const std::vector<int> label = fold_assignment(data.n(), options.folds, options.seed);
    const std::size_t grid = out.lambda_grid.size();
    const double inf = std::numeric_limits<double>::infinity();
    const double eig_tol = default_tolerances().direction_eigenvalue;

    std::vector<std::vector<double>> cell(static_cast<std::size_t>(options.folds), std::vector<double>(grid, inf));
    std::vector<int> degenerate(static_cast<std::size_t>(options.folds), 0);

    solver::AdmmConfig cfg = options.admm;
    cfg.compute_kkt = false;

    parallel_for(static_cast<std::size_t>(options.folds), options.jobs, [&](std::size_t f) {
        std::vector<Index> train, held;
        for (Index i = 0; i < data.n(); ++i)
            (label[static_cast<std::size_t>(i)] == static_cast<int>(f) ? held : train).push_back(i);

        kernels::KernelEstimates held_k;
        try {
            held_k = data.subset(held);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::insufficient_data && e.code() != ErrorCode::invalid_slicing) throw;
            fail(ErrorCode::configuration, "cross_validate: fold " + std::to_string(f) + " with " +
                                               std::to_string(held.size()) +
                                               " observations is too small for the kernel: " + e.what());
        }
        const kernels::KernelEstimates train_k = data.subset(train);
        const solver::AdmmSolver solver(train_k, penalty, cfg);

        std::optional<solver::AdmmState> warm;
        for (std::size_t g = grid; g-- > 0;) {
            solver::FitResult fit = solver.fit(out.lambda_grid[g], warm ? &*warm : nullptr);
            warm = std::move(fit.state);
            if (nonzero_eigenvalue_count(fit.eigenvalues, eig_tol) < d) {
                ++degenerate[f];
                continue;
            }
            try {
                const solver::Directions dirs = solver::extract_directions(fit.b_hat, d);
                const Matrix beta = standardize_directions(dirs.directions, train_k.sigma_hat).columns();
                cell[f][g] = -(beta.transpose() * held_k.lambda_hat.matrix() * beta).trace();
            } catch (const Error& e) {
                if (e.code() != ErrorCode::degenerate_directions) throw;
                ++degenerate[f];
            }
        }
    });

    for (int f = 0; f < options.folds; ++f) {
        out.infinite_cells += degenerate[static_cast<std::size_t>(f)];
        if (degenerate[static_cast<std::size_t>(f)] > 0)
            out.warnings.push_back("fold " + std::to_string(f) + ": " +
                                   std::to_string(degenerate[static_cast<std::size_t>(f)]) + " lambda values gave fewer than " +
                                   std::to_string(d) + " non-zero eigenvalues (scored +inf)");
    }

    out.scores.assign(grid, 0.0);
    for (std::size_t g = 0; g < grid; ++g) {
        double sum = 0.0;
        for (const auto& row : cell) sum += row[g];
        out.scores[g] = sum / options.folds;
    }

    std::size_t pick = grid;
    for (std::size_t g = 0; g < grid; ++g)
        if (std::isfinite(out.scores[g]) && (pick == grid || out.scores[g] <= out.scores[pick])) pick = g;
    if (pick == grid)
        fail(ErrorCode::degenerate_fit, "cross_validate: no lambda on the grid produced " + std::to_string(d) +
                                            " non-zero eigenvalues in every fold");
    out.chosen_lambda = out.lambda_grid[pick];
    return out;
}

} // namespace gwire::selection
