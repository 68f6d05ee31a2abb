#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gwire/kernels.hpp"
#include "gwire/linalg.hpp"
#include "gwire/metrics.hpp"
#include "gwire/solver.hpp"

namespace gwire::selection {

/**
 * Recomputes kernel estimates on row subsets of one dataset. The WIRE
 * variant keeps the full distance matrix and reindexes it, so bootstrap
 * and fold kernels never recompute response distances.
 */
class KernelBuilder {
public:
    static KernelBuilder wire(Matrix x, metrics::DistanceMatrix d);
    static KernelBuilder scalar(Matrix x, std::vector<double> y, kernels::KernelKind kind, int slices = 10);

    Index n() const noexcept { return x_.rows(); }
    Index p() const noexcept { return x_.cols(); }
    kernels::KernelKind kind() const noexcept { return kind_; }

    kernels::KernelEstimates full() const;
    /// Kernels on rows `rows` (repeats allowed).
    kernels::KernelEstimates subset(std::span<const Index> rows) const;

private:
    Matrix x_;
    metrics::DistanceMatrix d_;
    std::vector<double> y_;
    kernels::KernelKind kind_ = kernels::KernelKind::wire;
    int slices_ = 10;
};

struct LadleResult {
    Index d_hat = 0;
    std::vector<double> f_values;   // k = 0 .. |S_hat| - 1
    std::vector<double> h_values;
    std::vector<double> f0_values;
    std::vector<double> eigenvalues;  // phi_hat_1 >= ... of the pilot B_hat
    int bootstrap_count = 0;          // replicates that produced a fit
    double pilot_lambda = 0.0;
    std::vector<Index> active_set;
    std::vector<std::string> warnings;
};

struct LadleOptions {
    int boot = 100;
    std::uint64_t seed = 0;
    int jobs = 1;
    double pilot_fraction = 0.2;  // pilot lambda = pilot_fraction * lambda_max
    solver::AdmmConfig admm{};
};

/**
 * Ladle estimate of the structural dimension. Bootstrap resampling tables
 * are drawn up front from `seed`, so the result does not depend on `jobs`.
 * Throws degenerate_fit when the pilot fit selects no predictor.
 */
LadleResult ladle(const KernelBuilder& data, const solver::PenaltySpec& penalty, const LadleOptions& options = {});

struct CvResult {
    std::vector<double> lambda_grid;  // ascending
    std::vector<double> scores;       // mean over folds, +inf when a fold fit was degenerate
    double chosen_lambda = 0.0;
    double lambda_max = 0.0;
    int infinite_cells = 0;
    std::vector<std::string> warnings;
};

struct CvOptions {
    int folds = 10;
    int grid_size = 30;
    double min_ratio = 0.05;
    std::uint64_t seed = 0;
    int jobs = 1;
    solver::AdmmConfig admm{};
};

/**
 * K-fold cross-validation of lambda over a log-spaced grid in
 * [min_ratio * lambda_max, lambda_max]. Each fold runs the grid from the
 * largest lambda down with warm starts. Ties go to the larger lambda.
 */
CvResult cross_validate(const KernelBuilder& data, const solver::PenaltySpec& penalty, Index d,
                        const CvOptions& options = {});

/// Fold label per observation: shuffled, then contiguous blocks, remainder
/// spread over the first folds.
std::vector<int> fold_assignment(Index n, int folds, std::uint64_t seed);

/// 30 (or `size`) log-spaced values in [ratio * lambda_max, lambda_max], ascending.
std::vector<double> lambda_grid(double lambda_max, int size = 30, double ratio = 0.05);

/// beta (beta^T Sigma beta)^{-1/2}. Throws degenerate_directions when singular.
DirectionMatrix standardize_directions(const DirectionMatrix& beta, const SymmetricMatrix& sigma_hat);

/// Number of eigenvalues above `tol` in absolute value.
Index nonzero_eigenvalue_count(const Vector& eigenvalues, double tol = 1e-12);

} // namespace gwire::selection
