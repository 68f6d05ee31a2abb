#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gwire/config.hpp"
#include "gwire/graph.hpp"
#include "gwire/linalg.hpp"
#include "gwire/metrics.hpp"

namespace gwire::synthetic {

enum class CovarianceKind { sigma1, sigma2 };

struct ScenarioSpec {
    int example_id = 1;
    Index n = 300;
    Index p = 200;
    CovarianceKind covariance = CovarianceKind::sigma1;
    std::uint64_t seed = 1;
    int replicates = 20;
    /// Example 1 only: store responses as quantile functions on a grid of
    /// this many points instead of (mu, sigma) pairs. 0 keeps the exact form.
    int quantile_grid = 0;

    void validate() const;
};

/// I_5 kron (0.16 I_5 + J_5) on the first 25 coordinates, identity elsewhere.
SymmetricMatrix make_sigma1(Index p);
/// Inverse of the sigma1 precision with entries (4,5), (5,4), (9,10), (10,9)
/// (0-based) set to 0.1.
SymmetricMatrix make_sigma2(Index p);
SymmetricMatrix make_omega2(Index p);
SymmetricMatrix covariance(CovarianceKind kind, Index p);
/// Exact precision matrix for the covariance kind.
SymmetricMatrix precision(CovarianceKind kind, Index p);

struct SimulatedData {
    Matrix x;
    std::vector<metrics::ResponseObject> responses;  // examples 1 and 2
    std::vector<double> y;                           // examples 3 and 4
    Matrix beta;                                     // p x d, columns as in the model
    std::vector<Index> support;                      // 0-based
    Index d = 1;
};

/// Quantile responses mu + Phi^-1(tau) with mu ~ N(beta^T x, noise_sd^2).
SimulatedData gen_example1(const ScenarioSpec& spec, std::uint64_t seed, double noise_sd = 0.1);
/// Points on the unit sphere in R^4 driven by beta_1, beta_2 applied to x + 1.
SimulatedData gen_example2(const ScenarioSpec& spec, std::uint64_t seed, double noise_sd = 0.1);
/// y = exp(beta^T x + 0.5 eps).
SimulatedData gen_example3(const ScenarioSpec& spec, std::uint64_t seed);
/// y = exp(beta_1^T x) sign(beta_2^T x) + 0.2 eps.
SimulatedData gen_example4(const ScenarioSpec& spec, std::uint64_t seed);
SimulatedData generate(const ScenarioSpec& spec, std::uint64_t seed);

/// Example 2 response for given index values and noise.
std::vector<double> sphere_response(double u1, double u2, double eps);

/// ||Q_a Q_a^T - Q_b Q_b^T||_F with Q the orthonormal basis of each column
/// span. Throws degenerate_directions on rank-deficient input.
double general_loss(const Matrix& beta_hat, const Matrix& beta_true);

struct SelectionMetrics {
    int true_recovery = 0;
    Index false_positive = 0;
    Index false_negative = 0;
};

SelectionMetrics selection_metrics(const std::vector<Index>& s_hat, const std::vector<Index>& s_true, Index p);

enum class Method { gwire, swire1, swire2, gsir, gcume };
enum class GraphSource { oracle, glasso };

std::string to_string(Method m);
std::string to_string(GraphSource g);
std::string to_string(CovarianceKind c);
Method method_from_string(const std::string& s);
GraphSource graph_source_from_string(const std::string& s);
CovarianceKind covariance_from_string(const std::string& s);

struct RunOptions {
    Method method = Method::gwire;
    GraphSource graph = GraphSource::oracle;
    bool use_true_d = true;
    bool cross_validate = true;
    /// Used when cross_validate is off: lambda = fixed_lambda_fraction * lambda_max.
    double fixed_lambda_fraction = 0.2;
    int folds = 10;
    int grid_size = 30;
    int boot = 100;
    int slices = 10;
    /// Glasso penalty; 0 selects graph::default_glasso_penalty.
    double glasso_penalty = 0.0;
    int jobs = 1;
    Tolerances tolerances{};
};

struct ReplicateRecord {
    int replicate = 0;
    bool ok = true;
    std::string error;
    double general_loss = 0.0;
    int true_recovery = 0;
    Index false_positive = 0;
    Index false_negative = 0;
    std::optional<Index> d_hat;
    double lambda = 0.0;
    double wall_time = 0.0;
};

struct Summary {
    double mean = 0.0;
    double sd = 0.0;
};

struct ExperimentReport {
    ScenarioSpec spec;
    RunOptions options;
    std::vector<ReplicateRecord> records;

    int failed() const;
    Summary general_loss() const;
    Summary true_recovery() const;
    Summary false_positive() const;
    Summary false_negative() const;
    /// Fraction of successful replicates with d_hat equal to the true d.
    std::optional<double> correct_d_rate(Index true_d) const;

    /// Deterministic content only (no wall times).
    nlohmann::json to_json() const;
    std::string to_csv() const;
};

/// Runs every replicate; a failing replicate is recorded with its error.
ExperimentReport run_scenario(const ScenarioSpec& spec, const RunOptions& options);

/// One replicate, seeded from child_seed(spec.seed, replicate).
ReplicateRecord run_replicate(const ScenarioSpec& spec, const RunOptions& options, int replicate);

/// Scenario and run settings from "key = value" lines ('#' starts a comment).
/// Keys: example, n, p, covariance, seed, replicates, quantile_grid, method,
/// graph, use_true_d, cv, lambda_fraction, folds, grid_size, boot, slices,
/// glasso_penalty.
std::pair<ScenarioSpec, RunOptions> parse_scenario(const std::string& text);

} // namespace gwire::synthetic
