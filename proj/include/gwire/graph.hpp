#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "gwire/linalg.hpp"

namespace gwire::graph {

/**
 * Neighborhood structure among p predictors.
 *
 * neighbors[i] is sorted, contains i itself, and j is in neighbors[i]
 * exactly when i is in neighbors[j]. weights[i] > 0 is the group weight
 * tau_i of the latent group penalty.
 */
class NeighborhoodGraph {
public:
    NeighborhoodGraph() = default;

    /// Validates the invariants; throws invalid_input when any fails.
    NeighborhoodGraph(std::vector<std::vector<Index>> neighbors, std::vector<double> weights);

    /// Graph where every predictor is only its own neighbor (tau_i = 1).
    static NeighborhoodGraph singletons(Index p);

    /**
     * Builds a graph from possibly incomplete adjacency lists: adds
     * self-membership, symmetrizes by union, sorts, and sets tau_i = sqrt|N_i|.
     * `symmetrized` reports whether the union added any edge.
     */
    static NeighborhoodGraph from_adjacency(const std::vector<std::vector<Index>>& lists,
                                            bool* symmetrized = nullptr);

    Index p() const noexcept { return static_cast<Index>(neighbors_.size()); }
    const std::vector<Index>& neighbors(Index i) const { return neighbors_[static_cast<std::size_t>(i)]; }
    double weight(Index i) const { return weights_[static_cast<std::size_t>(i)]; }
    const std::vector<std::vector<Index>>& all_neighbors() const noexcept { return neighbors_; }
    const std::vector<double>& weights() const noexcept { return weights_; }

    std::size_t edge_count() const;

private:
    std::vector<std::vector<Index>> neighbors_;
    std::vector<double> weights_;
};

enum class WeightScheme { sqrt_size, unit };

WeightScheme weight_scheme_from_string(const std::string& name);

/// N_i = {k : |omega_ki| > threshold} plus i itself, tau_i = sqrt|N_i|.
NeighborhoodGraph neighborhoods_from_precision(const SymmetricMatrix& omega, double threshold = 1e-8);

NeighborhoodGraph tau_weights(const NeighborhoodGraph& graph, WeightScheme scheme);
NeighborhoodGraph tau_weights(const NeighborhoodGraph& graph, const std::string& scheme);

struct GlassoResult {
    SymmetricMatrix precision;
    SymmetricMatrix covariance;  // the estimate W = precision^-1
    int iterations = 0;
    bool converged = false;
    /// Penalized objective at the precision recovered after each sweep.
    std::vector<double> objective;
};

/**
 * Graphical lasso by block coordinate descent on the columns of W:
 * minimizes -log det(Omega) + tr(S Omega) + penalty * sum |omega_ij|
 * (diagonal included). Stops when the largest entry change of W in a sweep
 * is below `tol`, or after `max_iter` sweeps with converged = false.
 */
GlassoResult glasso(const SymmetricMatrix& sigma_hat, double penalty, double tol = 1e-6, int max_iter = 500);

/// 2 sqrt(log p / n) times the mean of diag(S).
double default_glasso_penalty(const SymmetricMatrix& sigma_hat, Index n);

/// Penalized negative log-likelihood of a precision estimate.
double glasso_objective(const SymmetricMatrix& sigma_hat, const SymmetricMatrix& omega, double penalty);

// {"p": p, "neighbors": [[...], ...], "weights": [...]} with 0-based indices.
nlohmann::json to_json(const NeighborhoodGraph& g);
/// Accepts {"neighbors": [...]} (weights optional, default sqrt|N_i|) or a
/// bare array of lists; lists are symmetrized with a warning on stderr.
NeighborhoodGraph graph_from_json(const nlohmann::json& j);

} // namespace gwire::graph
