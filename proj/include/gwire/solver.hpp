#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "gwire/config.hpp"
#include "gwire/graph.hpp"
#include "gwire/kernels.hpp"
#include "gwire/linalg.hpp"

namespace gwire::solver {

/// Latent group penalty over the neighborhoods of `graph` (GWIRE).
struct Graphical {
    graph::NeighborhoodGraph graph;
};
/// lambda * sum |theta_ij| (SWIRE-I).
struct ElementwiseL1 {};
/// lambda * sum_i ||row_i(theta)||_2 (SWIRE-II).
struct RowGroup {};

using PenaltySpec = std::variant<Graphical, ElementwiseL1, RowGroup>;

std::string penalty_name(const PenaltySpec& penalty);

struct AdmmConfig {
    double rho = 1.0;
    double eps_primal = 1e-3;
    double eps_dual = 1e-3;
    int max_iter = 3000;
    /// Evaluate kkt_check on the result (one O(p^3) product per fit).
    bool compute_kkt = true;
    /// Multiply both thresholds by ||Theta^1||_F, the norm of the first
    /// Theta iterate from a zero start, so they follow the scale of the
    /// problem. Off: the thresholds are absolute.
    bool scale_tolerances = true;

    static AdmmConfig from(const Tolerances& t);
    void validate() const;
};

/**
 * ADMM iterates. In Graphical mode `blocks[i]` stores rows N_i of V^(i)
 * (|N_i| x p); rows outside N_i are zero by representation. `v` is the sum
 * of the blocks, or the single V matrix in the SWIRE modes (blocks empty).
 * `w` is the scaled dual variable.
 */
struct AdmmState {
    Matrix theta;
    std::vector<Matrix> blocks;
    Matrix v;
    Matrix w;
    int iter = 0;

    static AdmmState zeros(Index p, const PenaltySpec& penalty);
};

struct FitResult {
    SymmetricMatrix b_hat;
    std::vector<Index> active_set;
    std::optional<DirectionMatrix> directions;
    Vector eigenvalues;  // of b_hat, non-increasing
    int iterations = 0;
    bool converged = false;
    double kkt_residual = 0.0;
    double lambda = 0.0;
    AdmmState state;  // final iterates, reusable as a warm start
};

/**
 * Closed-form minimizer of the Theta sub-problem:
 * L - P (C o (P^T L P)) P^T with L = Lambda / rho + V_sym - W and
 * C_ij = g_i g_j / (g_i g_j + rho), g the eigenvalues of Sigma_hat.
 */
Matrix theta_update(const EigenDecomposition& sigma_eig, const SymmetricMatrix& lambda_hat, const Matrix& v_sym,
                    const Matrix& w, double rho);

/// C_ij = g_i g_j / (g_i g_j + rho).
Matrix shrink_weights(const Vector& eigenvalues, double rho);

/**
 * One Gauss-Seidel sweep of the latent group updates: groups with |N_i| > 1
 * in ascending order, then every singleton group. Updates state.blocks and
 * state.v; reads state.theta and state.w.
 */
void graphical_v_update(AdmmState& state, const graph::NeighborhoodGraph& graph, double lambda, double rho);

/// sign(U) (|U| - lambda / rho)_+ with U = Theta + W.
Matrix l1_v_update(const AdmmState& state, double lambda, double rho);

/// Row i scaled by (1 - lambda / (rho ||U_i||))_+ with U = Theta + W.
Matrix rowgroup_v_update(const AdmmState& state, double lambda, double rho);

/**
 * Solver bound to one (Sigma_hat, Lambda_hat, penalty) triple. The
 * eigendecomposition of Sigma_hat and the matrix C are computed in the
 * constructor and shared by every fit, so a lambda path costs one
 * decomposition.
 */
class AdmmSolver {
public:
    AdmmSolver(const kernels::KernelEstimates& kernels, PenaltySpec penalty, AdmmConfig config = {});

    /// Runs Algorithm-1 style ADMM at `lambda`, optionally warm-started.
    /// Throws numerical_failure if an iterate turns non-finite.
    FitResult fit(double lambda, const AdmmState* warm = nullptr) const;

    const EigenDecomposition& sigma_eigen() const noexcept { return eig_; }
    const SymmetricMatrix& sigma_hat() const noexcept { return sigma_; }
    const SymmetricMatrix& lambda_hat() const noexcept { return lambda_hat_; }
    const PenaltySpec& penalty() const noexcept { return penalty_; }
    const AdmmConfig& config() const noexcept { return config_; }

private:
    SymmetricMatrix sigma_;
    SymmetricMatrix lambda_hat_;
    PenaltySpec penalty_;
    AdmmConfig config_;
    EigenDecomposition eig_;
    Matrix keep_;            // 1 - C, applied in the eigenbasis
    Matrix lambda_rotated_;  // P^T Lambda_hat P
    double scale_ = 1.0;     // tolerance multiplier
};

FitResult admm_fit(const kernels::KernelEstimates& kernels, const PenaltySpec& penalty, double lambda,
                   const AdmmConfig& config = {});

/**
 * Optimality residual of a symmetric estimate. With R = Lambda - Sigma B Sigma
 * restricted to rows N_i and columns S_hat: ||R - lambda tau_i V_i / ||V_i|| ||
 * for non-zero groups and (||R|| - lambda tau_i)_+ for zero groups; returns
 * the maximum over groups. `blocks` are the solver's V^(i) row blocks.
 */
double kkt_check(const SymmetricMatrix& b_hat, const SymmetricMatrix& sigma_hat, const SymmetricMatrix& lambda_hat,
                 const graph::NeighborhoodGraph& graph, double lambda, const std::vector<Matrix>& blocks);

/// The same residual for the SWIRE penalties, computed from b_hat alone.
double kkt_check(const SymmetricMatrix& b_hat, const SymmetricMatrix& sigma_hat, const SymmetricMatrix& lambda_hat,
                 const PenaltySpec& penalty, double lambda, const std::vector<Matrix>& blocks = {});

/// max_i ||Lambda_{N_i}||_F / tau_i.
double lambda_max(const SymmetricMatrix& lambda_hat, const graph::NeighborhoodGraph& graph);

/// Smallest lambda giving an all-zero fit for any penalty kind.
double lambda_max(const SymmetricMatrix& lambda_hat, const PenaltySpec& penalty);

struct Directions {
    DirectionMatrix directions;
    Vector eigenvalues;  // all p eigenvalues, non-increasing
};

/// Top-d eigenvectors of b_hat, sign-fixed. Throws configuration unless 1 <= d <= p.
Directions extract_directions(const SymmetricMatrix& b_hat, Index d);

/// Eigenvalues of a matrix that is zero outside active x active, from the
/// eigenvalues of that block plus zeros; non-increasing.
Vector support_eigenvalues(const SymmetricMatrix& b_hat, const std::vector<Index>& active);

/// Indices of non-zero rows.
std::vector<Index> nonzero_rows(const Matrix& m);

} // namespace gwire::solver
