#pragma once

namespace gwire {

/**
 * Every numeric tolerance used by the library, in one place.
 *
 * Defaults reproduce the documented behaviour; `from_env()` applies the
 * `GWIRE_*` environment overrides used by the command-line tool.
 */
struct Tolerances {
    // matrix-core
    double singular_eigenvalue = 1e-12;  // sym_inv_sqrt rejects eigenvalues at or below this
    double sign_tie_relative = 1e-10;    // magnitudes this close count as ties in the sign rule

    // metrics
    double sphere_norm = 1e-8;
    double pmf_sum = 1e-8;
    double grid_match = 1e-12;

    // graph
    double precision_zero = 1e-8;        // |omega_ij| at or below this is "no edge"
    double glasso_tol = 1e-6;
    int glasso_max_iter = 500;

    // solver defaults (AdmmConfig)
    double rho = 1.0;
    double eps_primal = 1e-3;
    double eps_dual = 1e-3;
    int admm_max_iter = 3000;

    // selection
    double direction_eigenvalue = 1e-12; // eigenvalues at or below this are treated as zero

    static Tolerances from_env();
};

const Tolerances& default_tolerances();

} // namespace gwire
