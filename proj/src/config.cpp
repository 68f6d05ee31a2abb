#include "gwire/config.hpp"

#include <cstdlib>
#include <string>

#include "gwire/error.hpp"

namespace gwire {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::invalid_input: return "invalid-input";
    case ErrorCode::shape: return "shape";
    case ErrorCode::singular_matrix: return "singular-matrix";
    case ErrorCode::decomposition: return "decomposition";
    case ErrorCode::insufficient_data: return "insufficient-data";
    case ErrorCode::incompatible_response: return "incompatible-response";
    case ErrorCode::invalid_slicing: return "invalid-slicing";
    case ErrorCode::configuration: return "configuration";
    case ErrorCode::numerical_failure: return "numerical-failure";
    case ErrorCode::requires_solver_state: return "requires-solver-state";
    case ErrorCode::degenerate_fit: return "degenerate-fit";
    case ErrorCode::degenerate_directions: return "degenerate-directions";
    case ErrorCode::io: return "io";
    }
    return "unknown";
}

namespace {

void read_env(const char* name, double& out) {
    const char* raw = std::getenv(name);
    if (raw == nullptr || *raw == '\0') return;
    char* end = nullptr;
    const double v = std::strtod(raw, &end);
    if (end == raw || *end != '\0' || !(v > 0.0))
        fail(ErrorCode::configuration, std::string("environment variable ") + name +
                                           " must be a positive number, got '" + raw + "'");
    out = v;
}

void read_env(const char* name, int& out) {
    double v = out;
    read_env(name, v);
    out = static_cast<int>(v);
}

} // namespace

Tolerances Tolerances::from_env() {
    Tolerances t;
    read_env("GWIRE_RHO", t.rho);
    read_env("GWIRE_EPS_PRIMAL", t.eps_primal);
    read_env("GWIRE_EPS_DUAL", t.eps_dual);
    read_env("GWIRE_MAX_ITER", t.admm_max_iter);
    read_env("GWIRE_PRECISION_ZERO", t.precision_zero);
    read_env("GWIRE_GLASSO_TOL", t.glasso_tol);
    read_env("GWIRE_GLASSO_MAX_ITER", t.glasso_max_iter);
    return t;
}

const Tolerances& default_tolerances() {
    static const Tolerances t{};
    return t;
}

} // namespace gwire
