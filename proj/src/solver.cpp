#include "gwire/solver.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "gwire/error.hpp"

namespace gwire::solver {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

Matrix sym(const Matrix& a) { return 0.5 * (a + a.transpose()); }

double group_scale(double norm, double threshold) {
    if (norm <= threshold || norm == 0.0) return 0.0;
    return 1.0 - threshold / norm;
}

/// Gauss-Seidel latent-group sweep given M = Theta + W.
void graphical_sweep(const Matrix& m, std::vector<Matrix>& blocks, Matrix& v, const graph::NeighborhoodGraph& g,
                     double lambda, double rho) {
    const Index p = g.p();
    Matrix u;
    auto update = [&](Index i) {
        const auto& rows = g.neighbors(i);
        Matrix& block = blocks[static_cast<std::size_t>(i)];
        const Index k = static_cast<Index>(rows.size());
        // U^i rows N_i = M - (V - V^(i)): other groups at their latest values
        u.resize(k, p);
        for (Index r = 0; r < k; ++r) u.row(r) = m.row(rows[r]) - v.row(rows[r]) + block.row(r);
        const double scale = group_scale(u.norm(), lambda * g.weight(i) / rho);
        for (Index r = 0; r < k; ++r) {
            const Eigen::RowVectorXd fresh = scale * u.row(r);
            v.row(rows[r]) += fresh - block.row(r);
            block.row(r) = fresh;
        }
    };
    for (Index i = 0; i < p; ++i)
        if (g.neighbors(i).size() > 1) update(i);
    for (Index i = 0; i < p; ++i)
        if (g.neighbors(i).size() == 1) update(i);

    // drop accumulated rounding from the running sum
    v.setZero();
    for (Index i = 0; i < p; ++i) {
        const auto& rows = g.neighbors(i);
        const Matrix& block = blocks[static_cast<std::size_t>(i)];
        for (Index r = 0; r < static_cast<Index>(rows.size()); ++r) v.row(rows[r]) += block.row(r);
    }
}

Matrix soft_threshold(const Matrix& u, double t) {
    return u.unaryExpr([t](double x) {
        if (x > t) return x - t;
        if (x < -t) return x + t;
        return 0.0;
    });
}

Matrix row_shrink(const Matrix& u, double t) {
    Matrix out(u.rows(), u.cols());
    for (Index i = 0; i < u.rows(); ++i) out.row(i) = group_scale(u.row(i).norm(), t) * u.row(i);
    return out;
}

/// P^T V P touching only the non-zero rows of V.
Matrix rotate_row_sparse(const Matrix& v, const Matrix& pm) {
    const std::vector<Index> rows = nonzero_rows(v);
    const Index p = v.rows();
    if (rows.empty()) return Matrix::Zero(p, p);
    if (2 * static_cast<Index>(rows.size()) > p) return pm.transpose() * (v * pm);
    const Index s = static_cast<Index>(rows.size());
    Matrix vs(s, p), ps(s, p);
    for (Index r = 0; r < s; ++r) {
        vs.row(r) = v.row(rows[r]);
        ps.row(r) = pm.row(rows[r]);
    }
    return ps.transpose() * (vs * pm);
}

bool is_graphical(const PenaltySpec& penalty) { return std::holds_alternative<Graphical>(penalty); }

void check_lambda(double lambda) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda))
        fail(ErrorCode::invalid_input, "lambda must be a finite non-negative number");
}

} // namespace

std::string penalty_name(const PenaltySpec& penalty) {
    return std::visit(overloaded{
                          [](const Graphical&) { return std::string("gwire"); },
                          [](const ElementwiseL1&) { return std::string("swire1"); },
                          [](const RowGroup&) { return std::string("swire2"); },
                      },
                      penalty);
}

AdmmConfig AdmmConfig::from(const Tolerances& t) {
    AdmmConfig c;
    c.rho = t.rho;
    c.eps_primal = t.eps_primal;
    c.eps_dual = t.eps_dual;
    c.max_iter = t.admm_max_iter;
    return c;
}

void AdmmConfig::validate() const {
    if (!(rho > 0.0) || !(eps_primal > 0.0) || !(eps_dual > 0.0) || max_iter < 1)
        fail(ErrorCode::configuration, "ADMM settings rho, eps_primal, eps_dual and max_iter must all be positive");
}

AdmmState AdmmState::zeros(Index p, const PenaltySpec& penalty) {
    AdmmState s;
    s.theta = Matrix::Zero(p, p);
    s.v = Matrix::Zero(p, p);
    s.w = Matrix::Zero(p, p);
    if (const auto* g = std::get_if<Graphical>(&penalty)) {
        if (g->graph.p() != p) fail(ErrorCode::shape, "graph size does not match the kernel dimension");
        s.blocks.reserve(static_cast<std::size_t>(p));
        for (Index i = 0; i < p; ++i)
            s.blocks.push_back(Matrix::Zero(static_cast<Index>(g->graph.neighbors(i).size()), p));
    }
    return s;
}

std::vector<Index> nonzero_rows(const Matrix& m) {
    std::vector<Index> rows;
    for (Index i = 0; i < m.rows(); ++i)
        if ((m.row(i).array() != 0.0).any()) rows.push_back(i);
    return rows;
}

Matrix shrink_weights(const Vector& eigenvalues, double rho) {
    const Index p = eigenvalues.size();
    Matrix c(p, p);
    for (Index j = 0; j < p; ++j)
        for (Index i = 0; i < p; ++i) {
            const double gg = eigenvalues(i) * eigenvalues(j);
            c(i, j) = gg / (gg + rho);
        }
    return c;
}

Matrix theta_update(const EigenDecomposition& sigma_eig, const SymmetricMatrix& lambda_hat, const Matrix& v_sym,
                    const Matrix& w, double rho) {
    const Matrix& pm = sigma_eig.vectors;
    const Matrix l = lambda_hat.matrix() / rho + v_sym - w;
    const Matrix c = shrink_weights(sigma_eig.values, rho);
    return l - pm * c.cwiseProduct(pm.transpose() * l * pm) * pm.transpose();
}

void graphical_v_update(AdmmState& state, const graph::NeighborhoodGraph& graph, double lambda, double rho) {
    graphical_sweep(state.theta + state.w, state.blocks, state.v, graph, lambda, rho);
}

Matrix l1_v_update(const AdmmState& state, double lambda, double rho) {
    return soft_threshold(state.theta + state.w, lambda / rho);
}

Matrix rowgroup_v_update(const AdmmState& state, double lambda, double rho) {
    return row_shrink(state.theta + state.w, lambda / rho);
}

AdmmSolver::AdmmSolver(const kernels::KernelEstimates& kernels, PenaltySpec penalty, AdmmConfig config)
    : sigma_(kernels.sigma_hat), lambda_hat_(kernels.lambda_hat), penalty_(std::move(penalty)), config_(config) {
    config_.validate();
    if (sigma_.dim() != lambda_hat_.dim())
        fail(ErrorCode::shape, "Sigma_hat and Lambda_hat differ in dimension");
    if (const auto* g = std::get_if<Graphical>(&penalty_); g != nullptr && g->graph.p() != sigma_.dim())
        fail(ErrorCode::shape, "graph has " + std::to_string(g->graph.p()) + " predictors but the kernels have " +
                                   std::to_string(sigma_.dim()));
    eig_ = sym_eig(sigma_);
    keep_ = Matrix::Ones(sigma_.dim(), sigma_.dim()) - shrink_weights(eig_.values, config_.rho);
    lambda_rotated_ = eig_.vectors.transpose() * lambda_hat_.matrix() * eig_.vectors;
    if (config_.scale_tolerances) {
        const double first = keep_.cwiseProduct(lambda_rotated_).norm() / config_.rho;
        scale_ = first > 0.0 ? first : 1.0;
    }
}

FitResult AdmmSolver::fit(double lambda, const AdmmState* warm) const {
    check_lambda(lambda);
    const Index p = sigma_.dim();
    const double rho = config_.rho;
    const Matrix& pm = eig_.vectors;
    const bool graphical = is_graphical(penalty_);
    const graph::NeighborhoodGraph* g = graphical ? &std::get<Graphical>(penalty_).graph : nullptr;

    AdmmState state = warm != nullptr ? *warm : AdmmState::zeros(p, penalty_);
    if (state.theta.rows() != p || state.w.rows() != p || state.v.rows() != p ||
        (graphical && state.blocks.size() != static_cast<std::size_t>(p)))
        fail(ErrorCode::shape, "warm-start state does not match the problem dimension");

    // Theta and W live in the eigenbasis of Sigma_hat during the iterations:
    // Theta = P D P^T and W = P Wt P^T, so the Theta step is elementwise.
    Matrix d = pm.transpose() * state.theta * pm;
    Matrix wt = pm.transpose() * state.w * pm;
    Matrix vt = rotate_row_sparse(state.v, pm);  // P^T V P
    Matrix m(p, p), half(p, p), dn(p, p), v_prev;

    bool converged = false;
    int k = 0;
    for (k = 1; k <= config_.max_iter; ++k) {
        dn = keep_.cwiseProduct(lambda_rotated_ / rho + 0.5 * (vt + vt.transpose()) - wt);
        const double dtheta = (dn - d).norm();
        d.swap(dn);

        half.noalias() = pm * (d + wt);
        m.noalias() = half * pm.transpose();  // Theta + W
        v_prev = state.v;
        if (graphical) {
            graphical_sweep(m, state.blocks, state.v, *g, lambda, rho);
        } else if (std::holds_alternative<ElementwiseL1>(penalty_)) {
            state.v = soft_threshold(m, lambda / rho);
        } else {
            state.v = row_shrink(m, lambda / rho);
        }
        const double dv = rho * (state.v - v_prev).norm();

        vt = rotate_row_sparse(state.v, pm);
        wt += d - (graphical ? sym(vt) : vt);

        if (!std::isfinite(dtheta) || !std::isfinite(dv) || !wt.allFinite())
            fail(ErrorCode::numerical_failure, "ADMM produced a non-finite iterate at iteration " + std::to_string(k));
        if (dtheta <= config_.eps_primal * scale_ && dv <= config_.eps_dual * scale_) {
            converged = true;
            break;
        }
    }

    state.theta = pm * d * pm.transpose();
    state.w = pm * wt * pm.transpose();
    state.iter = converged ? k : config_.max_iter;

    FitResult out;
    out.lambda = lambda;
    out.iterations = state.iter;
    out.converged = converged;
    out.active_set = nonzero_rows(state.v);

    Matrix b = state.v;
    std::vector<char> active(static_cast<std::size_t>(p), 0);
    for (Index i : out.active_set) active[static_cast<std::size_t>(i)] = 1;
    for (Index j = 0; j < p; ++j)
        if (!active[static_cast<std::size_t>(j)]) b.col(j).setZero();
    out.b_hat = SymmetricMatrix(std::move(b));
    out.eigenvalues = support_eigenvalues(out.b_hat, out.active_set);
    if (config_.compute_kkt)
        out.kkt_residual = kkt_check(out.b_hat, sigma_, lambda_hat_, penalty_, lambda, state.blocks);
    out.state = std::move(state);
    return out;
}

FitResult admm_fit(const kernels::KernelEstimates& kernels, const PenaltySpec& penalty, double lambda,
                   const AdmmConfig& config) {
    return AdmmSolver(kernels, penalty, config).fit(lambda);
}

namespace {

std::vector<Index> active_of(const SymmetricMatrix& b) { return nonzero_rows(b.matrix()); }

Matrix restrict(const Matrix& m, const std::vector<Index>& rows, const std::vector<Index>& cols) {
    Matrix out(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()));
    for (Index c = 0; c < out.cols(); ++c)
        for (Index r = 0; r < out.rows(); ++r) out(r, c) = m(rows[r], cols[c]);
    return out;
}

Matrix residual(const SymmetricMatrix& b_hat, const SymmetricMatrix& sigma_hat, const SymmetricMatrix& lambda_hat) {
    if (b_hat.dim() != sigma_hat.dim() || b_hat.dim() != lambda_hat.dim())
        fail(ErrorCode::shape, "kkt_check: matrix dimensions differ");
    const std::vector<Index> s = active_of(b_hat);
    if (s.empty()) return lambda_hat.matrix();
    // B is zero outside S x S, so Sigma B Sigma = Sigma_{:,S} B_SS Sigma_{S,:}
    const Index p = b_hat.dim();
    Matrix sig_s(p, static_cast<Index>(s.size()));
    for (Index c = 0; c < sig_s.cols(); ++c) sig_s.col(c) = sigma_hat.matrix().col(s[c]);
    const Matrix b_ss = restrict(b_hat.matrix(), s, s);
    return lambda_hat.matrix() - sig_s * b_ss * sig_s.transpose();
}

} // namespace

double kkt_check(const SymmetricMatrix& b_hat, const SymmetricMatrix& sigma_hat, const SymmetricMatrix& lambda_hat,
                 const graph::NeighborhoodGraph& graph, double lambda, const std::vector<Matrix>& blocks) {
    const Index p = b_hat.dim();
    if (graph.p() != p) fail(ErrorCode::shape, "kkt_check: graph size does not match B_hat");
    if (blocks.size() != static_cast<std::size_t>(p))
        fail(ErrorCode::requires_solver_state, "kkt_check: the solver's V^(i) decomposition blocks are required");
    const std::vector<Index> s = active_of(b_hat);
    const Matrix r = residual(b_hat, sigma_hat, lambda_hat);

    double worst = 0.0;
    for (Index i = 0; i < p; ++i) {
        const auto& rows = graph.neighbors(i);
        const Matrix& block = blocks[static_cast<std::size_t>(i)];
        if (block.rows() != static_cast<Index>(rows.size()) || block.cols() != p)
            fail(ErrorCode::requires_solver_state, "kkt_check: block " + std::to_string(i) + " has the wrong shape");
        const Matrix r_i = restrict(r, rows, s);
        Matrix v_i(block.rows(), static_cast<Index>(s.size()));
        for (Index c = 0; c < v_i.cols(); ++c) v_i.col(c) = block.col(s[c]);
        const double v_norm = v_i.norm();
        const double threshold = lambda * graph.weight(i);
        const double viol =
            v_norm > 0.0 ? (r_i - threshold * v_i / v_norm).norm() : std::max(0.0, r_i.norm() - threshold);
        worst = std::max(worst, viol);
    }
    return worst;
}

double kkt_check(const SymmetricMatrix& b_hat, const SymmetricMatrix& sigma_hat, const SymmetricMatrix& lambda_hat,
                 const PenaltySpec& penalty, double lambda, const std::vector<Matrix>& blocks) {
    if (const auto* g = std::get_if<Graphical>(&penalty))
        return kkt_check(b_hat, sigma_hat, lambda_hat, g->graph, lambda, blocks);
    const std::vector<Index> s = active_of(b_hat);
    const Matrix r = residual(b_hat, sigma_hat, lambda_hat);
    const Index p = b_hat.dim();
    std::vector<Index> all(static_cast<std::size_t>(p));
    for (Index i = 0; i < p; ++i) all[static_cast<std::size_t>(i)] = i;
    const Matrix r_s = restrict(r, all, s);
    const Matrix b_s = restrict(b_hat.matrix(), all, s);
    double worst = 0.0;
    if (std::holds_alternative<ElementwiseL1>(penalty)) {
        for (Index c = 0; c < r_s.cols(); ++c)
            for (Index i = 0; i < p; ++i) {
                const double bij = b_s(i, c);
                const double viol = bij != 0.0 ? std::abs(r_s(i, c) - lambda * (bij > 0 ? 1.0 : -1.0))
                                               : std::max(0.0, std::abs(r_s(i, c)) - lambda);
                worst = std::max(worst, viol);
            }
        return worst;
    }
    for (Index i = 0; i < p; ++i) {
        const double n = b_s.row(i).norm();
        const double viol = n > 0.0 ? (r_s.row(i) - lambda * b_s.row(i) / n).norm()
                                    : std::max(0.0, r_s.row(i).norm() - lambda);
        worst = std::max(worst, viol);
    }
    return worst;
}

double lambda_max(const SymmetricMatrix& lambda_hat, const graph::NeighborhoodGraph& graph) {
    if (graph.p() != lambda_hat.dim()) fail(ErrorCode::shape, "lambda_max: graph size does not match Lambda_hat");
    double best = 0.0;
    for (Index i = 0; i < graph.p(); ++i) {
        double sq = 0.0;
        for (Index r : graph.neighbors(i)) sq += lambda_hat.matrix().row(r).squaredNorm();
        best = std::max(best, std::sqrt(sq) / graph.weight(i));
    }
    return best;
}

double lambda_max(const SymmetricMatrix& lambda_hat, const PenaltySpec& penalty) {
    return std::visit(overloaded{
                          [&](const Graphical& g) { return lambda_max(lambda_hat, g.graph); },
                          [&](const ElementwiseL1&) { return lambda_hat.matrix().cwiseAbs().maxCoeff(); },
                          [&](const RowGroup&) { return lambda_hat.matrix().rowwise().norm().maxCoeff(); },
                      },
                      penalty);
}

Vector support_eigenvalues(const SymmetricMatrix& b_hat, const std::vector<Index>& active) {
    Vector values = Vector::Zero(b_hat.dim());
    if (active.empty()) return values;
    const Vector block = sym_eig(SymmetricMatrix(restrict(b_hat.matrix(), active, active))).values;
    values.head(block.size()) = block;
    std::sort(values.data(), values.data() + values.size(), std::greater<>());
    return values;
}

Directions extract_directions(const SymmetricMatrix& b_hat, Index d) {
    const Index p = b_hat.dim();
    if (d < 1 || d > p)
        fail(ErrorCode::configuration, "extract_directions: d = " + std::to_string(d) + " outside [1, " +
                                           std::to_string(p) + "]");
    // B_hat vanishes outside S x S: when the top d eigenvalues of that block
    // are positive they are the top d of B_hat, with vectors supported on S.
    const std::vector<Index> s = active_of(b_hat);
    if (static_cast<Index>(s.size()) >= d && 2 * static_cast<Index>(s.size()) <= p) {
        const EigenDecomposition block = sym_eig(SymmetricMatrix(restrict(b_hat.matrix(), s, s)));
        if (block.values(d - 1) > 0.0) {
            Matrix vectors = Matrix::Zero(p, d);
            for (Index r = 0; r < static_cast<Index>(s.size()); ++r) vectors.row(s[r]) = block.vectors.row(r).head(d);
            fix_signs(vectors);
            return {DirectionMatrix(std::move(vectors)), support_eigenvalues(b_hat, s)};
        }
    }
    EigenDecomposition eig = sym_eig(b_hat);
    return {DirectionMatrix(eig.vectors.leftCols(d)), std::move(eig.values)};
}

} // namespace gwire::solver
