#include "gwire/graph.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <set>

#include "gwire/error.hpp"

namespace gwire::graph {

NeighborhoodGraph::NeighborhoodGraph(std::vector<std::vector<Index>> neighbors, std::vector<double> weights)
    : neighbors_(std::move(neighbors)), weights_(std::move(weights)) {
    const Index p = static_cast<Index>(neighbors_.size());
    if (p < 1) fail(ErrorCode::invalid_input, "neighborhood graph needs at least one predictor");
    if (weights_.size() != neighbors_.size())
        fail(ErrorCode::invalid_input, "neighborhood graph: one weight per predictor required");
    for (Index i = 0; i < p; ++i) {
        const auto& ni = neighbors_[static_cast<std::size_t>(i)];
        if (!std::is_sorted(ni.begin(), ni.end()) || std::adjacent_find(ni.begin(), ni.end()) != ni.end())
            fail(ErrorCode::invalid_input, "neighborhood " + std::to_string(i) + " must be sorted without repeats");
        if (!std::binary_search(ni.begin(), ni.end(), i))
            fail(ErrorCode::invalid_input, "predictor " + std::to_string(i) + " is missing from its own neighborhood");
        for (Index j : ni) {
            if (j < 0 || j >= p) fail(ErrorCode::invalid_input, "neighbor index out of range");
            const auto& nj = neighbors_[static_cast<std::size_t>(j)];
            if (!std::binary_search(nj.begin(), nj.end(), i))
                fail(ErrorCode::invalid_input, "neighborhoods are not symmetric: " + std::to_string(j) + " in N_" +
                                                   std::to_string(i) + " but not the reverse");
        }
        const double w = weights_[static_cast<std::size_t>(i)];
        if (!(w > 0.0) || !std::isfinite(w))
            fail(ErrorCode::invalid_input, "group weight tau_" + std::to_string(i) + " must be positive");
    }
}

NeighborhoodGraph NeighborhoodGraph::singletons(Index p) {
    std::vector<std::vector<Index>> n(static_cast<std::size_t>(p));
    for (Index i = 0; i < p; ++i) n[static_cast<std::size_t>(i)] = {i};
    return NeighborhoodGraph(std::move(n), std::vector<double>(static_cast<std::size_t>(p), 1.0));
}

NeighborhoodGraph NeighborhoodGraph::from_adjacency(const std::vector<std::vector<Index>>& lists,
                                                    bool* symmetrized) {
    const Index p = static_cast<Index>(lists.size());
    std::vector<std::set<Index>> sets(lists.size());
    for (Index i = 0; i < p; ++i) {
        sets[static_cast<std::size_t>(i)].insert(i);
        for (Index j : lists[static_cast<std::size_t>(i)]) {
            if (j < 0 || j >= p)
                fail(ErrorCode::invalid_input, "adjacency list " + std::to_string(i) + " references predictor " +
                                                   std::to_string(j) + " outside [0, " + std::to_string(p) + ")");
            sets[static_cast<std::size_t>(i)].insert(j);
        }
    }
    bool added = false;
    for (Index i = 0; i < p; ++i)
        for (Index j : sets[static_cast<std::size_t>(i)])
            added |= sets[static_cast<std::size_t>(j)].insert(i).second;
    if (symmetrized != nullptr) *symmetrized = added;

    std::vector<std::vector<Index>> n(lists.size());
    std::vector<double> w(lists.size());
    for (std::size_t i = 0; i < lists.size(); ++i) {
        n[i].assign(sets[i].begin(), sets[i].end());
        w[i] = std::sqrt(static_cast<double>(n[i].size()));
    }
    return NeighborhoodGraph(std::move(n), std::move(w));
}

std::size_t NeighborhoodGraph::edge_count() const {
    std::size_t twice = 0;
    for (const auto& n : neighbors_) twice += n.size() - 1;
    return twice / 2;
}

WeightScheme weight_scheme_from_string(const std::string& name) {
    if (name == "sqrt-size") return WeightScheme::sqrt_size;
    if (name == "unit") return WeightScheme::unit;
    fail(ErrorCode::configuration, "unknown weight scheme '" + name + "' (expected sqrt-size or unit)");
}

NeighborhoodGraph neighborhoods_from_precision(const SymmetricMatrix& omega, double threshold) {
    if (!(threshold >= 0.0)) fail(ErrorCode::invalid_input, "precision threshold must be >= 0");
    const Index p = omega.dim();
    std::vector<std::vector<Index>> n(static_cast<std::size_t>(p));
    std::vector<double> w(static_cast<std::size_t>(p));
    for (Index i = 0; i < p; ++i) {
        auto& ni = n[static_cast<std::size_t>(i)];
        for (Index k = 0; k < p; ++k)
            if (k == i || std::abs(omega(k, i)) > threshold) ni.push_back(k);
        w[static_cast<std::size_t>(i)] = std::sqrt(static_cast<double>(ni.size()));
    }
    return NeighborhoodGraph(std::move(n), std::move(w));
}

NeighborhoodGraph tau_weights(const NeighborhoodGraph& graph, WeightScheme scheme) {
    std::vector<double> w(static_cast<std::size_t>(graph.p()));
    for (Index i = 0; i < graph.p(); ++i)
        w[static_cast<std::size_t>(i)] =
            scheme == WeightScheme::unit ? 1.0 : std::sqrt(static_cast<double>(graph.neighbors(i).size()));
    return NeighborhoodGraph(graph.all_neighbors(), std::move(w));
}

NeighborhoodGraph tau_weights(const NeighborhoodGraph& graph, const std::string& scheme) {
    return tau_weights(graph, weight_scheme_from_string(scheme));
}

double default_glasso_penalty(const SymmetricMatrix& sigma_hat, Index n) {
    if (n < 2) fail(ErrorCode::insufficient_data, "default glasso penalty needs n >= 2");
    const double p = static_cast<double>(sigma_hat.dim());
    const double rate = 2.0 * std::sqrt(std::log(std::max(p, 2.0)) / static_cast<double>(n));
    return rate * sigma_hat.matrix().diagonal().mean();
}

double glasso_objective(const SymmetricMatrix& sigma_hat, const SymmetricMatrix& omega, double penalty) {
    Eigen::LLT<Matrix> llt(omega.matrix());
    if (llt.info() != Eigen::Success) return std::numeric_limits<double>::infinity();
    const double logdet = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
    return -logdet + (sigma_hat.matrix().cwiseProduct(omega.matrix())).sum() +
           penalty * omega.matrix().cwiseAbs().sum();
}

namespace {

double soft(double z, double t) {
    if (z > t) return z - t;
    if (z < -t) return z + t;
    return 0.0;
}

// omega_jj = 1 / (w_jj - w_12^T beta), omega_12 = -beta omega_jj
SymmetricMatrix recover_precision(const Matrix& w, const Matrix& coef) {
    const Index p = w.rows();
    Matrix omega(p, p);
    for (Index j = 0; j < p; ++j) {
        const double ojj = 1.0 / (w(j, j) - w.col(j).dot(coef.col(j)));
        omega.col(j) = -coef.col(j) * ojj;
        omega(j, j) = ojj;
    }
    return SymmetricMatrix(std::move(omega));
}

} // namespace

GlassoResult glasso(const SymmetricMatrix& sigma_hat, double penalty, double tol, int max_iter) {
    const Index p = sigma_hat.dim();
    const Matrix& s = sigma_hat.matrix();
    if (!(penalty >= 0.0)) fail(ErrorCode::invalid_input, "glasso: penalty must be >= 0");
    if (!all_finite(s)) fail(ErrorCode::invalid_input, "glasso: non-finite covariance");
    for (Index i = 0; i < p; ++i)
        if (!(s(i, i) > 0.0)) fail(ErrorCode::invalid_input, "glasso: covariance diagonal must be positive");

    Matrix w = s;
    w.diagonal().array() += penalty;
    // coef.col(j) holds the lasso coefficients of column j against the others
    // (entry j unused and kept at zero); reused as a warm start every sweep.
    Matrix coef = Matrix::Zero(p, p);
    Vector grad(p);

    const double inner_tol = std::min(tol, 1e-6) * 1e-3;
    const int inner_max = 10000;

    GlassoResult out;
    out.objective.reserve(static_cast<std::size_t>(max_iter));
    for (int sweep = 1; sweep <= max_iter; ++sweep) {
        double biggest_change = 0.0;
        for (Index j = 0; j < p; ++j) {
            auto beta = coef.col(j);
            // grad_k = s_kj - sum_{l != j} w_kl beta_l, restricted to k != j
            grad = s.col(j) - w * beta;
            for (int pass = 0; pass < inner_max; ++pass) {
                double step = 0.0;
                for (Index k = 0; k < p; ++k) {
                    if (k == j) continue;
                    const double old = beta(k);
                    const double fresh = soft(grad(k) + w(k, k) * old, penalty) / w(k, k);
                    const double delta = fresh - old;
                    if (delta != 0.0) {
                        beta(k) = fresh;
                        grad.noalias() -= w.col(k) * delta;
                        step = std::max(step, std::abs(delta) * w(k, k));
                    }
                }
                if (step < inner_tol) break;
            }
            Vector w12 = w * beta;
            w12(j) = w(j, j);
            biggest_change = std::max(biggest_change, (w12 - w.col(j)).cwiseAbs().maxCoeff());
            w.col(j) = w12;
            w.row(j) = w12.transpose();
        }
        out.iterations = sweep;
        out.objective.push_back(glasso_objective(sigma_hat, recover_precision(w, coef), penalty));
        if (biggest_change < tol) {
            out.converged = true;
            break;
        }
    }

    out.precision = recover_precision(w, coef);
    out.covariance = SymmetricMatrix(std::move(w));
    return out;
}

nlohmann::json to_json(const NeighborhoodGraph& g) {
    nlohmann::json n = nlohmann::json::array();
    for (const auto& ni : g.all_neighbors()) n.push_back(ni);
    return {{"p", g.p()}, {"neighbors", n}, {"weights", g.weights()}};
}

NeighborhoodGraph graph_from_json(const nlohmann::json& j) {
    const nlohmann::json* lists = &j;
    if (j.is_object()) {
        if (!j.contains("neighbors")) fail(ErrorCode::invalid_input, "graph JSON needs a 'neighbors' array");
        lists = &j.at("neighbors");
    }
    if (!lists->is_array()) fail(ErrorCode::invalid_input, "graph JSON 'neighbors' must be an array of arrays");
    std::vector<std::vector<Index>> adj;
    adj.reserve(lists->size());
    for (const auto& row : *lists) {
        if (!row.is_array()) fail(ErrorCode::invalid_input, "graph JSON: every neighbor list must be an array");
        std::vector<Index> r;
        for (const auto& v : row) {
            if (!v.is_number_integer()) fail(ErrorCode::invalid_input, "graph JSON: neighbor indices must be integers");
            r.push_back(v.get<Index>());
        }
        adj.push_back(std::move(r));
    }
    bool symmetrized = false;
    NeighborhoodGraph g = NeighborhoodGraph::from_adjacency(adj, &symmetrized);
    if (symmetrized) std::cerr << "warning: neighbor lists were not symmetric; took the union\n";
    if (j.is_object() && j.contains("weights")) {
        auto w = j.at("weights").get<std::vector<double>>();
        return NeighborhoodGraph(g.all_neighbors(), std::move(w));
    }
    return g;
}

} // namespace gwire::graph
