#include <doctest.h>

#include <cmath>

#include "gwire/graph.hpp"
#include "gwire/kernels.hpp"
#include "gwire/synthetic.hpp"
#include "expect.hpp"
#include "oracles.hpp"

using namespace gwire;
using namespace gwire::graph;
namespace t = gwire::testing;
using gwire::testing::code_of;

TEST_SUITE("graph") {

TEST_CASE("diagonal precision gives singletons") {
    const NeighborhoodGraph g = neighborhoods_from_precision(SymmetricMatrix(Matrix(Vector::LinSpaced(4, 1, 4).asDiagonal())));
    for (Index i = 0; i < 4; ++i) {
        CHECK(g.neighbors(i) == std::vector<Index>{i});
        CHECK(g.weight(i) == 1.0);
    }
    CHECK(g.edge_count() == 0);
}

TEST_CASE("Omega^(1) neighborhoods are five 5-cliques then singletons") {
    const NeighborhoodGraph g = neighborhoods_from_precision(synthetic::precision(synthetic::CovarianceKind::sigma1, 40));
    for (Index i = 0; i < 25; ++i) {
        std::vector<Index> clique;
        for (Index k = 5 * (i / 5); k < 5 * (i / 5) + 5; ++k) clique.push_back(k);
        CHECK(g.neighbors(i) == clique);
        CHECK(g.weight(i) == doctest::Approx(std::sqrt(5.0)));
    }
    for (Index i = 25; i < 40; ++i) CHECK(g.neighbors(i) == std::vector<Index>{i});
}

TEST_CASE("Omega^(2) adds the 5-6 and 10-11 links") {
    const NeighborhoodGraph g1 = neighborhoods_from_precision(synthetic::precision(synthetic::CovarianceKind::sigma1, 30));
    const NeighborhoodGraph g2 = neighborhoods_from_precision(synthetic::precision(synthetic::CovarianceKind::sigma2, 30));
    CHECK(g2.edge_count() == g1.edge_count() + 2);
    auto has = [&](Index i, Index j) {
        const auto& n = g2.neighbors(i);
        return std::find(n.begin(), n.end(), j) != n.end();
    };
    CHECK(has(4, 5));
    CHECK(has(5, 4));
    CHECK(has(9, 10));
    CHECK(has(10, 9));
    CHECK(g2.neighbors(4).size() == 6);
}

TEST_CASE("graph invariants and symmetrization") {
    CHECK(code_of([] { NeighborhoodGraph({{0, 1}, {1}}, {1.0, 1.0}); }) == ErrorCode::invalid_input);
    CHECK(code_of([] { NeighborhoodGraph({{1}, {1}}, {1.0, 1.0}); }) == ErrorCode::invalid_input);
    CHECK(code_of([] { NeighborhoodGraph({{0}, {1}}, {1.0, 0.0}); }) == ErrorCode::invalid_input);
    bool sym = false;
    const NeighborhoodGraph g = NeighborhoodGraph::from_adjacency({{2}, {}, {}}, &sym);
    CHECK(sym);
    CHECK(g.neighbors(0) == std::vector<Index>{0, 2});
    CHECK(g.neighbors(2) == std::vector<Index>{0, 2});
    CHECK(g.weight(0) == doctest::Approx(std::sqrt(2.0)));
    const NeighborhoodGraph back = graph_from_json(to_json(g));
    CHECK(back.all_neighbors() == g.all_neighbors());
}

TEST_CASE("tau weights") {
    const NeighborhoodGraph g = NeighborhoodGraph::from_adjacency({{1, 2, 3, 4}, {}, {}, {}, {}, {}});
    const NeighborhoodGraph s = tau_weights(g, "sqrt-size");
    CHECK(s.weight(0) == doctest::Approx(std::sqrt(5.0)));
    CHECK(s.weight(5) == 1.0);
    const NeighborhoodGraph u = tau_weights(g, "unit");
    for (double w : u.weights()) CHECK(w == 1.0);
    CHECK(code_of([&] { tau_weights(g, "log"); }) == ErrorCode::configuration);
}

TEST_CASE("glasso on a diagonal covariance") {
    Matrix s = Matrix::Zero(3, 3);
    s.diagonal() << 1.0, 2.0, 0.5;
    const GlassoResult r = glasso(SymmetricMatrix(s), 0.1);
    CHECK(r.converged);
    for (Index i = 0; i < 3; ++i) {
        CHECK(r.precision(i, i) == doctest::Approx(1.0 / (s(i, i) + 0.1)));
        for (Index j = 0; j < 3; ++j)
            if (i != j) CHECK(r.precision(i, j) == 0.0);
    }
}

TEST_CASE("glasso with penalty above every off-diagonal is diagonal") {
    const Matrix s = t::random_spd(5, 3);
    double off = 0.0;
    for (Index i = 0; i < 5; ++i)
        for (Index j = 0; j < 5; ++j)
            if (i != j) off = std::max(off, std::abs(s(i, j)));
    const GlassoResult r = glasso(SymmetricMatrix(s), off);
    for (Index i = 0; i < 5; ++i)
        for (Index j = 0; j < 5; ++j)
            if (i != j) CHECK(r.precision(i, j) == 0.0);
}

TEST_CASE("glasso matches a proximal-gradient oracle on a 3x3 instance") {
    Matrix s(3, 3);
    s << 1.0, 0.5, 0.2, 0.5, 1.2, -0.3, 0.2, -0.3, 0.9;
    const GlassoResult r = glasso(SymmetricMatrix(s), 0.1, 1e-10, 5000);
    const Matrix oracle = t::glasso_proximal_gradient(s, 0.1);
    CHECK(t::max_abs(r.precision.matrix() - oracle) < 1e-4);
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const Matrix sr = t::random_spd(3, seed);
        CHECK(t::max_abs(glasso(SymmetricMatrix(sr), 0.1, 1e-10, 5000).precision.matrix() -
                         t::glasso_proximal_gradient(sr, 0.1)) < 1e-4);
    }
}

TEST_CASE("glasso with zero penalty inverts a well-conditioned covariance") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const Matrix s = t::random_spd(8, seed, 1.0);
        const GlassoResult r = glasso(SymmetricMatrix(s), 0.0, 1e-12, 5000);
        CHECK(t::max_abs(r.precision.matrix() - s.inverse()) < 1e-6);
    }
}

TEST_CASE("glasso objective does not increase across sweeps") {
    const Matrix x = t::gaussian_matrix(40, 10, 4);
    const SymmetricMatrix s = kernels::sample_covariance(x);
    const GlassoResult r = glasso(s, 0.05);
    REQUIRE(r.objective.size() >= 2);
    for (std::size_t k = 1; k < r.objective.size(); ++k) CHECK(r.objective[k] <= r.objective[k - 1] + 1e-10);
    CHECK(r.objective.back() == doctest::Approx(glasso_objective(s, r.precision, 0.05)));
    CHECK(Eigen::LLT<Matrix>(r.precision.matrix()).info() == Eigen::Success);
}

TEST_CASE("glasso input errors and non-convergence") {
    Matrix s = Matrix::Identity(2, 2);
    s(1, 1) = 0.0;
    CHECK(code_of([&] { glasso(SymmetricMatrix(s), 0.1); }) == ErrorCode::invalid_input);
    CHECK(code_of([] { glasso(SymmetricMatrix::identity(2), -1.0); }) == ErrorCode::invalid_input);
    const Matrix x = t::gaussian_matrix(20, 6, 5);
    const GlassoResult r = glasso(kernels::sample_covariance(x), 0.01, 1e-14, 1);
    CHECK_FALSE(r.converged);
    CHECK(r.iterations == 1);
}

TEST_CASE("default glasso penalty") {
    const SymmetricMatrix s = SymmetricMatrix::identity(100);
    CHECK(default_glasso_penalty(s, 400) == doctest::Approx(2.0 * std::sqrt(std::log(100.0) / 400.0)));
    CHECK(code_of([&] { default_glasso_penalty(s, 1); }) == ErrorCode::insufficient_data);
}

}
