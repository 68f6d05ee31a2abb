#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gwire/graph.hpp"
#include "gwire/metrics.hpp"
#include "gwire/selection.hpp"
#include "gwire/solver.hpp"
#include "gwire/synthetic.hpp"
#include "expect.hpp"
#include "oracles.hpp"

using namespace gwire;
using namespace gwire::selection;
namespace t = gwire::testing;
using gwire::testing::code_of;

namespace {

struct Ex1 {
    synthetic::SimulatedData data;
    metrics::DistanceMatrix d;
    graph::NeighborhoodGraph g;
};

Ex1 example1(Index n, Index p, std::uint64_t seed, double noise = 0.1) {
    synthetic::ScenarioSpec spec;
    spec.n = n;
    spec.p = p;
    Ex1 e{synthetic::gen_example1(spec, seed, noise), {}, {}};
    e.d = metrics::pairwise_distances(e.data.responses, false);
    e.g = graph::neighborhoods_from_precision(synthetic::precision(synthetic::CovarianceKind::sigma1, p));
    return e;
}

Matrix rows_of(const Matrix& m, const std::vector<Index>& rows) {
    Matrix out(static_cast<Index>(rows.size()), m.cols());
    for (std::size_t r = 0; r < rows.size(); ++r) out.row(static_cast<Index>(r)) = m.row(rows[r]);
    return out;
}

Matrix sub_square(const Matrix& m, const std::vector<Index>& rows) {
    Matrix out(static_cast<Index>(rows.size()), static_cast<Index>(rows.size()));
    for (std::size_t a = 0; a < rows.size(); ++a)
        for (std::size_t b = 0; b < rows.size(); ++b) out(static_cast<Index>(a), static_cast<Index>(b)) = m(rows[a], rows[b]);
    return out;
}

solver::AdmmConfig tight() {
    solver::AdmmConfig c;
    c.eps_primal = 1e-10;
    c.eps_dual = 1e-10;
    c.max_iter = 100000;
    c.scale_tolerances = false;
    return c;
}

} // namespace

TEST_SUITE("selection") {

TEST_CASE("fold assignment sizes and determinism") {
    const std::vector<int> a = fold_assignment(23, 5, 9);
    std::vector<int> count(5, 0);
    for (int f : a) ++count[static_cast<std::size_t>(f)];
    CHECK(count == std::vector<int>{5, 5, 5, 4, 4});
    CHECK(a == fold_assignment(23, 5, 9));
    CHECK(a != fold_assignment(23, 5, 10));
    CHECK(code_of([] { fold_assignment(10, 1, 0); }) == ErrorCode::configuration);
    CHECK(code_of([] { fold_assignment(3, 5, 0); }) == ErrorCode::configuration);
}

TEST_CASE("lambda grid") {
    const std::vector<double> g = lambda_grid(2.0, 30, 0.05);
    REQUIRE(g.size() == 30);
    CHECK(g.front() == 0.1);
    CHECK(g.back() == 2.0);
    for (std::size_t k = 1; k < g.size(); ++k) {
        CHECK(g[k] > g[k - 1]);
        CHECK(std::log(g[k] / g[k - 1]) == doctest::Approx(std::log(20.0) / 29.0));
    }
    CHECK(lambda_grid(3.0, 1) == std::vector<double>{3.0});
    CHECK(code_of([] { lambda_grid(0.0); }) == ErrorCode::degenerate_fit);
    CHECK(code_of([] { lambda_grid(1.0, 0); }) == ErrorCode::configuration);
    CHECK(code_of([] { lambda_grid(1.0, 5, 1.5); }) == ErrorCode::configuration);
}

TEST_CASE("standardize directions") {
    const Matrix s = t::random_spd(6, 3);
    const Matrix b = t::random_matrix(6, 2, 4);
    const Matrix z = standardize_directions(DirectionMatrix(b), SymmetricMatrix(s)).columns();
    CHECK(t::max_abs(z.transpose() * s * z - Matrix::Identity(2, 2)) < 1e-10);
    // z = b M with M symmetric positive definite
    const Matrix m = b.colPivHouseholderQr().solve(z);
    CHECK(t::max_abs(m - m.transpose()) < 1e-10);
    CHECK(Eigen::SelfAdjointEigenSolver<Matrix>(m).eigenvalues().minCoeff() > 0.0);
    const Matrix again = standardize_directions(DirectionMatrix(z), SymmetricMatrix(s)).columns();
    CHECK(t::max_abs(again - z) < 1e-10);

    Vector e = Vector::Zero(3);
    e(1) = 2.0;
    CHECK(t::max_abs(standardize_directions(DirectionMatrix(Matrix(e)), SymmetricMatrix::identity(3)).columns() -
                     Matrix(e / 2.0)) < 1e-14);

    Matrix dup(6, 2);
    dup.col(0) = b.col(0);
    dup.col(1) = b.col(0);
    CHECK(code_of([&] { standardize_directions(DirectionMatrix(dup), SymmetricMatrix(s)); }) ==
          ErrorCode::degenerate_directions);
    CHECK(code_of([&] { standardize_directions(DirectionMatrix(b), SymmetricMatrix::identity(5)); }) ==
          ErrorCode::shape);
}

TEST_CASE("nonzero eigenvalue count") {
    Vector v(4);
    v << 2.0, -1e-3, 1e-14, 0.0;
    CHECK(nonzero_eigenvalue_count(v) == 2);
    CHECK(nonzero_eigenvalue_count(v, 1e-2) == 1);
}

TEST_CASE("kernel builder subsets match loop kernels on the selected rows") {
    const Ex1 e = example1(40, 25, 3);
    const KernelBuilder kb = KernelBuilder::wire(e.data.x, e.d);
    const std::vector<Index> rows{3, 3, 7, 0, 39, 12, 12, 12, 5, 20};
    const kernels::KernelEstimates k = kb.subset(rows);
    const Matrix xs = rows_of(e.data.x, rows);
    CHECK(t::max_abs(k.sigma_hat.matrix() - t::covariance_loop(xs)) < 1e-12);
    CHECK(t::max_abs(k.lambda_hat.matrix() - t::wire_loop(xs, sub_square(e.d.matrix(), rows))) < 1e-12);
    CHECK(k.n == 10);
}

TEST_CASE("cross-validation scores match an independent per-fold computation") {
    const Ex1 e = example1(60, 25, 5);
    const KernelBuilder kb = KernelBuilder::wire(e.data.x, e.d);
    const solver::PenaltySpec pen = solver::Graphical{e.g};
    CvOptions opt;
    opt.folds = 3;
    opt.grid_size = 4;
    opt.min_ratio = 0.2;
    opt.seed = 17;
    opt.admm = tight();
    const CvResult cv = cross_validate(kb, pen, 1, opt);
    REQUIRE(cv.scores.size() == 4);

    const std::vector<int> label = fold_assignment(60, 3, 17);
    const double lmax = solver::lambda_max(SymmetricMatrix(t::wire_loop(e.data.x, e.d.matrix())), e.g);
    CHECK(cv.lambda_max == doctest::Approx(lmax).epsilon(1e-12));
    for (std::size_t g = 0; g < 4; ++g) {
        double sum = 0.0;
        bool finite = true;
        for (int f = 0; f < 3; ++f) {
            std::vector<Index> train, held;
            for (Index i = 0; i < 60; ++i) (label[static_cast<std::size_t>(i)] == f ? held : train).push_back(i);
            const Matrix xt = rows_of(e.data.x, train), xh = rows_of(e.data.x, held);
            const kernels::KernelEstimates kt{SymmetricMatrix(t::covariance_loop(xt)),
                                              SymmetricMatrix(t::wire_loop(xt, sub_square(e.d.matrix(), train))),
                                              static_cast<Index>(train.size()), kernels::KernelKind::wire};
            const Matrix lh = t::wire_loop(xh, sub_square(e.d.matrix(), held));
            const solver::FitResult fit = solver::admm_fit(kt, pen, cv.lambda_grid[g], tight());
            if (nonzero_eigenvalue_count(fit.eigenvalues, 1e-10) < 1) {
                finite = false;
                continue;
            }
            // leading eigenvector, scaled to unit Sigma-norm
            Eigen::SelfAdjointEigenSolver<Matrix> es(fit.b_hat.matrix());
            Vector v = es.eigenvectors().col(es.eigenvalues().size() - 1);
            v /= std::sqrt(v.dot(kt.sigma_hat.matrix() * v));
            sum += -v.dot(lh * v);
        }
        if (finite) CHECK(cv.scores[g] == doctest::Approx(sum / 3.0).epsilon(1e-5));
        else CHECK(std::isinf(cv.scores[g]));
    }
    const auto best = std::min_element(cv.scores.begin(), cv.scores.end());
    CHECK(cv.chosen_lambda == cv.lambda_grid[static_cast<std::size_t>(best - cv.scores.begin())]);
}

TEST_CASE("cross-validation is independent of the job count") {
    const Ex1 e = example1(80, 25, 6);
    const KernelBuilder kb = KernelBuilder::wire(e.data.x, e.d);
    CvOptions opt;
    opt.folds = 4;
    opt.grid_size = 6;
    opt.seed = 2;
    const CvResult one = cross_validate(kb, solver::Graphical{e.g}, 1, opt);
    opt.jobs = 3;
    const CvResult three = cross_validate(kb, solver::Graphical{e.g}, 1, opt);
    CHECK(one.scores == three.scores);
    CHECK(one.chosen_lambda == three.chosen_lambda);
}

TEST_CASE("cross-validation with a constant response is degenerate") {
    const Ex1 e = example1(30, 25, 7);
    const metrics::DistanceMatrix zero(Matrix::Zero(30, 30));
    CHECK(code_of([&] { cross_validate(KernelBuilder::wire(e.data.x, zero), solver::Graphical{e.g}, 1); }) ==
          ErrorCode::degenerate_fit);
}

TEST_CASE("ladle recovers d = 1 on noiseless Example 1 data") {
    const Ex1 e = example1(300, 50, 11, 0.0);
    LadleOptions opt;
    opt.boot = 40;
    opt.seed = 4;
    const LadleResult r = ladle(KernelBuilder::wire(e.data.x, e.d), solver::Graphical{e.g}, opt);
    CHECK(r.d_hat == 1);
    CHECK(r.bootstrap_count == 40);
    REQUIRE(r.f_values.size() == r.active_set.size());
    CHECK(r.f_values[0] == 0.0);
    for (std::size_t k = 0; k < r.f_values.size(); ++k) {
        CHECK(r.f_values[k] >= 0.0);
        CHECK(r.h_values[k] >= 0.0);
        if (k > 0) CHECK(r.eigenvalues[k] <= r.eigenvalues[k - 1]);
    }
    const double phi = std::accumulate(r.eigenvalues.begin(), r.eigenvalues.end(), 0.0);
    const double hsum = std::accumulate(r.h_values.begin(), r.h_values.end(), 0.0);
    CHECK(hsum == doctest::Approx(phi / (1.0 + phi)));
    std::vector<double> g(r.f_values.size());
    for (std::size_t k = 0; k < g.size(); ++k) g[k] = r.f_values[k] + r.h_values[k];
    CHECK(static_cast<Index>(std::min_element(g.begin(), g.end()) - g.begin()) == r.d_hat);

    opt.jobs = 4;
    const LadleResult again = ladle(KernelBuilder::wire(e.data.x, e.d), solver::Graphical{e.g}, opt);
    CHECK(again.f_values == r.f_values);
    CHECK(again.d_hat == r.d_hat);
}

TEST_CASE("ladle errors") {
    const Ex1 e = example1(40, 25, 12);
    const KernelBuilder kb = KernelBuilder::wire(e.data.x, e.d);
    LadleOptions opt;
    opt.boot = 0;
    CHECK(code_of([&] { ladle(kb, solver::Graphical{e.g}, opt); }) == ErrorCode::configuration);
    opt.boot = 5;
    opt.pilot_fraction = 1.0;
    CHECK(code_of([&] { ladle(kb, solver::Graphical{e.g}, opt); }) == ErrorCode::degenerate_fit);
}

}
