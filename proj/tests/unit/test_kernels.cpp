#include <doctest.h>

#include <vector>

#include "gwire/kernels.hpp"
#include "gwire/metrics.hpp"
#include "expect.hpp"
#include "oracles.hpp"

using namespace gwire;
using namespace gwire::kernels;
namespace t = gwire::testing;
using gwire::testing::code_of;

namespace {

metrics::DistanceMatrix random_distances(Index n, std::uint64_t seed) {
    Matrix d = t::random_matrix(n, n, seed, 0.0, 3.0);
    d = (d + d.transpose()).eval();
    d.diagonal().setZero();
    return metrics::DistanceMatrix(d);
}

std::vector<double> to_vector(const Matrix& m) { return std::vector<double>(m.data(), m.data() + m.size()); }

} // namespace

TEST_SUITE("kernels") {

TEST_CASE("sample covariance") {
    CHECK(sample_covariance(Matrix::Ones(5, 3)).matrix() == Matrix::Zero(3, 3));
    Matrix x(2, 1);
    x << 1.0, -1.0;
    CHECK(sample_covariance(x)(0, 0) == doctest::Approx(1.0));
    const Matrix r = t::random_matrix(20, 4, 1);
    CHECK(t::max_abs(sample_covariance(r).matrix() - t::covariance_loop(r)) < 1e-12);
    CHECK(code_of([] { sample_covariance(Matrix::Ones(1, 3)); }) == ErrorCode::insufficient_data);
    const Matrix big = t::gaussian_matrix(30, 8, 2);
    CHECK(Eigen::SelfAdjointEigenSolver<Matrix>(sample_covariance(big).matrix()).eigenvalues().minCoeff() >= -1e-10);
}

TEST_CASE("wire kernel examples") {
    const Matrix x = t::random_matrix(6, 3, 4);
    CHECK(wire_kernel(x, metrics::DistanceMatrix(Matrix::Zero(6, 6))).matrix() == Matrix::Zero(3, 3));

    Matrix x2(2, 1);
    x2 << 1.0, -1.0;
    Matrix d2(2, 2);
    d2 << 0.0, 0.7, 0.7, 0.0;
    CHECK(wire_kernel(x2, metrics::DistanceMatrix(d2))(0, 0) == doctest::Approx(0.7));
}

TEST_CASE("wire kernel matches the double-loop oracle") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const Index n = 20 + static_cast<Index>(seed) * 6, p = 3 + static_cast<Index>(seed);
        const Matrix x = t::random_matrix(n, p, seed);
        const metrics::DistanceMatrix d = random_distances(n, seed + 100);
        CHECK(t::max_abs(wire_kernel(x, d).matrix() - t::wire_loop(x, d.matrix())) < 1e-10);
    }
}

TEST_CASE("wire kernel is invariant to shifting every row") {
    const Matrix x = t::random_matrix(25, 5, 8);
    const metrics::DistanceMatrix d = random_distances(25, 9);
    Matrix shifted = x;
    shifted.rowwise() += t::random_matrix(1, 5, 10, -50.0, 50.0).row(0);
    CHECK(t::max_abs(wire_kernel(x, d).matrix() - wire_kernel(shifted, d).matrix()) < 1e-9);
}

TEST_CASE("wire kernel shape errors") {
    CHECK(code_of([] { wire_kernel(Matrix::Ones(4, 2), metrics::DistanceMatrix(Matrix::Zero(3, 3))); }) ==
          ErrorCode::shape);
}

TEST_CASE("sir kernel examples") {
    Matrix x(4, 1);
    x << 1, 2, 3, 4;
    CHECK(sir_kernel(x, std::vector<double>{1, 2, 3, 4}, 2)(0, 0) == doctest::Approx(1.0));

    const Matrix r = t::random_matrix(12, 3, 5);
    const std::vector<double> constant(12, 2.0);
    Matrix same_rows(12, 3);
    same_rows.rowwise() = r.row(0);
    CHECK(t::max_abs(sir_kernel(same_rows, constant, 3).matrix()) < 1e-15);

    CHECK(code_of([&] { sir_kernel(r, constant, 1); }) == ErrorCode::invalid_slicing);
    CHECK(code_of([&] { sir_kernel(r, constant, 7); }) == ErrorCode::invalid_slicing);
}

TEST_CASE("sir kernel matches the slice-mean oracle") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const Index n = 23 + static_cast<Index>(seed) * 5, p = 2 + static_cast<Index>(seed);
        const Matrix x = t::random_matrix(n, p, seed);
        std::vector<double> y = to_vector(t::random_matrix(n, 1, seed + 50));
        y[3] = y[7];  // a tie
        for (int h : {2, 3, 5}) CHECK(t::max_abs(sir_kernel(x, y, h).matrix() - t::sir_loop(x, y, h)) < 1e-12);
    }
}

TEST_CASE("slice sizes spread the remainder over the first slices") {
    CHECK(slice_sizes(23, 5) == std::vector<Index>{5, 5, 5, 4, 4});
    CHECK(slice_sizes(20, 10) == std::vector<Index>(10, 2));
}

TEST_CASE("cume kernel examples") {
    Matrix same(5, 2);
    same.rowwise() = t::random_matrix(1, 2, 3).row(0);
    CHECK(t::max_abs(cume_kernel(same, std::vector<double>{1, 2, 3, 4, 5}).matrix()) < 1e-15);

    // m(1) = (1 - 0) / 2 = 0.5, m(2) = 0; kernel = (0.25 + 0) / 2
    Matrix x(2, 1);
    x << 1.0, -1.0;
    const double oracle = t::cume_loop(x, {1.0, 2.0})(0, 0);
    CHECK(oracle == doctest::Approx(0.125));
    CHECK(cume_kernel(x, std::vector<double>{1.0, 2.0})(0, 0) == doctest::Approx(oracle));
}

TEST_CASE("cume kernel matches the triple-loop oracle") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const Index n = 10 + static_cast<Index>(seed) * 8, p = 2 + static_cast<Index>(seed);
        const Matrix x = t::random_matrix(n, p, seed);
        std::vector<double> y = to_vector(t::random_matrix(n, 1, seed + 70));
        y[1] = y[2];
        CHECK(t::max_abs(cume_kernel(x, y).matrix() - t::cume_loop(x, y)) < 1e-12);
    }
}

TEST_CASE("kernel estimates bundle") {
    const Matrix x = t::random_matrix(30, 4, 12);
    const std::vector<double> y = to_vector(t::random_matrix(30, 1, 13));
    const KernelEstimates k = estimate_scalar(x, y, KernelKind::sir, 5);
    CHECK(k.n == 30);
    CHECK(k.kind == KernelKind::sir);
    CHECK(k.sigma_hat.dim() == 4);
    CHECK(code_of([&] { estimate_scalar(x, y, KernelKind::wire); }) == ErrorCode::configuration);
    CHECK(code_of([] { kernel_kind_from_string("save"); }) == ErrorCode::configuration);
    CHECK(code_of([&] { estimate_scalar(x, std::vector<double>(29, 0.0), KernelKind::cume); }) == ErrorCode::shape);
}

}
