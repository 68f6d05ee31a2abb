#include "gwire/linalg.hpp"

#include <cmath>
#include <string>

#include "gwire/config.hpp"
#include "gwire/error.hpp"
#include "gwire/random.hpp"

namespace gwire {

SymmetricMatrix::SymmetricMatrix(const Matrix& a) : SymmetricMatrix(Matrix(a)) {}

SymmetricMatrix::SymmetricMatrix(Matrix&& a) : m_(std::move(a)) {
    if (m_.rows() != m_.cols())
        fail(ErrorCode::shape, "symmetric matrix must be square, got " +
                                   std::to_string(m_.rows()) + "x" + std::to_string(m_.cols()));
    if (m_.rows() < 1) fail(ErrorCode::shape, "symmetric matrix must have dim >= 1");
    const Index p = m_.rows();
    for (Index j = 0; j < p; ++j) {
        for (Index i = j + 1; i < p; ++i) {
            const double v = 0.5 * (m_(i, j) + m_(j, i));
            m_(i, j) = v;
            m_(j, i) = v;
        }
    }
}

SymmetricMatrix SymmetricMatrix::identity(Index p) { return SymmetricMatrix(Matrix::Identity(p, p)); }
SymmetricMatrix SymmetricMatrix::zero(Index p) { return SymmetricMatrix(Matrix::Zero(p, p)); }

DirectionMatrix::DirectionMatrix(Matrix columns) : cols_(std::move(columns)) {
    if (cols_.cols() < 1 || cols_.cols() > cols_.rows())
        fail(ErrorCode::shape, "direction matrix needs 1 <= d <= p, got p=" +
                                   std::to_string(cols_.rows()) + " d=" + std::to_string(cols_.cols()));
}

bool all_finite(const Matrix& a) { return a.allFinite(); }

void fix_signs(Matrix& vectors) {
    const double tie = default_tolerances().sign_tie_relative;
    for (Index c = 0; c < vectors.cols(); ++c) {
        auto col = vectors.col(c);
        const double biggest = col.cwiseAbs().maxCoeff();
        if (biggest == 0.0) continue;
        for (Index r = 0; r < col.size(); ++r) {
            if (std::abs(col(r)) >= biggest * (1.0 - tie)) {
                if (col(r) < 0.0) col = -col;
                break;
            }
        }
    }
}

EigenDecomposition sym_eig(const SymmetricMatrix& a) {
    if (!all_finite(a.matrix())) fail(ErrorCode::invalid_input, "sym_eig: non-finite entries");
    Eigen::SelfAdjointEigenSolver<Matrix> solver(a.matrix());
    if (solver.info() != Eigen::Success)
        fail(ErrorCode::decomposition, "sym_eig: eigensolver did not converge");
    // Eigen returns ascending order; flip to non-increasing.
    EigenDecomposition out;
    out.values = solver.eigenvalues().reverse();
    out.vectors = solver.eigenvectors().rowwise().reverse();
    fix_signs(out.vectors);
    return out;
}

SymmetricMatrix sym_inv_sqrt(const SymmetricMatrix& m) {
    const EigenDecomposition eig = sym_eig(m);
    const double floor = default_tolerances().singular_eigenvalue;
    if (eig.values.minCoeff() <= floor)
        fail(ErrorCode::singular_matrix,
             "sym_inv_sqrt: matrix is not positive definite (min eigenvalue " +
                 std::to_string(eig.values.minCoeff()) + ")");
    const Vector scale = eig.values.cwiseSqrt().cwiseInverse();
    return SymmetricMatrix(Matrix(eig.vectors * scale.asDiagonal() * eig.vectors.transpose()));
}

MatrixNorms norms(const Matrix& a) {
    if (!all_finite(a)) fail(ErrorCode::invalid_input, "norms: non-finite entries");
    MatrixNorms n;
    if (a.size() == 0) return n;
    n.frobenius = a.norm();
    n.max_abs = a.cwiseAbs().maxCoeff();
    n.row_sum_inf = a.cwiseAbs().rowwise().sum().maxCoeff();
    return n;
}

Matrix cholesky_sample(const SymmetricMatrix& sigma, Index n, std::uint64_t seed) {
    const Index p = sigma.dim();
    if (n < 0) fail(ErrorCode::invalid_input, "cholesky_sample: negative sample count");
    Eigen::LLT<Matrix> llt(sigma.matrix());
    if (llt.info() != Eigen::Success)
        fail(ErrorCode::decomposition, "cholesky_sample: covariance is not positive definite");
    Matrix z(n, p);
    Rng rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < p; ++j) z(i, j) = normal(rng);
    // rows z_i ~ N(0, I)  =>  z_i L^T ~ N(0, L L^T)
    return z * llt.matrixL().transpose();
}

} // namespace gwire
