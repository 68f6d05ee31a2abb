#pragma once

#include <cstdint>

#include <Eigen/Dense>

namespace gwire {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Dense p x p symmetric matrix. Construction symmetrizes as (A + A^T) / 2,
/// so entries(i, j) == entries(j, i) holds bit for bit.
class SymmetricMatrix {
public:
    SymmetricMatrix() = default;
    explicit SymmetricMatrix(const Matrix& a);
    explicit SymmetricMatrix(Matrix&& a);

    static SymmetricMatrix identity(Index p);
    static SymmetricMatrix zero(Index p);

    Index dim() const noexcept { return m_.rows(); }
    const Matrix& matrix() const noexcept { return m_; }
    double operator()(Index i, Index j) const { return m_(i, j); }

    operator const Matrix&() const noexcept { return m_; }

private:
    Matrix m_;
};

/// Spectral decomposition with eigenvalues in non-increasing order and
/// eigenvector columns sign-fixed (largest-magnitude entry non-negative,
/// ties resolved at the lowest index).
struct EigenDecomposition {
    Matrix vectors;
    Vector values;
};

/// p x d matrix of directions, 1 <= d <= p.
class DirectionMatrix {
public:
    DirectionMatrix() = default;
    explicit DirectionMatrix(Matrix columns);

    Index dim() const noexcept { return cols_.rows(); }
    Index rank() const noexcept { return cols_.cols(); }
    const Matrix& columns() const noexcept { return cols_; }

private:
    Matrix cols_;
};

struct MatrixNorms {
    double frobenius = 0.0;
    double max_abs = 0.0;
    double row_sum_inf = 0.0;
};

EigenDecomposition sym_eig(const SymmetricMatrix& a);

/// Flips each column so its largest-magnitude entry is non-negative.
void fix_signs(Matrix& vectors);

/// R with R M R = I. Throws singular_matrix when an eigenvalue is <= 1e-12.
SymmetricMatrix sym_inv_sqrt(const SymmetricMatrix& m);

MatrixNorms norms(const Matrix& a);

/// n draws from N(0, sigma), one per row. Deterministic in `seed`.
Matrix cholesky_sample(const SymmetricMatrix& sigma, Index n, std::uint64_t seed);

bool all_finite(const Matrix& a);

} // namespace gwire
