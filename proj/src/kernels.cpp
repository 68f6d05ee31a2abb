#include "gwire/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "gwire/error.hpp"

namespace gwire::kernels {

std::string to_string(KernelKind kind) {
    switch (kind) {
    case KernelKind::wire: return "wire";
    case KernelKind::sir: return "sir";
    case KernelKind::cume: return "cume";
    }
    return "wire";
}

KernelKind kernel_kind_from_string(const std::string& name) {
    if (name == "wire") return KernelKind::wire;
    if (name == "sir") return KernelKind::sir;
    if (name == "cume") return KernelKind::cume;
    fail(ErrorCode::configuration, "unknown kernel '" + name + "' (expected wire, sir or cume)");
}

namespace {

Matrix centered(const Matrix& x) {
    return x.rowwise() - x.colwise().mean();
}

void require_rows(const Matrix& x, Index min_rows, const char* what) {
    if (x.rows() < min_rows)
        fail(ErrorCode::insufficient_data, std::string(what) + ": need at least " + std::to_string(min_rows) +
                                               " observations, got " + std::to_string(x.rows()));
    if (x.cols() < 1) fail(ErrorCode::shape, std::string(what) + ": predictor matrix has no columns");
    if (!all_finite(x)) fail(ErrorCode::invalid_input, std::string(what) + ": non-finite predictor values");
}

void require_response_length(const Matrix& x, std::size_t len, const char* what) {
    if (static_cast<Index>(len) != x.rows())
        fail(ErrorCode::shape, std::string(what) + ": " + std::to_string(len) + " responses for " +
                                   std::to_string(x.rows()) + " rows");
}

std::vector<Index> stable_order(std::span<const double> y) {
    std::vector<Index> order(y.size());
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return y[a] < y[b]; });
    return order;
}

} // namespace

SymmetricMatrix sample_covariance(const Matrix& x) {
    require_rows(x, 2, "sample_covariance");
    const Matrix xc = centered(x);
    Matrix s = Matrix::Zero(x.cols(), x.cols());
    s.selfadjointView<Eigen::Lower>().rankUpdate(xc.transpose(), 1.0 / static_cast<double>(x.rows()));
    s.triangularView<Eigen::StrictlyUpper>() = s.transpose();
    return SymmetricMatrix(std::move(s));
}

SymmetricMatrix wire_kernel(const Matrix& x, const metrics::DistanceMatrix& d) {
    require_rows(x, 2, "wire_kernel");
    if (d.size() != x.rows())
        fail(ErrorCode::shape, "wire_kernel: distance matrix is " + std::to_string(d.size()) + "x" +
                                   std::to_string(d.size()) + " but X has " + std::to_string(x.rows()) + " rows");
    const double n = static_cast<double>(x.rows());
    const Matrix xc = centered(x);
    Matrix lambda = -(xc.transpose() * (d.matrix() * xc)) / (n * (n - 1.0));
    return SymmetricMatrix(std::move(lambda));
}

std::vector<Index> slice_sizes(Index n, int slices) {
    if (slices < 2) fail(ErrorCode::invalid_slicing, "sir_kernel: need at least 2 slices");
    if (n < 2 * static_cast<Index>(slices))
        fail(ErrorCode::invalid_slicing, "sir_kernel: " + std::to_string(n) + " observations cannot fill " +
                                             std::to_string(slices) + " slices with at least 2 each");
    std::vector<Index> sizes(static_cast<std::size_t>(slices), n / slices);
    for (Index h = 0; h < n % slices; ++h) ++sizes[static_cast<std::size_t>(h)];
    return sizes;
}

SymmetricMatrix sir_kernel(const Matrix& x, std::span<const double> y, int slices) {
    require_rows(x, 2, "sir_kernel");
    require_response_length(x, y.size(), "sir_kernel");
    const std::vector<Index> sizes = slice_sizes(x.rows(), slices);
    const std::vector<Index> order = stable_order(y);
    const double n = static_cast<double>(x.rows());
    const Eigen::RowVectorXd mean = x.colwise().mean();

    Matrix weighted(static_cast<Index>(sizes.size()), x.cols());
    std::size_t pos = 0;
    for (std::size_t h = 0; h < sizes.size(); ++h) {
        Eigen::RowVectorXd slice_mean = Eigen::RowVectorXd::Zero(x.cols());
        for (Index k = 0; k < sizes[h]; ++k) slice_mean += x.row(order[pos++]);
        slice_mean /= static_cast<double>(sizes[h]);
        weighted.row(static_cast<Index>(h)) = std::sqrt(static_cast<double>(sizes[h]) / n) * (slice_mean - mean);
    }
    return SymmetricMatrix(Matrix(weighted.transpose() * weighted));
}

SymmetricMatrix cume_kernel(const Matrix& x, std::span<const double> y) {
    require_rows(x, 2, "cume_kernel");
    require_response_length(x, y.size(), "cume_kernel");
    const Index n = x.rows();
    const Matrix xc = centered(x);
    const std::vector<Index> order = stable_order(y);

    // m(y_j) for each distinct threshold, accumulated in sorted order; ties
    // share the value that includes every tied observation.
    Matrix m(n, x.cols());
    Eigen::RowVectorXd running = Eigen::RowVectorXd::Zero(x.cols());
    Index k = 0;
    while (k < n) {
        Index end = k;
        while (end < n && y[order[end]] == y[order[k]]) running += xc.row(order[end++]);
        for (Index t = k; t < end; ++t) m.row(t) = running / static_cast<double>(n);
        k = end;
    }
    return SymmetricMatrix(Matrix(m.transpose() * m / static_cast<double>(n)));
}

KernelEstimates estimate_wire(const Matrix& x, const metrics::DistanceMatrix& d) {
    return {sample_covariance(x), wire_kernel(x, d), x.rows(), KernelKind::wire};
}

KernelEstimates estimate_scalar(const Matrix& x, std::span<const double> y, KernelKind kind, int slices) {
    switch (kind) {
    case KernelKind::sir: return {sample_covariance(x), sir_kernel(x, y, slices), x.rows(), kind};
    case KernelKind::cume: return {sample_covariance(x), cume_kernel(x, y), x.rows(), kind};
    case KernelKind::wire: break;
    }
    fail(ErrorCode::configuration, "estimate_scalar: the wire kernel needs a distance matrix");
}

} // namespace gwire::kernels
