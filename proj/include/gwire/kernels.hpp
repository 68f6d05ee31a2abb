#pragma once

#include <span>
#include <string>
#include <vector>

#include "gwire/linalg.hpp"
#include "gwire/metrics.hpp"

namespace gwire::kernels {

enum class KernelKind { wire, sir, cume };

std::string to_string(KernelKind kind);
KernelKind kernel_kind_from_string(const std::string& name);

/// Sample covariance and SDR kernel matrix computed from one dataset.
struct KernelEstimates {
    SymmetricMatrix sigma_hat;
    SymmetricMatrix lambda_hat;
    Index n = 0;
    KernelKind kind = KernelKind::wire;
};

/// n^-1 sum (x_i - xbar)(x_i - xbar)^T. Requires n >= 2.
SymmetricMatrix sample_covariance(const Matrix& x);

/// -X_c^T D X_c / (n (n - 1)) with X_c the column-centered X. D's zero
/// diagonal makes this equal to the U-statistic over i != j.
SymmetricMatrix wire_kernel(const Matrix& x, const metrics::DistanceMatrix& d);

/**
 * Sliced inverse regression kernel sum_h (n_h / n)(xbar_h - xbar)(xbar_h - xbar)^T.
 * Slices follow the stable sorted order of y with near-equal counts; the
 * first n mod H slices get one extra observation.
 */
SymmetricMatrix sir_kernel(const Matrix& x, std::span<const double> y, int slices);

/// Cumulative mean kernel n^-1 sum_j m(y_j) m(y_j)^T with
/// m(t) = n^-1 sum_i (x_i - xbar) 1{y_i <= t}.
SymmetricMatrix cume_kernel(const Matrix& x, std::span<const double> y);

/// Slice sizes used by sir_kernel for n observations and H slices.
std::vector<Index> slice_sizes(Index n, int slices);

KernelEstimates estimate_wire(const Matrix& x, const metrics::DistanceMatrix& d);
KernelEstimates estimate_scalar(const Matrix& x, std::span<const double> y, KernelKind kind, int slices = 10);

} // namespace gwire::kernels
