#pragma once

#include <span>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "gwire/linalg.hpp"

namespace gwire::metrics {

struct EuclideanVector {
    std::vector<double> values;
};

/// Point on the unit sphere; |norm - 1| <= 1e-8 is enforced by make_sphere_point.
struct SpherePoint {
    std::vector<double> values;
};

/// Quantile function sampled on a strictly increasing grid in (0, 1).
struct QuantileFunction {
    std::vector<double> grid;
    std::vector<double> values;
};

/// Probability mass function on a fixed finite support.
struct DiscretePmf {
    std::vector<double> probabilities;
};

/// N(mu, sigma^2) summarised by its two parameters.
struct GaussianLocation {
    double mu = 0.0;
    double sigma = 1.0;
};

using ResponseObject =
    std::variant<EuclideanVector, SpherePoint, QuantileFunction, DiscretePmf, GaussianLocation>;

// Validating constructors; each throws invalid_input on a broken invariant.
ResponseObject make_euclidean(std::vector<double> values);
ResponseObject make_sphere_point(std::vector<double> values);
ResponseObject make_quantile(std::vector<double> grid, std::vector<double> values);
ResponseObject make_pmf(std::vector<double> probabilities);
ResponseObject make_gaussian_location(double mu, double sigma);

/// Re-checks the invariants of an already constructed object.
void validate(const ResponseObject& r);

/// "euclidean" | "sphere" | "quantile" | "pmf" | "gaussian_loc"
std::string type_tag(const ResponseObject& r);

/// Quantile grid of `size` equispaced interior probabilities k / (size + 1).
std::vector<double> interior_grid(std::size_t size);

/// Quantile function of N(mu, sigma^2) on `grid`.
ResponseObject gaussian_quantile_function(double mu, double sigma, const std::vector<double>& grid);

/**
 * Metric between two responses of the same kind.
 *
 * euclidean: l2 distance. sphere: arccos of the inner product clamped to
 * [-1, 1]. quantile: 2-Wasserstein distance, trapezoid rule on the grid with
 * the end values held flat over [0, t_1] and [t_m, 1]. pmf: Hellinger with
 * the 1/2 factor. gaussian_loc: exact 2-Wasserstein between normals.
 */
double distance(const ResponseObject& a, const ResponseObject& b);

/// m / (1 + m); maps [0, inf) onto [0, 1).
double bounded_transform(double m);

/// n x n symmetric matrix of pairwise distances with an exactly zero diagonal.
class DistanceMatrix {
public:
    DistanceMatrix() = default;
    explicit DistanceMatrix(Matrix entries);

    Index size() const noexcept { return d_.rows(); }
    const Matrix& matrix() const noexcept { return d_; }
    double operator()(Index i, Index j) const { return d_(i, j); }

    /// Rows and columns picked by `index` (repeats allowed, as in a bootstrap).
    DistanceMatrix reindex(std::span<const Index> index) const;

private:
    Matrix d_;
};

DistanceMatrix pairwise_distances(std::span<const ResponseObject> responses, bool apply_bound,
                                  int jobs = 1);

// JSON record format: {"type": "<tag>", ...payload arrays}. A bare number
// reads as a one-dimensional euclidean response.
nlohmann::json to_json(const ResponseObject& r);
ResponseObject from_json(const nlohmann::json& j);
nlohmann::json responses_to_json(std::span<const ResponseObject> responses);
std::vector<ResponseObject> responses_from_json(const nlohmann::json& j);

} // namespace gwire::metrics
