#include "gwire/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <boost/math/distributions/normal.hpp>

#include "gwire/config.hpp"
#include "gwire/error.hpp"
#include "gwire/parallel.hpp"

namespace gwire::metrics {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

void require_finite(const std::vector<double>& v, const char* what) {
    for (double x : v)
        if (!std::isfinite(x)) fail(ErrorCode::invalid_input, std::string(what) + ": non-finite value");
}

void check(const EuclideanVector& e) {
    if (e.values.empty()) fail(ErrorCode::invalid_input, "euclidean response: empty vector");
    require_finite(e.values, "euclidean response");
}

void check(const SpherePoint& s) {
    if (s.values.empty()) fail(ErrorCode::invalid_input, "sphere response: empty vector");
    require_finite(s.values, "sphere response");
    const double norm = std::sqrt(std::inner_product(s.values.begin(), s.values.end(), s.values.begin(), 0.0));
    if (std::abs(norm - 1.0) > default_tolerances().sphere_norm)
        fail(ErrorCode::invalid_input, "sphere response: norm " + std::to_string(norm) + " is not 1");
}

void check(const QuantileFunction& q) {
    if (q.grid.empty() || q.grid.size() != q.values.size())
        fail(ErrorCode::invalid_input, "quantile response: grid and values must be non-empty and equal length");
    require_finite(q.grid, "quantile response grid");
    require_finite(q.values, "quantile response");
    for (std::size_t k = 0; k < q.grid.size(); ++k) {
        if (!(q.grid[k] > 0.0 && q.grid[k] < 1.0))
            fail(ErrorCode::invalid_input, "quantile response: grid point outside (0, 1)");
        if (k > 0 && !(q.grid[k] > q.grid[k - 1]))
            fail(ErrorCode::invalid_input, "quantile response: grid not strictly increasing");
        if (k > 0 && q.values[k] < q.values[k - 1])
            fail(ErrorCode::invalid_input, "quantile response: values decrease");
    }
}

void check(const DiscretePmf& p) {
    if (p.probabilities.empty()) fail(ErrorCode::invalid_input, "pmf response: empty");
    require_finite(p.probabilities, "pmf response");
    double sum = 0.0;
    for (double x : p.probabilities) {
        if (x < 0.0) fail(ErrorCode::invalid_input, "pmf response: negative probability");
        sum += x;
    }
    if (std::abs(sum - 1.0) > default_tolerances().pmf_sum)
        fail(ErrorCode::invalid_input, "pmf response: probabilities sum to " + std::to_string(sum));
}

void check(const GaussianLocation& g) {
    if (!std::isfinite(g.mu) || !std::isfinite(g.sigma) || !(g.sigma > 0.0))
        fail(ErrorCode::invalid_input, "gaussian_loc response: need finite mu and sigma > 0");
}

void same_length(std::size_t a, std::size_t b, const char* kind) {
    if (a != b)
        fail(ErrorCode::shape, std::string(kind) + " responses differ in length (" + std::to_string(a) +
                                   " vs " + std::to_string(b) + ")");
}

double euclid(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
    return std::sqrt(s);
}

double wasserstein_grid(const QuantileFunction& a, const QuantileFunction& b) {
    same_length(a.grid.size(), b.grid.size(), "quantile");
    const double tol = default_tolerances().grid_match;
    for (std::size_t k = 0; k < a.grid.size(); ++k)
        if (std::abs(a.grid[k] - b.grid[k]) > tol)
            fail(ErrorCode::shape, "quantile responses use different grids");
    const std::size_t m = a.grid.size();
    auto sq = [&](std::size_t k) { return (a.values[k] - b.values[k]) * (a.values[k] - b.values[k]); };
    // flat tails on [0, t_1] and [t_m, 1], trapezoid in between
    double integral = a.grid.front() * sq(0) + (1.0 - a.grid.back()) * sq(m - 1);
    for (std::size_t k = 1; k < m; ++k)
        integral += 0.5 * (a.grid[k] - a.grid[k - 1]) * (sq(k) + sq(k - 1));
    return std::sqrt(integral);
}

} // namespace

ResponseObject make_euclidean(std::vector<double> values) {
    EuclideanVector e{std::move(values)};
    check(e);
    return e;
}

ResponseObject make_sphere_point(std::vector<double> values) {
    SpherePoint s{std::move(values)};
    check(s);
    return s;
}

ResponseObject make_quantile(std::vector<double> grid, std::vector<double> values) {
    QuantileFunction q{std::move(grid), std::move(values)};
    check(q);
    return q;
}

ResponseObject make_pmf(std::vector<double> probabilities) {
    DiscretePmf p{std::move(probabilities)};
    check(p);
    return p;
}

ResponseObject make_gaussian_location(double mu, double sigma) {
    GaussianLocation g{mu, sigma};
    check(g);
    return g;
}

void validate(const ResponseObject& r) {
    std::visit([](const auto& x) { check(x); }, r);
}

std::string type_tag(const ResponseObject& r) {
    return std::visit(overloaded{
                          [](const EuclideanVector&) { return std::string("euclidean"); },
                          [](const SpherePoint&) { return std::string("sphere"); },
                          [](const QuantileFunction&) { return std::string("quantile"); },
                          [](const DiscretePmf&) { return std::string("pmf"); },
                          [](const GaussianLocation&) { return std::string("gaussian_loc"); },
                      },
                      r);
}

std::vector<double> interior_grid(std::size_t size) {
    std::vector<double> grid(size);
    for (std::size_t k = 0; k < size; ++k)
        grid[k] = static_cast<double>(k + 1) / static_cast<double>(size + 1);
    return grid;
}

ResponseObject gaussian_quantile_function(double mu, double sigma, const std::vector<double>& grid) {
    const boost::math::normal_distribution<double> standard(0.0, 1.0);
    std::vector<double> values(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k)
        values[k] = mu + sigma * boost::math::quantile(standard, grid[k]);
    return make_quantile(grid, std::move(values));
}

double distance(const ResponseObject& a, const ResponseObject& b) {
    if (a.index() != b.index())
        fail(ErrorCode::incompatible_response,
             "cannot compare a '" + type_tag(a) + "' response with a '" + type_tag(b) + "' response");
    return std::visit(
        overloaded{
            [&](const EuclideanVector& x) {
                const auto& y = std::get<EuclideanVector>(b);
                same_length(x.values.size(), y.values.size(), "euclidean");
                return euclid(x.values, y.values);
            },
            [&](const SpherePoint& x) {
                const auto& y = std::get<SpherePoint>(b);
                same_length(x.values.size(), y.values.size(), "sphere");
                // 2 atan2(|x - y|, |x + y|) equals arccos<x, y> on the sphere and is exact at x = y
                double minus = 0.0, plus = 0.0;
                for (std::size_t k = 0; k < x.values.size(); ++k) {
                    minus += (x.values[k] - y.values[k]) * (x.values[k] - y.values[k]);
                    plus += (x.values[k] + y.values[k]) * (x.values[k] + y.values[k]);
                }
                return 2.0 * std::atan2(std::sqrt(minus), std::sqrt(plus));
            },
            [&](const QuantileFunction& x) { return wasserstein_grid(x, std::get<QuantileFunction>(b)); },
            [&](const DiscretePmf& x) {
                const auto& y = std::get<DiscretePmf>(b);
                same_length(x.probabilities.size(), y.probabilities.size(), "pmf");
                double s = 0.0;
                for (std::size_t k = 0; k < x.probabilities.size(); ++k) {
                    const double d = std::sqrt(x.probabilities[k]) - std::sqrt(y.probabilities[k]);
                    s += d * d;
                }
                return std::sqrt(0.5 * s);
            },
            [&](const GaussianLocation& x) {
                const auto& y = std::get<GaussianLocation>(b);
                if (x.sigma == y.sigma) return std::abs(x.mu - y.mu);
                return std::hypot(x.mu - y.mu, x.sigma - y.sigma);
            },
        },
        a);
}

double bounded_transform(double m) {
    if (!(m >= 0.0)) fail(ErrorCode::invalid_input, "bounded_transform: distance must be >= 0");
    if (std::isinf(m)) return 1.0;
    return m / (1.0 + m);
}

DistanceMatrix::DistanceMatrix(Matrix entries) : d_(std::move(entries)) {
    if (d_.rows() != d_.cols()) fail(ErrorCode::shape, "distance matrix must be square");
    for (Index j = 0; j < d_.cols(); ++j) {
        if (d_(j, j) != 0.0) fail(ErrorCode::invalid_input, "distance matrix diagonal must be zero");
        for (Index i = 0; i < j; ++i) {
            if (!(d_(i, j) >= 0.0) || d_(i, j) != d_(j, i))
                fail(ErrorCode::invalid_input, "distance matrix must be symmetric and non-negative");
        }
    }
}

DistanceMatrix DistanceMatrix::reindex(std::span<const Index> index) const {
    const Index m = static_cast<Index>(index.size());
    Matrix out(m, m);
    for (Index j = 0; j < m; ++j)
        for (Index i = 0; i < m; ++i) out(i, j) = d_(index[i], index[j]);
    // a repeated row pairs with itself: the metric is zero there already
    return DistanceMatrix(std::move(out));
}

DistanceMatrix pairwise_distances(std::span<const ResponseObject> responses, bool apply_bound, int jobs) {
    const Index n = static_cast<Index>(responses.size());
    Matrix d = Matrix::Zero(n, n);
    parallel_for(static_cast<std::size_t>(n), jobs, [&](std::size_t row) {
        const Index i = static_cast<Index>(row);
        for (Index j = i + 1; j < n; ++j) {
            double m = 0.0;
            try {
                m = distance(responses[i], responses[j]);
            } catch (const Error& e) {
                throw Error(e.code(), std::string(e.what()) + " (responses " + std::to_string(i) + " and " +
                                          std::to_string(j) + ")");
            }
            d(i, j) = apply_bound ? bounded_transform(m) : m;
        }
    });
    d.triangularView<Eigen::StrictlyLower>() = d.transpose();
    return DistanceMatrix(std::move(d));
}

nlohmann::json to_json(const ResponseObject& r) {
    return std::visit(
        overloaded{
            [](const EuclideanVector& x) { return nlohmann::json{{"type", "euclidean"}, {"values", x.values}}; },
            [](const SpherePoint& x) { return nlohmann::json{{"type", "sphere"}, {"values", x.values}}; },
            [](const QuantileFunction& x) {
                return nlohmann::json{{"type", "quantile"}, {"grid", x.grid}, {"values", x.values}};
            },
            [](const DiscretePmf& x) {
                return nlohmann::json{{"type", "pmf"}, {"probabilities", x.probabilities}};
            },
            [](const GaussianLocation& x) {
                return nlohmann::json{{"type", "gaussian_loc"}, {"mu", x.mu}, {"sigma", x.sigma}};
            },
        },
        r);
}

namespace {

std::vector<double> numbers(const nlohmann::json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_array())
        fail(ErrorCode::invalid_input, std::string("response record needs a numeric array '") + key + "'");
    std::vector<double> out;
    out.reserve(j.at(key).size());
    for (const auto& v : j.at(key)) {
        if (!v.is_number()) fail(ErrorCode::invalid_input, std::string("non-numeric entry in '") + key + "'");
        out.push_back(v.get<double>());
    }
    return out;
}

} // namespace

ResponseObject from_json(const nlohmann::json& j) {
    if (j.is_number()) return make_euclidean({j.get<double>()});
    if (!j.is_object() || !j.contains("type") || !j.at("type").is_string())
        fail(ErrorCode::invalid_input, "response record needs a string 'type' field");
    const std::string tag = j.at("type").get<std::string>();
    if (tag == "euclidean") return make_euclidean(numbers(j, "values"));
    if (tag == "sphere") return make_sphere_point(numbers(j, "values"));
    if (tag == "quantile") return make_quantile(numbers(j, "grid"), numbers(j, "values"));
    if (tag == "pmf") return make_pmf(numbers(j, "probabilities"));
    if (tag == "gaussian_loc") {
        if (!j.contains("mu") || !j.at("mu").is_number())
            fail(ErrorCode::invalid_input, "gaussian_loc record needs numeric 'mu'");
        const double sigma = j.contains("sigma") ? j.at("sigma").get<double>() : 1.0;
        return make_gaussian_location(j.at("mu").get<double>(), sigma);
    }
    fail(ErrorCode::invalid_input, "unknown response type '" + tag + "'");
}

nlohmann::json responses_to_json(std::span<const ResponseObject> responses) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : responses) arr.push_back(to_json(r));
    return arr;
}

std::vector<ResponseObject> responses_from_json(const nlohmann::json& j) {
    const nlohmann::json* arr = &j;
    if (j.is_object() && j.contains("responses")) arr = &j.at("responses");
    if (!arr->is_array()) fail(ErrorCode::invalid_input, "responses must be a JSON array of records");
    std::vector<ResponseObject> out;
    out.reserve(arr->size());
    for (std::size_t i = 0; i < arr->size(); ++i) {
        try {
            out.push_back(from_json((*arr)[i]));
        } catch (const Error& e) {
            throw Error(e.code(), std::string(e.what()) + " (record " + std::to_string(i) + ")");
        }
    }
    if (out.empty()) return out;
    for (std::size_t i = 1; i < out.size(); ++i)
        if (out[i].index() != out[0].index())
            fail(ErrorCode::incompatible_response, "record " + std::to_string(i) + " has type '" +
                                                       type_tag(out[i]) + "' but record 0 has '" +
                                                       type_tag(out[0]) + "'");
    return out;
}

} // namespace gwire::metrics
