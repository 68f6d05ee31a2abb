#pragma once

// Independent reference computations for tests. Nothing here calls into the
// library's numerical code paths.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace gwire::testing {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using Idx = Eigen::Index;

inline Mat random_matrix(Idx rows, Idx cols, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(lo, hi);
    Mat m(rows, cols);
    for (Idx j = 0; j < cols; ++j)
        for (Idx i = 0; i < rows; ++i) m(i, j) = u(rng);
    return m;
}

inline Mat random_symmetric(Idx p, std::uint64_t seed, double scale = 1.0) {
    const Mat a = random_matrix(p, p, seed, -scale, scale);
    return (a + a.transpose()) / 2.0;
}

inline Mat random_spd(Idx p, std::uint64_t seed, double ridge = 0.5) {
    const Mat a = random_matrix(p, p, seed);
    return a * a.transpose() / static_cast<double>(p) + ridge * Mat::Identity(p, p);
}

inline Mat gaussian_matrix(Idx rows, Idx cols, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z;
    Mat m(rows, cols);
    for (Idx j = 0; j < cols; ++j)
        for (Idx i = 0; i < rows; ++i) m(i, j) = z(rng);
    return m;
}

inline double max_abs(const Mat& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

/// Solves (S kron S + rho I) vec(Theta) = vec(Lambda) + rho vec(Vsym - W) directly.
inline Mat theta_kronecker(const Mat& s, const Mat& lambda, const Mat& vsym, const Mat& w, double rho) {
    const Idx p = s.rows();
    Mat k(p * p, p * p);
    for (Idx a = 0; a < p; ++a)
        for (Idx b = 0; b < p; ++b)
            for (Idx c = 0; c < p; ++c)
                for (Idx d = 0; d < p; ++d) k(a * p + c, b * p + d) = s(a, b) * s(c, d);
    k += rho * Mat::Identity(p * p, p * p);
    const Mat rhs_m = lambda + rho * (vsym - w);
    Vec rhs(p * p);
    for (Idx j = 0; j < p; ++j)
        for (Idx i = 0; i < p; ++i) rhs(j * p + i) = rhs_m(i, j);
    const Vec x = k.partialPivLu().solve(rhs);
    Mat theta(p, p);
    for (Idx j = 0; j < p; ++j)
        for (Idx i = 0; i < p; ++i) theta(i, j) = x(j * p + i);
    return theta;
}

inline Vec column_means(const Mat& x) {
    Vec m = Vec::Zero(x.cols());
    for (Idx i = 0; i < x.rows(); ++i)
        for (Idx j = 0; j < x.cols(); ++j) m(j) += x(i, j);
    return m / static_cast<double>(x.rows());
}

inline Mat covariance_loop(const Mat& x) {
    const Idx n = x.rows(), p = x.cols();
    const Vec m = column_means(x);
    Mat s = Mat::Zero(p, p);
    for (Idx i = 0; i < n; ++i)
        for (Idx a = 0; a < p; ++a)
            for (Idx b = 0; b < p; ++b) s(a, b) += (x(i, a) - m(a)) * (x(i, b) - m(b));
    return s / static_cast<double>(n);
}

/// -1/(n(n-1)) sum_{i != j} (x_i - xbar)(x_j - xbar)^T d_ij
inline Mat wire_loop(const Mat& x, const Mat& d) {
    const Idx n = x.rows(), p = x.cols();
    const Vec m = column_means(x);
    Mat out = Mat::Zero(p, p);
    for (Idx i = 0; i < n; ++i)
        for (Idx j = 0; j < n; ++j) {
            if (i == j) continue;
            for (Idx a = 0; a < p; ++a)
                for (Idx b = 0; b < p; ++b) out(a, b) += (x(i, a) - m(a)) * (x(j, b) - m(b)) * d(i, j);
        }
    return -out / static_cast<double>(n * (n - 1));
}

/// Slices of the stable sorted order of y, the first n mod H slices one larger.
inline Mat sir_loop(const Mat& x, const std::vector<double>& y, int slices) {
    const Idx n = x.rows(), p = x.cols();
    std::vector<Idx> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Idx{0});
    std::stable_sort(order.begin(), order.end(), [&](Idx a, Idx b) { return y[a] < y[b]; });
    const Vec m = column_means(x);
    Mat out = Mat::Zero(p, p);
    Idx pos = 0;
    for (int h = 0; h < slices; ++h) {
        const Idx size = n / slices + (h < n % slices ? 1 : 0);
        Vec mean = Vec::Zero(p);
        for (Idx k = pos; k < pos + size; ++k)
            for (Idx a = 0; a < p; ++a) mean(a) += x(order[k], a);
        mean /= static_cast<double>(size);
        for (Idx a = 0; a < p; ++a)
            for (Idx b = 0; b < p; ++b)
                out(a, b) += static_cast<double>(size) / static_cast<double>(n) * (mean(a) - m(a)) * (mean(b) - m(b));
        pos += size;
    }
    return out;
}

inline Mat cume_loop(const Mat& x, const std::vector<double>& y) {
    const Idx n = x.rows(), p = x.cols();
    const Vec m = column_means(x);
    Mat out = Mat::Zero(p, p);
    for (Idx j = 0; j < n; ++j) {
        Vec mj = Vec::Zero(p);
        for (Idx i = 0; i < n; ++i)
            if (y[i] <= y[j])
                for (Idx a = 0; a < p; ++a) mj(a) += x(i, a) - m(a);
        mj /= static_cast<double>(n);
        for (Idx a = 0; a < p; ++a)
            for (Idx b = 0; b < p; ++b) out(a, b) += mj(a) * mj(b);
    }
    return out / static_cast<double>(n);
}

/**
 * Log-barrier interior point method for
 *   minimize rho/2 ||A x - u||^2 + lambda sum_k tau_k ||x_{G_k}||_2
 * written as a second-order cone program in (x, s) with ||x_{G_k}|| <= s_k.
 * Every coordinate of x must belong to exactly one group. Returns x.
 */
inline Vec socp_group_prox(const Mat& a, const Vec& u, const std::vector<std::vector<Idx>>& groups,
                           const std::vector<double>& tau, double lambda, double rho) {
    const Idx nx = a.cols();
    const Idx k = static_cast<Idx>(groups.size());
    const Idx nz = nx + k;
    Vec z = Vec::Zero(nz);
    for (Idx g = 0; g < k; ++g) z(nx + g) = 1.0 + u.norm();
    const Mat ata = a.transpose() * a;
    const Vec atu = a.transpose() * u;

    auto cone_gap = [&](const Vec& v, Idx g) {
        double ss = 0.0;
        for (Idx i : groups[g]) ss += v(i) * v(i);
        return v(nx + g) * v(nx + g) - ss;
    };
    auto feasible = [&](const Vec& v) {
        for (Idx g = 0; g < k; ++g)
            if (!(v(nx + g) > 0.0) || !(cone_gap(v, g) > 0.0)) return false;
        return true;
    };
    auto value = [&](const Vec& v, double t) {
        const Vec r = a * v.head(nx) - u;
        double f = 0.5 * rho * r.squaredNorm();
        for (Idx g = 0; g < k; ++g) f += lambda * tau[g] * v(nx + g);
        double phi = 0.0;
        for (Idx g = 0; g < k; ++g) phi -= std::log(cone_gap(v, g));
        return t * f + phi;
    };

    for (double t = 1.0; t < 1e15; t *= 8.0) {
        for (int it = 0; it < 200; ++it) {
            Vec grad = Vec::Zero(nz);
            Mat hess = Mat::Zero(nz, nz);
            grad.head(nx) = t * rho * (ata * z.head(nx) - atu);
            hess.topLeftCorner(nx, nx) = t * rho * ata;
            for (Idx g = 0; g < k; ++g) {
                grad(nx + g) += t * lambda * tau[g];
                const double gap = cone_gap(z, g);
                const auto& idx = groups[g];
                Vec dg = Vec::Zero(nz);
                for (Idx i : idx) dg(i) = -2.0 * z(i);
                dg(nx + g) = 2.0 * z(nx + g);
                grad -= dg / gap;
                std::vector<Idx> all(idx);
                all.push_back(nx + g);
                for (Idx r : all)
                    for (Idx c : all) hess(r, c) += dg(r) * dg(c) / (gap * gap);
                for (Idx i : idx) hess(i, i) += 2.0 / gap;
                hess(nx + g, nx + g) -= 2.0 / gap;
            }
            const Vec step = -hess.ldlt().solve(grad);
            const double decrement = -grad.dot(step);
            if (decrement < 1e-14) break;
            double alpha = 1.0;
            const double f0 = value(z, t);
            while (alpha > 1e-20) {
                const Vec trial = z + alpha * step;
                if (feasible(trial) && value(trial, t) <= f0 - 0.25 * alpha * decrement) break;
                alpha *= 0.5;
            }
            z += alpha * step;
        }
    }
    return z.head(nx);
}

/// Latent-group prox: minimize rho/2 ||sum_i V_i - U||_F^2 + lambda sum_i tau_i ||V_i||_F
/// with V_i supported on rows rows[i] (all columns). Returns sum_i V_i.
inline Mat latent_group_prox(const Mat& u, const std::vector<std::vector<Idx>>& rows, const std::vector<double>& tau,
                             double lambda, double rho) {
    const Idx p = u.rows(), q = u.cols();
    std::vector<std::vector<Idx>> groups;
    std::vector<std::pair<Idx, Idx>> target;  // entry of U per latent coordinate
    for (const auto& r : rows) {
        std::vector<Idx> g;
        for (Idx row : r)
            for (Idx c = 0; c < q; ++c) {
                g.push_back(static_cast<Idx>(target.size()));
                target.emplace_back(row, c);
            }
        groups.push_back(std::move(g));
    }
    Mat a = Mat::Zero(p * q, static_cast<Idx>(target.size()));
    for (std::size_t i = 0; i < target.size(); ++i) a(target[i].first * q + target[i].second, static_cast<Idx>(i)) = 1.0;
    Vec uv(p * q);
    for (Idx r = 0; r < p; ++r)
        for (Idx c = 0; c < q; ++c) uv(r * q + c) = u(r, c);
    const Vec x = socp_group_prox(a, uv, groups, tau, lambda, rho);
    const Vec sum = a * x;
    Mat out(p, q);
    for (Idx r = 0; r < p; ++r)
        for (Idx c = 0; c < q; ++c) out(r, c) = sum(r * q + c);
    return out;
}

/// Elementwise l1 prox through the same cone solver (one group per entry).
inline Mat l1_prox(const Mat& u, double lambda, double rho) {
    const Idx p = u.rows(), q = u.cols();
    std::vector<std::vector<Idx>> groups;
    for (Idx i = 0; i < p * q; ++i) groups.push_back({i});
    Vec uv(p * q);
    for (Idx r = 0; r < p; ++r)
        for (Idx c = 0; c < q; ++c) uv(r * q + c) = u(r, c);
    const Vec x = socp_group_prox(Mat::Identity(p * q, p * q), uv, groups, std::vector<double>(groups.size(), 1.0),
                                  lambda, rho);
    Mat out(p, q);
    for (Idx r = 0; r < p; ++r)
        for (Idx c = 0; c < q; ++c) out(r, c) = x(r * q + c);
    return out;
}

/// Scalar minimization of rho/2 (v - u)^2 + lambda |v| by golden-section search.
inline double scalar_l1_min(double u, double lambda, double rho) {
    auto f = [&](double v) { return 0.5 * rho * (v - u) * (v - u) + lambda * std::abs(v); };
    double lo = -std::abs(u) - 1.0, hi = std::abs(u) + 1.0;
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    for (int it = 0; it < 200; ++it) {
        const double a = hi - g * (hi - lo), b = lo + g * (hi - lo);
        if (f(a) < f(b)) hi = b;
        else lo = a;
    }
    return (lo + hi) / 2.0;
}

/**
 * Proximal gradient on the graphical lasso objective
 *   -log det(Omega) + tr(S Omega) + penalty sum_ij |omega_ij|
 * with backtracking that keeps Omega positive definite.
 */
inline Mat glasso_proximal_gradient(const Mat& s, double penalty, int iters = 200000, double tol = 1e-12) {
    const Idx p = s.rows();
    auto smooth = [&](const Mat& o, bool& ok) {
        Eigen::LLT<Mat> llt(o);
        ok = llt.info() == Eigen::Success && llt.matrixLLT().diagonal().minCoeff() > 0.0;
        if (!ok) return 0.0;
        return -2.0 * llt.matrixLLT().diagonal().array().log().sum() + (s.cwiseProduct(o)).sum();
    };
    auto soft = [](const Mat& m, double t) {
        return Mat(m.unaryExpr([t](double v) { return v > t ? v - t : (v < -t ? v + t : 0.0); }));
    };
    Mat omega = Mat(s.diagonal().array().inverse().matrix().asDiagonal());
    double step = 1.0;
    for (int it = 0; it < iters; ++it) {
        bool ok = true;
        const double f = smooth(omega, ok);
        const Mat grad = s - omega.inverse();
        Mat next;
        for (;;) {
            next = soft(omega - step * grad, step * penalty);
            next = (next + next.transpose()) / 2.0;
            bool ok2 = true;
            const double fn = smooth(next, ok2);
            const Mat diff = next - omega;
            if (ok2 && fn <= f + (grad.cwiseProduct(diff)).sum() + diff.squaredNorm() / (2.0 * step)) break;
            step *= 0.5;
        }
        const double change = max_abs(next - omega);
        omega = next;
        step *= 1.5;
        if (change < tol) break;
    }
    return omega;
}

/// Orthonormal basis of span(b) by Gram-Schmidt, then ||Q_a Q_a^T - Q_b Q_b^T||_F.
inline Mat gram_schmidt(const Mat& b) {
    Mat q = b;
    for (Idx j = 0; j < q.cols(); ++j) {
        for (Idx k = 0; k < j; ++k) q.col(j) -= q.col(k).dot(q.col(j)) * q.col(k);
        q.col(j).normalize();
    }
    return q;
}

inline double projection_distance(const Mat& a, const Mat& b) {
    const Mat qa = gram_schmidt(a), qb = gram_schmidt(b);
    return (qa * qa.transpose() - qb * qb.transpose()).norm();
}

} // namespace gwire::testing
