#pragma once

// Reference implementations used only by tests. They recompute quantities
// from their definitions and share no code path with the library.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "frugal/types.hpp"

namespace oracle {

struct Problem {
    frugal::Matrix C, D, F;
};

// Random instance: n samples, K clusters (every cluster non-empty when
// n >= K), D in [0, dmax), fhat in [0.01, 0.99].
inline Problem random_problem(std::size_t n, std::size_t K, std::mt19937_64& gen, double dmax = 3.0) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Problem p{frugal::Matrix(n, K), frugal::Matrix(n, K), frugal::Matrix(n, 2)};
    std::vector<std::size_t> cluster(n);
    for (std::size_t i = 0; i < n; ++i) cluster[i] = i < K ? i : static_cast<std::size_t>(u(gen) * K) % K;
    std::shuffle(cluster.begin(), cluster.end(), gen);
    for (std::size_t i = 0; i < n; ++i) {
        p.C(i, cluster[i]) = 1.0;
        for (std::size_t k = 0; k < K; ++k) p.D(i, k) = dmax * u(gen);
        const double f = 0.01 + 0.98 * u(gen);
        p.F(i, 0) = f;
        p.F(i, 1) = 1.0 - f;
    }
    return p;
}

inline double plogp(double x) { return x > 0 ? x * std::log(x) : 0.0; }

// The objective written term by term from its definition.
inline double objective(const std::vector<double>& mu, const Problem& p, double rep, double alpha, double beta,
                        double gamma) {
    const std::size_t n = p.C.rows(), K = p.C.cols();
    double t1 = 0, t2 = 0, t3 = 0, t4 = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < K; ++k) t1 += mu[i] * p.C(i, k) * p.D(i, k);
    for (std::size_t k = 0; k < K; ++k) {
        double m = 0;
        for (std::size_t i = 0; i < n; ++i) m += p.C(i, k) * mu[i];
        t2 += plogp(m);
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < p.F.cols(); ++c) t3 += mu[i] * plogp(p.F(i, c));
    for (std::size_t i = 0; i < n; ++i) t4 += plogp(mu[i]);
    return rep * t1 + alpha * t2 + beta * t3 + gamma * t4;
}

inline std::vector<double> central_difference(const std::vector<double>& mu, const Problem& p, double rep,
                                              double alpha, double beta, double gamma, double h) {
    std::vector<double> g(mu.size());
    for (std::size_t i = 0; i < mu.size(); ++i) {
        auto plus = mu, minus = mu;
        plus[i] += h;
        minus[i] -= h;
        g[i] = (objective(plus, p, rep, alpha, beta, gamma) - objective(minus, p, rep, alpha, beta, gamma)) / (2 * h);
    }
    return g;
}

// Euclidean projection onto {x >= floor, sum x = 1}.
inline std::vector<double> project_simplex(const std::vector<double>& v, double floor) {
    const std::size_t n = v.size();
    const double mass = 1.0 - floor * static_cast<double>(n);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = v[i] - floor;
    std::vector<double> s = y;
    std::sort(s.begin(), s.end(), std::greater<>());
    double cumsum = 0, theta = 0;
    for (std::size_t j = 0; j < n; ++j) {
        cumsum += s[j];
        const double t = (cumsum - mass) / static_cast<double>(j + 1);
        if (s[j] - t > 0) theta = t;
    }
    for (std::size_t i = 0; i < n; ++i) y[i] = std::max(y[i] - theta, 0.0) + floor;
    return y;
}

// Gradient written independently of the library.
inline std::vector<double> gradient(const std::vector<double>& x, const Problem& p, double rep, double alpha,
                                    double beta, double gamma) {
    const std::size_t n = p.C.rows(), K = p.C.cols();
    std::vector<double> mass(K, 0.0), g(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < K; ++k) mass[k] += p.C(i, k) * x[i];
    for (std::size_t i = 0; i < n; ++i) {
        double gi = gamma * (std::log(x[i]) + 1.0);
        for (std::size_t k = 0; k < K; ++k)
            if (p.C(i, k) != 0) gi += p.C(i, k) * (rep * p.D(i, k) + alpha * (std::log(mass[k]) + 1.0));
        for (std::size_t c = 0; c < p.F.cols(); ++c) gi += beta * plogp(p.F(i, c));
        g[i] = gi;
    }
    return g;
}

// argmin over {y on the simplex, y >= x / 100} of
// g.(y - x) + sum h_i (y_i - x_i)^2 / 2, i.e.
// y_i = max(x_i - (g_i + theta) / h_i, x_i / 100) with theta found by
// bisection so that y sums to one.
inline std::vector<double> scaled_projection(const std::vector<double>& x, const std::vector<double>& g,
                                             const std::vector<double>& h) {
    const std::size_t n = x.size();
    auto at = [&](double theta) {
        std::vector<double> y(n);
        for (std::size_t i = 0; i < n; ++i) y[i] = std::max(x[i] - (g[i] + theta) / h[i], 0.01 * x[i]);
        return y;
    };
    auto excess = [&](double theta) {
        double s = 0;
        for (double v : at(theta)) s += v;
        return s - 1.0;
    };
    double lo = -1.0, hi = 1.0;
    while (excess(lo) < 0) lo *= 2;
    while (excess(hi) > 0) hi *= 2;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(lo)); ++it) {
        const double mid = 0.5 * (lo + hi);
        (excess(mid) > 0 ? lo : hi) = mid;
    }
    auto y = at(0.5 * (lo + hi));
    double s = 0;
    for (double v : y) s += v;
    for (double& v : y) v /= s;
    return y;
}

// Projected gradient descent in the metric of the Hessian diagonal
// (gamma / x_i plus alpha over the own-cluster mass), with Armijo
// backtracking. Euclidean steps crawl here because the entropy curvature
// grows without bound near the simplex boundary. A step may shrink a
// coordinate at most a hundredfold, so mass that should come back from near
// zero still can. Stops once a full step moves x by less than tol in the
// max norm.
inline std::vector<double> pgd_minimize(const Problem& p, double rep, double alpha, double beta, double gamma,
                                        double tol = 1e-10, std::size_t max_iter = 100000) {
    const std::size_t n = p.C.rows(), K = p.C.cols();
    std::vector<double> x(n, 1.0 / static_cast<double>(n));
    double fx = objective(x, p, rep, alpha, beta, gamma);
    for (std::size_t it = 0; it < max_iter; ++it) {
        const auto g = gradient(x, p, rep, alpha, beta, gamma);
        std::vector<double> mass(K, 0.0), h(n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < K; ++k) mass[k] += p.C(i, k) * x[i];
        for (std::size_t i = 0; i < n; ++i) {
            h[i] = gamma / x[i];
            for (std::size_t k = 0; k < K; ++k)
                if (p.C(i, k) != 0) h[i] += alpha * p.C(i, k) / mass[k];
        }
        const auto y = scaled_projection(x, g, h);
        double move = 0, slope = 0;
        for (std::size_t i = 0; i < n; ++i) {
            move = std::max(move, std::abs(y[i] - x[i]));
            slope += g[i] * (y[i] - x[i]);
        }
        if (move < tol) break;
        double t = 1.0;
        std::vector<double> next(n);
        double fn = fx;
        while (t > 1e-20) {
            for (std::size_t i = 0; i < n; ++i) next[i] = x[i] + t * (y[i] - x[i]);
            fn = objective(next, p, rep, alpha, beta, gamma);
            if (fn <= fx + 1e-4 * t * slope) break;
            t *= 0.5;
        }
        if (!(fn < fx)) break;
        x = next;
        fx = fn;
    }
    return x;
}

// Recomputes every pairwise distance at every step.
inline std::vector<std::size_t> greedy_maxmin(const frugal::Dataset& ds, std::vector<std::size_t> chosen, std::size_t B) {
    std::vector<std::size_t> picks;
    for (std::size_t step = 0; step < B; ++step) {
        std::size_t best = ds.n;
        double best_d = -1;
        for (std::size_t i = 0; i < ds.n; ++i) {
            if (std::find(chosen.begin(), chosen.end(), i) != chosen.end()) continue;
            double nearest = std::numeric_limits<double>::infinity();
            for (auto c : chosen) {
                double s = 0;
                for (std::size_t j = 0; j < ds.d; ++j) {
                    const double diff = static_cast<double>(ds.row(i)[j]) - ds.row(c)[j];
                    s += diff * diff;
                }
                nearest = std::min(nearest, std::sqrt(s));
            }
            if (nearest > best_d) {
                best_d = nearest;
                best = i;
            }
        }
        if (best == ds.n) break;
        picks.push_back(best);
        chosen.push_back(best);
    }
    return picks;
}

// Unlabeled indices ordered by |score|, ties by index, first B kept.
inline std::vector<std::size_t> sorted_by_margin(const std::vector<double>& scores, const std::vector<bool>& mask,
                                                 std::size_t B) {
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < scores.size(); ++i)
        if (!mask[i]) order.push_back(i);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return std::abs(scores[a]) < std::abs(scores[b]); });
    order.resize(std::min(B, order.size()));
    return order;
}

}  // namespace oracle
