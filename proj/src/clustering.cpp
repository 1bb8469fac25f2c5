#include "frugal/clustering.hpp"

#include <cmath>
#include <limits>

#include "frugal/error.hpp"
#include "frugal/random.hpp"

namespace frugal {

double squared_distance(std::span<const float> x, std::span<const double> c) {
    double s = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
        const double diff = static_cast<double>(x[j]) - c[j];
        s += diff * diff;
    }
    return s;
}

double squared_distance(std::span<const float> x, std::span<const float> y) {
    double s = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
        const double diff = static_cast<double>(x[j]) - static_cast<double>(y[j]);
        s += diff * diff;
    }
    return s;
}

namespace {

Matrix kmeanspp_seed(const Dataset& ds, std::size_t K, Rng& rng) {
    Matrix centroids(K, ds.d);
    std::vector<double> nearest(ds.n, std::numeric_limits<double>::infinity());
    std::vector<bool> chosen(ds.n, false);

    auto place = [&](std::size_t k, std::size_t i) {
        chosen[i] = true;
        auto x = ds.row(i);
        for (std::size_t j = 0; j < ds.d; ++j) centroids(k, j) = x[j];
        for (std::size_t p = 0; p < ds.n; ++p) {
            const double dist = squared_distance(ds.row(p), centroids.row(k));
            if (dist < nearest[p]) nearest[p] = dist;
        }
    };

    place(0, rng.index(ds.n));
    for (std::size_t k = 1; k < K; ++k) {
        double total = 0.0;
        for (double v : nearest) total += v;
        std::size_t pick = ds.n;
        if (total > 0) {
            double target = rng.uniform() * total;
            for (std::size_t p = 0; p < ds.n; ++p) {
                if (nearest[p] <= 0) continue;
                target -= nearest[p];
                pick = p;
                if (target < 0) break;
            }
        }
        if (pick == ds.n) {
            // All remaining points coincide with a centroid.
            for (std::size_t p = 0; p < ds.n; ++p) {
                if (!chosen[p]) {
                    pick = p;
                    break;
                }
            }
        }
        place(k, pick);
    }
    return centroids;
}

// Returns the distortion of the new assignment and whether anything changed.
std::pair<double, bool> assign(const Dataset& ds, const Matrix& centroids, std::vector<std::size_t>& assignment) {
    double distortion = 0.0;
    bool changed = false;
    for (std::size_t i = 0; i < ds.n; ++i) {
        std::size_t best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < centroids.rows(); ++k) {
            const double dist = squared_distance(ds.row(i), centroids.row(k));
            if (dist < best_d) {
                best_d = dist;
                best = k;
            }
        }
        if (assignment[i] != best) {
            assignment[i] = best;
            changed = true;
        }
        distortion += best_d;
    }
    return {distortion, changed};
}

void update_means(const Dataset& ds, const std::vector<std::size_t>& assignment, Matrix& centroids,
                  std::vector<std::size_t>& counts) {
    const std::size_t K = centroids.rows();
    Matrix sums(K, ds.d);
    counts.assign(K, 0);
    for (std::size_t i = 0; i < ds.n; ++i) {
        auto x = ds.row(i);
        auto s = sums.row(assignment[i]);
        for (std::size_t j = 0; j < ds.d; ++j) s[j] += x[j];
        ++counts[assignment[i]];
    }
    for (std::size_t k = 0; k < K; ++k) {
        if (counts[k] == 0) continue;
        for (std::size_t j = 0; j < ds.d; ++j) centroids(k, j) = sums(k, j) / static_cast<double>(counts[k]);
    }
}

double total_distortion(const Dataset& ds, const Matrix& centroids, const std::vector<std::size_t>& assignment) {
    double s = 0.0;
    for (std::size_t i = 0; i < ds.n; ++i) s += squared_distance(ds.row(i), centroids.row(assignment[i]));
    return s;
}

}  // namespace

namespace {

ClusterModel lloyd(const Dataset& ds, std::size_t K, std::uint64_t seed, std::size_t max_iter) {
    Rng rng(seed);
    ClusterModel model;
    model.centroids = kmeanspp_seed(ds, K, rng);
    model.assignment.assign(ds.n, K);  // sentinel forces "changed" on the first pass

    std::vector<std::size_t> counts;
    for (std::size_t iter = 0; iter < max_iter; ++iter) {
        auto [distortion, changed] = assign(ds, model.centroids, model.assignment);
        model.distortion_trace.push_back(distortion);
        if (!changed) break;

        update_means(ds, model.assignment, model.centroids, counts);
        for (std::size_t k = 0; k < K; ++k) {
            if (counts[k] != 0) continue;
            std::size_t far = 0;
            double far_d = -1.0;
            for (std::size_t i = 0; i < ds.n; ++i) {
                if (counts[model.assignment[i]] <= 1) continue;
                const double dist = squared_distance(ds.row(i), model.centroids.row(model.assignment[i]));
                if (dist > far_d) {
                    far_d = dist;
                    far = i;
                }
            }
            if (far_d < 0) continue;
            model.assignment[far] = k;
            update_means(ds, model.assignment, model.centroids, counts);
        }
    }
    model.distortion = total_distortion(ds, model.centroids, model.assignment);
    return model;
}

}  // namespace

ClusterModel kmeans_fit(const Dataset& ds, std::size_t K, std::uint64_t seed, std::size_t max_iter,
                        std::size_t restarts) {
    require(K >= 1 && K <= ds.n, ErrorKind::invalid_argument,
            "K must lie in [1, n]; got K=" + std::to_string(K) + ", n=" + std::to_string(ds.n));
    require(max_iter >= 1, ErrorKind::invalid_argument, "max_iter must be >= 1");
    require(restarts >= 1, ErrorKind::invalid_argument, "restarts must be >= 1");
    require(ds.features.size() == ds.n * ds.d, ErrorKind::invalid_argument, "feature buffer size mismatch");
    for (float v : ds.features)
        require(std::isfinite(v), ErrorKind::invalid_argument, "non-finite feature value");

    ClusterModel best = lloyd(ds, K, seed, max_iter);
    for (std::size_t r = 1; r < restarts; ++r) {
        ClusterModel candidate = lloyd(ds, K, mix_seed(seed, r), max_iter);
        if (candidate.distortion < best.distortion) best = std::move(candidate);
    }
    return best;
}

Matrix assignment_matrix(const ClusterModel& model) {
    Matrix C(model.assignment.size(), model.K());
    for (std::size_t i = 0; i < model.assignment.size(); ++i) C(i, model.assignment[i]) = 1.0;
    return C;
}

Matrix squared_distance_matrix(const ClusterModel& model, const Dataset& ds) {
    require(model.centroids.cols() == ds.d, ErrorKind::invalid_argument,
            "centroid dimension " + std::to_string(model.centroids.cols()) + " does not match dataset dimension " +
                std::to_string(ds.d));
    Matrix D(ds.n, model.K());
    for (std::size_t i = 0; i < ds.n; ++i)
        for (std::size_t k = 0; k < model.K(); ++k) D(i, k) = squared_distance(ds.row(i), model.centroids.row(k));
    return D;
}

std::vector<std::size_t> medoid_indices(const ClusterModel& model, const Dataset& ds) {
    const std::size_t K = model.K();
    std::vector<std::size_t> best(K, ds.n);
    std::vector<double> best_d(K, std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < ds.n; ++i) {
        const std::size_t k = model.assignment[i];
        const double dist = squared_distance(ds.row(i), model.centroids.row(k));
        if (dist < best_d[k]) {
            best_d[k] = dist;
            best[k] = i;
        }
    }
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < K; ++k)
        if (best[k] != ds.n) out.push_back(best[k]);
    return out;
}

}  // namespace frugal
