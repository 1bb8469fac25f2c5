#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "frugal/types.hpp"

namespace frugal {

struct ClusterModel {
    Matrix centroids;                     // K x d
    std::vector<std::size_t> assignment;  // n entries in [0, K)
    double distortion = 0.0;
    // Distortion after each assignment step, for monotonicity checks.
    std::vector<double> distortion_trace;

    std::size_t K() const noexcept { return centroids.rows(); }

    bool operator==(const ClusterModel&) const = default;
};

// Lloyd iterations from k-means++ seeding. An emptied cluster is re-seeded
// with the point farthest from its current centroid. With restarts > 1 the
// run of lowest final distortion is kept (ties to the earliest run).
ClusterModel kmeans_fit(const Dataset& dataset, std::size_t K, std::uint64_t seed, std::size_t max_iter = 100,
                        std::size_t restarts = 1);

// n x K one-hot matrix C.
Matrix assignment_matrix(const ClusterModel& model);

// n x K matrix D of squared euclidean distances to every centroid.
Matrix squared_distance_matrix(const ClusterModel& model, const Dataset& dataset);

// Per cluster, the member nearest its centroid (ties to smallest index).
// Empty clusters contribute nothing; output follows cluster order.
std::vector<std::size_t> medoid_indices(const ClusterModel& model, const Dataset& dataset);

double squared_distance(std::span<const float> x, std::span<const double> c);
double squared_distance(std::span<const float> x, std::span<const float> y);

}  // namespace frugal
