#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "frugal/types.hpp"

namespace frugal {

struct SvmConfig {
    double lambda = 1e-3;
    std::size_t epochs = 200;
    std::uint64_t seed = 0;
    // Weight each class by m / (2 m_class) so that both classes carry half
    // of the loss.
    bool class_balanced = true;

    std::uint64_t hash() const;
};

struct LinearModel {
    std::vector<double> weights;
    double bias = 0.0;
    std::size_t trained_on = 0;
    // Set when the training labels held a single class; the model then
    // predicts that class everywhere.
    bool single_class = false;
    std::uint64_t config_hash = 0;

    std::size_t d() const noexcept { return weights.size(); }
    double score(std::span<const float> x) const;

    bool operator==(const LinearModel&) const = default;
};

// Row-major labeled training block.
struct TrainingSet {
    std::size_t d = 0;
    std::vector<float> features;
    std::vector<Label> labels;

    std::size_t size() const noexcept { return labels.size(); }
    std::span<const float> row(std::size_t i) const { return {features.data() + i * d, d}; }
};

TrainingSet gather_training_set(const Dataset& dataset, std::span<const std::size_t> rows,
                                std::span<const Label> labels);

// Per-sample loss weights: all ones, or m / (2 m_class) when balanced.
std::vector<double> sample_weights(const TrainingSet& data, bool class_balanced);

// lambda/2 (|w|^2 + b^2) + weighted mean hinge. The bias is regularized with
// the weights (it is treated as a constant-one feature).
double svm_objective(const TrainingSet& data, std::span<const double> weights, double bias, double lambda,
                     bool class_balanced = true);

// One subgradient of svm_objective; samples exactly on the margin take the
// zero branch of the hinge. Output has d+1 entries, the bias last.
std::vector<double> svm_subgradient(const TrainingSet& data, std::span<const double> weights, double bias,
                                    double lambda, bool class_balanced = true);

// Pegasos stochastic subgradient descent with seeded shuffling. Returns the
// epoch iterate with the lowest objective, never worse than the zero model.
LinearModel train_svm(const TrainingSet& data, const SvmConfig& config);

std::vector<double> decision_scores(const LinearModel& model, const Dataset& dataset);

// Pool-wise min-max rescale then clamp to [eps, 1 - eps]; all-equal input
// maps to 0.5.
std::vector<double> normalize_scores(std::span<const double> raw, double eps_score);

// n x 2 matrix with rows (fhat, 1 - fhat).
Matrix scoring_matrix(std::span<const double> fhat);

// Constant F = 0.5 everywhere, used while no two-class model exists.
Matrix uniform_scoring_matrix(std::size_t n);

// Mean of the two per-class error rates at threshold 0.
double evaluate_eer(const LinearModel& model, const Dataset& eval, std::span<const Label> eval_labels);

// Checkpoint I/O. Layout: magic "FRUGMODL", u32 version, u64 d, f64 weights[d],
// f64 bias, u64 trained_on, u8 single_class, u64 config hash; little-endian.
void save_model(const LinearModel& model, const std::filesystem::path& path);
LinearModel load_model(const std::filesystem::path& path);

}  // namespace frugal
