#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace frugal {

// Dense row-major matrix of doubles. Used for C, D, F and centroids.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    const std::vector<double>& data() const noexcept { return data_; }

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

enum class Label : std::int8_t { negative = -1, unknown = 0, positive = 1 };

using LabelVector = std::vector<Label>;

inline bool is_known(Label l) { return l != Label::unknown; }
inline double label_sign(Label l) { return static_cast<double>(static_cast<std::int8_t>(l)); }
Label label_from_int(int value);  // throws invalid_argument unless value is -1, 0 or 1

enum class FeatureMode { concat, absdiff };

const char* to_string(FeatureMode mode);
FeatureMode feature_mode_from_string(const std::string& s);

// Location of one patch pair inside the source scenes, plus the files the
// service serves for display. Paths are relative to the dataset directory.
struct PatchRef {
    std::uint32_t x = 0;
    std::uint32_t y = 0;
    std::string ref_file;
    std::string test_file;

    bool operator==(const PatchRef&) const = default;
};

struct PatchGrid {
    std::uint32_t patch_size = 30;
    std::uint32_t stride = 30;
    std::uint32_t image_width = 0;
    std::uint32_t image_height = 0;
    std::uint32_t channels = 3;

    bool operator==(const PatchGrid&) const = default;
};

// Pool of n patch pairs, one feature row each. Features are stored as 32-bit
// floats so that the on-disk blob round-trips bit-exactly.
struct Dataset {
    std::size_t n = 0;
    std::size_t d = 0;
    std::vector<float> features;  // n*d, row-major
    std::vector<std::string> ids;
    std::vector<PatchRef> patch_refs;  // empty, or one per sample
    FeatureMode feature_mode = FeatureMode::concat;
    std::optional<PatchGrid> grid;

    std::span<const float> row(std::size_t i) const { return {features.data() + i * d, d}; }

    // Subset in the given row order; ids and patch refs follow their rows.
    Dataset subset(std::span<const std::size_t> rows) const;

    bool operator==(const Dataset&) const = default;
};

enum class ViolationKind {
    empty_dataset,
    dimension_mismatch,
    non_finite_value,
    duplicate_id,
    id_count_mismatch,
    patch_ref_count_mismatch,
    label_length_mismatch,
};

const char* to_string(ViolationKind kind);

struct Violation {
    ViolationKind kind;
    std::string message;
    std::optional<std::size_t> row;
    std::optional<std::size_t> col;
};

struct ValidationReport {
    std::vector<Violation> violations;

    bool ok() const noexcept { return violations.empty(); }
    bool has(ViolationKind kind) const;
    std::string summary() const;
};

ValidationReport validate_dataset(const Dataset& dataset, const LabelVector* labels = nullptr);

struct Hyperparams {
    double alpha = 1.0;   // diversity
    double beta = 1.0;    // ambiguity
    double gamma = 1.0;   // cardinality / entropy regularizer
    // Weight of the representativity term; 0 masks it for the ablation rows
    // that exclude it while keeping the clustering structure.
    double rep_weight = 1.0;
    std::size_t K = 16;
    std::size_t B = 16;
    std::size_t T = 10;
    double eps_fp = 1e-8;
    std::size_t max_fp_iter = 100;
    double eps_score = 1e-3;
    double eps_mass = 1e-12;
    // Relaxation of the cluster-mass argument inside the fixed-point
    // iteration. 0 selects gamma / (gamma + alpha); 1 is the plain update.
    double fp_relaxation = 0.0;
    bool solve_unlabeled_only = false;
    double svm_lambda = 1e-3;
    std::size_t svm_epochs = 200;
    bool svm_balanced = true;
    std::size_t kmeans_max_iter = 100;
    std::size_t kmeans_restarts = 10;
    std::uint64_t seed = 0;

    bool operator==(const Hyperparams&) const = default;
};

struct FieldError {
    std::string field;
    std::string message;
};

// Checks every hyperparameter range; n is the pool size when known.
std::vector<FieldError> validate_hyperparams(const Hyperparams& hp, std::optional<std::size_t> n = {});

// Throws Error(invalid_argument) carrying the first field error.
void require_valid(const Hyperparams& hp, std::optional<std::size_t> n = {});

}  // namespace frugal
