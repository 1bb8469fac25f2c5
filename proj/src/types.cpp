#include "frugal/types.hpp"

#include <cmath>
#include <sstream>
#include <unordered_map>

#include "frugal/error.hpp"

namespace frugal {

const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::invalid_argument: return "invalid-argument";
        case ErrorKind::invalid_state: return "invalid-state";
        case ErrorKind::numeric_failure: return "numeric-failure";
        case ErrorKind::io_error: return "io-error";
        case ErrorKind::version_error: return "version-error";
    }
    return "unknown";
}

Label label_from_int(int value) {
    switch (value) {
        case -1: return Label::negative;
        case 0: return Label::unknown;
        case 1: return Label::positive;
        default: fail(ErrorKind::invalid_argument, "label must be -1, 0 or +1, got " + std::to_string(value));
    }
}

const char* to_string(FeatureMode mode) {
    return mode == FeatureMode::concat ? "concat" : "absdiff";
}

FeatureMode feature_mode_from_string(const std::string& s) {
    if (s == "concat") return FeatureMode::concat;
    if (s == "absdiff") return FeatureMode::absdiff;
    fail(ErrorKind::invalid_argument, "unknown feature mode '" + s + "'");
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
    Dataset out;
    out.n = rows.size();
    out.d = d;
    out.feature_mode = feature_mode;
    out.grid = grid;
    out.features.reserve(rows.size() * d);
    out.ids.reserve(rows.size());
    for (std::size_t r : rows) {
        require(r < n, ErrorKind::invalid_argument, "subset row out of range");
        auto src = row(r);
        out.features.insert(out.features.end(), src.begin(), src.end());
        out.ids.push_back(ids[r]);
        if (!patch_refs.empty()) out.patch_refs.push_back(patch_refs[r]);
    }
    return out;
}

const char* to_string(ViolationKind kind) {
    switch (kind) {
        case ViolationKind::empty_dataset: return "empty-dataset";
        case ViolationKind::dimension_mismatch: return "dimension-mismatch";
        case ViolationKind::non_finite_value: return "non-finite-value";
        case ViolationKind::duplicate_id: return "duplicate-id";
        case ViolationKind::id_count_mismatch: return "id-count-mismatch";
        case ViolationKind::patch_ref_count_mismatch: return "patch-ref-count-mismatch";
        case ViolationKind::label_length_mismatch: return "label-length-mismatch";
    }
    return "unknown";
}

bool ValidationReport::has(ViolationKind kind) const {
    for (const auto& v : violations)
        if (v.kind == kind) return true;
    return false;
}

std::string ValidationReport::summary() const {
    if (ok()) return "pass";
    std::ostringstream os;
    for (std::size_t i = 0; i < violations.size(); ++i) {
        if (i) os << "; ";
        os << to_string(violations[i].kind) << ": " << violations[i].message;
    }
    return os.str();
}

ValidationReport validate_dataset(const Dataset& ds, const LabelVector* labels) {
    ValidationReport report;
    auto add = [&](ViolationKind kind, std::string msg, std::optional<std::size_t> row = {},
                   std::optional<std::size_t> col = {}) {
        report.violations.push_back({kind, std::move(msg), row, col});
    };

    if (ds.n == 0) add(ViolationKind::empty_dataset, "dataset has no samples");
    if (ds.d == 0) add(ViolationKind::dimension_mismatch, "feature dimension is zero");
    if (ds.features.size() != ds.n * ds.d) {
        add(ViolationKind::dimension_mismatch,
            "feature buffer holds " + std::to_string(ds.features.size()) + " values, expected n*d = " +
                std::to_string(ds.n * ds.d));
    } else {
        for (std::size_t i = 0; i < ds.n; ++i) {
            for (std::size_t j = 0; j < ds.d; ++j) {
                if (!std::isfinite(ds.features[i * ds.d + j])) {
                    add(ViolationKind::non_finite_value,
                        "non-finite value at row " + std::to_string(i) + ", column " + std::to_string(j), i, j);
                }
            }
        }
    }

    if (ds.ids.size() != ds.n) {
        add(ViolationKind::id_count_mismatch,
            std::to_string(ds.ids.size()) + " ids for " + std::to_string(ds.n) + " samples");
    }
    std::unordered_map<std::string, std::size_t> seen;
    for (std::size_t i = 0; i < ds.ids.size(); ++i) {
        auto [it, inserted] = seen.emplace(ds.ids[i], i);
        if (!inserted) {
            add(ViolationKind::duplicate_id,
                "id '" + ds.ids[i] + "' at row " + std::to_string(i) + " repeats row " + std::to_string(it->second), i);
        }
    }
    if (!ds.patch_refs.empty() && ds.patch_refs.size() != ds.n) {
        add(ViolationKind::patch_ref_count_mismatch,
            std::to_string(ds.patch_refs.size()) + " patch refs for " + std::to_string(ds.n) + " samples");
    }
    if (labels && labels->size() != ds.n) {
        add(ViolationKind::label_length_mismatch,
            "label-length mismatch: " + std::to_string(labels->size()) + " labels for " + std::to_string(ds.n) +
                " samples");
    }
    return report;
}

std::vector<FieldError> validate_hyperparams(const Hyperparams& hp, std::optional<std::size_t> n) {
    std::vector<FieldError> errs;
    auto finite_nonneg = [&](const char* name, double v) {
        if (!std::isfinite(v) || v < 0) errs.push_back({name, std::string(name) + " must be finite and >= 0"});
    };
    finite_nonneg("alpha", hp.alpha);
    finite_nonneg("beta", hp.beta);
    finite_nonneg("rep_weight", hp.rep_weight);
    if (!(hp.gamma > 0) || !std::isfinite(hp.gamma)) errs.push_back({"gamma", "gamma must be positive"});
    if (hp.K < 1) errs.push_back({"K", "K must be >= 1"});
    if (hp.B < 1) errs.push_back({"B", "B must be >= 1"});
    if (hp.T < 1) errs.push_back({"T", "T must be >= 1"});
    if (!(hp.eps_fp > 0)) errs.push_back({"eps_fp", "eps_fp must be positive"});
    if (hp.max_fp_iter < 1) errs.push_back({"max_fp_iter", "max_fp_iter must be >= 1"});
    if (!(hp.eps_score > 0 && hp.eps_score < 0.5)) errs.push_back({"eps_score", "eps_score must lie in (0, 0.5)"});
    if (!(hp.eps_mass > 0)) errs.push_back({"eps_mass", "eps_mass must be positive"});
    if (!(hp.fp_relaxation >= 0 && hp.fp_relaxation <= 1))
        errs.push_back({"fp_relaxation", "fp_relaxation must lie in [0, 1]"});
    if (!(hp.svm_lambda > 0)) errs.push_back({"svm_lambda", "svm_lambda must be positive"});
    if (hp.svm_epochs < 1) errs.push_back({"svm_epochs", "svm_epochs must be >= 1"});
    if (hp.kmeans_restarts < 1) errs.push_back({"kmeans_restarts", "kmeans_restarts must be >= 1"});
    if (hp.kmeans_max_iter < 1) errs.push_back({"kmeans_max_iter", "kmeans_max_iter must be >= 1"});
    if (n) {
        if (hp.B > *n) errs.push_back({"B", "B must not exceed the pool size " + std::to_string(*n)});
        if (hp.K > *n) errs.push_back({"K", "K must not exceed the pool size " + std::to_string(*n)});
    }
    return errs;
}

void require_valid(const Hyperparams& hp, std::optional<std::size_t> n) {
    auto errs = validate_hyperparams(hp, n);
    if (!errs.empty()) fail(ErrorKind::invalid_argument, errs.front().message);
}

}  // namespace frugal
