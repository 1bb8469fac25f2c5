#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "frugal/classifier.hpp"
#include "frugal/clustering.hpp"
#include "frugal/display_optimizer.hpp"
#include "frugal/samplers.hpp"
#include "frugal/types.hpp"

namespace frugal {

struct LabeledSplit {
    Dataset data;
    LabelVector labels;
};

struct TrainEvalSplit {
    LabeledSplit train;
    LabeledSplit eval;
    std::vector<std::size_t> train_rows;  // rows of the source pool
    std::vector<std::size_t> eval_rows;
};

// Seeded half/half split that keeps the class ratio: the train half holds
// floor(n/2) rows of which ceil(positives/2) are positive. Both halves keep
// the source row order.
TrainEvalSplit stratified_split(const Dataset& pool, const LabelVector& labels, std::uint64_t seed);

class OracleBinding {
public:
    enum class Kind { simulated, human };

    static OracleBinding simulated(LabelVector ground_truth);
    static OracleBinding human();

    Kind kind() const noexcept { return kind_; }
    const LabelVector& ground_truth() const noexcept { return truth_; }

    // Simulated oracle answers; throws invalid_state for a human binding or
    // an index whose truth is unknown.
    std::vector<Label> answer(std::span<const std::size_t> display) const;

private:
    Kind kind_ = Kind::human;
    LabelVector truth_;
};

struct IterationRecord {
    std::size_t t = 0;               // 1-based: displays labeled so far
    std::size_t labeled_count = 0;   // sum of |D_k|
    double samp_pct = 0.0;           // labeled_count / n_train * 100
    std::optional<double> eer;
    std::size_t fp_iterations = 0;   // solver iterations behind the next display
    std::optional<double> objective_final;
    SamplerKind strategy = SamplerKind::proposed;
    bool single_class_model = false;

    bool operator==(const IterationRecord&) const = default;
};

struct MetricsTrace {
    std::vector<IterationRecord> records;

    bool operator==(const MetricsTrace&) const = default;
};

struct DisplayRecord {
    std::vector<std::size_t> indices;
    std::vector<Label> labels;

    bool operator==(const DisplayRecord&) const = default;
};

// Everything fixed at session start, shared by all successor states.
struct SessionContext {
    Dataset pool;
    Hyperparams hp;
    SamplerKind strategy = SamplerKind::proposed;
    OracleBinding oracle;
    std::optional<LabeledSplit> eval;
    ClusterModel clusters;
    Matrix C;
    Matrix D;
};

struct SessionState {
    std::shared_ptr<const SessionContext> context;
    std::size_t t = 0;
    std::vector<DisplayRecord> history;
    std::optional<LinearModel> current_model;
    std::vector<std::size_t> pending_display;
    std::optional<Membership> membership_last;
    MetricsTrace metrics;

    bool finished() const noexcept { return pending_display.empty(); }
    std::size_t labeled_count() const;
    std::vector<bool> labeled_mask() const;
    std::vector<std::size_t> labeled_indices() const;
};

// Fits K-means and sets the pending display to the cluster medoids,
// truncated or padded to B.
SessionState init_session(const Dataset& dataset, const Hyperparams& hp, SamplerKind strategy, OracleBinding oracle,
                          std::optional<LabeledSplit> eval = {});

// Display zero: medoids ordered by decreasing cluster size (ties to lower
// cluster index), keeping B of them; when fewer than B, runner-up members
// nearest their centroid are added round-robin over the same cluster order.
std::vector<std::size_t> initial_display(const ClusterModel& model, const Dataset& dataset, std::size_t B);

// Applies the oracle's answers (aligned with pending_display), retrains the
// classifier and selects the next display while budget remains.
SessionState submit_labels(const SessionState& state, std::span<const Label> answers);

// Builds the next display for the state's strategy from the given model.
struct DisplayChoice {
    std::vector<std::size_t> indices;
    std::optional<Membership> membership;
    std::optional<double> objective_final;
};
DisplayChoice choose_display(const SessionContext& ctx, const std::vector<bool>& labeled_mask,
                             std::span<const std::size_t> labeled_idx, const LinearModel& model, std::size_t t,
                             std::size_t B);

MetricsTrace run_simulated(const Dataset& train, const LabelVector& ground_truth, const Hyperparams& hp,
                           SamplerKind strategy, const std::optional<LabeledSplit>& eval, std::uint64_t seed);

double sampling_rate(std::size_t t, std::size_t B, std::size_t n_train);

// Percent of n_train covered by labeled samples, truncated to two decimals,
// e.g. 16/1100 -> "1.45", 96/1100 -> "8.72".
std::string format_samp_pct(std::size_t labeled, std::size_t n_train);

struct AblationConfig {
    std::string name;
    bool rep = false;
    bool div = false;
    bool amb = false;
};

// rep, div, amb, rep+div, rep+amb, div+amb, all.
std::vector<AblationConfig> ablation_configs();

// Hyperparams for one ablation row: excluded terms get weight 0, the
// cardinality term always keeps gamma.
Hyperparams ablation_hyperparams(const Hyperparams& base, const AblationConfig& config);

struct AblationTable {
    std::vector<std::string> names;
    std::vector<MetricsTrace> traces;
    std::size_t T = 0;
    std::size_t n_train = 0;
};

AblationTable run_ablation(const Dataset& train, const LabelVector& ground_truth, const Hyperparams& hp,
                           const LabeledSplit& eval, std::uint64_t seed);

double run_fully_supervised(const Dataset& train, const LabelVector& ground_truth, const LabeledSplit& eval,
                            const Hyperparams& hp);

// CSV header "iter,samp_pct,eer,fp_iterations,objective,strategy,seed".
void write_metrics_csv_header(std::ostream& out);
// Header plus rows; write_metrics_rows omits the header so several traces
// can share one file.
void write_metrics_csv(const MetricsTrace& trace, std::size_t n_train, std::uint64_t seed, std::ostream& out);
void write_metrics_rows(const MetricsTrace& trace, std::size_t n_train, std::uint64_t seed, std::ostream& out);
std::string metrics_csv_row(const IterationRecord& r, std::size_t n_train, std::uint64_t seed);
std::string format_eer(double eer);

// Text grid shaped like the ablation table: Iter and Samp% header rows, then
// one row of EER percentages per configuration.
void write_ablation_grid(const AblationTable& table, std::ostream& out);

}  // namespace frugal
