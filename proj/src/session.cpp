#include "frugal/session.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>

#include "frugal/error.hpp"
#include "frugal/random.hpp"

namespace frugal {

namespace {

enum SeedStream : std::uint64_t {
    kKmeansStream = 1,
    kSplitStream = 2,
    kSvmStream = 100,
    kSolverStream = 1000,
    kRandomStream = 10000,
};

SvmConfig svm_config(const Hyperparams& hp, std::size_t t) {
    return {hp.svm_lambda, hp.svm_epochs, mix_seed(hp.seed, kSvmStream + t), hp.svm_balanced};
}

Matrix rows_of(const Matrix& m, std::span<const std::size_t> rows) {
    Matrix out(rows.size(), m.cols());
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c) out(r, c) = m(rows[r], c);
    return out;
}

}  // namespace

TrainEvalSplit stratified_split(const Dataset& pool, const LabelVector& labels, std::uint64_t seed) {
    require(labels.size() == pool.n, ErrorKind::invalid_argument, "label-length mismatch");
    std::vector<std::size_t> pos, neg;
    for (std::size_t i = 0; i < pool.n; ++i) {
        require(is_known(labels[i]), ErrorKind::invalid_argument,
                "stratified split needs a label for every sample (row " + std::to_string(i) + ")");
        (labels[i] == Label::positive ? pos : neg).push_back(i);
    }
    const std::size_t n_train = pool.n / 2;
    const std::size_t train_pos = (pos.size() + 1) / 2;
    require(train_pos <= n_train && n_train - train_pos <= neg.size(), ErrorKind::invalid_argument,
            "cannot split the pool into stratified halves");
    const std::size_t train_neg = n_train - train_pos;

    Rng rng(mix_seed(seed, kSplitStream));
    rng.shuffle(pos.begin(), pos.end());
    rng.shuffle(neg.begin(), neg.end());

    TrainEvalSplit split;
    split.train_rows.assign(pos.begin(), pos.begin() + static_cast<std::ptrdiff_t>(train_pos));
    split.train_rows.insert(split.train_rows.end(), neg.begin(), neg.begin() + static_cast<std::ptrdiff_t>(train_neg));
    split.eval_rows.assign(pos.begin() + static_cast<std::ptrdiff_t>(train_pos), pos.end());
    split.eval_rows.insert(split.eval_rows.end(), neg.begin() + static_cast<std::ptrdiff_t>(train_neg), neg.end());
    std::sort(split.train_rows.begin(), split.train_rows.end());
    std::sort(split.eval_rows.begin(), split.eval_rows.end());

    auto fill = [&](const std::vector<std::size_t>& rows, LabeledSplit& out) {
        out.data = pool.subset(rows);
        out.labels.reserve(rows.size());
        for (std::size_t r : rows) out.labels.push_back(labels[r]);
    };
    fill(split.train_rows, split.train);
    fill(split.eval_rows, split.eval);
    return split;
}

OracleBinding OracleBinding::simulated(LabelVector ground_truth) {
    OracleBinding o;
    o.kind_ = Kind::simulated;
    o.truth_ = std::move(ground_truth);
    return o;
}

OracleBinding OracleBinding::human() { return OracleBinding{}; }

std::vector<Label> OracleBinding::answer(std::span<const std::size_t> display) const {
    require(kind_ == Kind::simulated, ErrorKind::invalid_state, "a human oracle cannot be queried programmatically");
    std::vector<Label> out;
    out.reserve(display.size());
    for (std::size_t i : display) {
        require(i < truth_.size() && is_known(truth_[i]), ErrorKind::invalid_state,
                "ground truth does not cover sample " + std::to_string(i));
        out.push_back(truth_[i]);
    }
    return out;
}

std::size_t SessionState::labeled_count() const {
    std::size_t c = 0;
    for (const auto& h : history) c += h.indices.size();
    return c;
}

std::vector<bool> SessionState::labeled_mask() const {
    std::vector<bool> mask(context->pool.n, false);
    for (const auto& h : history)
        for (std::size_t i : h.indices) mask[i] = true;
    return mask;
}

std::vector<std::size_t> SessionState::labeled_indices() const {
    std::vector<std::size_t> out;
    for (const auto& h : history) out.insert(out.end(), h.indices.begin(), h.indices.end());
    return out;
}

std::vector<std::size_t> initial_display(const ClusterModel& model, const Dataset& ds, std::size_t B) {
    const std::size_t K = model.K();
    std::vector<std::vector<std::size_t>> members(K);
    for (std::size_t i = 0; i < ds.n; ++i) members[model.assignment[i]].push_back(i);

    for (std::size_t k = 0; k < K; ++k) {
        std::vector<double> dist(members[k].size());
        for (std::size_t m = 0; m < members[k].size(); ++m)
            dist[m] = squared_distance(ds.row(members[k][m]), model.centroids.row(k));
        std::vector<std::size_t> order(members[k].size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return dist[a] < dist[b]; });
        std::vector<std::size_t> sorted;
        for (std::size_t o : order) sorted.push_back(members[k][o]);
        members[k] = std::move(sorted);
    }

    std::vector<std::size_t> clusters(K);
    std::iota(clusters.begin(), clusters.end(), std::size_t{0});
    std::stable_sort(clusters.begin(), clusters.end(),
                     [&](std::size_t a, std::size_t b) { return members[a].size() > members[b].size(); });

    std::vector<std::size_t> display;
    for (std::size_t rank = 0; display.size() < B; ++rank) {
        bool any = false;
        for (std::size_t k : clusters) {
            if (rank < members[k].size()) {
                any = true;
                display.push_back(members[k][rank]);
                if (display.size() == B) break;
            }
        }
        if (!any) break;
    }
    return display;
}

SessionState init_session(const Dataset& dataset, const Hyperparams& hp, SamplerKind strategy, OracleBinding oracle,
                          std::optional<LabeledSplit> eval) {
    const auto report = validate_dataset(dataset);
    require(report.ok(), ErrorKind::invalid_argument, "invalid dataset: " + report.summary());
    require_valid(hp, dataset.n);
    if (oracle.kind() == OracleBinding::Kind::simulated)
        require(oracle.ground_truth().size() == dataset.n, ErrorKind::invalid_argument,
                "simulated oracle ground truth must cover the pool");
    if (eval) {
        require(eval->data.d == dataset.d, ErrorKind::invalid_argument, "eval split dimension mismatch");
        require(eval->labels.size() == eval->data.n, ErrorKind::invalid_argument, "eval label count mismatch");
    }

    auto ctx = std::make_shared<SessionContext>();
    ctx->pool = dataset;
    ctx->hp = hp;
    ctx->strategy = strategy;
    ctx->oracle = std::move(oracle);
    ctx->eval = std::move(eval);
    ctx->clusters =
        kmeans_fit(dataset, hp.K, mix_seed(hp.seed, kKmeansStream), hp.kmeans_max_iter, hp.kmeans_restarts);
    ctx->C = assignment_matrix(ctx->clusters);
    ctx->D = squared_distance_matrix(ctx->clusters, dataset);

    SessionState state;
    state.pending_display = initial_display(ctx->clusters, ctx->pool, hp.B);
    state.context = std::move(ctx);
    return state;
}

DisplayChoice choose_display(const SessionContext& ctx, const std::vector<bool>& labeled_mask,
                             std::span<const std::size_t> labeled_idx, const LinearModel& model, std::size_t t,
                             std::size_t B) {
    const auto& hp = ctx.hp;
    DisplayChoice choice;
    switch (ctx.strategy) {
        case SamplerKind::proposed: {
            const Matrix F = model.single_class
                                 ? uniform_scoring_matrix(ctx.pool.n)
                                 : scoring_matrix(normalize_scores(decision_scores(model, ctx.pool), hp.eps_score));
            const std::uint64_t seed = mix_seed(hp.seed, kSolverStream + t);
            if (hp.solve_unlabeled_only) {
                std::vector<std::size_t> rows;
                for (std::size_t i = 0; i < ctx.pool.n; ++i)
                    if (!labeled_mask[i]) rows.push_back(i);
                require(!rows.empty(), ErrorKind::invalid_state, "every sample is already labeled");
                auto [sub, report] = solve(rows_of(ctx.C, rows), rows_of(ctx.D, rows), rows_of(F, rows), hp, seed);
                Membership full = sub;
                full.mu.assign(ctx.pool.n, 0.0);
                for (std::size_t r = 0; r < rows.size(); ++r) full.mu[rows[r]] = sub.mu[r];
                choice.objective_final = report.objective_trace.back();
                choice.indices = select_top_B(full.mu, labeled_mask, B);
                choice.membership = std::move(full);
            } else {
                auto [mu, report] = solve(ctx.C, ctx.D, F, hp, seed);
                choice.objective_final = report.objective_trace.back();
                choice.indices = select_top_B(mu.mu, labeled_mask, B);
                choice.membership = std::move(mu);
            }
            break;
        }
        case SamplerKind::maxmin:
            choice.indices = maxmin_select(ctx.pool, labeled_idx, B);
            break;
        case SamplerKind::uncertainty:
            choice.indices = uncertainty_select(decision_scores(model, ctx.pool), labeled_mask, B);
            break;
        case SamplerKind::random:
            choice.indices = random_select(labeled_mask, B, mix_seed(hp.seed, kRandomStream + t));
            break;
    }
    return choice;
}

SessionState submit_labels(const SessionState& state, std::span<const Label> answers) {
    require(!state.finished(), ErrorKind::invalid_state, "session has no pending display");
    require(answers.size() == state.pending_display.size(), ErrorKind::invalid_argument,
            "expected " + std::to_string(state.pending_display.size()) + " answers, got " +
                std::to_string(answers.size()));
    for (std::size_t k = 0; k < answers.size(); ++k)
        require(is_known(answers[k]), ErrorKind::invalid_argument,
                "answer for sample " + std::to_string(state.pending_display[k]) + " must be +1 or -1");

    const SessionContext& ctx = *state.context;
    const Hyperparams& hp = ctx.hp;

    SessionState next = state;
    next.history.push_back({state.pending_display, {answers.begin(), answers.end()}});
    next.pending_display.clear();

    std::vector<std::size_t> rows;
    std::vector<Label> labels;
    for (const auto& h : next.history) {
        rows.insert(rows.end(), h.indices.begin(), h.indices.end());
        labels.insert(labels.end(), h.labels.begin(), h.labels.end());
    }
    const LinearModel model = train_svm(gather_training_set(ctx.pool, rows, labels), svm_config(hp, state.t));
    next.current_model = model;

    IterationRecord rec;
    rec.t = state.t + 1;
    rec.labeled_count = rows.size();
    rec.samp_pct = 100.0 * static_cast<double>(rows.size()) / static_cast<double>(ctx.pool.n);
    rec.strategy = ctx.strategy;
    rec.single_class_model = model.single_class;
    if (ctx.eval) rec.eer = evaluate_eer(model, ctx.eval->data, ctx.eval->labels);

    const std::vector<bool> mask = next.labeled_mask();
    const bool pool_left = rows.size() < ctx.pool.n;
    std::size_t next_size = 0;
    if (ctx.oracle.kind() == OracleBinding::Kind::simulated) {
        if (state.t + 1 < hp.T) next_size = hp.B;
    } else {
        const std::size_t budget = hp.T * hp.B;
        if (rows.size() < budget) next_size = std::min(hp.B, budget - rows.size());
    }
    if (pool_left && next_size > 0) {
        auto choice = choose_display(ctx, mask, rows, model, state.t, next_size);
        next.pending_display = std::move(choice.indices);
        if (choice.membership) {
            rec.fp_iterations = choice.membership->tau;
            next.membership_last = std::move(choice.membership);
        }
        rec.objective_final = choice.objective_final;
    }
    next.metrics.records.push_back(rec);
    next.t = state.t + 1;
    return next;
}

MetricsTrace run_simulated(const Dataset& train, const LabelVector& ground_truth, const Hyperparams& hp_in,
                           SamplerKind strategy, const std::optional<LabeledSplit>& eval, std::uint64_t seed) {
    Hyperparams hp = hp_in;
    hp.seed = seed;
    if (eval) {
        bool pos = false, neg = false;
        for (Label l : eval->labels) {
            pos |= l == Label::positive;
            neg |= l == Label::negative;
        }
        require(pos && neg, ErrorKind::invalid_argument, "eval split must contain both classes");
    }
    SessionState state = init_session(train, hp, strategy, OracleBinding::simulated(ground_truth), eval);
    while (!state.finished()) {
        const auto answers = state.context->oracle.answer(state.pending_display);
        state = submit_labels(state, answers);
    }
    return state.metrics;
}

double sampling_rate(std::size_t t, std::size_t B, std::size_t n_train) {
    require(t >= 1, ErrorKind::invalid_argument, "sampling rate is defined for t >= 1");
    require(n_train >= 1, ErrorKind::invalid_argument, "n_train must be positive");
    return 100.0 * static_cast<double>(t * B) / static_cast<double>(n_train);
}

std::string format_samp_pct(std::size_t labeled, std::size_t n_train) {
    const std::uint64_t hundredths = static_cast<std::uint64_t>(labeled) * 10000 / n_train;
    char buf[48];
    std::snprintf(buf, sizeof buf, "%llu.%02llu", static_cast<unsigned long long>(hundredths / 100),
                  static_cast<unsigned long long>(hundredths % 100));
    return buf;
}

std::vector<AblationConfig> ablation_configs() {
    return {
        {"rep", true, false, false},     {"div", false, true, false},    {"amb", false, false, true},
        {"rep+div", true, true, false},  {"rep+amb", true, false, true}, {"div+amb", false, true, true},
        {"all", true, true, true},
    };
}

Hyperparams ablation_hyperparams(const Hyperparams& base, const AblationConfig& config) {
    Hyperparams hp = base;
    hp.rep_weight = config.rep ? base.rep_weight : 0.0;
    hp.alpha = config.div ? base.alpha : 0.0;
    hp.beta = config.amb ? base.beta : 0.0;
    return hp;
}

AblationTable run_ablation(const Dataset& train, const LabelVector& ground_truth, const Hyperparams& hp,
                           const LabeledSplit& eval, std::uint64_t seed) {
    AblationTable table;
    table.T = hp.T;
    table.n_train = train.n;
    for (const auto& cfg : ablation_configs()) {
        table.names.push_back(cfg.name);
        table.traces.push_back(
            run_simulated(train, ground_truth, ablation_hyperparams(hp, cfg), SamplerKind::proposed, eval, seed));
    }
    return table;
}

double run_fully_supervised(const Dataset& train, const LabelVector& ground_truth, const LabeledSplit& eval,
                            const Hyperparams& hp) {
    std::vector<std::size_t> rows;
    std::vector<Label> labels;
    for (std::size_t i = 0; i < train.n; ++i) {
        require(i < ground_truth.size() && is_known(ground_truth[i]), ErrorKind::invalid_argument,
                "fully supervised training needs every train label");
        rows.push_back(i);
        labels.push_back(ground_truth[i]);
    }
    const auto model = train_svm(gather_training_set(train, rows, labels), svm_config(hp, 0));
    return evaluate_eer(model, eval.data, eval.labels);
}

std::string format_eer(double eer) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", eer);
    return buf;
}

void write_metrics_csv_header(std::ostream& out) { out << "iter,samp_pct,eer,fp_iterations,objective,strategy,seed\n"; }

std::string metrics_csv_row(const IterationRecord& r, std::size_t n_train, std::uint64_t seed) {
    std::string row = std::to_string(r.t) + "," + format_samp_pct(r.labeled_count, n_train) + ",";
    if (r.eer) row += format_eer(*r.eer);
    row += "," + std::to_string(r.fp_iterations) + ",";
    if (r.objective_final) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.10g", *r.objective_final);
        row += buf;
    }
    row += std::string(",") + to_string(r.strategy) + "," + std::to_string(seed);
    return row;
}

void write_metrics_rows(const MetricsTrace& trace, std::size_t n_train, std::uint64_t seed, std::ostream& out) {
    for (const auto& r : trace.records) out << metrics_csv_row(r, n_train, seed) << '\n';
}

void write_metrics_csv(const MetricsTrace& trace, std::size_t n_train, std::uint64_t seed, std::ostream& out) {
    write_metrics_csv_header(out);
    write_metrics_rows(trace, n_train, seed, out);
}

void write_ablation_grid(const AblationTable& table, std::ostream& out) {
    int kLabel = 9;
    for (const auto& name : table.names) kLabel = std::max(kLabel, static_cast<int>(name.size()) + 1);
    constexpr int kCell = 7;
    char buf[64];
    auto label = [&](const std::string& s) {
        std::snprintf(buf, sizeof buf, "%-*s|", kLabel, s.c_str());
        out << buf;
    };
    auto cell = [&](const std::string& s) {
        std::snprintf(buf, sizeof buf, "%*s", kCell, s.c_str());
        out << buf;
    };

    label("Iter");
    for (std::size_t t = 1; t <= table.T; ++t) cell(std::to_string(t));
    out << '\n';
    label("Samp%");
    for (std::size_t t = 1; t <= table.T; ++t) {
        // Labeled count reached at iteration t by any row.
        std::size_t labeled = 0;
        for (const auto& trace : table.traces)
            if (t <= trace.records.size()) labeled = std::max(labeled, trace.records[t - 1].labeled_count);
        cell(format_samp_pct(labeled, table.n_train));
    }
    out << '\n' << std::string(static_cast<std::size_t>(kLabel), '=') << '+' << std::string(kCell * table.T, '=') << '\n';
    for (std::size_t r = 0; r < table.names.size(); ++r) {
        label(table.names[r]);
        for (std::size_t t = 1; t <= table.T; ++t) {
            const auto& recs = table.traces[r].records;
            if (t <= recs.size() && recs[t - 1].eer) {
                std::snprintf(buf, sizeof buf, "%.2f", 100.0 * *recs[t - 1].eer);
                cell(buf);
            } else {
                cell("-");
            }
        }
        out << '\n';
    }
}

}  // namespace frugal
