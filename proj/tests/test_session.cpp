#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <set>
#include <sstream>

#include "fixtures.hpp"
#include "frugal/datasets.hpp"
#include "frugal/error.hpp"
#include "frugal/session.hpp"

using namespace frugal;

namespace {

// Two well separated gaussian groups with the positives on one side.
std::pair<Dataset, LabelVector> separable_pool(std::size_t n, std::uint64_t seed) {
    SyntheticSpec spec;
    spec.n = n;
    spec.d = 5;
    spec.positive_rate = 0.2;
    spec.n_modes = 4;
    spec.positive_modes = 1;
    spec.separation = 10.0;
    spec.noise = 0.05;
    spec.seed = seed;
    return generate_synthetic(spec);
}

Hyperparams small_hp(std::size_t K, std::size_t B, std::size_t T) {
    Hyperparams hp;
    hp.K = K;
    hp.B = B;
    hp.T = T;
    hp.svm_epochs = 50;
    hp.kmeans_restarts = 2;
    return hp;
}

std::size_t blob_of(const Dataset& ds, std::size_t i) {
    return (ds.row(i)[0] > 10 ? 1 : 0) + (ds.row(i)[1] > 10 ? 2 : 0);
}

}  // namespace

TEST_CASE("display zero on four blobs holds one medoid per blob") {
    auto ds = fixture::four_blobs(25, 3);
    auto state = init_session(ds, small_hp(4, 4, 3), SamplerKind::proposed, OracleBinding::human());
    REQUIRE(state.pending_display.size() == 4);
    std::set<std::size_t> blobs;
    for (auto i : state.pending_display) blobs.insert(blob_of(ds, i));
    CHECK(blobs.size() == 4);
    auto medoids = medoid_indices(state.context->clusters, ds);
    CHECK(std::set<std::size_t>(medoids.begin(), medoids.end()) ==
          std::set<std::size_t>(state.pending_display.begin(), state.pending_display.end()));
    CHECK(state.t == 0);
    CHECK(state.history.empty());

    auto again = init_session(ds, small_hp(4, 4, 3), SamplerKind::proposed, OracleBinding::human());
    CHECK(again.pending_display == state.pending_display);
}

TEST_CASE("display zero is truncated or padded to B") {
    auto ds = fixture::four_blobs(10, 4);
    auto model = kmeans_fit(ds, 4, 1, 100, 3);
    auto two = initial_display(model, ds, 2);
    CHECK(two.size() == 2);
    auto six = initial_display(model, ds, 6);
    CHECK(six.size() == 6);
    CHECK(std::set<std::size_t>(six.begin(), six.end()).size() == 6);
    // The first four are the medoids, padding draws from distinct blobs first.
    CHECK(std::equal(two.begin(), two.end(), six.begin()));
    CHECK(blob_of(ds, six[4]) != blob_of(ds, six[5]));
}

TEST_CASE("B larger than the pool is rejected") {
    auto ds = fixture::four_blobs(2, 1);
    try {
        init_session(ds, small_hp(2, 9, 3), SamplerKind::random, OracleBinding::human());
        FAIL("expected rejection");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::invalid_argument);
    }
}

TEST_CASE("answering display zero advances the bookkeeping") {
    auto ds = fixture::four_blobs(25, 3);
    LabelVector truth(ds.n, Label::negative);
    for (std::size_t i = 0; i < ds.n; ++i)
        if (blob_of(ds, i) == 3) truth[i] = Label::positive;
    auto oracle = OracleBinding::simulated(truth);
    auto state = init_session(ds, small_hp(4, 4, 3), SamplerKind::proposed, oracle);
    auto next = submit_labels(state, oracle.answer(state.pending_display));
    REQUIRE(next.history.size() == 1);
    CHECK(next.history[0].indices.size() == 4);
    CHECK(next.t == 1);
    CHECK(next.pending_display.size() == 4);
    CHECK(next.current_model.has_value());
    REQUIRE(next.metrics.records.size() == 1);
    CHECK(next.metrics.records[0].t == 1);
    CHECK(next.metrics.records[0].labeled_count == 4);
    // The original state is untouched.
    CHECK(state.t == 0);
    CHECK(state.history.empty());
}

TEST_CASE("mismatched answers are rejected") {
    auto ds = fixture::four_blobs(10, 3);
    auto state = init_session(ds, small_hp(4, 4, 3), SamplerKind::proposed, OracleBinding::human());
    std::vector<Label> partial(3, Label::negative);
    CHECK_THROWS_AS(submit_labels(state, partial), Error);
    std::vector<Label> unknown(4, Label::negative);
    unknown[2] = Label::unknown;
    CHECK_THROWS_AS(submit_labels(state, unknown), Error);
}

TEST_CASE("T = 1 produces no further display") {
    auto [ds, truth] = separable_pool(120, 2);
    auto oracle = OracleBinding::simulated(truth);
    auto state = init_session(ds, small_hp(4, 4, 1), SamplerKind::proposed, oracle);
    auto next = submit_labels(state, oracle.answer(state.pending_display));
    CHECK(next.finished());
    CHECK(next.pending_display.empty());
    CHECK_THROWS_AS(submit_labels(next, std::vector<Label>{}), Error);
}

TEST_CASE("full runs never query a sample twice") {
    auto [ds, truth] = separable_pool(200, 5);
    auto oracle = OracleBinding::simulated(truth);
    for (auto kind : all_samplers()) {
        auto state = init_session(ds, small_hp(6, 8, 12), kind, oracle);
        while (!state.finished()) state = submit_labels(state, oracle.answer(state.pending_display));
        std::set<std::size_t> seen;
        std::size_t total = 0;
        for (const auto& h : state.history) {
            CHECK(h.indices.size() <= 8);
            total += h.indices.size();
            for (auto i : h.indices) CHECK(seen.insert(i).second);
        }
        CHECK(total <= 12 * 8);
        CHECK(state.metrics.records.size() == 12);
        for (std::size_t r = 1; r < state.metrics.records.size(); ++r) {
            CHECK(state.metrics.records[r].t == state.metrics.records[r - 1].t + 1);
            CHECK(state.metrics.records[r].samp_pct > state.metrics.records[r - 1].samp_pct);
        }
    }
}

TEST_CASE("human sessions stop at the label budget") {
    auto ds = fixture::four_blobs(10, 6);
    auto state = init_session(ds, small_hp(4, 4, 2), SamplerKind::random, OracleBinding::human());
    std::size_t rounds = 0;
    while (!state.finished()) {
        std::vector<Label> answers(state.pending_display.size(), Label::negative);
        answers[0] = Label::positive;
        state = submit_labels(state, answers);
        ++rounds;
    }
    CHECK(rounds == 2);
    CHECK(state.labeled_count() == 8);
}

TEST_CASE("pool exhaustion ends the session early") {
    auto [ds, truth] = separable_pool(20, 8);
    auto oracle = OracleBinding::simulated(truth);
    auto state = init_session(ds, small_hp(3, 8, 10), SamplerKind::maxmin, oracle);
    while (!state.finished()) state = submit_labels(state, oracle.answer(state.pending_display));
    CHECK(state.labeled_count() == 20);
    CHECK(state.history.back().indices.size() == 4);
}

TEST_CASE("sampling rate schedule") {
    CHECK(sampling_rate(1, 16, 1100) == doctest::Approx(100.0 * 16 / 1100));
    const char* expected[] = {"1.45", "2.90", "4.36", "5.81", "7.27", "8.72", "10.18", "11.63", "13.09", "14.54"};
    for (std::size_t t = 1; t <= 10; ++t) CHECK(format_samp_pct(t * 16, 2200 / 2) == expected[t - 1]);
    CHECK(format_samp_pct(5, 5) == "100.00");
}

TEST_CASE("simulated runs are replayable and share iteration-one EER across strategies") {
    SyntheticSpec spec;
    spec.n = 600;
    spec.seed = 3;
    auto [pool, labels] = generate_synthetic(spec);
    auto split = stratified_split(pool, labels, 3);
    Hyperparams hp = small_hp(8, 8, 5);
    std::optional<double> first;
    for (auto kind : all_samplers()) {
        auto a = run_simulated(split.train.data, split.train.labels, hp, kind, split.eval, 3);
        auto b = run_simulated(split.train.data, split.train.labels, hp, kind, split.eval, 3);
        CHECK(a == b);
        REQUIRE(a.records.size() == 5);
        REQUIRE(a.records[0].eer.has_value());
        if (!first) first = a.records[0].eer;
        CHECK(*a.records[0].eer == *first);

        std::ostringstream x, y;
        write_metrics_csv(a, split.train.data.n, 3, x);
        write_metrics_csv(b, split.train.data.n, 3, y);
        CHECK(x.str() == y.str());
    }
}

TEST_CASE("stratified split halves both classes") {
    SyntheticSpec spec;
    spec.n = 2200;
    spec.seed = 1;
    auto [pool, labels] = generate_synthetic(spec);
    auto split = stratified_split(pool, labels, 9);
    CHECK(split.train.data.n == 1100);
    CHECK(split.eval.data.n == 1100);
    auto positives = [](const LabelVector& l) { return std::count(l.begin(), l.end(), Label::positive); };
    CHECK(positives(split.train.labels) == 20);
    CHECK(positives(split.eval.labels) == 19);
    std::set<std::size_t> rows(split.train_rows.begin(), split.train_rows.end());
    for (auto r : split.eval_rows) CHECK(rows.insert(r).second);
    CHECK(rows.size() == 2200);
    CHECK(std::is_sorted(split.train_rows.begin(), split.train_rows.end()));
}

TEST_CASE("separable data reaches zero EER quickly and the supervised floor is zero") {
    auto [pool, labels] = separable_pool(400, 11);
    auto split = stratified_split(pool, labels, 11);
    Hyperparams hp = small_hp(8, 8, 4);
    auto trace = run_simulated(split.train.data, split.train.labels, hp, SamplerKind::proposed, split.eval, 11);
    CHECK(*trace.records.back().eer == 0.0);
    CHECK(run_fully_supervised(split.train.data, split.train.labels, split.eval, hp) == 0.0);
}

TEST_CASE("supervised floor is below every strategy's final EER") {
    SyntheticSpec spec;
    spec.seed = 21;
    auto [pool, labels] = generate_synthetic(spec);
    auto split = stratified_split(pool, labels, 21);
    Hyperparams hp;
    const double floor = run_fully_supervised(split.train.data, split.train.labels, split.eval, hp);
    for (auto kind : all_samplers()) {
        auto trace = run_simulated(split.train.data, split.train.labels, hp, kind, split.eval, 21);
        CHECK(floor <= *trace.records.back().eer + 0.02);
    }
}

TEST_CASE("restricting the solve to unlabeled rows still yields valid displays") {
    auto [ds, truth] = separable_pool(150, 4);
    auto oracle = OracleBinding::simulated(truth);
    Hyperparams hp = small_hp(5, 6, 6);
    hp.solve_unlabeled_only = true;
    auto state = init_session(ds, hp, SamplerKind::proposed, oracle);
    while (!state.finished()) {
        auto mask = state.labeled_mask();
        for (auto i : state.pending_display) CHECK_FALSE(mask[i]);
        state = submit_labels(state, oracle.answer(state.pending_display));
    }
    CHECK(state.labeled_count() == 36);
}

TEST_CASE("ablation grid") {
    SyntheticSpec spec;
    spec.n = 500;
    spec.seed = 7;
    auto [pool, labels] = generate_synthetic(spec);
    auto split = stratified_split(pool, labels, 7);

    auto configs = ablation_configs();
    REQUIRE(configs.size() == 7);
    Hyperparams base;
    auto all = ablation_hyperparams(base, configs.back());
    CHECK(configs.back().name == "all");
    CHECK(all == base);
    auto rep = ablation_hyperparams(base, configs[0]);
    CHECK(rep.alpha == 0);
    CHECK(rep.beta == 0);
    CHECK(rep.gamma == base.gamma);
    auto div = ablation_hyperparams(base, configs[1]);
    CHECK(div.rep_weight == 0);
    CHECK(div.beta == 0);

    for (std::size_t T : {1u, 3u}) {
        Hyperparams hp = small_hp(8, 8, T);
        auto table = run_ablation(split.train.data, split.train.labels, hp, split.eval, 7);
        REQUIRE(table.traces.size() == 7);
        for (const auto& trace : table.traces) {
            REQUIRE(trace.records.size() == T);
            CHECK(*trace.records[0].eer == *table.traces[0].records[0].eer);
        }
        std::ostringstream out;
        write_ablation_grid(table, out);
        std::istringstream lines(out.str());
        std::vector<std::string> rows;
        for (std::string line; std::getline(lines, line);) rows.push_back(line);
        REQUIRE(rows.size() == 10);
        CHECK(rows[0].rfind("Iter", 0) == 0);
        CHECK(rows[1].rfind("Samp%", 0) == 0);
        CHECK(rows[1].find("3.20") != std::string::npos);
        CHECK(rows[2].find_first_not_of("=+") == std::string::npos);
        for (std::size_t r = 3; r < 10; ++r) {
            std::istringstream cells(rows[r]);
            std::vector<std::string> tokens;
            for (std::string tok; cells >> tok;) tokens.push_back(tok);
            CHECK(tokens.size() == T + 2);
        }
    }
}

TEST_CASE("metrics csv layout") {
    IterationRecord r;
    r.t = 2;
    r.labeled_count = 32;
    r.eer = 0.125;
    r.fp_iterations = 3;
    r.objective_final = -1.5;
    std::ostringstream header;
    write_metrics_csv_header(header);
    CHECK(header.str() == "iter,samp_pct,eer,fp_iterations,objective,strategy,seed\n");
    CHECK(metrics_csv_row(r, 1100, 4) == "2,2.90,0.125000,3,-1.5,proposed,4");
    r.eer.reset();
    r.objective_final.reset();
    CHECK(metrics_csv_row(r, 1100, 4) == "2,2.90,,3,,proposed,4");
}
