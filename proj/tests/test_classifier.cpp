#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>

#include "fixtures.hpp"
#include "frugal/classifier.hpp"
#include "frugal/error.hpp"

using namespace frugal;

namespace {

TrainingSet make_training(const Dataset& ds, const std::vector<Label>& labels) {
    std::vector<std::size_t> rows(ds.n);
    std::iota(rows.begin(), rows.end(), 0);
    return gather_training_set(ds, rows, labels);
}

// Model whose sign matches a chosen prediction per row.
LinearModel predictor_1d(double w, double b) {
    LinearModel m;
    m.weights = {w};
    m.bias = b;
    m.trained_on = 1;
    return m;
}

}  // namespace

TEST_CASE("separable pair") {
    auto ds = fixture::make_dataset({{-2}, {2}});
    auto data = make_training(ds, {Label::negative, Label::positive});
    SvmConfig cfg;
    cfg.lambda = 1e-3;
    cfg.seed = 4;
    auto model = train_svm(data, cfg);
    CHECK_FALSE(model.single_class);
    CHECK(model.score(ds.row(0)) < 0);
    CHECK(model.score(ds.row(1)) > 0);
    CHECK(model.trained_on == 2);
}

TEST_CASE("single class gives a flagged constant model") {
    auto ds = fixture::make_dataset({{1, 2}, {3, 4}, {5, 6}});
    auto data = make_training(ds, {Label::positive, Label::positive, Label::positive});
    auto model = train_svm(data, SvmConfig{});
    CHECK(model.single_class);
    for (std::size_t i = 0; i < 3; ++i) CHECK(model.score(ds.row(i)) > 0);

    auto neg = train_svm(make_training(ds, {Label::negative, Label::negative, Label::negative}), SvmConfig{});
    CHECK(neg.single_class);
    CHECK(neg.score(ds.row(0)) < 0);
}

TEST_CASE("training errors") {
    TrainingSet empty;
    empty.d = 2;
    try {
        train_svm(empty, SvmConfig{});
        FAIL("expected rejection");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::invalid_state);
    }
    auto ds = fixture::make_dataset({{1, 2}, {3, 4}});
    ds.features[3] = std::numeric_limits<float>::quiet_NaN();
    try {
        train_svm(make_training(ds, {Label::positive, Label::negative}), SvmConfig{});
        FAIL("expected rejection");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::invalid_argument);
    }
}

TEST_CASE("subgradient matches central differences away from the hinge kinks") {
    std::mt19937_64 gen(31);
    std::normal_distribution<double> nrm(0.0, 1.0);
    int checked = 0;
    while (checked < 10) {
        auto ds = fixture::random_dataset(15, 4, gen, 2.0);
        std::vector<Label> labels(15);
        for (std::size_t i = 0; i < 15; ++i) labels[i] = i % 3 == 0 ? Label::positive : Label::negative;
        auto data = make_training(ds, labels);
        std::vector<double> w(4);
        for (auto& v : w) v = nrm(gen);
        const double b = nrm(gen);

        const double h = 1e-6;
        bool near_kink = false;
        for (std::size_t i = 0; i < data.size(); ++i) {
            double m = b;
            for (std::size_t j = 0; j < 4; ++j) m += w[j] * data.row(i)[j];
            if (std::abs(label_sign(data.labels[i]) * m - 1.0) < 1e-3) near_kink = true;
        }
        if (near_kink) continue;
        ++checked;

        for (bool balanced : {true, false}) {
            const double lambda = 0.05;
            auto g = svm_subgradient(data, w, b, lambda, balanced);
            REQUIRE(g.size() == 5);
            std::vector<double> fd(5);
            for (std::size_t j = 0; j < 5; ++j) {
                auto wp = w, wm = w;
                double bp = b, bm = b;
                if (j < 4) {
                    wp[j] += h;
                    wm[j] -= h;
                } else {
                    bp += h;
                    bm -= h;
                }
                fd[j] = (svm_objective(data, wp, bp, lambda, balanced) - svm_objective(data, wm, bm, lambda, balanced)) /
                        (2 * h);
            }
            double err = 0, norm = 0;
            for (std::size_t j = 0; j < 5; ++j) {
                err += (g[j] - fd[j]) * (g[j] - fd[j]);
                norm += g[j] * g[j];
            }
            CHECK(std::sqrt(err / norm) < 1e-5);
        }
    }
}

TEST_CASE("trained model is never worse than the zero model") {
    std::mt19937_64 gen(5);
    for (int rep = 0; rep < 25; ++rep) {
        const std::size_t m = 2 + gen() % 40;
        auto ds = fixture::random_dataset(m, 3, gen);
        std::vector<Label> labels(m);
        for (auto& l : labels) l = gen() % 4 == 0 ? Label::positive : Label::negative;
        labels[0] = Label::positive;
        labels[1] = Label::negative;
        auto data = make_training(ds, labels);
        SvmConfig cfg;
        cfg.seed = rep;
        cfg.epochs = 1 + rep % 30;
        cfg.class_balanced = rep % 2 == 0;
        auto model = train_svm(data, cfg);
        const std::vector<double> zero(3, 0.0);
        CHECK(svm_objective(data, model.weights, model.bias, cfg.lambda, cfg.class_balanced) <=
              svm_objective(data, zero, 0.0, cfg.lambda, cfg.class_balanced) + 1e-12);
        CHECK(model == train_svm(data, cfg));
    }
}

TEST_CASE("class-balanced weights give each class half the loss") {
    auto ds = fixture::make_dataset({{0}, {1}, {2}, {3}});
    auto data = make_training(ds, {Label::positive, Label::negative, Label::negative, Label::negative});
    auto w = sample_weights(data, true);
    CHECK(w[0] == doctest::Approx(2.0));
    CHECK(w[1] == doctest::Approx(2.0 / 3));
    CHECK(sample_weights(data, false) == std::vector<double>(4, 1.0));
}

TEST_CASE("decision scores") {
    auto ds = fixture::make_dataset({{3, 7}});
    LinearModel m;
    m.weights = {1, 0};
    CHECK(decision_scores(m, ds) == std::vector<double>{3});
    m.weights = {0, 0};
    CHECK(decision_scores(m, ds) == std::vector<double>{0});

    auto wide = fixture::make_dataset({{1, 2, 3}});
    CHECK_THROWS_AS(decision_scores(m, wide), Error);

    std::mt19937_64 gen(2);
    auto rnd = fixture::random_dataset(25, 6, gen);
    std::normal_distribution<double> nrm;
    m.weights.resize(6);
    for (auto& v : m.weights) v = nrm(gen);
    m.bias = nrm(gen);
    auto scores = decision_scores(m, rnd);
    for (std::size_t i = 0; i < 25; ++i) {
        double s = m.bias;
        for (std::size_t j = 0; j < 6; ++j) s += m.weights[j] * rnd.row(i)[j];
        CHECK(scores[i] == doctest::Approx(s).epsilon(1e-12));
    }
}

TEST_CASE("score normalization") {
    auto f = normalize_scores(std::vector<double>{-2, 0, 2}, 1e-3);
    CHECK(f[0] == doctest::Approx(0.001));
    CHECK(f[1] == doctest::Approx(0.5));
    CHECK(f[2] == doctest::Approx(0.999));
    CHECK(normalize_scores(std::vector<double>{4, 4, 4}, 1e-3) == std::vector<double>{0.5, 0.5, 0.5});

    std::mt19937_64 gen(13);
    std::normal_distribution<double> nrm(0, 50);
    for (int rep = 0; rep < 100; ++rep) {
        std::vector<double> raw(2 + gen() % 30);
        for (auto& v : raw) v = nrm(gen);
        auto out = normalize_scores(raw, 1e-3);
        for (std::size_t i = 0; i < raw.size(); ++i) {
            CHECK(out[i] >= 1e-3);
            CHECK(out[i] <= 1 - 1e-3);
            for (std::size_t j = 0; j < raw.size(); ++j)
                if (raw[i] < raw[j]) CHECK(out[i] <= out[j]);
        }
    }
}

TEST_CASE("scoring matrix") {
    auto F = scoring_matrix(std::vector<double>{0.5, 0.999});
    CHECK(F(0, 0) == 0.5);
    CHECK(F(0, 1) == 0.5);
    CHECK(-(F(0, 0) * std::log(F(0, 0)) + F(0, 1) * std::log(F(0, 1))) == doctest::Approx(std::log(2.0)));
    CHECK(F(1, 0) == 0.999);
    CHECK(F(1, 1) == doctest::Approx(0.001));
    CHECK(F(1, 0) + F(1, 1) == 1.0);
    auto U = uniform_scoring_matrix(3);
    for (std::size_t i = 0; i < 3; ++i) CHECK(U(i, 1) == 0.5);
}

TEST_CASE("equal error rate") {
    // Scores are the raw x value; positives at x > 0.
    std::vector<double> xs;
    std::vector<Label> labels;
    SUBCASE("perfect") {
        xs = {1, 2, -1, -2};
        labels = {Label::positive, Label::positive, Label::negative, Label::negative};
        Dataset ds;
        ds.n = 4;
        ds.d = 1;
        for (double x : xs) ds.features.push_back(static_cast<float>(x));
        CHECK(evaluate_eer(predictor_1d(1, 0), ds, labels) == 0.0);
        CHECK(evaluate_eer(predictor_1d(1, 0.5), ds, labels) == 0.0);
        CHECK(evaluate_eer(predictor_1d(-1, -10), ds, labels) == 0.5);
    }
    SUBCASE("two of four positives and one of ten negatives wrong") {
        Dataset ds;
        ds.d = 1;
        for (int i = 0; i < 4; ++i) {
            ds.features.push_back(i < 2 ? -1.0f : 1.0f);
            labels.push_back(Label::positive);
        }
        for (int i = 0; i < 10; ++i) {
            ds.features.push_back(i < 1 ? 1.0f : -1.0f);
            labels.push_back(Label::negative);
        }
        ds.n = labels.size();
        CHECK(evaluate_eer(predictor_1d(1, 0), ds, labels) == doctest::Approx(0.3).epsilon(1e-15));
    }
    SUBCASE("one-class evaluation set") {
        auto ds = fixture::make_dataset({{1}, {2}});
        CHECK_THROWS_AS(evaluate_eer(predictor_1d(1, 0), ds, std::vector<Label>{Label::positive, Label::positive}),
                        Error);
    }
}

TEST_CASE("EER is unchanged by positive rescaling of the model") {
    std::mt19937_64 gen(41);
    std::normal_distribution<double> nrm;
    for (int rep = 0; rep < 50; ++rep) {
        auto ds = fixture::random_dataset(40, 3, gen);
        std::vector<Label> labels(40);
        for (std::size_t i = 0; i < 40; ++i) labels[i] = i % 5 == 0 ? Label::positive : Label::negative;
        LinearModel m;
        m.weights = {nrm(gen), nrm(gen), nrm(gen)};
        m.bias = nrm(gen);
        LinearModel scaled = m;
        for (auto& w : scaled.weights) w *= 3.7;
        scaled.bias *= 3.7;
        CHECK(evaluate_eer(m, ds, labels) == evaluate_eer(scaled, ds, labels));
    }
}

TEST_CASE("checkpoint round trip and corruption") {
    fixture::TempDir dir;
    LinearModel m;
    m.weights = {0.1, -2.5, 3e-12};
    m.bias = -0.75;
    m.trained_on = 48;
    m.single_class = false;
    m.config_hash = SvmConfig{}.hash();
    const auto path = dir.path() / "model.bin";
    save_model(m, path);
    CHECK(load_model(path) == m);

    SUBCASE("bad magic") {
        std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
        f.seekp(0);
        f.put('X');
        f.close();
        try {
            load_model(path);
            FAIL("expected rejection");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::version_error);
        }
    }
    SUBCASE("truncated") {
        std::filesystem::resize_file(path, std::filesystem::file_size(path) - 5);
        try {
            load_model(path);
            FAIL("expected rejection");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::io_error);
            CHECK(std::string(e.what()).find("expected") != std::string::npos);
        }
    }
    SUBCASE("missing") {
        CHECK_THROWS_AS(load_model(dir.path() / "nope.bin"), Error);
    }
}

TEST_CASE("config hash distinguishes configurations") {
    SvmConfig a, b;
    b.lambda = 2e-3;
    CHECK(a.hash() != b.hash());
    CHECK(a.hash() == SvmConfig{}.hash());
}
