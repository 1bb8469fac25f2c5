#include "frugal/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "binary_io.hpp"
#include "frugal/error.hpp"
#include "frugal/random.hpp"

namespace frugal {

namespace {
constexpr std::string_view kModelMagic = "FRUGMODL";
constexpr std::uint32_t kModelVersion = 1;

double dot(std::span<const double> w, std::span<const float> x) {
    double s = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) s += w[j] * static_cast<double>(x[j]);
    return s;
}
}  // namespace

std::uint64_t SvmConfig::hash() const {
    detail::ByteWriter w;
    w.f64(lambda);
    w.u64(epochs);
    w.u64(seed);
    w.u8(class_balanced ? 1 : 0);
    return detail::fnv1a(w.str());
}

double LinearModel::score(std::span<const float> x) const { return dot(weights, x) + bias; }

TrainingSet gather_training_set(const Dataset& ds, std::span<const std::size_t> rows, std::span<const Label> labels) {
    require(rows.size() == labels.size(), ErrorKind::invalid_argument, "row and label counts differ");
    TrainingSet out;
    out.d = ds.d;
    out.features.reserve(rows.size() * ds.d);
    for (std::size_t k = 0; k < rows.size(); ++k) {
        require(rows[k] < ds.n, ErrorKind::invalid_argument, "training row out of range");
        require(is_known(labels[k]), ErrorKind::invalid_argument, "training labels must be +1 or -1");
        auto x = ds.row(rows[k]);
        out.features.insert(out.features.end(), x.begin(), x.end());
        out.labels.push_back(labels[k]);
    }
    return out;
}

std::vector<double> sample_weights(const TrainingSet& data, bool class_balanced) {
    std::vector<double> c(data.size(), 1.0);
    if (!class_balanced) return c;
    const auto pos = static_cast<double>(std::count(data.labels.begin(), data.labels.end(), Label::positive));
    const double neg = static_cast<double>(data.size()) - pos;
    const double m = static_cast<double>(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        const double count = data.labels[i] == Label::positive ? pos : neg;
        c[i] = m / (2.0 * count);
    }
    return c;
}

double svm_objective(const TrainingSet& data, std::span<const double> weights, double bias, double lambda,
                     bool class_balanced) {
    double reg = bias * bias;
    for (double w : weights) reg += w * w;
    const auto c = sample_weights(data, class_balanced);
    double loss = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const double margin = label_sign(data.labels[i]) * (dot(weights, data.row(i)) + bias);
        loss += c[i] * std::max(0.0, 1.0 - margin);
    }
    return 0.5 * lambda * reg + loss / static_cast<double>(data.size());
}

std::vector<double> svm_subgradient(const TrainingSet& data, std::span<const double> weights, double bias,
                                    double lambda, bool class_balanced) {
    const std::size_t d = weights.size();
    std::vector<double> g(d + 1, 0.0);
    const auto c = sample_weights(data, class_balanced);
    const double inv_m = 1.0 / static_cast<double>(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        const double y = c[i] * label_sign(data.labels[i]);
        const auto x = data.row(i);
        if (label_sign(data.labels[i]) * (dot(weights, x) + bias) < 1.0) {
            for (std::size_t j = 0; j < d; ++j) g[j] -= inv_m * y * x[j];
            g[d] -= inv_m * y;
        }
    }
    for (std::size_t j = 0; j < d; ++j) g[j] += lambda * weights[j];
    g[d] += lambda * bias;
    return g;
}

LinearModel train_svm(const TrainingSet& data, const SvmConfig& config) {
    require(data.size() >= 1, ErrorKind::invalid_state, "cannot train on zero labeled samples");
    require(config.lambda > 0, ErrorKind::invalid_argument, "svm lambda must be positive");
    for (float v : data.features)
        require(std::isfinite(v), ErrorKind::invalid_argument, "non-finite training feature");

    const std::size_t m = data.size();
    const std::size_t d = data.d;
    LinearModel model;
    model.trained_on = m;
    model.config_hash = config.hash();
    model.weights.assign(d, 0.0);

    const auto positives = std::count(data.labels.begin(), data.labels.end(), Label::positive);
    if (positives == 0 || static_cast<std::size_t>(positives) == m) {
        model.single_class = true;
        model.bias = positives == 0 ? -1.0 : 1.0;
        return model;
    }

    // w = scale * v keeps the shrink step O(1).
    std::vector<double> v(d, 0.0);
    double scale = 1.0;
    double bias = 0.0;
    const double radius = 1.0 / std::sqrt(config.lambda);

    std::vector<double> best_w(d, 0.0);
    double best_b = 0.0;
    const auto weight = sample_weights(data, config.class_balanced);
    double best_obj = svm_objective(data, best_w, best_b, config.lambda, config.class_balanced);

    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(config.seed);
    std::vector<double> w(d);
    std::uint64_t step = 0;
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        rng.shuffle(order.begin(), order.end());
        for (std::size_t i : order) {
            ++step;
            const double eta = 1.0 / (config.lambda * static_cast<double>(step));
            const double y = label_sign(data.labels[i]);
            const auto x = data.row(i);
            double vx = 0.0;
            for (std::size_t j = 0; j < d; ++j) vx += v[j] * x[j];
            const double margin = y * (scale * vx + bias);

            const double shrink = 1.0 - eta * config.lambda;
            if (shrink <= 0.0) {
                std::fill(v.begin(), v.end(), 0.0);
                scale = 1.0;
            } else {
                scale *= shrink;
            }
            bias *= std::max(shrink, 0.0);
            if (margin < 1.0) {
                const double c = eta * weight[i] * y / scale;
                for (std::size_t j = 0; j < d; ++j) v[j] += c * x[j];
                bias += eta * weight[i] * y;
            }

            double norm2 = bias * bias;
            for (double vj : v) norm2 += scale * scale * vj * vj;
            if (norm2 > radius * radius) {
                const double f = radius / std::sqrt(norm2);
                scale *= f;
                bias *= f;
            }
            if (scale < 1e-100) {
                for (double& vj : v) vj *= scale;
                scale = 1.0;
            }
        }
        for (std::size_t j = 0; j < d; ++j) w[j] = scale * v[j];
        const double obj = svm_objective(data, w, bias, config.lambda, config.class_balanced);
        if (obj < best_obj) {
            best_obj = obj;
            best_w = w;
            best_b = bias;
        }
    }
    model.weights = std::move(best_w);
    model.bias = best_b;
    return model;
}

std::vector<double> decision_scores(const LinearModel& model, const Dataset& ds) {
    require(model.d() == ds.d, ErrorKind::invalid_argument,
            "model dimension " + std::to_string(model.d()) + " does not match dataset dimension " +
                std::to_string(ds.d));
    std::vector<double> s(ds.n);
    for (std::size_t i = 0; i < ds.n; ++i) s[i] = model.score(ds.row(i));
    return s;
}

std::vector<double> normalize_scores(std::span<const double> raw, double eps_score) {
    std::vector<double> out(raw.size(), 0.5);
    if (raw.empty()) return out;
    const auto [lo_it, hi_it] = std::minmax_element(raw.begin(), raw.end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    if (!(hi > lo)) return out;
    const double span = hi - lo;
    for (std::size_t i = 0; i < raw.size(); ++i)
        out[i] = std::clamp((raw[i] - lo) / span, eps_score, 1.0 - eps_score);
    return out;
}

Matrix scoring_matrix(std::span<const double> fhat) {
    Matrix F(fhat.size(), 2);
    for (std::size_t i = 0; i < fhat.size(); ++i) {
        F(i, 0) = fhat[i];
        F(i, 1) = 1.0 - fhat[i];
    }
    return F;
}

Matrix uniform_scoring_matrix(std::size_t n) { return Matrix(n, 2, 0.5); }

double evaluate_eer(const LinearModel& model, const Dataset& eval, std::span<const Label> eval_labels) {
    require(eval_labels.size() == eval.n, ErrorKind::invalid_argument, "eval label count mismatch");
    require(model.d() == eval.d, ErrorKind::invalid_argument, "model dimension does not match eval set");
    std::size_t pos = 0, neg = 0, pos_wrong = 0, neg_wrong = 0;
    for (std::size_t i = 0; i < eval.n; ++i) {
        if (!is_known(eval_labels[i])) continue;
        const bool predicted_positive = model.score(eval.row(i)) > 0.0;
        if (eval_labels[i] == Label::positive) {
            ++pos;
            if (!predicted_positive) ++pos_wrong;
        } else {
            ++neg;
            if (predicted_positive) ++neg_wrong;
        }
    }
    require(pos > 0 && neg > 0, ErrorKind::invalid_argument, "eval set must contain both classes");
    return 0.5 * (static_cast<double>(pos_wrong) / static_cast<double>(pos) +
                  static_cast<double>(neg_wrong) / static_cast<double>(neg));
}

void save_model(const LinearModel& model, const std::filesystem::path& path) {
    detail::ByteWriter w;
    w.bytes(kModelMagic);
    w.u32(kModelVersion);
    w.u64(model.weights.size());
    for (double x : model.weights) w.f64(x);
    w.f64(model.bias);
    w.u64(model.trained_on);
    w.u8(model.single_class ? 1 : 0);
    w.u64(model.config_hash);
    detail::write_file_atomic(path, w.str());
}

LinearModel load_model(const std::filesystem::path& path) {
    const std::string data = detail::read_file(path);
    detail::ByteReader r(data);
    if (r.remaining() < kModelMagic.size() + 12 || r.bytes(kModelMagic.size()) != kModelMagic)
        fail(ErrorKind::version_error, path.string() + " is not a model checkpoint (bad magic)");
    const std::uint32_t version = r.u32();
    if (version != kModelVersion)
        fail(ErrorKind::version_error, "model checkpoint version " + std::to_string(version) + " is not supported");
    const std::uint64_t d = r.u64();
    const std::size_t expected = kModelMagic.size() + 12 + 8 * d + 8 + 8 + 1 + 8;
    if (data.size() != expected)
        fail(ErrorKind::io_error, path.string() + ": expected " + std::to_string(expected) + " bytes, found " +
                                      std::to_string(data.size()));
    LinearModel m;
    m.weights.resize(d);
    for (auto& x : m.weights) x = r.f64();
    m.bias = r.f64();
    m.trained_on = r.u64();
    m.single_class = r.u8() != 0;
    m.config_hash = r.u64();
    return m;
}

}  // namespace frugal
