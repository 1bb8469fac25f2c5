#include "service/service.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <map>
#include <mutex>
#include <random>
#include <shared_mutex>
#include <unordered_map>

#include "cli/log.hpp"
#include "binary_io.hpp"
#include "frugal/classifier.hpp"
#include "frugal/datasets.hpp"
#include "frugal/error.hpp"
#include "httplib.h"
#include "json.hpp"

namespace frugal::service {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kEventLog = "events.jsonl";

Response json_response(int status, const json& body) { return {status, body.dump(), "application/json"}; }

Response error_response(int status, const std::string& message, const std::string& field = {}) {
    json body{{"code", status}, {"message", message}};
    if (!field.empty()) body["field"] = field;
    return json_response(status, body);
}

// Carries an HTTP status out of request parsing.
struct HttpError {
    int status;
    std::string message;
    std::string field;
};

bool valid_name(const std::string& s) {
    if (s.empty() || s == "." || s == "..") return false;
    return std::all_of(s.begin(), s.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
    });
}

std::string utc_now() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string new_session_id() {
    static std::mutex mu;
    static std::random_device rd;
    std::lock_guard lock(mu);
    char buf[33];
    std::snprintf(buf, sizeof buf, "%08x%08x%08x%08x", rd(), rd(), rd(), rd());
    return buf;
}

template <class T>
void read_field(const json& obj, const char* name, T& target) {
    if (!obj.contains(name)) return;
    const json& v = obj.at(name);
    if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) throw HttpError{400, std::string(name) + " must be a boolean", name};
        target = v.get<bool>();
    } else if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_integer() || (v.is_number_integer() && v.get<long long>() < 0))
            throw HttpError{400, std::string(name) + " must be a non-negative integer", name};
        target = v.get<T>();
    } else {
        if (!v.is_number()) throw HttpError{400, std::string(name) + " must be a number", name};
        target = v.get<T>();
    }
}

Hyperparams parse_hyperparams(const json& obj) {
    Hyperparams hp;
    if (obj.is_null()) return hp;
    if (!obj.is_object()) throw HttpError{400, "hp must be an object", "hp"};
    static const std::vector<std::string> known{"alpha", "beta", "gamma", "K", "B", "T", "eps_fp", "max_fp_iter",
                                                "eps_score", "eps_mass", "fp_relaxation", "solve_unlabeled_only",
                                                "svm_lambda", "svm_epochs", "svm_balanced", "kmeans_max_iter",
                                                "kmeans_restarts"};
    for (const auto& [key, value] : obj.items())
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw HttpError{400, "unknown hyperparameter '" + key + "'", key};
    read_field(obj, "alpha", hp.alpha);
    read_field(obj, "beta", hp.beta);
    read_field(obj, "gamma", hp.gamma);
    read_field(obj, "K", hp.K);
    read_field(obj, "B", hp.B);
    read_field(obj, "T", hp.T);
    read_field(obj, "eps_fp", hp.eps_fp);
    read_field(obj, "max_fp_iter", hp.max_fp_iter);
    read_field(obj, "eps_score", hp.eps_score);
    read_field(obj, "eps_mass", hp.eps_mass);
    read_field(obj, "fp_relaxation", hp.fp_relaxation);
    read_field(obj, "solve_unlabeled_only", hp.solve_unlabeled_only);
    read_field(obj, "svm_lambda", hp.svm_lambda);
    read_field(obj, "svm_epochs", hp.svm_epochs);
    read_field(obj, "svm_balanced", hp.svm_balanced);
    read_field(obj, "kmeans_max_iter", hp.kmeans_max_iter);
    read_field(obj, "kmeans_restarts", hp.kmeans_restarts);
    return hp;
}

json hyperparams_json(const Hyperparams& hp) {
    return json{{"alpha", hp.alpha},
                {"beta", hp.beta},
                {"gamma", hp.gamma},
                {"K", hp.K},
                {"B", hp.B},
                {"T", hp.T},
                {"eps_fp", hp.eps_fp},
                {"max_fp_iter", hp.max_fp_iter},
                {"eps_score", hp.eps_score},
                {"eps_mass", hp.eps_mass},
                {"fp_relaxation", hp.fp_relaxation},
                {"solve_unlabeled_only", hp.solve_unlabeled_only},
                {"svm_lambda", hp.svm_lambda},
                {"svm_epochs", hp.svm_epochs},
                {"svm_balanced", hp.svm_balanced},
                {"kmeans_max_iter", hp.kmeans_max_iter},
                {"kmeans_restarts", hp.kmeans_restarts},
                {"seed", hp.seed}};
}

json record_json(const IterationRecord& r, std::size_t n_train) {
    json j{{"iter", r.t},
           {"labeled", r.labeled_count},
           {"samp_pct", r.samp_pct},
           {"samp_pct_text", format_samp_pct(r.labeled_count, n_train)},
           {"fp_iterations", r.fp_iterations},
           {"strategy", to_string(r.strategy)},
           {"single_class_model", r.single_class_model}};
    if (r.eer) j["eer"] = *r.eer;
    if (r.objective_final) j["objective"] = *r.objective_final;
    return j;
}

struct DatasetEntry {
    LoadedDataset loaded;
    fs::path dir;
};

struct SessionEntry {
    std::string id;
    std::string dataset;
    std::string created_at;
    bool eval_split = false;
    std::unordered_map<std::string, std::size_t> row_of;  // sample id -> pool row

    std::mutex writer;           // single writer per session
    mutable std::mutex pointer;  // guards the swap of `state`
    std::shared_ptr<const SessionState> state;
    std::shared_ptr<const std::vector<double>> fhat;  // normalized pool scores, when a model exists

    std::shared_ptr<const SessionState> current() const {
        std::lock_guard lock(pointer);
        return state;
    }
    std::shared_ptr<const std::vector<double>> scores() const {
        std::lock_guard lock(pointer);
        return fhat;
    }
    void publish(SessionState next) {
        std::shared_ptr<const std::vector<double>> f;
        if (next.current_model && !next.current_model->single_class)
            f = std::make_shared<const std::vector<double>>(normalize_scores(
                decision_scores(*next.current_model, next.context->pool), next.context->hp.eps_score));
        auto s = std::make_shared<const SessionState>(std::move(next));
        std::lock_guard lock(pointer);
        state = std::move(s);
        fhat = std::move(f);
    }
};

}  // namespace

struct Service::Impl {
    ServiceConfig config;
    mutable std::shared_mutex sessions_mu;
    std::map<std::string, std::shared_ptr<SessionEntry>> sessions;

    mutable std::mutex datasets_mu;
    mutable std::map<std::string, std::shared_ptr<const DatasetEntry>> datasets;

    std::mutex log_mu;
    std::ofstream log;

    httplib::Server server;

    std::shared_ptr<const DatasetEntry> dataset(const std::string& name) const {
        if (!valid_name(name)) return nullptr;
        std::lock_guard lock(datasets_mu);
        auto it = datasets.find(name);
        if (it != datasets.end()) return it->second;
        const fs::path dir = config.data_root / name;
        if (!fs::exists(dir / "manifest.json")) return nullptr;
        auto entry = std::make_shared<DatasetEntry>();
        entry->loaded = load_dataset(dir);
        entry->dir = dir;
        datasets[name] = entry;
        return entry;
    }

    std::shared_ptr<SessionEntry> session(const std::string& id) const {
        std::shared_lock lock(sessions_mu);
        auto it = sessions.find(id);
        return it == sessions.end() ? nullptr : it->second;
    }

    void append_event(const json& event) {
        std::lock_guard lock(log_mu);
        log << event.dump() << '\n';
        log.flush();
        if (!log) throw Error(ErrorKind::io_error, "cannot append to the event log");
    }

    // Builds a session from a creation request; throws HttpError.
    std::shared_ptr<SessionEntry> build(const json& req, const std::string& id, const std::string& created_at) {
        if (!req.is_object()) throw HttpError{400, "request body must be a JSON object", ""};
        if (!req.contains("dataset") || !req["dataset"].is_string())
            throw HttpError{400, "dataset is required", "dataset"};
        const std::string name = req["dataset"].get<std::string>();
        SamplerKind strategy = SamplerKind::proposed;
        if (req.contains("strategy")) {
            if (!req["strategy"].is_string()) throw HttpError{400, "strategy must be a string", "strategy"};
            try {
                strategy = sampler_from_string(req["strategy"].get<std::string>());
            } catch (const Error& e) {
                throw HttpError{400, e.what(), "strategy"};
            }
        }
        Hyperparams hp = parse_hyperparams(req.value("hp", json()));
        read_field(req, "seed", hp.seed);
        bool eval_split = false;
        read_field(req, "eval_split", eval_split);
        if (const auto errors = validate_hyperparams(hp); !errors.empty())
            throw HttpError{400, errors.front().message, errors.front().field};

        std::shared_ptr<const DatasetEntry> ds;
        try {
            ds = dataset(name);
        } catch (const Error& e) {
            throw HttpError{500, std::string("dataset '") + name + "' cannot be loaded: " + e.what(), "dataset"};
        }
        if (!ds) throw HttpError{404, "unknown dataset '" + name + "'", "dataset"};

        Dataset pool = ds->loaded.dataset;
        std::optional<LabeledSplit> eval;
        if (eval_split) {
            const auto& labels = ds->loaded.labels;
            if (!labels || std::count(labels->begin(), labels->end(), Label::unknown) > 0)
                throw HttpError{400, "eval_split needs a fully labeled dataset", "eval_split"};
            auto split = stratified_split(pool, *labels, hp.seed);
            pool = std::move(split.train.data);
            eval = std::move(split.eval);
        }
        if (const auto errors = validate_hyperparams(hp, pool.n); !errors.empty())
            throw HttpError{400, errors.front().message, errors.front().field};

        auto entry = std::make_shared<SessionEntry>();
        entry->id = id;
        entry->dataset = name;
        entry->created_at = created_at;
        entry->eval_split = eval_split;
        for (std::size_t i = 0; i < pool.n; ++i) entry->row_of.emplace(pool.ids[i], i);
        try {
            entry->publish(init_session(pool, hp, strategy, OracleBinding::human(), std::move(eval)));
        } catch (const Error& e) {
            throw HttpError{e.kind() == ErrorKind::invalid_argument ? 400 : 500, e.what(), ""};
        }
        return entry;
    }

    // Answers aligned with the pending display; throws HttpError.
    std::vector<Label> parse_answers(const SessionEntry& entry, const SessionState& state, const json& body) const {
        if (!body.is_object() || !body.contains("labels") || !body["labels"].is_array())
            throw HttpError{422, "body must hold a labels array", "labels"};
        std::map<std::size_t, Label> given;
        std::vector<std::string> unknown_ids, duplicate_ids, already;
        const auto mask = state.labeled_mask();
        for (const auto& item : body["labels"]) {
            if (!item.is_object() || !item.contains("sample_id") || !item["sample_id"].is_string())
                throw HttpError{422, "every label needs a sample_id string", "labels"};
            const std::string sid = item["sample_id"].get<std::string>();
            const json lab = item.value("label", json());
            if (!lab.is_number_integer() || (lab.get<long long>() != 1 && lab.get<long long>() != -1))
                throw HttpError{422, "label for " + sid + " must be +1 or -1", "labels"};
            auto it = entry.row_of.find(sid);
            if (it == entry.row_of.end()) {
                unknown_ids.push_back(sid);
                continue;
            }
            if (mask[it->second]) {
                already.push_back(sid);
                continue;
            }
            if (!given.emplace(it->second, lab.get<int>() > 0 ? Label::positive : Label::negative).second)
                duplicate_ids.push_back(sid);
        }
        auto join = [](const std::vector<std::string>& v) {
            std::string s;
            for (const auto& x : v) s += (s.empty() ? "" : ", ") + x;
            return s;
        };
        if (!already.empty() && given.empty() && unknown_ids.empty())
            throw HttpError{409, "labels already accepted for: " + join(already), "labels"};
        if (!unknown_ids.empty()) throw HttpError{422, "unknown sample ids: " + join(unknown_ids), "labels"};
        if (!duplicate_ids.empty()) throw HttpError{422, "duplicate labels for: " + join(duplicate_ids), "labels"};
        if (!already.empty()) throw HttpError{422, "labels already accepted for: " + join(already), "labels"};

        const auto& ids = state.context->pool.ids;
        std::vector<std::string> missing, extra;
        std::vector<Label> answers;
        for (auto idx : state.pending_display) {
            auto it = given.find(idx);
            if (it == given.end()) missing.push_back(ids[idx]);
            else answers.push_back(it->second);
        }
        for (const auto& [idx, label] : given)
            if (std::find(state.pending_display.begin(), state.pending_display.end(), idx) ==
                state.pending_display.end())
                extra.push_back(ids[idx]);
        if (!missing.empty()) throw HttpError{422, "missing labels for: " + join(missing), "labels"};
        if (!extra.empty()) throw HttpError{422, "not in the pending display: " + join(extra), "labels"};
        return answers;
    }

    static json labels_event(const SessionEntry& entry, const SessionState& state, std::span<const Label> answers) {
        json items = json::array();
        for (std::size_t k = 0; k < answers.size(); ++k)
            items.push_back({{"sample_id", state.context->pool.ids[state.pending_display[k]]},
                             {"label", static_cast<int>(label_sign(answers[k]))}});
        return json{{"event", "labeled"}, {"session_id", entry.id}, {"t", state.t}, {"labels", items}};
    }

    void replay() {
        std::ifstream in(config.state_dir / kEventLog);
        if (!in) return;
        std::string line;
        std::size_t line_no = 0, applied = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty()) continue;
            json ev;
            try {
                ev = json::parse(line);
            } catch (const json::exception&) {
                log::warn("event log line " + std::to_string(line_no) + " is not valid JSON; stopping replay");
                break;
            }
            const std::string kind = ev.value("event", "");
            const std::string id = ev.value("session_id", "");
            try {
                if (kind == "created") {
                    auto entry = build(ev.at("request"), id, ev.value("created_at", ""));
                    sessions[id] = entry;
                } else if (kind == "labeled") {
                    auto it = sessions.find(id);
                    if (it == sessions.end()) continue;
                    auto& entry = *it->second;
                    auto state = entry.current();
                    if (ev.value("t", std::size_t{0}) != state->t) continue;
                    const auto answers = parse_answers(entry, *state, ev);
                    entry.publish(submit_labels(*state, answers));
                }
                ++applied;
            } catch (const HttpError& e) {
                log::warn("event log line " + std::to_string(line_no) + " skipped: " + e.message);
            } catch (const std::exception& e) {
                log::warn("event log line " + std::to_string(line_no) + " skipped: " + e.what());
            }
        }
        log::info("replayed " + std::to_string(applied) + " events into " + std::to_string(sessions.size()) +
                  " sessions");
    }

    void install_routes(Service& svc) {
        auto send = [](httplib::Response& res, const Response& r) {
            res.status = r.status;
            res.set_content(r.body, r.content_type);
        };
        server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                                    {"Access-Control-Allow-Headers", "Content-Type"},
                                    {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});
        server.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
        server.Get("/health", [](const httplib::Request&, httplib::Response& res) {
            res.set_content(R"({"status":"ok"})", "application/json");
        });
        server.Post("/sessions", [&svc, send](const httplib::Request& req, httplib::Response& res) {
            send(res, svc.create_session(req.body));
        });
        server.Get(R"(/sessions/([^/]+)/display)", [&svc, send](const httplib::Request& req, httplib::Response& res) {
            send(res, svc.get_display(req.matches[1]));
        });
        server.Post(R"(/sessions/([^/]+)/labels)", [&svc, send](const httplib::Request& req, httplib::Response& res) {
            send(res, svc.post_labels(req.matches[1], req.body));
        });
        server.Get(R"(/sessions/([^/]+)/metrics)", [&svc, send](const httplib::Request& req, httplib::Response& res) {
            send(res, svc.get_metrics(req.matches[1]));
        });
        server.Get(R"(/patches/([^/]+)/([^/]+))", [&svc, send](const httplib::Request& req, httplib::Response& res) {
            send(res, svc.get_patch(req.matches[1], req.matches[2], req.get_param_value("dataset")));
        });
        server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
            if (res.body.empty()) {
                const auto r = error_response(res.status, res.status == 404 ? "no such route" : "request failed");
                res.set_content(r.body, r.content_type);
            }
        });
        server.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
            std::string msg = "internal error";
            try {
                if (ep) std::rethrow_exception(ep);
            } catch (const std::exception& e) {
                msg = e.what();
            }
            const auto r = error_response(500, msg);
            res.status = 500;
            res.set_content(r.body, r.content_type);
        });
    }
};

Service::Service(ServiceConfig config) : impl_(std::make_unique<Impl>()) {
    impl_->config = std::move(config);
    fs::create_directories(impl_->config.state_dir);
    impl_->replay();
    impl_->log.open(impl_->config.state_dir / kEventLog, std::ios::app);
    if (!impl_->log) fail(ErrorKind::io_error, "cannot open " + (impl_->config.state_dir / kEventLog).string());
    impl_->install_routes(*this);
}

Service::~Service() { impl_->server.stop(); }

Response Service::create_session(const std::string& body) {
    json req;
    try {
        req = json::parse(body);
    } catch (const json::exception&) {
        return error_response(400, "request body is not valid JSON");
    }
    const std::string id = new_session_id();
    const std::string created_at = utc_now();
    std::shared_ptr<SessionEntry> entry;
    try {
        entry = impl_->build(req, id, created_at);
        impl_->append_event({{"event", "created"}, {"session_id", id}, {"created_at", created_at}, {"request", req}});
    } catch (const HttpError& e) {
        return error_response(e.status, e.message, e.field);
    } catch (const Error& e) {
        return error_response(500, e.what());
    }
    {
        std::unique_lock lock(impl_->sessions_mu);
        impl_->sessions[id] = entry;
    }
    const auto state = entry->current();
    log::info("created session " + id + " on " + entry->dataset);
    return json_response(201, json{{"session_id", id},
                                   {"created_at", created_at},
                                   {"dataset", entry->dataset},
                                   {"strategy", to_string(state->context->strategy)},
                                   {"eval_split", entry->eval_split},
                                   {"hp", hyperparams_json(state->context->hp)},
                                   {"display", "/sessions/" + id + "/display"}});
}

Response Service::get_display(const std::string& session_id) const {
    auto entry = impl_->session(session_id);
    if (!entry) return error_response(404, "unknown session '" + session_id + "'");
    const auto state = entry->current();
    const auto fhat = entry->scores();
    if (state->finished()) return error_response(409, "session is finished: the label budget is exhausted");
    const auto& pool = state->context->pool;
    json items = json::array();
    for (auto idx : state->pending_display) {
        const std::string& sid = pool.ids[idx];
        json item{{"sample_id", sid}, {"ref", nullptr}, {"test", nullptr}};
        if (!pool.patch_refs.empty()) {
            item["ref"] = "/patches/" + sid + "/ref?dataset=" + entry->dataset;
            item["test"] = "/patches/" + sid + "/test?dataset=" + entry->dataset;
        }
        if (fhat) item["score"] = (*fhat)[idx];
        items.push_back(std::move(item));
    }
    return json_response(200, json{{"session_id", session_id}, {"t", state->t}, {"items", items}});
}

Response Service::post_labels(const std::string& session_id, const std::string& body) {
    auto entry = impl_->session(session_id);
    if (!entry) return error_response(404, "unknown session '" + session_id + "'");
    json req;
    try {
        req = json::parse(body);
    } catch (const json::exception&) {
        return error_response(400, "request body is not valid JSON");
    }
    std::unique_lock writer(entry->writer, std::try_to_lock);
    if (!writer.owns_lock()) return error_response(409, "another submission for this session is in progress");
    const auto state = entry->current();
    if (state->finished()) return error_response(409, "session is finished: the label budget is exhausted");
    if (req.is_object() && req.contains("t")) {
        if (!req["t"].is_number_integer() || req["t"].get<long long>() != static_cast<long long>(state->t))
            return error_response(409, "display for t = " + req["t"].dump() + " is no longer pending", "t");
    }
    std::vector<Label> answers;
    try {
        answers = impl_->parse_answers(*entry, *state, req);
    } catch (const HttpError& e) {
        return error_response(e.status, e.message, e.field);
    }
    try {
        impl_->append_event(Impl::labels_event(*entry, *state, answers));
        entry->publish(submit_labels(*state, answers));
    } catch (const Error& e) {
        return error_response(e.kind() == ErrorKind::numeric_failure ? 500 : 422, e.what());
    }
    const auto next = entry->current();
    impl_->append_event({{"event", "advanced"}, {"session_id", session_id}, {"t", next->t}});
    json records = json::array();
    for (const auto& r : next->metrics.records) records.push_back(record_json(r, next->context->pool.n));
    json out{{"session_id", session_id}, {"t", next->t}, {"finished", next->finished()}, {"metrics", records}};
    out["display"] = next->finished() ? json() : json("/sessions/" + session_id + "/display");
    return json_response(200, out);
}

Response Service::get_metrics(const std::string& session_id) const {
    auto entry = impl_->session(session_id);
    if (!entry) return error_response(404, "unknown session '" + session_id + "'");
    const auto state = entry->current();
    json records = json::array();
    for (const auto& r : state->metrics.records) records.push_back(record_json(r, state->context->pool.n));
    const auto& hp = state->context->hp;
    return json_response(200, json{{"session_id", session_id},
                                   {"strategy", to_string(state->context->strategy)},
                                   {"t", state->t},
                                   {"finished", state->finished()},
                                   {"n_train", state->context->pool.n},
                                   {"budget_labels", hp.T * hp.B},
                                   {"labeled", state->labeled_count()},
                                   {"records", records}});
}

Response Service::get_patch(const std::string& sample_id, const std::string& side,
                            const std::string& dataset_name) const {
    if (side != "ref" && side != "test") return error_response(404, "side must be ref or test");
    std::vector<std::string> names;
    if (!dataset_name.empty()) {
        names.push_back(dataset_name);
    } else {
        std::error_code ec;
        for (const auto& d : fs::directory_iterator(impl_->config.data_root, ec))
            if (d.is_directory()) names.push_back(d.path().filename().string());
        std::sort(names.begin(), names.end());
    }
    for (const auto& name : names) {
        std::shared_ptr<const DatasetEntry> ds;
        try {
            ds = impl_->dataset(name);
        } catch (const Error&) {
            continue;
        }
        if (!ds) continue;
        const auto& data = ds->loaded.dataset;
        const auto it = std::find(data.ids.begin(), data.ids.end(), sample_id);
        if (it == data.ids.end() || data.patch_refs.empty()) continue;
        const auto& ref = data.patch_refs[static_cast<std::size_t>(it - data.ids.begin())];
        const fs::path rel = fs::path(side == "ref" ? ref.ref_file : ref.test_file).lexically_normal();
        if (rel.is_absolute() || rel.empty() || *rel.begin() == "..")
            return error_response(404, "patch path escapes the dataset directory");
        try {
            return {200, detail::read_file(ds->dir / rel), "image/png"};
        } catch (const Error& e) {
            return error_response(404, e.what());
        }
    }
    return error_response(404, "no patch for sample '" + sample_id + "'");
}

bool Service::listen(int port) { return impl_->server.listen(impl_->config.host, port); }
int Service::bind_any_port() { return impl_->server.bind_to_any_port(impl_->config.host); }
bool Service::listen_after_bind() { return impl_->server.listen_after_bind(); }
void Service::stop() { impl_->server.stop(); }
void Service::wait_until_ready() const { impl_->server.wait_until_ready(); }

std::size_t Service::session_count() const {
    std::shared_lock lock(impl_->sessions_mu);
    return impl_->sessions.size();
}

std::optional<SessionState> Service::snapshot(const std::string& session_id) const {
    auto entry = impl_->session(session_id);
    if (!entry) return std::nullopt;
    return *entry->current();
}

fs::path Service::event_log_path() const { return impl_->config.state_dir / kEventLog; }

}  // namespace frugal::service
