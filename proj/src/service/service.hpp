#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "frugal/session.hpp"

namespace frugal::service {

struct ServiceConfig {
    std::string host = "127.0.0.1";
    std::filesystem::path data_root = "data";   // one dataset directory per name
    std::filesystem::path state_dir = "state";  // holds events.jsonl
};

struct Response {
    int status = 200;
    std::string body;
    std::string content_type = "application/json";
};

// Human-in-the-loop labeling sessions behind a small JSON API. Every
// mutation is appended to an event log first, and the constructor replays
// that log, so a restarted service resumes with identical sessions.
class Service {
public:
    explicit Service(ServiceConfig config);
    ~Service();
    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    Response create_session(const std::string& body);
    Response get_display(const std::string& session_id) const;
    Response post_labels(const std::string& session_id, const std::string& body);
    Response get_metrics(const std::string& session_id) const;
    Response get_patch(const std::string& sample_id, const std::string& side, const std::string& dataset) const;

    // Blocking HTTP server.
    bool listen(int port);
    // For embedding: bind an ephemeral port, then serve on another thread.
    int bind_any_port();
    bool listen_after_bind();
    void stop();
    void wait_until_ready() const;

    std::size_t session_count() const;
    std::optional<SessionState> snapshot(const std::string& session_id) const;
    std::filesystem::path event_log_path() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace frugal::service
