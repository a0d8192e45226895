#pragma once

#include "triage/app/pipeline.hpp"

#include <atomic>
#include <condition_variable>
#include <deque>
#include <functional>
#include <set>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <thread>

#include <nlohmann/json.hpp>

namespace httplib {
class Server;
}

namespace triage::service {

struct Response {
    int status = 200;
    nlohmann::json body;
};

// HTTP front end of one triage session. Feedback is applied in a single
// total order; each accepted action advances the revision by one and is
// persisted before the response is sent. Tables for representatives exposed
// by feedback are traced on a background thread.
class TriageService {
  public:
    // `workspace` may be null, in which case missing tables stay unavailable.
    TriageService(app::SessionFile file, std::optional<std::filesystem::path> session_path,
                  std::unique_ptr<app::Workspace> workspace);
    ~TriageService();
    TriageService(const TriageService&) = delete;
    TriageService& operator=(const TriageService&) = delete;

    Response get_session() const;
    Response get_clusters() const;
    Response get_table(const std::string& patch_id);
    Response get_diff(const std::string& patch_id) const;
    Response post_feedback(const std::string& body);

    void install(httplib::Server& server);
    // Blocks until every queued trace job has finished.
    void wait_idle();

    [[nodiscard]] app::SessionFile snapshot() const;

  private:
    nlohmann::json session_json_locked() const;
    void enqueue_missing_locked();
    void worker_loop(std::stop_token stop);
    void persist_locked() const;

    mutable std::shared_mutex mutex_;
    app::SessionFile file_;
    sampler::PatchSet patches_;
    std::optional<std::filesystem::path> path_;
    std::unique_ptr<app::Workspace> workspace_;

    std::mutex jobs_mutex_;
    std::condition_variable_any jobs_cv_;
    std::condition_variable_any idle_cv_;
    std::deque<std::string> jobs_;
    std::set<std::string> pending_;
    bool busy_ = false;
    std::jthread worker_;
};

// Serves on host:port until the process is stopped. `port` 0 picks any free
// port; `on_bound` is told the port actually bound.
int serve(TriageService& service, const std::string& host, int port, const std::function<void(int)>& on_bound = {});

}  // namespace triage::service
