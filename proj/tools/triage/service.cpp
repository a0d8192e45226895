#include "service.hpp"

#include "triage/app/session_file.hpp"
#include "triage/distance/distance.hpp"

#include <chrono>

#include <httplib.h>

namespace triage::service {

using json = nlohmann::json;

namespace {

std::int64_t now_ms() {
    return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::system_clock::now().time_since_epoch())
        .count();
}

Response error(int status, const std::string& message, std::uint64_t revision) {
    return Response{status, json{{"error", message}, {"revision", revision}}};
}

}  // namespace

TriageService::TriageService(app::SessionFile file, std::optional<std::filesystem::path> session_path,
                             std::unique_ptr<app::Workspace> workspace)
    : file_(std::move(file)),
      patches_(file_.patch_set()),
      path_(std::move(session_path)),
      workspace_(std::move(workspace)) {
    worker_ = std::jthread([this](std::stop_token stop) { worker_loop(stop); });
    std::unique_lock lock(mutex_);
    enqueue_missing_locked();
}

TriageService::~TriageService() {
    worker_.request_stop();
    jobs_cv_.notify_all();
}

app::SessionFile TriageService::snapshot() const {
    std::shared_lock lock(mutex_);
    return file_;
}

json TriageService::session_json_locked() const {
    const auto& s = file_.session;
    json ranked = json::array();
    for (std::size_t i = 0; i < s.ranked.size(); ++i) {
        const auto& e = s.ranked[i];
        const sampler::Cluster* c = s.find_cluster(e.cluster_id);
        std::string table = "unavailable";
        if (file_.tables.contains(e.patch_id)) {
            table = "ready";
        } else if (workspace_) {
            table = "computing";
        }
        ranked.push_back(json{{"rank", i + 1},
                              {"patch_id", e.patch_id},
                              {"distance", e.distance},
                              {"cluster_id", e.cluster_id},
                              {"cluster_size", c ? c->members.size() : 0},
                              {"table", table}});
    }
    json body = app::to_json(s);
    body.erase("dendrogram");
    body["ranked"] = std::move(ranked);
    body["revision"] = file_.revision;
    body["frozen"] = s.frozen();
    return body;
}

Response TriageService::get_session() const {
    std::shared_lock lock(mutex_);
    return Response{200, session_json_locked()};
}

Response TriageService::get_clusters() const {
    std::shared_lock lock(mutex_);
    const auto& s = file_.session;
    const auto& d = s.dendrogram;
    std::function<json(std::size_t)> node = [&](std::size_t n) {
        const std::string id = d.node_name(n);
        const sampler::Cluster* active = s.find_cluster(id);
        json j{{"id", id},
               {"members", d.members(n)},
               {"active", active != nullptr},
               {"centroid", active ? json(active->centroid) : json(nullptr)},
               {"rejected", s.rejected_clusters.contains(id)}};
        if (d.is_leaf(n)) {
            j["children"] = json::array();
        } else {
            const auto& m = d.merge_of(n);
            j["height"] = m.height.to_string();
            j["children"] = json::array({node(m.left), node(m.right)});
        }
        return j;
    };
    json active = json::array();
    for (const auto& c : s.active) active.push_back(app::to_json(c));
    return Response{200, json{{"revision", file_.revision}, {"root", node(d.root())}, {"active", std::move(active)}}};
}

Response TriageService::get_table(const std::string& patch_id) {
    std::unique_lock lock(mutex_);
    if (auto it = file_.tables.find(patch_id); it != file_.tables.end()) {
        return Response{200, json{{"revision", file_.revision},
                                  {"patch_id", patch_id},
                                  {"status", "ready"},
                                  {"table", compare::table_to_json(it->second)}}};
    }
    if (!patches_.contains(patch_id)) return error(404, "unknown patch '" + patch_id + "'", file_.revision);
    if (!workspace_) return error(404, "no table for '" + patch_id + "' and the bundle is not available", file_.revision);
    {
        std::lock_guard jobs(jobs_mutex_);
        if (!pending_.contains(patch_id)) {
            pending_.insert(patch_id);
            jobs_.push_back(patch_id);
        }
    }
    jobs_cv_.notify_one();
    return Response{202, json{{"revision", file_.revision}, {"patch_id", patch_id}, {"status", "computing"}}};
}

Response TriageService::get_diff(const std::string& patch_id) const {
    std::shared_lock lock(mutex_);
    if (!patches_.contains(patch_id)) return error(404, "unknown patch '" + patch_id + "'", file_.revision);
    const sampler::Patch& p = patches_.at(patch_id);
    json ops = json::array();
    for (const auto& op : distance::token_diff(patches_.buggy_tokens(), p.tokens)) {
        ops.push_back(json{{"op", std::string(distance::to_string(op.kind))}, {"from", op.from}, {"to", op.to}});
    }
    return Response{200, json{{"revision", file_.revision},
                              {"patch_id", patch_id},
                              {"buggy", file_.buggy_text},
                              {"patch", p.replacement_text},
                              {"distance", p.distance_to_buggy},
                              {"ops", std::move(ops)}}};
}

Response TriageService::post_feedback(const std::string& body) {
    std::unique_lock lock(mutex_);
    json req;
    try {
        req = json::parse(body);
    } catch (const json::parse_error&) {
        return error(400, "feedback body is not JSON", file_.revision);
    }
    if (!req.is_object() || !req.contains("revision") || !req["revision"].is_number_unsigned() ||
        !req.contains("action") || !req["action"].is_string() || !req.contains("target") || !req["target"].is_string()) {
        return error(400, "feedback needs \"revision\", \"action\" and \"target\"", file_.revision);
    }
    if (req["revision"].get<std::uint64_t>() != file_.revision) {
        return error(409, "stale revision", file_.revision);
    }
    sampler::FeedbackAction action;
    try {
        action.kind = sampler::parse_action_kind(req["action"].get<std::string>());
    } catch (const std::invalid_argument& e) {
        return error(400, e.what(), file_.revision);
    }
    action.target = req["target"].get<std::string>();
    try {
        file_.session = sampler::feedback(file_.session, patches_, action, now_ms());
    } catch (const sampler::FeedbackError& e) {
        return error(e.kind() == sampler::FeedbackError::Kind::Frozen ? 409 : 404, e.what(), file_.revision);
    }
    ++file_.revision;
    persist_locked();
    enqueue_missing_locked();
    return Response{200, session_json_locked()};
}

void TriageService::persist_locked() const {
    if (path_) app::save_session(file_, *path_);
}

void TriageService::enqueue_missing_locked() {
    if (!workspace_) return;
    bool added = false;
    {
        std::lock_guard jobs(jobs_mutex_);
        for (const auto& e : file_.session.ranked) {
            if (file_.tables.contains(e.patch_id) || pending_.contains(e.patch_id)) continue;
            pending_.insert(e.patch_id);
            jobs_.push_back(e.patch_id);
            added = true;
        }
    }
    if (added) jobs_cv_.notify_one();
}

void TriageService::worker_loop(std::stop_token stop) {
    std::optional<app::VariantArtifacts> buggy;
    while (true) {
        std::string id;
        {
            std::unique_lock jobs(jobs_mutex_);
            busy_ = false;
            idle_cv_.notify_all();
            if (!jobs_cv_.wait(jobs, stop, [&] { return !jobs_.empty(); })) return;
            id = jobs_.front();
            jobs_.pop_front();
            busy_ = true;
        }
        std::optional<compare::ComparisonTable> table;
        std::string failure;
        try {
            if (!buggy) buggy = workspace_->trace_buggy();
            table = workspace_->compare(*buggy, workspace_->trace_patch(id));
        } catch (const std::exception& e) {
            failure = id + ": " + e.what();
        }
        {
            std::unique_lock lock(mutex_);
            if (table) {
                file_.tables[id] = std::move(*table);
            } else {
                file_.diagnostics.push_back(failure);
            }
            try {
                persist_locked();
            } catch (const std::exception&) {
                // The next feedback will try again.
            }
        }
        std::lock_guard jobs(jobs_mutex_);
        pending_.erase(id);
    }
}

void TriageService::wait_idle() {
    std::unique_lock jobs(jobs_mutex_);
    idle_cv_.wait(jobs, [&] { return jobs_.empty() && !busy_; });
}

void TriageService::install(httplib::Server& server) {
    auto send = [](httplib::Response& res, const Response& r) {
        res.status = r.status;
        res.set_content(r.body.dump(), "application/json");
    };
    server.Get("/session", [this, send](const httplib::Request&, httplib::Response& res) { send(res, get_session()); });
    server.Get("/clusters", [this, send](const httplib::Request&, httplib::Response& res) { send(res, get_clusters()); });
    server.Get(R"(/table/([^/]+))", [this, send](const httplib::Request& req, httplib::Response& res) {
        send(res, get_table(req.matches[1]));
    });
    server.Get(R"(/patch/([^/]+)/diff)", [this, send](const httplib::Request& req, httplib::Response& res) {
        send(res, get_diff(req.matches[1]));
    });
    server.Post("/feedback", [this, send](const httplib::Request& req, httplib::Response& res) {
        send(res, post_feedback(req.body));
    });
}

int serve(TriageService& service, const std::string& host, int port, const std::function<void(int)>& on_bound) {
    httplib::Server server;
    service.install(server);
    int bound = port;
    if (port == 0) {
        bound = server.bind_to_any_port(host);
    } else if (!server.bind_to_port(host, port)) {
        bound = -1;
    }
    if (bound < 0) throw std::runtime_error("cannot bind " + host + ":" + std::to_string(port));
    if (on_bound) on_bound(bound);
    return server.listen_after_bind() ? 0 : 1;
}

}  // namespace triage::service
