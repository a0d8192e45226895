#pragma once

#include "triage/sampler/sampling.hpp"

#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace triage::sampler {

enum class ActionKind { RejectPatch, RejectCluster, ExpandCluster, AcceptPatch };

std::string_view to_string(ActionKind kind);
ActionKind parse_action_kind(std::string_view text);

struct FeedbackAction {
    ActionKind kind = ActionKind::RejectPatch;
    std::string target;  // patch id or cluster id
    friend bool operator==(const FeedbackAction&, const FeedbackAction&) = default;
};

struct LoggedAction {
    FeedbackAction action;
    std::int64_t timestamp_ms = 0;
    friend bool operator==(const LoggedAction&, const LoggedAction&) = default;
};

class FeedbackError : public std::runtime_error {
  public:
    enum class Kind { UnknownId, Frozen };
    FeedbackError(Kind kind, const std::string& message) : std::runtime_error(message), kind_(kind) {}
    [[nodiscard]] Kind kind() const { return kind_; }

  private:
    Kind kind_;
};

// State of one interactive triage run. A plain value: feedback() returns a
// new Session and leaves its input untouched.
struct Session {
    std::string corpus;  // bundle path the patches came from
    SampleConfig config;
    Dendrogram dendrogram;
    std::vector<Cluster> active;  // clusters still offered to the user
    RankedSample ranked;
    std::set<std::string> rejected_patches;
    std::set<std::string> rejected_clusters;
    std::optional<std::string> accepted;
    std::vector<std::string> navigation;  // expanded cluster ids, oldest first
    std::vector<LoggedAction> log;

    [[nodiscard]] bool frozen() const { return accepted.has_value(); }
    [[nodiscard]] const Cluster* find_cluster(const std::string& id) const;
    [[nodiscard]] const Cluster* cluster_of(const std::string& patch_id) const;

    friend bool operator==(const Session&, const Session&) = default;
};

Session start_session(const PatchSet& patches, const SampleResult& sampled, const SampleConfig& config,
                      std::string corpus);

// Recomputes the ranked sample from the active clusters' centroids.
RankedSample rank_active(const std::vector<Cluster>& active, const PatchSet& patches);

Session feedback(const Session& session, const PatchSet& patches, const FeedbackAction& action,
                 std::int64_t timestamp_ms);

// Re-applies a log (with its recorded timestamps) to an initial session.
Session replay(const Session& initial, const PatchSet& patches, const std::vector<LoggedAction>& log);

}  // namespace triage::sampler
