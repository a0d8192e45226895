#include "triage/sampler/session.hpp"

#include <algorithm>

namespace triage::sampler {

std::string_view to_string(ActionKind kind) {
    switch (kind) {
        case ActionKind::RejectPatch: return "reject_patch";
        case ActionKind::RejectCluster: return "reject_cluster";
        case ActionKind::ExpandCluster: return "expand_cluster";
        case ActionKind::AcceptPatch: return "accept_patch";
    }
    return "?";
}

ActionKind parse_action_kind(std::string_view text) {
    for (auto k : {ActionKind::RejectPatch, ActionKind::RejectCluster, ActionKind::ExpandCluster, ActionKind::AcceptPatch}) {
        if (to_string(k) == text) return k;
    }
    throw std::invalid_argument("unknown feedback action '" + std::string(text) + "'");
}

const Cluster* Session::find_cluster(const std::string& id) const {
    auto it = std::find_if(active.begin(), active.end(), [&](const Cluster& c) { return c.id == id; });
    return it == active.end() ? nullptr : &*it;
}

const Cluster* Session::cluster_of(const std::string& patch_id) const {
    for (const auto& c : active) {
        if (std::binary_search(c.members.begin(), c.members.end(), patch_id)) return &c;
    }
    return nullptr;
}

RankedSample rank_active(const std::vector<Cluster>& active, const PatchSet& patches) {
    std::vector<Representative> reps;
    reps.reserve(active.size());
    for (const auto& c : active) reps.push_back(Representative{c.centroid, c.id});
    return rank_by_similarity(reps, patches);
}

Session start_session(const PatchSet& patches, const SampleResult& sampled, const SampleConfig& config,
                      std::string corpus) {
    Session s;
    s.corpus = std::move(corpus);
    s.config = config;
    s.dendrogram = sampled.dendrogram;
    s.active = sampled.clusters.clusters;
    s.ranked = rank_active(s.active, patches);
    return s;
}

namespace {

std::vector<Cluster>::iterator find_active(Session& s, const std::string& id) {
    return std::find_if(s.active.begin(), s.active.end(), [&](const Cluster& c) { return c.id == id; });
}

[[noreturn]] void unknown(const std::string& what, const std::string& id) {
    throw FeedbackError(FeedbackError::Kind::UnknownId, "unknown " + what + " '" + id + "'");
}

}  // namespace

Session feedback(const Session& session, const PatchSet& patches, const FeedbackAction& action,
                 std::int64_t timestamp_ms) {
    if (session.frozen()) {
        throw FeedbackError(FeedbackError::Kind::Frozen, "session is frozen: patch '" + *session.accepted + "' was accepted");
    }
    Session s = session;
    const CentroidRule rule = s.config.centroid;

    switch (action.kind) {
        case ActionKind::RejectPatch: {
            const Cluster* owner = s.cluster_of(action.target);
            if (!owner) unknown("patch", action.target);
            auto it = find_active(s, owner->id);
            auto& members = it->members;
            members.erase(std::find(members.begin(), members.end(), action.target));
            s.rejected_patches.insert(action.target);
            if (members.empty()) {
                s.active.erase(it);
            } else if (it->centroid == action.target) {
                it->centroid = select_centroid(members, patches, rule);
            }
            break;
        }
        case ActionKind::RejectCluster: {
            auto it = find_active(s, action.target);
            if (it == s.active.end()) unknown("cluster", action.target);
            s.rejected_patches.insert(it->members.begin(), it->members.end());
            s.rejected_clusters.insert(it->id);
            s.active.erase(it);
            break;
        }
        case ActionKind::ExpandCluster: {
            auto it = find_active(s, action.target);
            if (it == s.active.end()) unknown("cluster", action.target);
            if (it->members.size() <= 1 || s.dendrogram.is_leaf(it->node)) break;
            const auto& merge = s.dendrogram.merge_of(it->node);
            std::vector<Cluster> children;
            for (std::size_t child : {merge.left, merge.right}) {
                Cluster c;
                c.node = child;
                c.id = s.dendrogram.node_name(child);
                for (const auto& m : s.dendrogram.members(child)) {
                    if (std::binary_search(it->members.begin(), it->members.end(), m)) c.members.push_back(m);
                }
                if (c.members.empty()) continue;
                c.centroid = select_centroid(c.members, patches, rule);
                children.push_back(std::move(c));
            }
            s.navigation.push_back(it->id);
            it = s.active.erase(it);
            s.active.insert(it, children.begin(), children.end());
            break;
        }
        case ActionKind::AcceptPatch: {
            if (!s.cluster_of(action.target)) unknown("patch", action.target);
            s.accepted = action.target;
            break;
        }
    }
    s.ranked = rank_active(s.active, patches);
    s.log.push_back(LoggedAction{action, timestamp_ms});
    return s;
}

Session replay(const Session& initial, const PatchSet& patches, const std::vector<LoggedAction>& log) {
    Session s = initial;
    for (const auto& entry : log) s = feedback(s, patches, entry.action, entry.timestamp_ms);
    return s;
}

}  // namespace triage::sampler
