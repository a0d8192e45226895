#include "triage/sampler/sampling.hpp"

#include <algorithm>
#include <stdexcept>
#include <tuple>

namespace triage::sampler {

namespace {

std::vector<std::int64_t> distance_sums(const std::vector<std::string>& cluster, const PatchSet& patches) {
    std::vector<std::size_t> idx;
    idx.reserve(cluster.size());
    for (const auto& id : cluster) idx.push_back(patches.index_of(id));
    std::vector<std::int64_t> sums(cluster.size(), 0);
    for (std::size_t i = 0; i < idx.size(); ++i) {
        for (std::size_t j = 0; j < idx.size(); ++j) {
            if (i != j) sums[i] += patches.matrix()(idx[i], idx[j]);
        }
    }
    return sums;
}

}  // namespace

std::map<std::string, Rational> representativeness(const std::vector<std::string>& cluster, const PatchSet& patches) {
    if (cluster.empty()) throw std::invalid_argument("representativeness: empty cluster");
    std::map<std::string, Rational> out;
    if (cluster.size() == 1) {
        out.emplace(cluster.front(), Rational(0, 1));
        return out;
    }
    const auto sums = distance_sums(cluster, patches);
    const auto den = static_cast<std::int64_t>(cluster.size() - 1);
    for (std::size_t i = 0; i < cluster.size(); ++i) out.emplace(cluster[i], Rational(sums[i], den));
    return out;
}

std::string select_centroid(const std::vector<std::string>& cluster, const PatchSet& patches, CentroidRule rule) {
    if (cluster.empty()) throw std::invalid_argument("select_centroid: empty cluster");
    // Every member shares the n - 1 denominator, so raw sums order like R.
    const auto sums = distance_sums(cluster, patches);
    std::size_t best = 0;
    for (std::size_t i = 1; i < cluster.size(); ++i) {
        const bool strictly = rule == CentroidRule::Min ? sums[i] < sums[best] : sums[i] > sums[best];
        if (strictly || (sums[i] == sums[best] && rank_before(patches.at(cluster[i]), patches.at(cluster[best])))) {
            best = i;
        }
    }
    return cluster[best];
}

std::vector<std::string> order_by_similarity(std::vector<std::string> ids, const PatchSet& patches) {
    std::sort(ids.begin(), ids.end(), [&](const std::string& a, const std::string& b) {
        const Patch& pa = patches.at(a);
        const Patch& pb = patches.at(b);
        return std::tie(pa.distance_to_buggy, pa.original_rank, pa.id) <
               std::tie(pb.distance_to_buggy, pb.original_rank, pb.id);
    });
    return ids;
}

RankedSample rank_by_similarity(const std::vector<Representative>& reps, const PatchSet& patches) {
    RankedSample out;
    out.reserve(reps.size());
    for (const auto& r : reps) {
        const Patch& p = patches.at(r.patch_id);
        out.push_back(RankedEntry{p.id, distance::levenshtein(p.tokens, patches.buggy_tokens()), r.cluster_id});
    }
    std::sort(out.begin(), out.end(), [&](const RankedEntry& a, const RankedEntry& b) {
        const int ra = patches.at(a.patch_id).original_rank;
        const int rb = patches.at(b.patch_id).original_rank;
        return std::tie(a.distance, ra, a.patch_id) < std::tie(b.distance, rb, b.patch_id);
    });
    return out;
}

SampleResult sample(const PatchSet& patches, const SampleConfig& config) {
    SampleResult result;
    result.dendrogram = cluster(patches.matrix(), patches.ids());
    result.clusters = config.clustering ? cut(result.dendrogram, config.cut) : cut_after(result.dendrogram, 0);

    std::vector<Representative> reps;
    for (auto& c : result.clusters.clusters) {
        for (auto& [id, r] : representativeness(c.members, patches)) result.clusters.representativeness.emplace(id, r);
        c.centroid = select_centroid(c.members, patches, config.centroid);
        reps.push_back(Representative{c.centroid, c.id});
    }
    result.ranked = rank_by_similarity(reps, patches);
    return result;
}

SampleResult sample(std::vector<Patch> patches, const distance::TokenSeq& buggy_tokens, const SampleConfig& config) {
    return sample(PatchSet(std::move(patches), buggy_tokens), config);
}

}  // namespace triage::sampler
