#pragma once

#include "triage/sampler/clustering.hpp"
#include "triage/sampler/patch.hpp"

#include <map>
#include <string>
#include <vector>

namespace triage::sampler {

// Which end of the representativeness scale picks a cluster's representative.
// Min is the medoid; Max is the literal "largest average distance" reading,
// kept for comparison.
enum class CentroidRule { Min, Max };

struct SampleConfig {
    CutPolicy cut;
    bool clustering = true;  // false: rank every patch by similarity only
    CentroidRule centroid = CentroidRule::Min;
    friend bool operator==(const SampleConfig&, const SampleConfig&) = default;
};

// Average distance from each member to the other members; 0 for a singleton.
std::map<std::string, Rational> representativeness(const std::vector<std::string>& cluster, const PatchSet& patches);

// Member with the smallest (or, for Max, largest) representativeness; ties go
// to the lower original rank, then the smaller id.
std::string select_centroid(const std::vector<std::string>& cluster, const PatchSet& patches,
                            CentroidRule rule = CentroidRule::Min);

struct RankedEntry {
    std::string patch_id;
    std::size_t distance = 0;  // to the buggy region
    std::string cluster_id;
    friend bool operator==(const RankedEntry&, const RankedEntry&) = default;
};

using RankedSample = std::vector<RankedEntry>;

struct Representative {
    std::string patch_id;
    std::string cluster_id;
};

// Ascending distance to the buggy tokens; ties by original rank, then id.
RankedSample rank_by_similarity(const std::vector<Representative>& reps, const PatchSet& patches);

// Member order used inside a cluster (same ordering as the ranked sample).
std::vector<std::string> order_by_similarity(std::vector<std::string> ids, const PatchSet& patches);

struct SampleResult {
    Dendrogram dendrogram;
    ClusterSet clusters;
    RankedSample ranked;
};

SampleResult sample(const PatchSet& patches, const SampleConfig& config = {});
SampleResult sample(std::vector<Patch> patches, const distance::TokenSeq& buggy_tokens,
                    const SampleConfig& config = {});

}  // namespace triage::sampler
