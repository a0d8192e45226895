#pragma once

#include "triage/distance/distance.hpp"
#include "triage/sampler/rational.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace triage::sampler {

// Binary merge tree from agglomerative clustering. Nodes [0, n) are leaves in
// input order; node n + k is the k-th merge.
class Dendrogram {
  public:
    struct Merge {
        std::size_t left = 0;
        std::size_t right = 0;
        Rational height;
        friend bool operator==(const Merge&, const Merge&) = default;
    };

    Dendrogram() = default;
    Dendrogram(std::vector<std::string> leaves, std::vector<Merge> merges);

    [[nodiscard]] std::size_t leaf_count() const { return leaves_.size(); }
    [[nodiscard]] std::size_t node_count() const { return leaves_.size() + merges_.size(); }
    [[nodiscard]] const std::vector<std::string>& leaves() const { return leaves_; }
    [[nodiscard]] const std::vector<Merge>& merges() const { return merges_; }

    [[nodiscard]] bool is_leaf(std::size_t node) const { return node < leaves_.size(); }
    [[nodiscard]] const Merge& merge_of(std::size_t node) const { return merges_.at(node - leaves_.size()); }
    [[nodiscard]] std::optional<std::size_t> parent(std::size_t node) const;
    [[nodiscard]] std::size_t root() const { return node_count() - 1; }

    // Stable, order-independent names: "leaf:<patch id>" and "node:<merge step>".
    [[nodiscard]] std::string node_name(std::size_t node) const;
    [[nodiscard]] std::optional<std::size_t> find_node(const std::string& name) const;
    // Patch ids under `node`, sorted.
    [[nodiscard]] std::vector<std::string> members(std::size_t node) const;

    friend bool operator==(const Dendrogram&, const Dendrogram&) = default;

  private:
    std::vector<std::string> leaves_;
    std::vector<Merge> merges_;
    std::vector<std::size_t> parent_;
};

// Average-linkage (UPGMA) agglomerative clustering. At each step merges the
// pair of clusters with the smallest mean pairwise distance; ties go to the
// pair whose (smaller, larger) minimum leaf ids are lexicographically least.
Dendrogram cluster(const distance::DistanceMatrix& matrix, const std::vector<std::string>& ids);

struct CutPolicy {
    enum class Kind { Gap, Threshold, FixedK };
    Kind kind = Kind::Gap;
    double threshold = 0.0;
    std::size_t k = 1;
    std::size_t max_clusters = 8;  // caps Gap and Threshold cuts

    // "gap", "threshold=<float>", "k=<int>". Throws std::invalid_argument.
    static CutPolicy parse(const std::string& text, std::size_t max_clusters = 8);
    [[nodiscard]] std::string to_string() const;
    friend bool operator==(const CutPolicy&, const CutPolicy&) = default;
};

struct Cluster {
    std::string id;    // node name in the dendrogram
    std::size_t node = 0;
    std::vector<std::string> members;  // sorted ids
    std::string centroid;               // empty until selected
    friend bool operator==(const Cluster&, const Cluster&) = default;
};

struct ClusterSet {
    std::vector<Cluster> clusters;  // ordered by smallest member id
    std::map<std::string, Rational> representativeness;
    friend bool operator==(const ClusterSet&, const ClusterSet&) = default;
};

// Number of merges a policy keeps, applied as a prefix of the merge order.
std::size_t merges_to_apply(const Dendrogram& dendrogram, const CutPolicy& policy);

// Flat clusters after applying the first `merge_count` merges.
ClusterSet cut_after(const Dendrogram& dendrogram, std::size_t merge_count);

ClusterSet cut(const Dendrogram& dendrogram, const CutPolicy& policy);

}  // namespace triage::sampler
