#pragma once

#include "triage/distance/distance.hpp"

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace triage::sampler {

struct Patch {
    std::string id;
    int original_rank = 1;  // position in the repair tool's output, 1-based
    std::string replacement_text;
    distance::TokenSeq tokens;
    std::size_t distance_to_buggy = 0;

    friend bool operator==(const Patch&, const Patch&) = default;
};

Patch make_patch(std::string id, int original_rank, std::string replacement_text,
                 const distance::TokenSeq& buggy_tokens);

// Orders patches by (original_rank, id); the tie rule used throughout.
bool rank_before(const Patch& a, const Patch& b);

// The patches under triage, their pairwise distance matrix and the buggy
// region's tokens. Immutable once built.
class PatchSet {
  public:
    PatchSet() = default;
    // Throws std::invalid_argument on an empty list or duplicate ids.
    PatchSet(std::vector<Patch> patches, distance::TokenSeq buggy_tokens);

    [[nodiscard]] std::size_t size() const { return patches_.size(); }
    [[nodiscard]] const std::vector<Patch>& patches() const { return patches_; }
    [[nodiscard]] const distance::TokenSeq& buggy_tokens() const { return buggy_tokens_; }
    [[nodiscard]] const distance::DistanceMatrix& matrix() const { return matrix_; }

    [[nodiscard]] bool contains(const std::string& id) const { return index_.contains(id); }
    [[nodiscard]] std::size_t index_of(const std::string& id) const;
    [[nodiscard]] const Patch& at(const std::string& id) const { return patches_[index_of(id)]; }
    [[nodiscard]] std::uint32_t distance(const std::string& a, const std::string& b) const {
        return matrix_(index_of(a), index_of(b));
    }
    [[nodiscard]] std::vector<std::string> ids() const;

  private:
    std::vector<Patch> patches_;
    distance::TokenSeq buggy_tokens_;
    distance::DistanceMatrix matrix_;
    std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace triage::sampler
