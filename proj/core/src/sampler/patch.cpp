#include "triage/sampler/patch.hpp"

#include <stdexcept>
#include <tuple>

namespace triage::sampler {

Patch make_patch(std::string id, int original_rank, std::string replacement_text,
                 const distance::TokenSeq& buggy_tokens) {
    Patch p;
    p.id = std::move(id);
    p.original_rank = original_rank;
    p.replacement_text = std::move(replacement_text);
    p.tokens = distance::tokenize(p.replacement_text);
    p.distance_to_buggy = distance::levenshtein(p.tokens, buggy_tokens);
    return p;
}

bool rank_before(const Patch& a, const Patch& b) {
    return std::tie(a.original_rank, a.id) < std::tie(b.original_rank, b.id);
}

PatchSet::PatchSet(std::vector<Patch> patches, distance::TokenSeq buggy_tokens)
    : patches_(std::move(patches)), buggy_tokens_(std::move(buggy_tokens)) {
    if (patches_.empty()) throw std::invalid_argument("PatchSet: no patches");
    for (std::size_t i = 0; i < patches_.size(); ++i) {
        if (!index_.emplace(patches_[i].id, i).second) {
            throw std::invalid_argument("PatchSet: duplicate patch id '" + patches_[i].id + "'");
        }
    }
    std::vector<distance::TokenSeq> seqs;
    seqs.reserve(patches_.size());
    for (const auto& p : patches_) seqs.push_back(p.tokens);
    matrix_ = distance::distance_matrix(seqs);
}

std::size_t PatchSet::index_of(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw std::out_of_range("unknown patch id '" + id + "'");
    return it->second;
}

std::vector<std::string> PatchSet::ids() const {
    std::vector<std::string> out;
    out.reserve(patches_.size());
    for (const auto& p : patches_) out.push_back(p.id);
    return out;
}

}  // namespace triage::sampler
