#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace triage::distance {

// Lexemes of MiniLang source text; comments and whitespace excluded.
using TokenSeq = std::vector<std::string>;

TokenSeq tokenize(std::string_view text);

// Token-level edit distance with unit costs for insert, delete and substitute.
std::size_t levenshtein(std::span<const std::string> a, std::span<const std::string> b);

struct DiffOp {
    enum class Kind { Equal, Insert, Delete, Substitute };
    Kind kind = Kind::Equal;
    std::string from;  // empty for Insert
    std::string to;    // empty for Delete
    friend bool operator==(const DiffOp&, const DiffOp&) = default;
};

std::string_view to_string(DiffOp::Kind kind);

// One minimal edit script from `a` to `b`; its non-Equal ops number exactly
// levenshtein(a, b).
std::vector<DiffOp> token_diff(std::span<const std::string> a, std::span<const std::string> b);

// Dense symmetric matrix of pairwise token distances.
class DistanceMatrix {
  public:
    DistanceMatrix() = default;
    explicit DistanceMatrix(std::size_t n) : n_(n), entries_(n * n, 0) {}

    [[nodiscard]] std::size_t size() const { return n_; }
    [[nodiscard]] std::uint32_t operator()(std::size_t i, std::size_t j) const { return entries_[i * n_ + j]; }
    void set(std::size_t i, std::size_t j, std::uint32_t d) {
        entries_[i * n_ + j] = d;
        entries_[j * n_ + i] = d;
    }
    [[nodiscard]] std::vector<std::vector<std::uint32_t>> rows() const;

    friend bool operator==(const DistanceMatrix&, const DistanceMatrix&) = default;

  private:
    std::size_t n_ = 0;
    std::vector<std::uint32_t> entries_;
};

// Throws std::invalid_argument for an empty input.
DistanceMatrix distance_matrix(std::span<const TokenSeq> patches);

}  // namespace triage::distance
