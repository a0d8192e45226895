#include "triage/distance/distance.hpp"

#include "triage/minilang/lexer.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace triage::distance {

TokenSeq tokenize(std::string_view text) {
    TokenSeq out;
    for (auto& tok : minilang::lex(text)) {
        if (tok.kind == minilang::TokenKind::End) break;
        out.push_back(std::move(tok.lexeme));
    }
    return out;
}

std::size_t levenshtein(std::span<const std::string> a, std::span<const std::string> b) {
    if (a.size() < b.size()) std::swap(a, b);
    // Single rolling row over the shorter sequence.
    std::vector<std::size_t> row(b.size() + 1);
    std::iota(row.begin(), row.end(), std::size_t{0});
    for (std::size_t i = 1; i <= a.size(); ++i) {
        std::size_t diag = row[0];
        row[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::size_t up = row[j];
            const std::size_t subst = diag + (a[i - 1] == b[j - 1] ? 0 : 1);
            row[j] = std::min({up + 1, row[j - 1] + 1, subst});
            diag = up;
        }
    }
    return row[b.size()];
}

std::string_view to_string(DiffOp::Kind kind) {
    switch (kind) {
        case DiffOp::Kind::Equal: return "equal";
        case DiffOp::Kind::Insert: return "insert";
        case DiffOp::Kind::Delete: return "delete";
        case DiffOp::Kind::Substitute: return "substitute";
    }
    return "equal";
}

std::vector<DiffOp> token_diff(std::span<const std::string> a, std::span<const std::string> b) {
    const std::size_t n = a.size();
    const std::size_t m = b.size();
    std::vector<std::size_t> d((n + 1) * (m + 1));
    auto at = [&](std::size_t i, std::size_t j) -> std::size_t& { return d[i * (m + 1) + j]; };
    for (std::size_t i = 0; i <= n; ++i) at(i, 0) = i;
    for (std::size_t j = 0; j <= m; ++j) at(0, j) = j;
    for (std::size_t i = 1; i <= n; ++i) {
        for (std::size_t j = 1; j <= m; ++j) {
            at(i, j) = std::min({at(i - 1, j) + 1, at(i, j - 1) + 1, at(i - 1, j - 1) + (a[i - 1] == b[j - 1] ? 0 : 1)});
        }
    }
    std::vector<DiffOp> ops;
    std::size_t i = n;
    std::size_t j = m;
    while (i > 0 || j > 0) {
        if (i > 0 && j > 0 && at(i, j) == at(i - 1, j - 1) + (a[i - 1] == b[j - 1] ? 0 : 1)) {
            const bool same = a[i - 1] == b[j - 1];
            ops.push_back(DiffOp{same ? DiffOp::Kind::Equal : DiffOp::Kind::Substitute, a[i - 1], b[j - 1]});
            --i;
            --j;
        } else if (i > 0 && at(i, j) == at(i - 1, j) + 1) {
            ops.push_back(DiffOp{DiffOp::Kind::Delete, a[i - 1], {}});
            --i;
        } else {
            ops.push_back(DiffOp{DiffOp::Kind::Insert, {}, b[j - 1]});
            --j;
        }
    }
    std::reverse(ops.begin(), ops.end());
    return ops;
}

std::vector<std::vector<std::uint32_t>> DistanceMatrix::rows() const {
    std::vector<std::vector<std::uint32_t>> out(n_, std::vector<std::uint32_t>(n_));
    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t j = 0; j < n_; ++j) out[i][j] = (*this)(i, j);
    }
    return out;
}

DistanceMatrix distance_matrix(std::span<const TokenSeq> patches) {
    if (patches.empty()) throw std::invalid_argument("distance_matrix: no patches");
    DistanceMatrix m(patches.size());
    for (std::size_t i = 0; i < patches.size(); ++i) {
        for (std::size_t j = i + 1; j < patches.size(); ++j) {
            m.set(i, j, static_cast<std::uint32_t>(levenshtein(patches[i], patches[j])));
        }
    }
    return m;
}

}  // namespace triage::distance
