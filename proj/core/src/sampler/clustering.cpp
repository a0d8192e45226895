#include "triage/sampler/clustering.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>
#include <stdexcept>

namespace triage::sampler {

Dendrogram::Dendrogram(std::vector<std::string> leaves, std::vector<Merge> merges)
    : leaves_(std::move(leaves)), merges_(std::move(merges)) {
    parent_.assign(node_count(), node_count());
    for (std::size_t k = 0; k < merges_.size(); ++k) {
        parent_.at(merges_[k].left) = leaves_.size() + k;
        parent_.at(merges_[k].right) = leaves_.size() + k;
    }
}

std::optional<std::size_t> Dendrogram::parent(std::size_t node) const {
    if (node >= parent_.size() || parent_[node] == node_count()) return std::nullopt;
    return parent_[node];
}

std::string Dendrogram::node_name(std::size_t node) const {
    if (is_leaf(node)) return "leaf:" + leaves_.at(node);
    return "node:" + std::to_string(node - leaves_.size() + 1);
}

std::optional<std::size_t> Dendrogram::find_node(const std::string& name) const {
    if (name.rfind("leaf:", 0) == 0) {
        auto it = std::find(leaves_.begin(), leaves_.end(), name.substr(5));
        if (it == leaves_.end()) return std::nullopt;
        return static_cast<std::size_t>(it - leaves_.begin());
    }
    if (name.rfind("node:", 0) == 0) {
        std::size_t step = 0;
        const std::string digits = name.substr(5);
        auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), step);
        if (ec != std::errc{} || ptr != digits.data() + digits.size() || step == 0 || step > merges_.size()) {
            return std::nullopt;
        }
        return leaves_.size() + step - 1;
    }
    return std::nullopt;
}

std::vector<std::string> Dendrogram::members(std::size_t node) const {
    std::vector<std::string> out;
    std::vector<std::size_t> todo{node};
    while (!todo.empty()) {
        const std::size_t cur = todo.back();
        todo.pop_back();
        if (is_leaf(cur)) {
            out.push_back(leaves_.at(cur));
        } else {
            const Merge& m = merge_of(cur);
            todo.push_back(m.left);
            todo.push_back(m.right);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

Dendrogram cluster(const distance::DistanceMatrix& matrix, const std::vector<std::string>& ids) {
    const std::size_t n = ids.size();
    if (n == 0) throw std::invalid_argument("cluster: no patches");
    if (matrix.size() != n) throw std::invalid_argument("cluster: matrix size does not match id count");
    if (std::set<std::string>(ids.begin(), ids.end()).size() != n) {
        throw std::invalid_argument("cluster: duplicate patch ids");
    }

    const std::size_t total = 2 * n - 1;
    // Sum of pairwise leaf distances between two current clusters.
    std::vector<std::int64_t> sums(total * total, 0);
    auto sum = [&](std::size_t a, std::size_t b) -> std::int64_t& { return sums[a * total + b]; };
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) sum(i, j) = matrix(i, j);
    }
    std::vector<std::int64_t> size(total, 1);
    std::vector<std::string> key(total);  // smallest leaf id below the node
    for (std::size_t i = 0; i < n; ++i) key[i] = ids[i];

    std::vector<std::size_t> active(n);
    for (std::size_t i = 0; i < n; ++i) active[i] = i;

    std::vector<Dendrogram::Merge> merges;
    merges.reserve(n - 1);
    for (std::size_t step = 0; step + 1 < n; ++step) {
        std::size_t best_a = 0;
        std::size_t best_b = 1;
        Rational best_h;
        bool have = false;
        for (std::size_t x = 0; x < active.size(); ++x) {
            for (std::size_t y = x + 1; y < active.size(); ++y) {
                const std::size_t a = active[x];
                const std::size_t b = active[y];
                const Rational h(sum(a, b), size[a] * size[b]);
                bool better = !have || h < best_h;
                if (have && h == best_h) {
                    const auto& lo = std::min(key[a], key[b]);
                    const auto& hi = std::max(key[a], key[b]);
                    const auto& blo = std::min(key[active[best_a]], key[active[best_b]]);
                    const auto& bhi = std::max(key[active[best_a]], key[active[best_b]]);
                    better = std::tie(lo, hi) < std::tie(blo, bhi);
                }
                if (better) {
                    have = true;
                    best_h = h;
                    best_a = x;
                    best_b = y;
                }
            }
        }
        std::size_t a = active[best_a];
        std::size_t b = active[best_b];
        if (key[b] < key[a]) std::swap(a, b);
        const std::size_t m = n + step;
        size[m] = size[a] + size[b];
        key[m] = key[a];
        for (std::size_t c : active) {
            if (c == a || c == b) continue;
            sum(m, c) = sum(c, m) = sum(a, c) + sum(b, c);
        }
        merges.push_back(Dendrogram::Merge{a, b, best_h});
        active.erase(active.begin() + static_cast<std::ptrdiff_t>(std::max(best_a, best_b)));
        active.erase(active.begin() + static_cast<std::ptrdiff_t>(std::min(best_a, best_b)));
        active.push_back(m);
    }
    return Dendrogram(ids, std::move(merges));
}

CutPolicy CutPolicy::parse(const std::string& text, std::size_t max_clusters) {
    CutPolicy p;
    p.max_clusters = max_clusters;
    if (max_clusters == 0) throw std::invalid_argument("--max-clusters must be at least 1");
    if (text == "gap") return p;
    auto value_of = [&](std::string_view prefix) -> std::string {
        return text.substr(prefix.size());
    };
    if (text.rfind("threshold=", 0) == 0) {
        p.kind = Kind::Threshold;
        const std::string v = value_of("threshold=");
        auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), p.threshold);
        if (ec != std::errc{} || ptr != v.data() + v.size() || !std::isfinite(p.threshold)) {
            throw std::invalid_argument("bad cut threshold '" + v + "'");
        }
        return p;
    }
    if (text.rfind("k=", 0) == 0) {
        p.kind = Kind::FixedK;
        const std::string v = value_of("k=");
        auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), p.k);
        if (ec != std::errc{} || ptr != v.data() + v.size() || p.k == 0) {
            throw std::invalid_argument("bad cluster count '" + v + "'");
        }
        return p;
    }
    throw std::invalid_argument("unknown cut policy '" + text + "' (expected gap, threshold=<float> or k=<int>)");
}

std::string CutPolicy::to_string() const {
    switch (kind) {
        case Kind::Gap: return "gap";
        case Kind::Threshold: {
            char buf[64];
            auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, threshold);
            return "threshold=" + std::string(buf, ptr);
        }
        case Kind::FixedK: return "k=" + std::to_string(k);
    }
    return "gap";
}

std::size_t merges_to_apply(const Dendrogram& dendrogram, const CutPolicy& policy) {
    const std::size_t n = dendrogram.leaf_count();
    const auto& merges = dendrogram.merges();
    const std::size_t total = merges.size();
    std::size_t count = total;

    switch (policy.kind) {
        case CutPolicy::Kind::Gap: {
            std::vector<Rational> heights;
            heights.reserve(total);
            for (const auto& m : merges) heights.push_back(m.height);
            std::sort(heights.begin(), heights.end());
            // Earliest maximal positive gap wins; no positive gap keeps one cluster.
            Rational best_gap;
            for (std::size_t i = 1; i < heights.size(); ++i) {
                const Rational gap(heights[i].num() * heights[i - 1].den() - heights[i - 1].num() * heights[i].den(),
                                   heights[i].den() * heights[i - 1].den());
                if (gap > best_gap) {
                    best_gap = gap;
                    count = i;
                }
            }
            break;
        }
        case CutPolicy::Kind::Threshold:
            count = 0;
            for (const auto& m : merges) {
                if (m.height.to_double() <= policy.threshold) ++count;
            }
            break;
        case CutPolicy::Kind::FixedK: {
            const std::size_t k = std::clamp<std::size_t>(policy.k, 1, n);
            return n - k;
        }
    }
    if (n - count > policy.max_clusters) count = n - std::min(policy.max_clusters, n);
    return count;
}

ClusterSet cut_after(const Dendrogram& dendrogram, std::size_t merge_count) {
    const std::size_t n = dendrogram.leaf_count();
    if (n == 0) throw std::invalid_argument("cut: empty dendrogram");
    merge_count = std::min(merge_count, dendrogram.merges().size());
    std::vector<bool> consumed(n + merge_count, false);
    for (std::size_t k = 0; k < merge_count; ++k) {
        consumed[dendrogram.merges()[k].left] = true;
        consumed[dendrogram.merges()[k].right] = true;
    }
    ClusterSet out;
    for (std::size_t node = 0; node < n + merge_count; ++node) {
        if (consumed[node]) continue;
        Cluster c;
        c.id = dendrogram.node_name(node);
        c.node = node;
        c.members = dendrogram.members(node);
        out.clusters.push_back(std::move(c));
    }
    std::sort(out.clusters.begin(), out.clusters.end(),
              [](const Cluster& a, const Cluster& b) { return a.members.front() < b.members.front(); });
    return out;
}

ClusterSet cut(const Dendrogram& dendrogram, const CutPolicy& policy) {
    return cut_after(dendrogram, merges_to_apply(dendrogram, policy));
}

}  // namespace triage::sampler
