#include "triage/app/evaluation.hpp"

#include <algorithm>
#include <iomanip>
#include <sstream>

#include <nlohmann/json.hpp>

namespace triage::app {

namespace fs = std::filesystem;

std::string_view to_string(RankMode mode) {
    switch (mode) {
        case RankMode::Clustered: return "clustered";
        case RankMode::NoCluster: return "no-cluster";
        case RankMode::Original: return "original";
    }
    return "clustered";
}

std::size_t clustered_rank(const sampler::SampleResult& sampled, const sampler::PatchSet& patches,
                           const std::string& correct) {
    for (const auto& cluster : sampled.clusters.clusters) {
        if (!std::binary_search(cluster.members.begin(), cluster.members.end(), correct)) continue;
        std::size_t rep_rank = 0;
        for (std::size_t i = 0; i < sampled.ranked.size(); ++i) {
            if (sampled.ranked[i].cluster_id == cluster.id) rep_rank = i + 1;
        }
        if (rep_rank == 0) break;
        if (cluster.centroid == correct) return rep_rank;
        std::vector<std::string> rest;
        for (const auto& m : cluster.members) {
            if (m != cluster.centroid) rest.push_back(m);
        }
        rest = sampler::order_by_similarity(std::move(rest), patches);
        const auto pos = static_cast<std::size_t>(std::find(rest.begin(), rest.end(), correct) - rest.begin());
        return rep_rank + (pos + 2) - 1;
    }
    throw std::invalid_argument("patch '" + correct + "' is not in the sample");
}

std::size_t no_cluster_rank(const sampler::PatchSet& patches, const std::string& correct) {
    const auto order = sampler::order_by_similarity(patches.ids(), patches);
    auto it = std::find(order.begin(), order.end(), correct);
    if (it == order.end()) throw std::invalid_argument("patch '" + correct + "' is not plausible");
    return static_cast<std::size_t>(it - order.begin()) + 1;
}

std::size_t original_rank(const sampler::PatchSet& patches, const std::string& correct) {
    std::vector<const sampler::Patch*> order;
    for (const auto& p : patches.patches()) order.push_back(&p);
    std::sort(order.begin(), order.end(), [](const auto* a, const auto* b) { return sampler::rank_before(*a, *b); });
    for (std::size_t i = 0; i < order.size(); ++i) {
        if (order[i]->id == correct) return i + 1;
    }
    throw std::invalid_argument("patch '" + correct + "' is not plausible");
}

std::vector<fs::path> find_bundles(const fs::path& root) {
    if (fs::exists(root / "bug.toml")) return {root};
    std::vector<fs::path> out;
    if (!fs::is_directory(root)) return out;
    for (const auto& entry : fs::directory_iterator(root)) {
        if (entry.is_directory() && fs::exists(entry.path() / "bug.toml")) out.push_back(entry.path());
    }
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

ModeSummary summarize_ranks(std::vector<std::size_t> ranks) {
    ModeSummary s;
    if (ranks.empty()) return s;
    std::sort(ranks.begin(), ranks.end());
    double total = 0;
    for (auto r : ranks) total += static_cast<double>(r);
    s.mean = total / static_cast<double>(ranks.size());
    const std::size_t mid = ranks.size() / 2;
    s.median = ranks.size() % 2 ? static_cast<double>(ranks[mid])
                                : (static_cast<double>(ranks[mid - 1]) + static_cast<double>(ranks[mid])) / 2.0;
    return s;
}

}  // namespace

EvalReport evaluate(const std::vector<fs::path>& bundles, const PipelineOptions& options) {
    EvalReport report;
    for (const auto& path : bundles) {
        const std::string name = path.filename().empty() ? path.parent_path().filename().string() : path.filename().string();
        std::optional<corpus::GroundTruth> truth;
        try {
            truth = corpus::load_truth(path);
        } catch (const std::exception& e) {
            report.warnings.push_back(name + ": " + e.what());
            continue;
        }
        if (!truth) {
            report.warnings.push_back(name + ": no truth.toml, skipped");
            continue;
        }
        corpus::PatchCorpus loaded;
        try {
            loaded = corpus::load(path, options.validate.run);
        } catch (const std::exception& e) {
            report.warnings.push_back(name + ": " + e.what());
            continue;
        }
        corpus::ValidationResult v = corpus::validate(loaded, options.validate);
        const bool plausible = std::any_of(v.plausible.begin(), v.plausible.end(),
                                           [&](const sampler::Patch& p) { return p.id == truth->correct; });
        if (!plausible) {
            report.warnings.push_back(name + ": correct patch '" + truth->correct + "' is not plausible, skipped");
            continue;
        }
        const sampler::PatchSet ps(std::move(v.plausible), loaded.buggy_tokens());
        sampler::SampleConfig clustered = options.sample;
        clustered.clustering = true;
        const auto sampled = sampler::sample(ps, clustered);

        BundleEval row;
        row.name = name;
        row.correct = truth->correct;
        row.plausible = ps.size();
        row.clustered = clustered_rank(sampled, ps, truth->correct);
        row.no_cluster = no_cluster_rank(ps, truth->correct);
        row.original = original_rank(ps, truth->correct);
        report.bundles.push_back(std::move(row));
    }
    std::vector<std::size_t> c;
    std::vector<std::size_t> n;
    std::vector<std::size_t> o;
    for (const auto& b : report.bundles) {
        c.push_back(b.clustered);
        n.push_back(b.no_cluster);
        o.push_back(b.original);
    }
    report.clustered = summarize_ranks(c);
    report.no_cluster = summarize_ranks(n);
    report.original = summarize_ranks(o);
    return report;
}

nlohmann::json to_json(const EvalReport& report) {
    using nlohmann::json;
    json bundles = json::array();
    for (const auto& b : report.bundles) {
        bundles.push_back(json{{"bundle", b.name},
                               {"correct", b.correct},
                               {"plausible", b.plausible},
                               {"clustered", b.clustered},
                               {"no_cluster", b.no_cluster},
                               {"original", b.original}});
    }
    auto mode = [](const ModeSummary& m) { return json{{"mean", m.mean}, {"median", m.median}}; };
    return json{{"bundles", std::move(bundles)},
                {"warnings", report.warnings},
                {"summary",
                 {{"clustered", mode(report.clustered)},
                  {"no_cluster", mode(report.no_cluster)},
                  {"original", mode(report.original)}}}};
}

std::string render_text(const EvalReport& report) {
    std::ostringstream out;
    out << std::left << std::setw(14) << "bundle" << std::setw(10) << "correct" << std::setw(11) << "plausible"
        << std::setw(11) << "clustered" << std::setw(12) << "no-cluster" << "original\n";
    for (const auto& b : report.bundles) {
        out << std::setw(14) << b.name << std::setw(10) << b.correct << std::setw(11) << b.plausible << std::setw(11)
            << b.clustered << std::setw(12) << b.no_cluster << b.original << '\n';
    }
    out << std::fixed << std::setprecision(2);
    auto line = [&](const char* label, auto pick) {
        out << std::setw(35) << label << std::setw(11) << pick(report.clustered) << std::setw(12)
            << pick(report.no_cluster) << pick(report.original) << '\n';
    };
    line("mean", [](const ModeSummary& m) { return m.mean; });
    line("median", [](const ModeSummary& m) { return m.median; });
    for (const auto& w : report.warnings) out << "warning: " << w << '\n';
    return out.str();
}

}  // namespace triage::app
