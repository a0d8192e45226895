#pragma once

#include "triage/app/pipeline.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace triage::app {

enum class RankMode { Clustered, NoCluster, Original };
std::string_view to_string(RankMode mode);

// Position of `correct` when the user walks the clustered sample: its
// cluster's representative rank, plus its place in that cluster (centroid
// first, then by similarity), minus one.
std::size_t clustered_rank(const sampler::SampleResult& sampled, const sampler::PatchSet& patches,
                           const std::string& correct);
std::size_t no_cluster_rank(const sampler::PatchSet& patches, const std::string& correct);
std::size_t original_rank(const sampler::PatchSet& patches, const std::string& correct);

struct BundleEval {
    std::string name;
    std::string correct;
    std::size_t plausible = 0;
    std::size_t clustered = 0;
    std::size_t no_cluster = 0;
    std::size_t original = 0;
};

struct ModeSummary {
    double mean = 0.0;
    double median = 0.0;
};

struct EvalReport {
    std::vector<BundleEval> bundles;
    std::vector<std::string> warnings;  // skipped bundles
    ModeSummary clustered;
    ModeSummary no_cluster;
    ModeSummary original;
};

// Bundle directories under `root` (ones holding a bug.toml), sorted; `root`
// itself when it is a bundle.
std::vector<std::filesystem::path> find_bundles(const std::filesystem::path& root);

EvalReport evaluate(const std::vector<std::filesystem::path>& bundles, const PipelineOptions& options);

nlohmann::json to_json(const EvalReport& report);
std::string render_text(const EvalReport& report);

}  // namespace triage::app
