#pragma once

#include "triage/app/pipeline.hpp"

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

namespace triage::app {

nlohmann::json to_json(const SessionFile& file);
// Throws std::invalid_argument on a malformed document.
SessionFile session_from_json(const nlohmann::json& j);

// Deterministic text: keys sorted, two-space indent, trailing newline.
std::string dump_session(const SessionFile& file);
SessionFile parse_session(const std::string& text);

void save_session(const SessionFile& file, const std::filesystem::path& path);
SessionFile load_session(const std::filesystem::path& path);

nlohmann::json to_json(const sampler::Session& session);
nlohmann::json to_json(const analysis::AffectedSet& set);
nlohmann::json to_json(const analysis::CallStackTrace& stack);
nlohmann::json to_json(const sampler::Dendrogram& dendrogram);
nlohmann::json to_json(const sampler::RankedSample& ranked);
nlohmann::json to_json(const sampler::Cluster& cluster);

}  // namespace triage::app
