#pragma once

#include "triage/compare/table.hpp"
#include "triage/corpus/corpus.hpp"
#include "triage/sampler/session.hpp"
#include "triage/tracer/tracer.hpp"

#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace triage::app {

std::string_view tool_version();

// A pipeline failure tagged with the stage that raised it.
class StageError : public std::runtime_error {
  public:
    StageError(std::string stage, const std::string& message)
        : std::runtime_error(message), stage_(std::move(stage)) {}
    [[nodiscard]] const std::string& stage() const { return stage_; }

  private:
    std::string stage_;
};

struct PipelineOptions {
    sampler::SampleConfig sample;
    std::size_t budget = 5;  // summarize: rows kept per (location, label)
    corpus::ValidateOptions validate;
};

// Everything the dynamic comparison produced for one variant. Event
// locations are in buggy-program coordinates.
struct VariantArtifacts {
    std::string variant;
    analysis::CallStackTrace stack;
    std::vector<analysis::AffectedSet> affected;
    tracer::TraceHooks hooks;
    tracer::TraceResult trace;
    std::vector<std::string> diagnostics;
};

// A loaded bundle with its plausible patches; traces variants on demand.
class Workspace {
  public:
    Workspace(corpus::PatchCorpus corpus, std::vector<sampler::Patch> plausible, PipelineOptions options);

    [[nodiscard]] const corpus::PatchCorpus& corpus() const { return corpus_; }
    [[nodiscard]] const sampler::PatchSet& patches() const { return patches_; }
    [[nodiscard]] const PipelineOptions& options() const { return options_; }

    [[nodiscard]] VariantArtifacts trace_buggy() const;
    // Throws std::out_of_range for an id outside the plausible set.
    [[nodiscard]] VariantArtifacts trace_patch(const std::string& id) const;
    [[nodiscard]] compare::ComparisonTable compare(const VariantArtifacts& buggy, const VariantArtifacts& patch) const;

  private:
    VariantArtifacts trace_variant(const std::string& variant, const minilang::Program& program,
                                   const minilang::LineSpan& region, int replacement_lines) const;

    corpus::PatchCorpus corpus_;
    sampler::PatchSet patches_;
    PipelineOptions options_;
    minilang::SourceLocation anchor_;
};

// Persisted triage state plus the artifacts the service displays.
struct SessionFile {
    std::string tool_version;
    std::uint64_t revision = 0;
    std::vector<sampler::Patch> patches;  // the plausible set
    std::vector<corpus::Rejection> implausible;
    std::string buggy_text;
    sampler::Session session;
    analysis::CallStackTrace stack;                   // of the buggy variant
    std::vector<analysis::AffectedSet> affected;      // of the buggy variant
    std::map<std::string, compare::ComparisonTable> tables;  // by patch id
    std::vector<std::string> diagnostics;

    [[nodiscard]] sampler::PatchSet patch_set() const;
    friend bool operator==(const SessionFile&, const SessionFile&) = default;
};

struct PreparedBundle {
    corpus::PatchCorpus corpus;
    corpus::ValidationResult validation;
};

// load then validate. Throws StageError("load") or StageError("validate")
// when nothing is plausible.
PreparedBundle prepare_bundle(const corpus::fs::path& bundle, const PipelineOptions& options);

struct RunOutput {
    SessionFile file;
    std::unique_ptr<Workspace> workspace;
};

// load, validate, sample, then trace the buggy program and every sampled
// representative and build their comparison tables. Throws StageError.
RunOutput run_pipeline(const corpus::fs::path& bundle, const PipelineOptions& options);

// Reloads the bundle a session came from. Throws StageError("load").
std::unique_ptr<Workspace> reopen_workspace(const SessionFile& file, const PipelineOptions& options);

// Adds tables for ranked representatives that do not have one yet.
// Returns the ids traced.
std::vector<std::string> fill_tables(SessionFile& file, const Workspace& workspace);

}  // namespace triage::app
