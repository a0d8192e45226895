#include "triage/app/pipeline.hpp"

#include "triage/minilang/patch.hpp"

#include <algorithm>

#ifndef TRIAGE_VERSION
#define TRIAGE_VERSION "dev"
#endif

namespace triage::app {

using namespace minilang;

std::string_view tool_version() { return TRIAGE_VERSION; }

namespace {

SourceLocation first_statement(const Program& program, const LineSpan& region) {
    const auto stmts = program.statements_in(region);
    if (stmts.empty()) throw StageError("analyze", "no statement in buggy region " + region.to_string());
    SourceLocation best = stmts.front()->loc;
    for (const Stmt* s : stmts) best = std::min(best, s->loc);
    return best;
}

}  // namespace

Workspace::Workspace(corpus::PatchCorpus corpus, std::vector<sampler::Patch> plausible, PipelineOptions options)
    : corpus_(std::move(corpus)),
      patches_(std::move(plausible), corpus_.buggy_tokens()),
      options_(std::move(options)),
      anchor_(first_statement(corpus_.program, corpus_.buggy_region)) {}

VariantArtifacts Workspace::trace_variant(const std::string& variant, const Program& program, const LineSpan& region,
                                          int replacement_lines) const {
    VariantArtifacts out;
    out.variant = variant;
    const RunOptions& run = options_.validate.run;

    std::vector<const Stmt*> seeds;
    std::vector<SourceLocation> targets;
    if (region.last_line >= region.first_line) {
        for (const Stmt* s : program.statements_in(region)) {
            targets.push_back(s->loc);
            if (std::holds_alternative<AssignStmt>(s->node)) seeds.push_back(s);
        }
    }

    if (!targets.empty()) out.stack = tracer::capture_stack(program, corpus_.failing_test, targets, run);
    for (const auto& d : out.stack.diagnostics) out.diagnostics.push_back(variant + ": " + d);

    if (!out.stack.empty()) {
        if (seeds.empty()) out.diagnostics.push_back(variant + ": region defines no variable");
        try {
            out.affected = analysis::interprocedural_affected(out.stack, program, seeds);
        } catch (const analysis::AnalysisError& e) {
            throw StageError("analyze", variant + ": " + e.what());
        }
        for (const auto& set : out.affected) {
            for (const auto& d : set.diagnostics) out.diagnostics.push_back(variant + ": " + d);
        }
        try {
            out.hooks = tracer::plan_hooks(out.affected, program, region);
        } catch (const tracer::PlanError& e) {
            throw StageError("plan", variant + ": " + e.what());
        }
    }

    try {
        out.trace = tracer::trace_run(program, corpus_.failing_test, out.hooks, variant, run);
    } catch (const tracer::TraceError& e) {
        throw StageError("trace", variant + ": " + e.what());
    }
    if (out.trace.truncated) out.diagnostics.push_back(variant + ": trace truncated by the step budget");

    const tracer::LocationMap map{corpus_.buggy_region, replacement_lines, anchor_};
    out.trace.events = tracer::normalize_locations(std::move(out.trace.events), map);
    return out;
}

VariantArtifacts Workspace::trace_buggy() const {
    return trace_variant(compare::ComparisonTable::kBuggy, corpus_.program, corpus_.buggy_region,
                         corpus_.buggy_region.line_count());
}

VariantArtifacts Workspace::trace_patch(const std::string& id) const {
    const sampler::Patch& patch = patches_.at(id);
    Program patched;
    try {
        patched = apply_patch(corpus_.program, corpus_.buggy_region, patch.replacement_text);
    } catch (const PatchError& e) {
        throw StageError("trace", id + ": " + e.what());
    }
    const int lines = replacement_line_count(patch.replacement_text);
    const LineSpan region{corpus_.buggy_region.file, corpus_.buggy_region.first_line,
                          corpus_.buggy_region.first_line + lines - 1};
    return trace_variant(id, patched, region, lines);
}

compare::ComparisonTable Workspace::compare(const VariantArtifacts& buggy, const VariantArtifacts& patch) const {
    try {
        const compare::ComparisonTable full =
            compare::align({{buggy.variant, buggy.trace.events}, {patch.variant, patch.trace.events}});
        return compare::summarize(full, options_.budget);
    } catch (const compare::MalformedTraceError& e) {
        throw StageError("compare", e.what());
    }
}

sampler::PatchSet SessionFile::patch_set() const { return sampler::PatchSet(patches, distance::tokenize(buggy_text)); }

PreparedBundle prepare_bundle(const corpus::fs::path& bundle, const PipelineOptions& options) {
    PreparedBundle out;
    try {
        out.corpus = corpus::load(bundle, options.validate.run);
    } catch (const std::exception& e) {
        throw StageError("load", e.what());
    }
    out.validation = corpus::validate(out.corpus, options.validate);
    if (out.validation.plausible.empty()) throw StageError("validate", "no plausible patches");
    return out;
}

RunOutput run_pipeline(const corpus::fs::path& bundle, const PipelineOptions& options) {
    auto [loaded, validation] = prepare_bundle(bundle, options);

    RunOutput out;
    SessionFile& file = out.file;
    file.tool_version = std::string(tool_version());
    file.buggy_text = loaded.buggy_text();
    file.patches = validation.plausible;
    file.implausible = validation.implausible;
    const std::string corpus_path = corpus::fs::absolute(loaded.root).lexically_normal().string();

    out.workspace = std::make_unique<Workspace>(std::move(loaded), std::move(validation.plausible), options);
    const sampler::PatchSet& ps = out.workspace->patches();
    try {
        const sampler::SampleResult sampled = sampler::sample(ps, options.sample);
        file.session = sampler::start_session(ps, sampled, options.sample, corpus_path);
    } catch (const std::exception& e) {
        throw StageError("sample", e.what());
    }

    const VariantArtifacts buggy = out.workspace->trace_buggy();
    file.stack = buggy.stack;
    file.affected = buggy.affected;
    file.diagnostics = buggy.diagnostics;
    fill_tables(file, *out.workspace);
    return out;
}

std::unique_ptr<Workspace> reopen_workspace(const SessionFile& file, const PipelineOptions& options) {
    try {
        corpus::PatchCorpus loaded = corpus::load(file.session.corpus, options.validate.run);
        return std::make_unique<Workspace>(std::move(loaded), file.patches, options);
    } catch (const std::exception& e) {
        throw StageError("load", e.what());
    }
}

std::vector<std::string> fill_tables(SessionFile& file, const Workspace& workspace) {
    std::vector<std::string> missing;
    for (const auto& entry : file.session.ranked) {
        if (!file.tables.contains(entry.patch_id)) missing.push_back(entry.patch_id);
    }
    if (missing.empty()) return missing;
    const VariantArtifacts buggy = workspace.trace_buggy();
    for (const auto& id : missing) {
        const VariantArtifacts patch = workspace.trace_patch(id);
        for (const auto& d : patch.diagnostics) {
            if (std::find(file.diagnostics.begin(), file.diagnostics.end(), d) == file.diagnostics.end()) {
                file.diagnostics.push_back(d);
            }
        }
        file.tables[id] = workspace.compare(buggy, patch);
    }
    return missing;
}

}  // namespace triage::app
