#include "service.hpp"

#include "triage/app/evaluation.hpp"
#include "triage/app/session_file.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

namespace {

using namespace triage;
using json = nlohmann::json;

struct Flags {
    std::string cut = "gap";
    std::size_t max_clusters = 8;
    bool no_cluster = false;
    std::string centroid = "min";
    std::size_t budget = 5;
    std::uint64_t step_budget = 10'000'000;
    unsigned threads = 0;
    std::string format = "text";
    std::string out;
};

void add_sample_flags(CLI::App& cmd, Flags& f) {
    cmd.add_option("--cut", f.cut, "gap | threshold=<float> | k=<int>")->capture_default_str();
    cmd.add_option("--max-clusters", f.max_clusters, "upper bound for gap and threshold cuts")->capture_default_str();
    cmd.add_flag("--no-cluster", f.no_cluster, "rank every plausible patch by similarity only");
    cmd.add_option("--centroid", f.centroid, "representative rule")
        ->check(CLI::IsMember({"min", "max"}))
        ->capture_default_str();
}

void add_run_flags(CLI::App& cmd, Flags& f) {
    cmd.add_option("--step-budget", f.step_budget, "interpreter steps per test run")->capture_default_str();
    cmd.add_option("--threads", f.threads, "validation workers (0: all cores)");
}

void add_output_flags(CLI::App& cmd, Flags& f) {
    cmd.add_option("--format", f.format, "output format")
        ->check(CLI::IsMember({"text", "structured"}))
        ->capture_default_str();
    cmd.add_option("--out", f.out, "write output to this file instead of stdout");
}

app::PipelineOptions options_from(const Flags& f) {
    app::PipelineOptions o;
    try {
        o.sample.cut = sampler::CutPolicy::parse(f.cut, f.max_clusters);
    } catch (const std::invalid_argument& e) {
        throw app::StageError("sample", e.what());
    }
    o.sample.clustering = !f.no_cluster;
    o.sample.centroid = f.centroid == "max" ? sampler::CentroidRule::Max : sampler::CentroidRule::Min;
    o.budget = f.budget;
    o.validate.run.step_budget = f.step_budget;
    o.validate.threads = f.threads;
    return o;
}

void emit(const Flags& f, const std::string& text) {
    if (f.out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream os(f.out, std::ios::binary);
    if (!os) throw app::StageError("output", "cannot write " + f.out);
    os << text;
}

std::string pad(std::string s, std::size_t width) {
    if (s.size() < width) s.append(width - s.size(), ' ');
    return s;
}

// Replacement text on one line, each source line stripped.
std::string trimmed(const std::string& text) {
    std::istringstream in(text);
    std::string out;
    for (std::string line; std::getline(in, line);) {
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos) continue;
        if (!out.empty()) out += " ";
        out += line.substr(first, line.find_last_not_of(" \t") - first + 1);
    }
    return out;
}

std::string format_event(const tracer::TraceEvent& e) {
    std::ostringstream os;
    os << e.location.line << ":" << e.location.col << " " << tracer::to_string(e.kind) << " " << e.label << " #"
       << e.occurrence << " = " << e.value;
    if (e.full_length) os << " (" << *e.full_length << " bytes)";
    return os.str();
}

std::string ranked_text(const app::SessionFile& file) {
    const auto& s = file.session;
    std::ostringstream os;
    os << "plausible " << file.patches.size() << ", implausible " << file.implausible.size() << "\n";
    os << "clusters " << s.active.size() << " (cut " << s.config.cut.to_string()
       << (s.config.clustering ? "" : ", clustering off") << ")\n";
    os << pad("rank", 6) << pad("patch", 12) << pad("distance", 10) << pad("cluster", 14) << pad("size", 6)
       << "first divergence\n";
    for (std::size_t i = 0; i < s.ranked.size(); ++i) {
        const auto& e = s.ranked[i];
        const sampler::Cluster* c = s.find_cluster(e.cluster_id);
        std::string div = "-";
        if (auto it = file.tables.find(e.patch_id); it != file.tables.end()) {
            const auto& t = it->second;
            const auto rk = t.first_divergence(e.patch_id);
            div = rk ? rk->to_string() : "none";
        }
        os << pad(std::to_string(i + 1), 6) << pad(e.patch_id, 12) << pad(std::to_string(e.distance), 10)
           << pad(e.cluster_id, 14) << pad(std::to_string(c ? c->members.size() : 1), 6) << div << "\n";
    }
    for (const auto& d : file.diagnostics) os << "note: " << d << "\n";
    return os.str();
}

int cmd_run(const std::string& bundle, const Flags& f) {
    app::RunOutput out = app::run_pipeline(bundle, options_from(f));
    if (f.format == "structured") {
        emit(f, app::dump_session(out.file));
        return 0;
    }
    if (!f.out.empty()) {
        app::save_session(out.file, f.out);
        std::cout << "session written to " << f.out << " (revision " << out.file.revision << ")\n";
    }
    std::cout << ranked_text(out.file);
    return 0;
}

int cmd_validate(const std::string& bundle, const Flags& f) {
    const app::PipelineOptions o = options_from(f);
    corpus::PatchCorpus loaded;
    try {
        loaded = corpus::load(bundle, o.validate.run);
    } catch (const std::exception& e) {
        throw app::StageError("load", e.what());
    }
    const corpus::ValidationResult r = corpus::validate(loaded, o.validate);
    if (f.format == "structured") {
        json j{{"plausible", json::array()}, {"implausible", json::array()}};
        for (const auto& p : r.plausible) j["plausible"].push_back(p.id);
        for (const auto& x : r.implausible) j["implausible"].push_back(json{{"id", x.id}, {"reason", x.reason}});
        emit(f, j.dump(2) + "\n");
        return 0;
    }
    std::ostringstream os;
    for (const auto& p : r.plausible) os << "plausible   " << p.id << "\n";
    for (const auto& x : r.implausible) os << "implausible " << x.id << ": " << x.reason << "\n";
    emit(f, os.str());
    return 0;
}

int cmd_sample(const std::string& bundle, const Flags& f) {
    const app::PipelineOptions o = options_from(f);
    app::PreparedBundle prepared = app::prepare_bundle(bundle, o);
    const sampler::PatchSet ps(prepared.validation.plausible, prepared.corpus.buggy_tokens());
    sampler::SampleResult r;
    try {
        r = sampler::sample(ps, o.sample);
    } catch (const std::exception& e) {
        throw app::StageError("sample", e.what());
    }
    if (f.format == "structured") {
        json clusters = json::array();
        for (const auto& c : r.clusters.clusters) clusters.push_back(app::to_json(c));
        json rep = json::object();
        for (const auto& [id, v] : r.clusters.representativeness) rep[id] = v.to_string();
        emit(f, json{{"dendrogram", app::to_json(r.dendrogram)},
                     {"clusters", std::move(clusters)},
                     {"representativeness", std::move(rep)},
                     {"ranked", app::to_json(r.ranked)}}
                        .dump(2) +
                    "\n");
        return 0;
    }
    std::ostringstream os;
    for (const auto& c : r.clusters.clusters) {
        os << "cluster " << c.id << " centroid " << c.centroid << ":";
        for (const auto& m : c.members) os << " " << m;
        os << "\n";
    }
    for (std::size_t i = 0; i < r.ranked.size(); ++i) {
        const auto& e = r.ranked[i];
        os << (i + 1) << ". " << e.patch_id << " (distance " << e.distance << ", " << e.cluster_id << ")  "
           << trimmed(ps.at(e.patch_id).replacement_text) << "\n";
    }
    emit(f, os.str());
    return 0;
}

app::Workspace make_workspace(const std::string& bundle, const app::PipelineOptions& o) {
    app::PreparedBundle prepared = app::prepare_bundle(bundle, o);
    return app::Workspace(std::move(prepared.corpus), std::move(prepared.validation.plausible), o);
}

int cmd_trace(const std::string& bundle, const std::string& patch, const Flags& f) {
    const app::PipelineOptions o = options_from(f);
    const app::Workspace ws = make_workspace(bundle, o);
    if (!patch.empty() && !ws.patches().contains(patch)) {
        throw app::StageError("trace", "'" + patch + "' is not a plausible patch");
    }
    const app::VariantArtifacts a = patch.empty() ? ws.trace_buggy() : ws.trace_patch(patch);
    for (const auto& d : a.diagnostics) std::cerr << "note: " << d << "\n";
    if (f.format == "structured") {
        emit(f, tracer::serialize_trace(a.trace.events));
        return 0;
    }
    std::ostringstream os;
    os << a.variant << ": " << minilang::to_string(a.trace.outcome.status) << ", " << a.hooks.points.size()
       << " hooks, " << a.trace.events.size() << " events\n";
    for (const auto& e : a.trace.events) os << format_event(e) << "\n";
    emit(f, os.str());
    return 0;
}

int cmd_compare(const std::string& bundle, std::vector<std::string> patches, const Flags& f) {
    const app::PipelineOptions o = options_from(f);
    const app::Workspace ws = make_workspace(bundle, o);
    if (patches.empty()) {
        sampler::SampleResult r;
        try {
            r = sampler::sample(ws.patches(), o.sample);
        } catch (const std::exception& e) {
            throw app::StageError("sample", e.what());
        }
        for (const auto& e : r.ranked) patches.push_back(e.patch_id);
    }
    std::vector<compare::VariantTrace> traces;
    const app::VariantArtifacts buggy = ws.trace_buggy();
    traces.push_back({buggy.variant, buggy.trace.events});
    for (const auto& id : patches) {
        if (!ws.patches().contains(id)) throw app::StageError("compare", "'" + id + "' is not a plausible patch");
        app::VariantArtifacts a = ws.trace_patch(id);
        traces.push_back({a.variant, std::move(a.trace.events)});
    }
    compare::ComparisonTable table;
    try {
        table = compare::summarize(compare::align(traces), o.budget);
    } catch (const std::exception& e) {
        throw app::StageError("compare", e.what());
    }
    emit(f, f.format == "structured" ? compare::table_to_json(table).dump(2) + "\n" : compare::render_text(table));
    return 0;
}

int cmd_eval(const std::vector<std::string>& roots, const Flags& f) {
    std::vector<std::filesystem::path> bundles;
    for (const auto& r : roots) {
        if (!std::filesystem::is_directory(r)) throw app::StageError("load", r + " is not a directory");
        for (auto& b : app::find_bundles(r)) bundles.push_back(std::move(b));
    }
    if (bundles.empty()) throw app::StageError("load", "no bundles found");
    const app::EvalReport report = app::evaluate(bundles, options_from(f));
    for (const auto& w : report.warnings) std::cerr << "warning: " << w << "\n";
    emit(f, f.format == "structured" ? app::to_json(report).dump(2) + "\n" : app::render_text(report));
    return 0;
}

int cmd_serve(const std::string& session_path, const std::string& host, int port, bool no_trace, const Flags& f) {
    app::SessionFile file;
    try {
        file = app::load_session(session_path);
    } catch (const std::exception& e) {
        throw app::StageError("load", e.what());
    }
    std::unique_ptr<app::Workspace> ws;
    if (!no_trace) {
        app::PipelineOptions o = options_from(f);
        o.sample = file.session.config;
        try {
            ws = app::reopen_workspace(file, o);
        } catch (const app::StageError& e) {
            std::cerr << "warning: " << e.what() << "; tables for new representatives will be unavailable\n";
        }
    }
    service::TriageService svc(std::move(file), std::filesystem::path(session_path), std::move(ws));
    return service::serve(svc, host, port, [&](int bound) {
        std::cout << "serving http://" << host << ":" << bound << std::endl;
    });
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App cli{"Patch triage: cluster plausible patches and compare their runtime behavior"};
    cli.set_version_flag("--version", std::string(app::tool_version()));
    cli.require_subcommand(1);

    Flags f;
    std::string bundle, patch, session_path, host = "127.0.0.1";
    std::vector<std::string> patches, roots;
    int port = 8080;
    bool no_trace = false;

    auto* run = cli.add_subcommand("run", "validate, sample, trace and compare; write a session");
    run->add_option("bundle", bundle, "bug bundle directory")->required();
    add_sample_flags(*run, f);
    add_run_flags(*run, f);
    add_output_flags(*run, f);
    run->add_option("--budget", f.budget, "rows kept per location and label")->capture_default_str();

    auto* val = cli.add_subcommand("validate", "run the tests on every candidate");
    val->add_option("bundle", bundle, "bug bundle directory")->required();
    add_run_flags(*val, f);
    add_output_flags(*val, f);

    auto* smp = cli.add_subcommand("sample", "cluster the plausible patches and rank representatives");
    smp->add_option("bundle", bundle, "bug bundle directory")->required();
    add_sample_flags(*smp, f);
    add_run_flags(*smp, f);
    add_output_flags(*smp, f);

    auto* trc = cli.add_subcommand("trace", "trace the buggy program or one patch");
    trc->add_option("bundle", bundle, "bug bundle directory")->required();
    trc->add_option("--patch", patch, "patch id (default: the buggy program)");
    add_run_flags(*trc, f);
    add_output_flags(*trc, f);

    auto* cmp = cli.add_subcommand("compare", "comparison table of the buggy program against patches");
    cmp->add_option("bundle", bundle, "bug bundle directory")->required();
    cmp->add_option("--patch", patches, "patch id, repeatable (default: the sampled representatives)");
    cmp->add_option("--budget", f.budget, "rows kept per location and label")->capture_default_str();
    add_sample_flags(*cmp, f);
    add_run_flags(*cmp, f);
    add_output_flags(*cmp, f);

    auto* ev = cli.add_subcommand("eval", "rank of the correct patch per bundle, clustered vs not vs original");
    ev->add_option("roots", roots, "bundle directories or directories of bundles")->required();
    add_sample_flags(*ev, f);
    add_run_flags(*ev, f);
    add_output_flags(*ev, f);

    auto* srv = cli.add_subcommand("serve", "serve a session over HTTP");
    srv->add_option("session", session_path, "session file written by run --out")->required();
    srv->add_option("--port", port, "0 picks a free port")->capture_default_str();
    srv->add_option("--host", host)->capture_default_str();
    srv->add_flag("--no-trace", no_trace, "do not reopen the bundle for lazy tracing");
    add_run_flags(*srv, f);

    CLI11_PARSE(cli, argc, argv);

    try {
        if (*run) return cmd_run(bundle, f);
        if (*val) return cmd_validate(bundle, f);
        if (*smp) return cmd_sample(bundle, f);
        if (*trc) return cmd_trace(bundle, patch, f);
        if (*cmp) return cmd_compare(bundle, patches, f);
        if (*ev) return cmd_eval(roots, f);
        if (*srv) return cmd_serve(session_path, host, port, no_trace, f);
    } catch (const app::StageError& e) {
        std::cerr << "triage: error [" << e.stage() << "]: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "triage: error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
