#include "triage/app/session_file.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace triage::app {

using json = nlohmann::json;
using minilang::SourceLocation;

namespace {

json loc_json(const SourceLocation& l) { return json{{"file", l.file}, {"line", l.line}, {"col", l.col}}; }

SourceLocation loc_from(const json& j) {
    return SourceLocation{j.at("file").get<std::string>(), j.at("line").get<int>(), j.at("col").get<int>()};
}

sampler::Rational rational_from(const std::string& text) {
    const auto slash = text.find('/');
    std::int64_t num = 0;
    std::int64_t den = 1;
    auto parse = [&](std::string_view s, std::int64_t& out) {
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
        if (ec != std::errc{} || ptr != s.data() + s.size()) throw std::invalid_argument("bad rational '" + text + "'");
    };
    if (slash == std::string::npos) {
        parse(text, num);
    } else {
        parse(std::string_view(text).substr(0, slash), num);
        parse(std::string_view(text).substr(slash + 1), den);
    }
    return sampler::Rational(num, den);
}

json strings(const auto& range) {
    json out = json::array();
    for (const auto& s : range) out.push_back(s);
    return out;
}

}  // namespace

json to_json(const sampler::Dendrogram& d) {
    json merges = json::array();
    for (const auto& m : d.merges()) {
        merges.push_back(json{{"left", m.left}, {"right", m.right}, {"height", m.height.to_string()}});
    }
    return json{{"leaves", d.leaves()}, {"merges", std::move(merges)}};
}

json to_json(const sampler::Cluster& c) {
    return json{{"id", c.id}, {"node", c.node}, {"members", c.members}, {"centroid", c.centroid}};
}

json to_json(const sampler::RankedSample& ranked) {
    json out = json::array();
    for (const auto& e : ranked) {
        out.push_back(json{{"patch_id", e.patch_id}, {"distance", e.distance}, {"cluster_id", e.cluster_id}});
    }
    return out;
}

json to_json(const sampler::Session& s) {
    json active = json::array();
    for (const auto& c : s.active) active.push_back(to_json(c));
    json log = json::array();
    for (const auto& a : s.log) {
        log.push_back(json{{"action", std::string(sampler::to_string(a.action.kind))},
                           {"target", a.action.target},
                           {"timestamp_ms", a.timestamp_ms}});
    }
    return json{{"corpus", s.corpus},
                {"config",
                 {{"cut", s.config.cut.to_string()},
                  {"max_clusters", s.config.cut.max_clusters},
                  {"clustering", s.config.clustering},
                  {"centroid", s.config.centroid == sampler::CentroidRule::Min ? "min" : "max"}}},
                {"dendrogram", to_json(s.dendrogram)},
                {"active", std::move(active)},
                {"ranked", to_json(s.ranked)},
                {"rejected_patches", strings(s.rejected_patches)},
                {"rejected_clusters", strings(s.rejected_clusters)},
                {"accepted", s.accepted ? json(*s.accepted) : json(nullptr)},
                {"navigation", s.navigation},
                {"log", std::move(log)}};
}

namespace {

sampler::Session session_state_from(const json& j) {
    sampler::Session s;
    s.corpus = j.at("corpus").get<std::string>();
    const json& cfg = j.at("config");
    s.config.cut = sampler::CutPolicy::parse(cfg.at("cut").get<std::string>(), cfg.at("max_clusters").get<std::size_t>());
    s.config.clustering = cfg.at("clustering").get<bool>();
    const std::string centroid = cfg.at("centroid").get<std::string>();
    if (centroid != "min" && centroid != "max") throw std::invalid_argument("bad centroid rule '" + centroid + "'");
    s.config.centroid = centroid == "min" ? sampler::CentroidRule::Min : sampler::CentroidRule::Max;

    const json& d = j.at("dendrogram");
    std::vector<sampler::Dendrogram::Merge> merges;
    for (const auto& m : d.at("merges")) {
        merges.push_back(sampler::Dendrogram::Merge{m.at("left").get<std::size_t>(), m.at("right").get<std::size_t>(),
                                                    rational_from(m.at("height").get<std::string>())});
    }
    s.dendrogram = sampler::Dendrogram(d.at("leaves").get<std::vector<std::string>>(), std::move(merges));

    for (const auto& c : j.at("active")) {
        s.active.push_back(sampler::Cluster{c.at("id").get<std::string>(), c.at("node").get<std::size_t>(),
                                            c.at("members").get<std::vector<std::string>>(),
                                            c.at("centroid").get<std::string>()});
    }
    for (const auto& e : j.at("ranked")) {
        s.ranked.push_back(sampler::RankedEntry{e.at("patch_id").get<std::string>(), e.at("distance").get<std::size_t>(),
                                                e.at("cluster_id").get<std::string>()});
    }
    for (const auto& p : j.at("rejected_patches")) s.rejected_patches.insert(p.get<std::string>());
    for (const auto& c : j.at("rejected_clusters")) s.rejected_clusters.insert(c.get<std::string>());
    if (!j.at("accepted").is_null()) s.accepted = j.at("accepted").get<std::string>();
    s.navigation = j.at("navigation").get<std::vector<std::string>>();
    for (const auto& a : j.at("log")) {
        s.log.push_back(sampler::LoggedAction{
            sampler::FeedbackAction{sampler::parse_action_kind(a.at("action").get<std::string>()),
                                    a.at("target").get<std::string>()},
            a.at("timestamp_ms").get<std::int64_t>()});
    }
    return s;
}

}  // namespace

json to_json(const analysis::CallStackTrace& stack) {
    json frames = json::array();
    for (const auto& f : stack.frames) frames.push_back(json{{"function", f.function}, {"location", loc_json(f.location)}});
    return json{{"frames", std::move(frames)}, {"diagnostics", stack.diagnostics}};
}

json to_json(const analysis::AffectedSet& a) {
    json defs = json::array();
    for (const auto& d : a.definitions) defs.push_back(json{{"variable", d.variable}, {"location", loc_json(d.site)}});
    json uses = json::array();
    for (const auto& u : a.uses) uses.push_back(json{{"variable", u.variable}, {"location", loc_json(u.site)}});
    json locs = json::array();
    for (const auto& l : a.locations) locs.push_back(loc_json(l));
    json calls = json::array();
    for (const auto& l : a.call_sites) calls.push_back(loc_json(l));
    return json{{"function", a.function},       {"variables", strings(a.variables)}, {"definitions", std::move(defs)},
                {"uses", std::move(uses)},      {"locations", std::move(locs)},      {"call_sites", std::move(calls)},
                {"diagnostics", a.diagnostics}};
}

namespace {

analysis::AffectedSet affected_from_json(const json& j) {
    analysis::AffectedSet a;
    a.function = j.at("function").get<std::string>();
    for (const auto& v : j.at("variables")) a.variables.insert(v.get<std::string>());
    for (const auto& d : j.at("definitions")) {
        a.definitions.insert(analysis::Definition{d.at("variable").get<std::string>(), loc_from(d.at("location"))});
    }
    for (const auto& u : j.at("uses")) {
        a.uses.insert(analysis::Use{u.at("variable").get<std::string>(), loc_from(u.at("location"))});
    }
    for (const auto& l : j.at("locations")) a.locations.insert(loc_from(l));
    for (const auto& l : j.at("call_sites")) a.call_sites.insert(loc_from(l));
    a.diagnostics = j.at("diagnostics").get<std::vector<std::string>>();
    return a;
}

}  // namespace

json to_json(const SessionFile& f) {
    json patches = json::array();
    for (const auto& p : f.patches) {
        patches.push_back(json{{"id", p.id},
                               {"original_rank", p.original_rank},
                               {"replacement_text", p.replacement_text},
                               {"distance_to_buggy", p.distance_to_buggy}});
    }
    json implausible = json::array();
    for (const auto& r : f.implausible) implausible.push_back(json{{"id", r.id}, {"reason", r.reason}});
    json affected = json::array();
    for (std::size_t i = 0; i < f.affected.size(); ++i) {
        json a = to_json(f.affected[i]);
        a["frame"] = i;
        affected.push_back(std::move(a));
    }
    json tables = json::object();
    for (const auto& [id, t] : f.tables) tables[id] = compare::table_to_json(t);
    return json{{"format", "triage-session"},
                {"tool_version", f.tool_version},
                {"revision", f.revision},
                {"patches", std::move(patches)},
                {"implausible", std::move(implausible)},
                {"buggy_text", f.buggy_text},
                {"session", to_json(f.session)},
                {"stack", to_json(f.stack)},
                {"affected", std::move(affected)},
                {"tables", std::move(tables)},
                {"diagnostics", f.diagnostics}};
}

SessionFile session_from_json(const json& j) {
    try {
        if (j.at("format") != "triage-session") throw std::invalid_argument("not a triage session file");
        SessionFile f;
        f.tool_version = j.at("tool_version").get<std::string>();
        f.revision = j.at("revision").get<std::uint64_t>();
        f.buggy_text = j.at("buggy_text").get<std::string>();
        const auto buggy = distance::tokenize(f.buggy_text);
        for (const auto& p : j.at("patches")) {
            sampler::Patch patch = sampler::make_patch(p.at("id").get<std::string>(), p.at("original_rank").get<int>(),
                                                       p.at("replacement_text").get<std::string>(), buggy);
            if (patch.distance_to_buggy != p.at("distance_to_buggy").get<std::size_t>()) {
                throw std::invalid_argument("patch '" + patch.id + "': cached distance does not match its text");
            }
            f.patches.push_back(std::move(patch));
        }
        for (const auto& r : j.at("implausible")) {
            f.implausible.push_back(corpus::Rejection{r.at("id").get<std::string>(), r.at("reason").get<std::string>()});
        }
        f.session = session_state_from(j.at("session"));
        const json& stack = j.at("stack");
        for (const auto& fr : stack.at("frames")) {
            f.stack.frames.push_back(analysis::StackFrame{fr.at("function").get<std::string>(), loc_from(fr.at("location"))});
        }
        f.stack.diagnostics = stack.at("diagnostics").get<std::vector<std::string>>();
        for (const auto& a : j.at("affected")) f.affected.push_back(affected_from_json(a));
        for (const auto& [id, t] : j.at("tables").items()) f.tables[id] = compare::table_from_json(t);
        f.diagnostics = j.at("diagnostics").get<std::vector<std::string>>();
        return f;
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("malformed session file: ") + e.what());
    }
}

std::string dump_session(const SessionFile& file) { return to_json(file).dump(2) + "\n"; }

SessionFile parse_session(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("malformed session file: ") + e.what());
    }
    return session_from_json(j);
}

void save_session(const SessionFile& file, const std::filesystem::path& path) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << dump_session(file);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

SessionFile load_session(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::ostringstream s;
    s << in.rdbuf();
    return parse_session(s.str());
}

}  // namespace triage::app
