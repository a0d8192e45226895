#include "triage/corpus/corpus.hpp"

#include "triage/corpus/toml.hpp"
#include "triage/minilang/lexer.hpp"
#include "triage/minilang/parser.hpp"
#include "triage/minilang/patch.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

namespace triage::corpus {

using namespace minilang;

CorpusError::CorpusError(Kind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + " error: " + message), kind_(kind) {}

std::string_view to_string(CorpusError::Kind kind) {
    switch (kind) {
        case CorpusError::Kind::Io: return "io";
        case CorpusError::Kind::Schema: return "schema";
        case CorpusError::Kind::Parse: return "parse";
        case CorpusError::Kind::Corrupt: return "corrupt bundle";
    }
    return "io";
}

const Candidate* PatchCorpus::find(const std::string& id) const {
    for (const auto& c : candidates) {
        if (c.id == id) return &c;
    }
    return nullptr;
}

namespace {

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw CorpusError(CorpusError::Kind::Io, "cannot read " + p.string());
    std::ostringstream s;
    s << in.rdbuf();
    return normalize_newlines(s.str());
}

[[noreturn]] void schema(const std::string& message) { throw CorpusError(CorpusError::Kind::Schema, message); }

const TomlValue& required(const TomlDocument& doc, const std::string& key) {
    auto it = doc.find(key);
    if (it == doc.end()) schema("bug.toml: missing '" + key + "'");
    return it->second;
}

std::string string_field(const TomlDocument& doc, const std::string& key) {
    const TomlValue& v = required(doc, key);
    if (!v.is_string()) schema("bug.toml: '" + key + "' must be a string");
    return v.as_string();
}

std::vector<std::string> string_list(const TomlValue& v, const std::string& key) {
    if (!v.is_array()) schema("bug.toml: '" + key + "' must be an array of strings");
    std::vector<std::string> out;
    for (const auto& item : v.as_array()) {
        if (!item.is_string()) schema("bug.toml: '" + key + "' must be an array of strings");
        out.push_back(item.as_string());
    }
    return out;
}

bool valid_id(const std::string& id) {
    return !id.empty() && std::all_of(id.begin(), id.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
    });
}

TomlDocument read_toml(const fs::path& p) {
    try {
        return parse_toml(read_file(p));
    } catch (const TomlError& e) {
        schema(p.filename().string() + ": " + e.what());
    }
}

}  // namespace

PatchCorpus load(const fs::path& path, const RunOptions& options) {
    PatchCorpus corpus;
    fs::path manifest = path;
    if (fs::is_directory(path)) {
        manifest = path / "bug.toml";
    }
    if (!fs::exists(manifest)) throw CorpusError(CorpusError::Kind::Io, "no bundle manifest at " + manifest.string());
    corpus.root = manifest.parent_path();

    const TomlDocument doc = read_toml(manifest);
    static const std::set<std::string> known{"files",        "buggy_region", "failing_test", "passing_tests",
                                             "patch_order",  "name",         "description"};
    for (const auto& [key, value] : doc) {
        if (!known.contains(key)) schema("bug.toml: unknown key '" + key + "'");
    }

    const auto files = string_list(required(doc, "files"), "files");
    if (files.empty()) schema("bug.toml: 'files' is empty");
    for (const auto& f : files) {
        if (corpus.sources.contains(f)) schema("bug.toml: file '" + f + "' listed twice");
        corpus.sources[f] = read_file(corpus.root / f);
    }
    try {
        corpus.program = parse(corpus.sources);
    } catch (const SyntaxError& e) {
        throw CorpusError(CorpusError::Kind::Parse, e.what());
    }

    try {
        corpus.buggy_region = LineSpan::parse(string_field(doc, "buggy_region"));
    } catch (const std::invalid_argument& e) {
        schema(std::string("bug.toml: buggy_region: ") + e.what());
    }
    if (!corpus.sources.contains(corpus.buggy_region.file)) {
        schema("bug.toml: buggy_region names unlisted file '" + corpus.buggy_region.file + "'");
    }
    try {
        check_region(corpus.program, corpus.buggy_region);
    } catch (const PatchError& e) {
        schema(std::string("bug.toml: buggy_region: ") + e.what());
    }

    const auto tests = corpus.program.test_names();
    auto require_test = [&](const std::string& t) {
        if (std::find(tests.begin(), tests.end(), t) == tests.end()) schema("bug.toml: no test named '" + t + "'");
    };
    corpus.failing_test = string_field(doc, "failing_test");
    require_test(corpus.failing_test);
    if (auto it = doc.find("passing_tests"); it != doc.end()) {
        corpus.passing_tests = string_list(it->second, "passing_tests");
    }
    for (const auto& t : corpus.passing_tests) {
        require_test(t);
        if (t == corpus.failing_test) schema("bug.toml: '" + t + "' is both failing and passing");
    }

    const fs::path patch_dir = corpus.root / "patches";
    std::set<std::string> on_disk;
    if (fs::is_directory(patch_dir)) {
        for (const auto& entry : fs::directory_iterator(patch_dir)) {
            if (entry.is_regular_file() && entry.path().extension() == ".patch") {
                on_disk.insert(entry.path().stem().string());
            }
        }
    }
    std::vector<std::string> order;
    if (auto it = doc.find("patch_order"); it != doc.end()) {
        order = string_list(it->second, "patch_order");
        std::set<std::string> seen;
        for (const auto& id : order) {
            if (!seen.insert(id).second) schema("duplicate patch id '" + id + "'");
            if (!on_disk.contains(id)) schema("patch '" + id + "' has no patches/" + id + ".patch");
        }
        for (const auto& id : on_disk) {
            if (!seen.contains(id)) schema("patches/" + id + ".patch is missing from patch_order");
        }
    } else {
        order.assign(on_disk.begin(), on_disk.end());
    }
    if (order.empty()) schema("bundle has no candidate patches");
    for (std::size_t i = 0; i < order.size(); ++i) {
        if (!valid_id(order[i])) schema("invalid patch id '" + order[i] + "'");
        corpus.candidates.push_back(
            Candidate{order[i], static_cast<int>(i + 1), read_file(patch_dir / (order[i] + ".patch"))});
    }

    const TestOutcome failing = run_test(corpus.program, corpus.failing_test, nullptr, options);
    if (failing.passed()) {
        throw CorpusError(CorpusError::Kind::Corrupt,
                          "failing test '" + corpus.failing_test + "' passes on the unpatched program");
    }
    for (const auto& t : corpus.passing_tests) {
        const TestOutcome o = run_test(corpus.program, t, nullptr, options);
        if (!o.passed()) {
            throw CorpusError(CorpusError::Kind::Corrupt,
                              "passing test '" + t + "' fails on the unpatched program: " + o.message);
        }
    }
    return corpus;
}

std::optional<GroundTruth> load_truth(const fs::path& bundle) {
    const fs::path dir = fs::is_directory(bundle) ? bundle : bundle.parent_path();
    const fs::path file = dir / "truth.toml";
    if (!fs::exists(file)) return std::nullopt;
    const TomlDocument doc = read_toml(file);
    auto it = doc.find("correct");
    if (it == doc.end() || !it->second.is_string()) schema("truth.toml: 'correct' must be a string");
    return GroundTruth{it->second.as_string()};
}

std::optional<std::string> check_candidate(const PatchCorpus& corpus, const Candidate& candidate,
                                           const RunOptions& options) {
    Program patched;
    try {
        patched = apply_patch(corpus.program, corpus.buggy_region, candidate.replacement_text);
    } catch (const PatchError& e) {
        return std::string(e.kind() == PatchError::Kind::ParseFailure ? "parse failure: " : "misaligned: ") + e.what();
    }
    auto failure = [](const TestOutcome& o) {
        if (o.status == TestStatus::RuntimeError && o.message == kStepBudgetMessage) {
            return std::string("step budget exceeded");
        }
        return o.message;
    };
    const TestOutcome target = run_test(patched, corpus.failing_test, nullptr, options);
    if (!target.passed()) return "failing test still fails (" + failure(target) + ")";
    for (const auto& t : corpus.passing_tests) {
        const TestOutcome o = run_test(patched, t, nullptr, options);
        if (!o.passed()) return "breaks passing test " + t + " (" + failure(o) + ")";
    }
    return std::nullopt;
}

ValidationResult validate(const PatchCorpus& corpus, const ValidateOptions& options) {
    const std::size_t n = corpus.candidates.size();
    std::vector<std::optional<std::string>> verdicts(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            verdicts[i] = check_candidate(corpus, corpus.candidates[i], options.run);
        }
    };
    unsigned threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    }

    ValidationResult out;
    const auto buggy = corpus.buggy_tokens();
    for (std::size_t i = 0; i < n; ++i) {
        const Candidate& c = corpus.candidates[i];
        if (verdicts[i]) {
            out.implausible.push_back(Rejection{c.id, *verdicts[i]});
        } else {
            out.plausible.push_back(sampler::make_patch(c.id, c.original_rank, c.replacement_text, buggy));
        }
    }
    return out;
}

}  // namespace triage::corpus
