#pragma once

#include "triage/distance/distance.hpp"
#include "triage/minilang/interpreter.hpp"
#include "triage/sampler/patch.hpp"

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace triage::corpus {

namespace fs = std::filesystem;

struct Candidate {
    std::string id;
    int original_rank = 1;
    std::string replacement_text;
    friend bool operator==(const Candidate&, const Candidate&) = default;
};

// A bug bundle: the buggy program, its tests and fault region, and the
// candidate patches in repair-tool order.
struct PatchCorpus {
    fs::path root;
    minilang::SourceMap sources;
    minilang::Program program;
    minilang::LineSpan buggy_region;
    std::string failing_test;
    std::vector<std::string> passing_tests;
    std::vector<Candidate> candidates;

    [[nodiscard]] std::string buggy_text() const { return program.line_text(buggy_region); }
    [[nodiscard]] distance::TokenSeq buggy_tokens() const { return distance::tokenize(buggy_text()); }
    [[nodiscard]] const Candidate* find(const std::string& id) const;
};

class CorpusError : public std::runtime_error {
  public:
    enum class Kind { Io, Schema, Parse, Corrupt };
    CorpusError(Kind kind, const std::string& message);
    [[nodiscard]] Kind kind() const { return kind_; }

  private:
    Kind kind_;
};

std::string_view to_string(CorpusError::Kind kind);

// Reads `path` (a bundle directory or its bug.toml) and checks the bundle's
// invariants: the failing test fails and every passing test passes on the
// unpatched program.
PatchCorpus load(const fs::path& path, const minilang::RunOptions& options = {});

// The evaluation answer key, kept apart from PatchCorpus so triage code never
// sees it.
struct GroundTruth {
    std::string correct;
};
std::optional<GroundTruth> load_truth(const fs::path& bundle);

struct Rejection {
    std::string id;
    std::string reason;
    friend bool operator==(const Rejection&, const Rejection&) = default;
};

struct ValidationResult {
    std::vector<sampler::Patch> plausible;  // by original rank
    std::vector<Rejection> implausible;     // by original rank
};

struct ValidateOptions {
    minilang::RunOptions run;
    unsigned threads = 0;  // 0: hardware concurrency
};

// Applies every candidate and runs the failing and passing tests on it.
ValidationResult validate(const PatchCorpus& corpus, const ValidateOptions& options = {});

// Why a single candidate is implausible, or nullopt when it is plausible.
std::optional<std::string> check_candidate(const PatchCorpus& corpus, const Candidate& candidate,
                                           const minilang::RunOptions& options = {});

}  // namespace triage::corpus
