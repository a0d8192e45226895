#pragma once

#include "triage/minilang/program.hpp"
#include "triage/minilang/value.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace triage::minilang {

enum class TestStatus { Pass, AssertionFailure, RuntimeError };

std::string_view to_string(TestStatus status);

struct TestOutcome {
    std::string test;
    TestStatus status = TestStatus::Pass;
    std::string message;                     // empty on pass
    std::optional<SourceLocation> location;  // set for failures

    [[nodiscard]] bool passed() const { return status == TestStatus::Pass; }
    friend bool operator==(const TestOutcome&, const TestOutcome&) = default;
};

struct CallFrame {
    const FunctionDecl* function = nullptr;
    std::optional<SourceLocation> call_site;  // call expression in the caller; empty for the test itself
};

// Receives interpreter events in program order. Every callback fires exactly
// once per dynamic evaluation.
class ExecutionObserver {
  public:
    enum class Flow { Continue, Halt };

    virtual ~ExecutionObserver() = default;

    // Before a statement executes. `stack` is outermost-first.
    virtual Flow on_statement(const Stmt& /*stmt*/, std::span<const CallFrame> /*stack*/) { return Flow::Continue; }
    // After an assignment stores its value.
    virtual void on_assign(const Stmt& /*stmt*/, const Value& /*value*/) {}
    // After an expression produces a value.
    virtual void on_value(const Expr& /*expr*/, const Value& /*value*/) {}
};

struct RunOptions {
    std::uint64_t step_budget = 10'000'000;
    std::size_t max_call_depth = 1000;
};

struct RunResult {
    TestOutcome outcome;
    std::vector<std::string> output;  // print() lines
    std::uint64_t steps = 0;
    bool halted = false;  // the observer stopped execution
    bool budget_exhausted = false;
};

inline constexpr std::string_view kStepBudgetMessage = "step budget";

// Runs one test function. Throws std::invalid_argument for an unknown test.
RunResult execute(const Program& program, std::string_view test, ExecutionObserver* observer = nullptr,
                  const RunOptions& options = {});

TestOutcome run_test(const Program& program, std::string_view test, ExecutionObserver* observer = nullptr,
                     const RunOptions& options = {});

// Every test_ function in declaration order, each in a fresh interpreter.
std::vector<TestOutcome> run_suite(const Program& program, const RunOptions& options = {});

}  // namespace triage::minilang
