#include "triage/minilang/interpreter.hpp"

#include "triage/minilang/parser.hpp"

#include <cmath>
#include <limits>
#include <unordered_map>

namespace triage::minilang {

std::string_view to_string(TestStatus status) {
    switch (status) {
        case TestStatus::Pass: return "pass";
        case TestStatus::AssertionFailure: return "assertion-failure";
        case TestStatus::RuntimeError: return "runtime-error";
    }
    return "?";
}

namespace {

struct RuntimeFault {
    std::string message;
    SourceLocation loc;
};
struct AssertionFault {
    SourceLocation loc;
};
struct BudgetFault {
    SourceLocation loc;
};
struct HaltSignal {};

std::int64_t wrap_add(std::int64_t a, std::int64_t b) {
    return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) + static_cast<std::uint64_t>(b));
}
std::int64_t wrap_sub(std::int64_t a, std::int64_t b) {
    return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) - static_cast<std::uint64_t>(b));
}
std::int64_t wrap_mul(std::int64_t a, std::int64_t b) {
    return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) * static_cast<std::uint64_t>(b));
}

class Interpreter {
  public:
    Interpreter(const Program& program, ExecutionObserver* observer, const RunOptions& options)
        : program_(program), observer_(observer), options_(options) {
        for (const auto& fn : program.functions()) functions_.emplace(fn->name, fn.get());
    }

    RunResult run(const FunctionDecl& test) {
        RunResult result;
        result.outcome.test = test.name;
        try {
            call(test, {}, std::nullopt, test.loc);
        } catch (const AssertionFault& f) {
            result.outcome.status = TestStatus::AssertionFailure;
            result.outcome.message = "assertion failed";
            result.outcome.location = f.loc;
        } catch (const RuntimeFault& f) {
            result.outcome.status = TestStatus::RuntimeError;
            result.outcome.message = f.message;
            result.outcome.location = f.loc;
        } catch (const BudgetFault& f) {
            result.outcome.status = TestStatus::RuntimeError;
            result.outcome.message = std::string(kStepBudgetMessage);
            result.outcome.location = f.loc;
            result.budget_exhausted = true;
        } catch (const HaltSignal&) {
            result.outcome.status = TestStatus::RuntimeError;
            result.outcome.message = "halted by observer";
            result.halted = true;
        }
        result.output = std::move(output_);
        result.steps = steps_;
        return result;
    }

  private:
    struct Frame {
        const FunctionDecl* fn;
        std::vector<std::optional<Value>> slots;
        std::optional<Value> returned;
    };

    void tick(const SourceLocation& loc) {
        if (++steps_ > options_.step_budget) throw BudgetFault{loc};
    }

    Value call(const FunctionDecl& fn, std::vector<Value> args, std::optional<SourceLocation> call_site,
               const SourceLocation& loc) {
        if (stack_.size() >= options_.max_call_depth) throw RuntimeFault{"call depth exceeded", loc};
        tick(loc);
        Frame frame{&fn, std::vector<std::optional<Value>>(fn.slot_count), std::nullopt};
        for (std::size_t i = 0; i < args.size(); ++i) frame.slots[i] = std::move(args[i]);
        frames_.push_back(std::move(frame));
        stack_.push_back(CallFrame{&fn, std::move(call_site)});
        exec_block(fn.body);
        Value result = frames_.back().returned.value_or(Value::unit());
        frames_.pop_back();
        stack_.pop_back();
        return result;
    }

    // Returns true when a return statement fired.
    bool exec_block(const Block& block) {
        for (const auto& s : block.stmts) {
            if (exec(*s)) return true;
        }
        return false;
    }

    bool exec(const Stmt& stmt) {
        tick(stmt.loc);
        if (observer_ && observer_->on_statement(stmt, stack_) == ExecutionObserver::Flow::Halt) throw HaltSignal{};
        return std::visit(
            [&](const auto& n) -> bool {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, AssignStmt>) {
                    Value v = eval(*n.value);
                    frames_.back().slots[n.slot] = v;
                    if (observer_) observer_->on_assign(stmt, v);
                    return false;
                } else if constexpr (std::is_same_v<T, IfStmt>) {
                    if (truthy(eval(*n.cond), *n.cond)) return exec_block(n.then_block);
                    if (n.else_block) return exec_block(*n.else_block);
                    return false;
                } else if constexpr (std::is_same_v<T, WhileStmt>) {
                    while (true) {
                        tick(n.cond->loc);
                        if (!truthy(eval(*n.cond), *n.cond)) return false;
                        if (exec_block(n.body)) return true;
                    }
                } else if constexpr (std::is_same_v<T, ReturnStmt>) {
                    frames_.back().returned = n.value ? eval(*n.value) : Value::unit();
                    return true;
                } else {
                    eval(*n.expr);
                    return false;
                }
            },
            stmt.node);
    }

    bool truthy(const Value& v, const Expr& e) {
        if (!v.is(Value::Kind::Bool)) {
            throw RuntimeFault{"type mismatch: condition is " + std::string(v.type_name()) + ", expected bool", e.loc};
        }
        return v.as_bool();
    }

    Value eval(const Expr& e) {
        Value v = eval_node(e);
        if (observer_) observer_->on_value(e, v);
        return v;
    }

    Value eval_node(const Expr& e) {
        return std::visit(
            [&](const auto& n) -> Value {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, IntLiteral>) {
                    return Value::integer(n.value);
                } else if constexpr (std::is_same_v<T, FloatLiteral>) {
                    return Value::floating(n.value);
                } else if constexpr (std::is_same_v<T, StringLiteral>) {
                    return Value::string(n.value);
                } else if constexpr (std::is_same_v<T, BoolLiteral>) {
                    return Value::boolean(n.value);
                } else if constexpr (std::is_same_v<T, VarRef>) {
                    const auto& slot = frames_.back().slots[n.slot];
                    if (!slot) throw RuntimeFault{"undefined variable '" + n.name + "'", e.loc};
                    return *slot;
                } else if constexpr (std::is_same_v<T, UnaryExpr>) {
                    Value v = eval(*n.operand);
                    if (n.op == UnaryOp::Not) {
                        if (!v.is(Value::Kind::Bool)) throw type_error("!", v, e);
                        return Value::boolean(!v.as_bool());
                    }
                    if (v.is(Value::Kind::Int)) return Value::integer(wrap_sub(0, v.as_int()));
                    if (v.is(Value::Kind::Float)) return Value::floating(-v.as_float());
                    throw type_error("-", v, e);
                } else if constexpr (std::is_same_v<T, BinaryExpr>) {
                    return eval_binary(n, e);
                } else if constexpr (std::is_same_v<T, CallExpr>) {
                    return eval_call(n, e);
                } else if constexpr (std::is_same_v<T, IndexExpr>) {
                    Value target = eval(*n.target);
                    Value index = eval(*n.index);
                    if (!index.is(Value::Kind::Int)) {
                        throw RuntimeFault{"type mismatch: index is " + std::string(index.type_name()), e.loc};
                    }
                    const std::int64_t i = index.as_int();
                    if (target.is(Value::Kind::List)) {
                        const auto& items = target.as_list();
                        if (i < 0 || static_cast<std::uint64_t>(i) >= items.size()) throw out_of_bounds(i, items.size(), e);
                        return items[static_cast<std::size_t>(i)];
                    }
                    if (target.is(Value::Kind::String)) {
                        const auto& s = target.as_string();
                        if (i < 0 || static_cast<std::uint64_t>(i) >= s.size()) throw out_of_bounds(i, s.size(), e);
                        return Value::string(std::string(1, s[static_cast<std::size_t>(i)]));
                    }
                    throw RuntimeFault{"type mismatch: cannot index " + std::string(target.type_name()), e.loc};
                } else {
                    ValueList items;
                    items.reserve(n.elements.size());
                    for (const auto& el : n.elements) items.push_back(eval(*el));
                    return Value::list(std::move(items));
                }
            },
            e.node);
    }

    static RuntimeFault out_of_bounds(std::int64_t i, std::size_t size, const Expr& e) {
        return RuntimeFault{"index out of bounds: " + std::to_string(i) + " (size " + std::to_string(size) + ")", e.loc};
    }

    static RuntimeFault type_error(std::string_view op, const Value& v, const Expr& e) {
        return RuntimeFault{"type mismatch: cannot apply '" + std::string(op) + "' to " + std::string(v.type_name()),
                            e.loc};
    }
    static RuntimeFault type_error(std::string_view op, const Value& a, const Value& b, const Expr& e) {
        return RuntimeFault{"type mismatch: cannot apply '" + std::string(op) + "' to " + std::string(a.type_name()) +
                                " and " + std::string(b.type_name()),
                            e.loc};
    }

    Value eval_binary(const BinaryExpr& n, const Expr& e) {
        if (n.op == BinaryOp::And || n.op == BinaryOp::Or) {
            Value lhs = eval(*n.lhs);
            if (!lhs.is(Value::Kind::Bool)) throw type_error(to_string(n.op), lhs, e);
            if (n.op == BinaryOp::And && !lhs.as_bool()) return Value::boolean(false);
            if (n.op == BinaryOp::Or && lhs.as_bool()) return Value::boolean(true);
            Value rhs = eval(*n.rhs);
            if (!rhs.is(Value::Kind::Bool)) throw type_error(to_string(n.op), rhs, e);
            return rhs;
        }

        Value a = eval(*n.lhs);
        Value b = eval(*n.rhs);
        const auto op = to_string(n.op);
        using K = Value::Kind;

        switch (n.op) {
            case BinaryOp::Eq:
            case BinaryOp::Ne: {
                bool eq = (a.is_numeric() && b.is_numeric() && a.kind() != b.kind()) ? a.as_number() == b.as_number()
                          : (a.is(K::Float) && b.is(K::Float))                      ? a.as_float() == b.as_float()
                                                                                   : a == b;
                return Value::boolean(n.op == BinaryOp::Eq ? eq : !eq);
            }
            case BinaryOp::Lt:
            case BinaryOp::Le:
            case BinaryOp::Gt:
            case BinaryOp::Ge: {
                int cmp = 0;
                if (a.is(K::Int) && b.is(K::Int)) {
                    cmp = a.as_int() < b.as_int() ? -1 : (a.as_int() > b.as_int() ? 1 : 0);
                } else if (a.is_numeric() && b.is_numeric()) {
                    const double x = a.as_number();
                    const double y = b.as_number();
                    if (std::isnan(x) || std::isnan(y)) return Value::boolean(false);
                    cmp = x < y ? -1 : (x > y ? 1 : 0);
                } else if (a.is(K::String) && b.is(K::String)) {
                    cmp = a.as_string().compare(b.as_string());
                    cmp = cmp < 0 ? -1 : (cmp > 0 ? 1 : 0);
                } else {
                    throw type_error(op, a, b, e);
                }
                switch (n.op) {
                    case BinaryOp::Lt: return Value::boolean(cmp < 0);
                    case BinaryOp::Le: return Value::boolean(cmp <= 0);
                    case BinaryOp::Gt: return Value::boolean(cmp > 0);
                    default: return Value::boolean(cmp >= 0);
                }
            }
            default:
                break;
        }

        // Arithmetic.
        if (n.op == BinaryOp::Add) {
            if (a.is(K::String) && b.is(K::String)) return Value::string(a.as_string() + b.as_string());
            if (a.is(K::List) && b.is(K::List)) {
                ValueList items = a.as_list();
                items.insert(items.end(), b.as_list().begin(), b.as_list().end());
                return Value::list(std::move(items));
            }
        }
        if (!a.is_numeric() || !b.is_numeric()) throw type_error(op, a, b, e);

        if (a.is(K::Int) && b.is(K::Int)) {
            const std::int64_t x = a.as_int();
            const std::int64_t y = b.as_int();
            switch (n.op) {
                case BinaryOp::Add: return Value::integer(wrap_add(x, y));
                case BinaryOp::Sub: return Value::integer(wrap_sub(x, y));
                case BinaryOp::Mul: return Value::integer(wrap_mul(x, y));
                case BinaryOp::Div:
                    if (y == 0) throw RuntimeFault{"division by zero", e.loc};
                    if (x == std::numeric_limits<std::int64_t>::min() && y == -1) return Value::integer(x);
                    return Value::integer(x / y);
                case BinaryOp::Mod:
                    if (y == 0) throw RuntimeFault{"division by zero", e.loc};
                    if (y == -1) return Value::integer(0);
                    return Value::integer(x % y);
                default: break;
            }
        }
        const double x = a.as_number();
        const double y = b.as_number();
        switch (n.op) {
            case BinaryOp::Add: return Value::floating(x + y);
            case BinaryOp::Sub: return Value::floating(x - y);
            case BinaryOp::Mul: return Value::floating(x * y);
            case BinaryOp::Div:
                if (y == 0.0) throw RuntimeFault{"division by zero", e.loc};
                return Value::floating(x / y);
            case BinaryOp::Mod:
                if (y == 0.0) throw RuntimeFault{"division by zero", e.loc};
                return Value::floating(std::fmod(x, y));
            default: break;
        }
        throw type_error(op, a, b, e);
    }

    void expect_arity(const CallExpr& n, std::size_t count, const Expr& e) {
        if (n.args.size() != count) {
            throw RuntimeFault{n.callee + "() takes " + std::to_string(count) + " argument(s), got " +
                                   std::to_string(n.args.size()),
                               e.loc};
        }
    }

    Value eval_call(const CallExpr& n, const Expr& e) {
        if (is_builtin(n.callee)) return eval_builtin(n, e);
        auto it = functions_.find(n.callee);
        if (it == functions_.end()) throw RuntimeFault{"unknown function '" + n.callee + "'", e.loc};
        const FunctionDecl& fn = *it->second;
        if (fn.params.size() != n.args.size()) {
            throw RuntimeFault{n.callee + "() takes " + std::to_string(fn.params.size()) + " argument(s), got " +
                                   std::to_string(n.args.size()),
                               e.loc};
        }
        std::vector<Value> args;
        args.reserve(n.args.size());
        for (const auto& a : n.args) args.push_back(eval(*a));
        return call(fn, std::move(args), e.loc, e.loc);
    }

    Value eval_builtin(const CallExpr& n, const Expr& e) {
        using K = Value::Kind;
        if (n.callee == "print") {
            std::string line;
            for (std::size_t i = 0; i < n.args.size(); ++i) {
                Value v = eval(*n.args[i]);
                if (i) line += ' ';
                line += v.serialize();
            }
            output_.push_back(std::move(line));
            return Value::unit();
        }
        expect_arity(n, 1, e);
        Value v = eval(*n.args[0]);
        if (n.callee == "assert") {
            if (!v.is(K::Bool)) throw RuntimeFault{"type mismatch: assert expects bool, got " + std::string(v.type_name()), e.loc};
            if (!v.as_bool()) throw AssertionFault{e.loc};
            return Value::unit();
        }
        if (n.callee == "len") {
            if (v.is(K::List)) return Value::integer(static_cast<std::int64_t>(v.as_list().size()));
            if (v.is(K::String)) return Value::integer(static_cast<std::int64_t>(v.as_string().size()));
            throw type_error("len", v, e);
        }
        if (!v.is_numeric()) throw type_error(n.callee, v, e);
        if (n.callee == "sqrt") return Value::floating(std::sqrt(v.as_number()));
        if (n.callee == "abs") {
            if (v.is(K::Int)) return Value::integer(v.as_int() < 0 ? wrap_sub(0, v.as_int()) : v.as_int());
            return Value::floating(std::fabs(v.as_float()));
        }
        // floor
        if (v.is(K::Int)) return v;
        const double f = std::floor(v.as_float());
        if (!std::isfinite(f) || f < -9.2233720368547758e18 || f >= 9.2233720368547758e18) {
            throw RuntimeFault{"floor(): value out of integer range", e.loc};
        }
        return Value::integer(static_cast<std::int64_t>(f));
    }

    const Program& program_;
    ExecutionObserver* observer_;
    RunOptions options_;
    std::unordered_map<std::string, const FunctionDecl*> functions_;
    std::vector<Frame> frames_;
    std::vector<CallFrame> stack_;
    std::vector<std::string> output_;
    std::uint64_t steps_ = 0;
};

}  // namespace

RunResult execute(const Program& program, std::string_view test, ExecutionObserver* observer,
                  const RunOptions& options) {
    const FunctionDecl* fn = program.find_function(test);
    if (!fn || !fn->is_test()) throw std::invalid_argument("unknown test '" + std::string(test) + "'");
    if (!fn->params.empty()) throw std::invalid_argument("test '" + std::string(test) + "' must take no parameters");
    Interpreter interp(program, observer, options);
    return interp.run(*fn);
}

TestOutcome run_test(const Program& program, std::string_view test, ExecutionObserver* observer,
                     const RunOptions& options) {
    return execute(program, test, observer, options).outcome;
}

std::vector<TestOutcome> run_suite(const Program& program, const RunOptions& options) {
    std::vector<TestOutcome> out;
    for (const auto& name : program.test_names()) out.push_back(run_test(program, name, nullptr, options));
    return out;
}

}  // namespace triage::minilang
