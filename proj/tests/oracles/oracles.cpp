#include "oracles.hpp"

#include <algorithm>
#include <deque>
#include <optional>

namespace oracle {

using namespace triage::minilang;

std::size_t levenshtein(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    std::vector<std::vector<std::optional<std::size_t>>> memo(a.size() + 1,
                                                              std::vector<std::optional<std::size_t>>(b.size() + 1));
    std::function<std::size_t(std::size_t, std::size_t)> go = [&](std::size_t i, std::size_t j) -> std::size_t {
        if (i == a.size()) return b.size() - j;
        if (j == b.size()) return a.size() - i;
        auto& slot = memo[i][j];
        if (slot) return *slot;
        std::size_t best;
        if (a[i] == b[j]) {
            best = go(i + 1, j + 1);
        } else {
            best = 1 + std::min({go(i + 1, j + 1), go(i + 1, j), go(i, j + 1)});
        }
        slot = best;
        return best;
    };
    return go(0, 0);
}

std::string centroid(const std::vector<std::string>& members,
                     const std::function<std::uint32_t(const std::string&, const std::string&)>& dist,
                     const std::map<std::string, int>& original_rank, bool maximize) {
    std::vector<std::pair<std::uint64_t, std::string>> sums;
    for (const auto& m : members) {
        std::uint64_t s = 0;
        for (const auto& o : members) {
            if (o != m) s += dist(m, o);
        }
        sums.emplace_back(s, m);
    }
    std::string best = sums.front().second;
    std::uint64_t best_sum = sums.front().first;
    for (const auto& [s, m] : sums) {
        bool better = maximize ? s > best_sum : s < best_sum;
        if (s == best_sum) {
            const int rm = original_rank.at(m), rb = original_rank.at(best);
            better = rm < rb || (rm == rb && m < best);
        }
        if (better) {
            best = m;
            best_sum = s;
        }
    }
    return best;
}

namespace {

struct Node {
    Site site;
    std::optional<std::string> def;
    std::vector<std::string> params;  // entry only
    std::set<std::string> reads;
    std::vector<int> next;
};

void collect_reads(const Expr& e, std::set<std::string>& out) {
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, VarRef>) {
                out.insert(n.name);
            } else if constexpr (std::is_same_v<T, UnaryExpr>) {
                collect_reads(*n.operand, out);
            } else if constexpr (std::is_same_v<T, BinaryExpr>) {
                collect_reads(*n.lhs, out);
                collect_reads(*n.rhs, out);
            } else if constexpr (std::is_same_v<T, CallExpr>) {
                for (const auto& a : n.args) collect_reads(*a, out);
            } else if constexpr (std::is_same_v<T, IndexExpr>) {
                collect_reads(*n.target, out);
                collect_reads(*n.index, out);
            } else if constexpr (std::is_same_v<T, ListExpr>) {
                for (const auto& x : n.elements) collect_reads(*x, out);
            }
        },
        e.node);
}

class Graph {
  public:
    std::vector<Node> nodes;
    static constexpr int kExit = 0;

    explicit Graph(const FunctionDecl& fn) {
        nodes.push_back(Node{});  // exit
        Node entry;
        for (const auto& p : fn.params) entry.params.push_back(p.name);
        nodes.push_back(entry);
        const int body = block(fn.body, kExit);
        nodes[1].next = {body};
    }

  private:
    int add(Node n) {
        nodes.push_back(std::move(n));
        return static_cast<int>(nodes.size()) - 1;
    }

    int block(const Block& b, int follow) {
        int next = follow;
        for (auto it = b.stmts.rbegin(); it != b.stmts.rend(); ++it) next = stmt(**it, next);
        return next;
    }

    int stmt(const Stmt& s, int follow) {
        Node n;
        n.site = Site{s.loc.line, s.loc.col};
        if (const auto* a = std::get_if<AssignStmt>(&s.node)) {
            n.def = a->name;
            collect_reads(*a->value, n.reads);
            n.next = {follow};
            return add(std::move(n));
        }
        if (const auto* e = std::get_if<ExprStmt>(&s.node)) {
            collect_reads(*e->expr, n.reads);
            n.next = {follow};
            return add(std::move(n));
        }
        if (const auto* r = std::get_if<ReturnStmt>(&s.node)) {
            if (r->value) collect_reads(*r->value, n.reads);
            n.next = {kExit};
            return add(std::move(n));
        }
        if (const auto* i = std::get_if<IfStmt>(&s.node)) {
            collect_reads(*i->cond, n.reads);
            const int then_entry = block(i->then_block, follow);
            const int else_entry = i->else_block ? block(*i->else_block, follow) : follow;
            n.next = {then_entry, else_entry};
            return add(std::move(n));
        }
        const auto& w = std::get<WhileStmt>(s.node);
        collect_reads(*w.cond, n.reads);
        const int guard = add(std::move(n));
        const int body = block(w.body, guard);
        nodes[guard].next = {body, follow};
        return guard;
    }
};

// Use sites reached by `var` defined at node `from`.
std::set<int> reached_uses(const Graph& g, int from, const std::string& var) {
    std::set<int> found;
    std::set<int> visited;
    std::vector<int> stack(g.nodes[from].next.begin(), g.nodes[from].next.end());
    while (!stack.empty()) {
        const int n = stack.back();
        stack.pop_back();
        if (!visited.insert(n).second) continue;
        const Node& node = g.nodes[n];
        if (node.reads.contains(var)) found.insert(n);
        if (node.def == var) continue;
        for (int s : node.next) stack.push_back(s);
    }
    return found;
}

}  // namespace

Closure affected_closure(const FunctionDecl& fn, const std::vector<Site>& seeds) {
    const Graph g(fn);
    auto node_at = [&](const Site& s) -> int {
        for (std::size_t i = 2; i < g.nodes.size(); ++i) {
            if (g.nodes[i].site == s) return static_cast<int>(i);
        }
        return -1;
    };
    Closure out;
    std::deque<std::pair<std::string, int>> work;
    std::set<std::pair<std::string, int>> seen;
    for (const auto& s : seeds) {
        const int n = node_at(s);
        if (n < 0 || !g.nodes[n].def) continue;
        if (seen.insert({*g.nodes[n].def, n}).second) work.emplace_back(*g.nodes[n].def, n);
    }
    while (!work.empty()) {
        auto [var, n] = work.front();
        work.pop_front();
        out.variables.insert(var);
        out.definitions.insert({var, g.nodes[n].site});
        out.locations.insert(g.nodes[n].site);
        for (int u : reached_uses(g, n, var)) {
            const Node& use = g.nodes[u];
            out.uses.insert({var, use.site});
            out.locations.insert(use.site);
            if (use.def && seen.insert({*use.def, u}).second) work.emplace_back(*use.def, u);
        }
    }
    return out;
}

std::string random_straight_line(std::mt19937_64& rng, int max_statements) {
    static const std::vector<std::string> vars = {"a", "b", "c", "d", "e", "p", "q"};
    static const std::vector<std::string> ops = {"+", "-", "*"};
    auto pick = [&](const std::vector<std::string>& v) { return v[rng() % v.size()]; };
    auto operand = [&]() { return rng() % 4 == 0 ? std::to_string(rng() % 10) : pick(vars); };
    auto expr = [&]() {
        std::string e = operand();
        const int terms = static_cast<int>(rng() % 3);
        for (int i = 0; i < terms; ++i) e += " " + pick(ops) + " " + operand();
        return e;
    };
    std::string src = "fn f(p, q) {\n";
    // Every variable starts defined so the program also runs.
    src += "    a = 0;\n    b = 1;\n    c = 2;\n    d = 3;\n    e = 4;\n";
    const int n = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(std::max(1, max_statements - 5)));
    for (int i = 0; i < n; ++i) {
        const auto k = rng() % 10;
        if (k < 7) {
            src += "    " + pick({"a", "b", "c", "d", "e", "p"}) + " = " + expr() + ";\n";
        } else if (k < 9) {
            src += "    print(" + expr() + ");\n";
        } else {
            src += "    return " + expr() + ";\n";
        }
    }
    src += "}\n";
    return src;
}

}  // namespace oracle
