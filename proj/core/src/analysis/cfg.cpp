#include "triage/analysis/cfg.hpp"

namespace triage::analysis {

using namespace minilang;

std::set<std::string> variables_read(const Expr& expr) {
    std::set<std::string> out;
    walk_expr(expr, [&](const Expr& e) {
        if (const auto* v = std::get_if<VarRef>(&e.node)) out.insert(v->name);
    });
    return out;
}

namespace {

class Builder {
  public:
    explicit Builder(Cfg& cfg) : cfg_(cfg) {}

    // Wires `block` after the nodes in `preds`; returns the nodes that fall
    // through at its end.
    std::vector<std::size_t> block(const Block& b, std::vector<std::size_t> preds) {
        for (const auto& s : b.stmts) preds = stmt(*s, std::move(preds));
        return preds;
    }

  private:
    std::size_t add(CfgNode node, const std::vector<std::size_t>& preds) {
        const std::size_t id = cfg_.nodes.size();
        cfg_.nodes.push_back(std::move(node));
        for (std::size_t p : preds) cfg_.nodes[p].succ.push_back(id);
        return id;
    }

    std::vector<std::size_t> stmt(const Stmt& s, std::vector<std::size_t> preds) {
        CfgNode node;
        node.stmt = &s;
        node.loc = s.loc;
        for (const Expr* e : statement_exprs(s)) node.uses.merge(variables_read(*e));

        if (const auto* a = std::get_if<AssignStmt>(&s.node)) {
            node.defs.push_back(Definition{a->name, s.loc});
            return {add(std::move(node), preds)};
        }
        if (const auto* i = std::get_if<IfStmt>(&s.node)) {
            node.kind = CfgNode::Kind::Guard;
            const std::size_t guard = add(std::move(node), preds);
            auto out = block(i->then_block, {guard});
            if (i->else_block) {
                auto other = block(*i->else_block, {guard});
                out.insert(out.end(), other.begin(), other.end());
            } else {
                out.push_back(guard);
            }
            return out;
        }
        if (const auto* w = std::get_if<WhileStmt>(&s.node)) {
            node.kind = CfgNode::Kind::Guard;
            const std::size_t guard = add(std::move(node), preds);
            for (std::size_t tail : block(w->body, {guard})) cfg_.nodes[tail].succ.push_back(guard);
            return {guard};
        }
        if (std::holds_alternative<ReturnStmt>(s.node)) {
            const std::size_t ret = add(std::move(node), preds);
            cfg_.nodes[ret].succ.push_back(Cfg::kExit);
            return {};
        }
        return {add(std::move(node), preds)};
    }

    Cfg& cfg_;
};

}  // namespace

Cfg Cfg::build(const FunctionDecl& fn) {
    Cfg cfg;
    CfgNode entry;
    entry.kind = CfgNode::Kind::Entry;
    entry.loc = fn.loc;
    for (const auto& p : fn.params) entry.defs.push_back(Definition{p.name, p.loc});
    cfg.nodes.push_back(std::move(entry));

    CfgNode exit;
    exit.kind = CfgNode::Kind::Exit;
    exit.loc = fn.loc;
    cfg.nodes.push_back(std::move(exit));

    Builder builder(cfg);
    for (std::size_t tail : builder.block(fn.body, {kEntry})) cfg.nodes[tail].succ.push_back(kExit);
    return cfg;
}

std::optional<std::size_t> Cfg::node_of(const Stmt& stmt) const {
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (nodes[i].stmt == &stmt) return i;
    }
    return std::nullopt;
}

std::optional<std::size_t> Cfg::node_at(const SourceLocation& loc) const {
    for (std::size_t i = 2; i < nodes.size(); ++i) {
        if (nodes[i].loc == loc) return i;
    }
    return std::nullopt;
}

}  // namespace triage::analysis
