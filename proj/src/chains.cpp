#include "cyclam/chains.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <functional>
#include <stdexcept>

namespace cyclam {

namespace {

// Position of some free occurrence of `name` in the subtree that starts at
// position `at`, following occurrences down the tree.
Position find_occurrence(InfiniteTermHandle& h, TermPtr body, Position at,
                         const std::string& name) {
    for (;;) {
        TermPtr t = h.head(body);
        switch (t->kind) {
        case Kind::Var:
            if (t->name != name)
                throw std::logic_error("find_occurrence: lost the variable");
            return at;
        case Kind::App:
            if (occurs_free(t->left, name)) {
                body = t->left;
                at += '0';
            } else {
                body = t->right;
                at += '1';
            }
            break;
        case Kind::Abs:
            if (!occurs_free(t->left, name) || t->name == name)
                throw std::logic_error("find_occurrence: lost the variable");
            body = t->left;
            at += "00";
            break;
        default:
            throw std::logic_error("find_occurrence: unexpected head");
        }
    }
}

} // namespace

Chain chain_of_annotated_path(InfiniteTermHandle& h,
                              const std::vector<PrefixedState>& path) {
    if (path.empty() || !path.back().annotated())
        throw std::invalid_argument("chain_of_annotated_path: want an annotated path");
    const PrefixedState& target = path.back();
    Chain chain;
    chain.binders = *target.prefix_pos;
    size_t n = chain.binders.size();
    for (size_t i = 1; i < n; ++i) {
        // State right after the lambda step that appended binder i (0-based:
        // chain.binders[i]); positions only grow along the path, so it is
        // the unique state whose prefix positions end there.
        const Position& p_next = chain.binders[i];
        const PrefixedState* after = nullptr;
        for (auto& s : path) {
            if (s.prefix_pos->size() == i + 1 && (*s.prefix_pos)[i] == p_next &&
                *s.body_pos == p_next + "00") {
                after = &s;
                break;
            }
        }
        if (!after)
            throw std::logic_error("chain_of_annotated_path: lambda step not on path");
        // The previous binder's variable occurs below (the lambda step was
        // taken with a non-vacuous last entry); follow it to an occurrence.
        chain.occurrences.push_back(
            find_occurrence(h, after->body, *after->body_pos, after->prefix[i - 1]));
    }
    return chain;
}

ChainRelations binding_capturing_relations(InfiniteTermHandle& h, size_t depth,
                                           size_t max_states) {
    ExploreBudget b;
    b.max_depth = depth + 1;
    b.max_states = max_states;
    TransitionGraph g = explore_annotated(h, b);

    ChainRelations rel;
    for (size_t i = 0; i < g.states.size(); ++i) {
        const PrefixedState& s = g.states[i];
        TermPtr head;
        try {
            head = h.head(s.body);
        } catch (const UnproductiveError&) {
            continue;
        }
        if (head->kind != Kind::Var) continue;
        auto slot = std::find(s.prefix.begin(), s.prefix.end(), head->name);
        if (slot == s.prefix.end()) continue;
        size_t j = static_cast<size_t>(slot - s.prefix.begin());
        const Position& binder = (*s.prefix_pos)[j];
        const Position& q = *s.body_pos;
        if (binder.size() <= depth && q.size() <= depth)
            rel.binds.insert({binder, q});
        // Capturing binders: every abstraction position strictly between the
        // binder and the occurrence; all of them were lambda steps on the
        // exploration path to this state.
        for (int cur = static_cast<int>(i); cur != -1;
             cur = g.parent[static_cast<size_t>(cur)]) {
            const Edge& e = g.parent_edge[static_cast<size_t>(cur)];
            if (g.parent[static_cast<size_t>(cur)] == -1) break;
            if (e.label != RuleLabel::Lam) continue;
            const PrefixedState& t = g.states[static_cast<size_t>(cur)];
            const Position& lam_pos = t.prefix_pos->back();
            if (pos_lt(binder, lam_pos) && pos_lt(lam_pos, q) &&
                lam_pos.size() <= depth && q.size() <= depth)
                rel.capture.insert({q, lam_pos});
        }
    }
    return rel;
}

bool validate_chain(const Chain& chain, const TermPtr& truncated) {
    if (chain.binders.empty()) return false;
    if (chain.occurrences.size() + 1 != chain.binders.size()) return false;

    // Index the truncation: node kind at each position, and the binder of
    // every variable occurrence.
    std::map<Position, Kind> kind_at;
    std::map<Position, Position> binder_of;
    std::vector<std::pair<std::string, Position>> stack;
    std::function<void(const TermPtr&, Position)> walk = [&](const TermPtr& t,
                                                             Position q) {
        kind_at[q] = t->kind;
        switch (t->kind) {
        case Kind::Var:
            for (auto it = stack.rbegin(); it != stack.rend(); ++it)
                if (it->first == t->name) {
                    binder_of[q] = it->second;
                    break;
                }
            return;
        case Kind::App:
            walk(t->left, q + "0");
            walk(t->right, q + "1");
            return;
        case Kind::Abs:
            stack.emplace_back(t->name, q);
            walk(t->left, q + "00");
            stack.pop_back();
            return;
        default:
            return;
        }
    };
    walk(truncated, Position{});

    auto is_abs = [&](const Position& p) {
        auto it = kind_at.find(p);
        return it != kind_at.end() && it->second == Kind::Abs;
    };
    for (auto& p : chain.binders)
        if (!is_abs(p)) return false;
    for (size_t i = 0; i < chain.occurrences.size(); ++i) {
        const Position& q = chain.occurrences[i];
        auto it = kind_at.find(q);
        if (it == kind_at.end() || it->second != Kind::Var) return false;
        auto bo = binder_of.find(q);
        if (bo == binder_of.end()) return false;
        // Binding link: binders[i] binds q.
        if (bo->second != chain.binders[i]) return false;
        // Capturing link: binders[i+1] sits strictly between q's binder and q.
        const Position& cap = chain.binders[i + 1];
        if (!pos_lt(bo->second, cap) || !pos_lt(cap, q)) return false;
    }
    return true;
}

namespace {

// Re-run the witness path of `g` with position annotations (reg+ steps
// lift to annotated steps label for label).
std::vector<PrefixedState> annotate_witness_path(InfiniteTermHandle& h,
                                                 const TransitionGraph& g,
                                                 int target) {
    std::vector<int> ids = g.path_from_root(target);
    PrefixedState cur;
    cur.body = h.root();
    cur.prefix_pos.emplace();
    cur.body_pos = Position{};
    std::vector<PrefixedState> out{cur};
    for (size_t k = 1; k < ids.size(); ++k) {
        const Edge& e = g.parent_edge[static_cast<size_t>(ids[k])];
        bool advanced = false;
        for (auto& st : decompose_step(cur, Strategy::RegPlus, &h)) {
            if (st.label != e.label) continue;
            cur = st.target;
            out.push_back(cur);
            advanced = true;
            break;
        }
        if (!advanced)
            throw std::logic_error("annotate_witness_path: path does not replay");
    }
    return out;
}

InfiniteChainWitness build_witness(InfiniteTermHandle& h, const TransitionGraph& g) {
    if (!g.witness) throw std::logic_error("build_witness: no pump witness");
    InfiniteChainWitness w;
    w.path = annotate_witness_path(h, g, g.witness->v);
    std::vector<int> ids = g.path_from_root(g.witness->v);
    auto it = std::find(ids.begin(), ids.end(), g.witness->u);
    w.u_index = static_cast<size_t>(it - ids.begin());
    w.cycle_labels = g.witness->cycle_labels;
    w.chain = chain_of_annotated_path(h, w.path);
    return w;
}

} // namespace

MaxChainResult max_chain_length(InfiniteTermHandle& h, const ExploreBudget& budget) {
    TransitionGraph g = explore(h, Strategy::RegPlus, budget);
    MaxChainResult res;
    res.verdict = g.verdict;
    switch (g.verdict) {
    case Verdict::Finite: {
        size_t n = g.max_prefix_len();
        res.max_length = n <= 1 ? 0 : static_cast<long>(n) - 1;
        return res;
    }
    case Verdict::Infinite:
        res.witness = build_witness(h, g);
        return res;
    default:
        return res;
    }
}

InfiniteChainResult has_infinite_chain(InfiniteTermHandle& h,
                                       const ExploreBudget& budget) {
    InfiniteChainResult res;
    if (is_regular(h, budget).verdict != Verdict::Finite) {
        // Definitive answers require an established regular term.
        res.verdict = Verdict::BudgetExhausted;
        return res;
    }
    TransitionGraph g = explore(h, Strategy::RegPlus, budget);
    switch (g.verdict) {
    case Verdict::Finite:
        res.verdict = Verdict::Finite; // only finite chains
        return res;
    case Verdict::Infinite:
        res.verdict = Verdict::Infinite;
        res.witness = build_witness(h, g);
        return res;
    default:
        res.verdict = Verdict::BudgetExhausted;
        return res;
    }
}

} // namespace cyclam
