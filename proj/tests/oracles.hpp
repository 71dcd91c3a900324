#pragma once

// Independent test oracles. These deliberately avoid the library's analysis
// paths: guardedness is decided by running the unfolding relation itself,
// and chain lengths by scanning truncated trees link by link.

#include "cyclam/state.hpp"
#include "cyclam/term.hpp"
#include "cyclam/unfold.hpp"

#include <functional>
#include <map>
#include <set>
#include <unordered_set>
#include <vector>

namespace cyclam::testoracle {

// Guardedness by unfolding: repeatedly contract the root redex of every
// reachable subterm. If a position keeps exposing Mu heads for more than
// (#mu-nodes + 1) consecutive steps, two of the heads descend from the same
// binder and the loop never emits a constructor.
inline bool guarded_by_unfolding(const TermPtr& term) {
    size_t bound = mu_count(term) + 1;
    // Contractions are cached per redex so that revisiting the same redex
    // yields the same nodes and the visited set can close the loop.
    std::map<TermPtr, TermPtr> contract;
    auto pull = [&](const TermPtr& t) {
        auto it = contract.find(t);
        if (it != contract.end()) return it->second;
        TermPtr c = subst_closed(t->left, {{t->name, t}});
        contract.emplace(t, c);
        return c;
    };
    std::unordered_set<const Term*> visited;
    std::vector<TermPtr> keep; // pins visited keys for the whole run
    std::function<bool(TermPtr)> visit = [&](TermPtr t) -> bool {
        keep.push_back(t);
        size_t stall = 0;
        while (t->kind == Kind::Mu) {
            if (++stall > bound) return false;
            t = pull(t);
            keep.push_back(t);
        }
        if (!visited.insert(t.get()).second) return true;
        switch (t->kind) {
        case Kind::Var:
            return true;
        case Kind::App:
            return visit(t->left) && visit(t->right);
        case Kind::Abs:
            return visit(t->left);
        default:
            return true;
        }
    };
    return visit(term);
}

// Binding and capturing relations read off a truncated tree: the binder of
// a variable occurrence is its nearest enclosing Abs of the same name; every
// Abs strictly between them captures the occurrence.
struct Relations {
    std::set<std::pair<Position, Position>> binds;   // (binder, occurrence)
    std::set<std::pair<Position, Position>> capture; // (occurrence, binder)
};

inline Relations scan_relations(const TermPtr& truncated) {
    Relations rel;
    std::vector<std::pair<std::string, Position>> stack; // binder name @ pos
    std::function<void(const TermPtr&, Position)> rec = [&](const TermPtr& t,
                                                            Position q) {
        switch (t->kind) {
        case Kind::Var: {
            for (auto it = stack.rbegin(); it != stack.rend(); ++it) {
                if (it->first != t->name) continue;
                rel.binds.insert({it->second, q});
                for (auto jt = stack.rbegin(); jt != it; ++jt)
                    rel.capture.insert({q, jt->second});
                return;
            }
            return; // free in the truncation: binder beyond the cut
        }
        case Kind::App:
            rec(t->left, q + "0");
            rec(t->right, q + "1");
            return;
        case Kind::Abs:
            stack.emplace_back(t->name, q);
            rec(t->left, q + "00");
            stack.pop_back();
            return;
        default:
            return;
        }
    };
    rec(truncated, Position{});
    return rel;
}

// Longest binding-capturing chain found inside the truncation: maximum
// number of capture links along p1 <- q2 -> p2 <- q3 -> ... (0 when the tree
// has a binder at all, no chain otherwise).
inline long max_chain_by_scan(const TermPtr& truncated) {
    Relations rel = scan_relations(truncated);
    std::set<Position> binders;
    std::function<void(const TermPtr&, Position)> abses = [&](const TermPtr& t,
                                                              Position q) {
        if (t->kind == Kind::Abs) {
            binders.insert(q);
            abses(t->left, q + "00");
        } else if (t->kind == Kind::App) {
            abses(t->left, q + "0");
            abses(t->right, q + "1");
        }
    };
    abses(truncated, Position{});
    if (binders.empty()) return 0;

    // Edges p -> p' when p binds some q captured by p'. Chains only ever
    // descend (p < p'), so the graph is acyclic and longest paths are finite.
    std::map<Position, std::vector<Position>> succ;
    for (auto& [p, q] : rel.binds)
        for (auto& [q2, p2] : rel.capture)
            if (q == q2) succ[p].push_back(p2);
    std::map<Position, long> memo;
    std::function<long(const Position&)> longest = [&](const Position& p) -> long {
        auto it = memo.find(p);
        if (it != memo.end()) return it->second;
        long best = 0;
        auto st = succ.find(p);
        if (st != succ.end())
            for (auto& nxt : st->second)
                best = std::max(best, 1 + longest(nxt));
        memo[p] = best;
        return best;
    };
    long best = 0;
    for (auto& p : binders) best = std::max(best, longest(p));
    return best;
}

} // namespace cyclam::testoracle
