#include "cyclam/decompose.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <stdexcept>
#include <unordered_map>

namespace cyclam {

const char* label_name(RuleLabel l) {
    switch (l) {
    case RuleLabel::AppLeft: return "@0";
    case RuleLabel::AppRight: return "@1";
    case RuleLabel::Lam: return "lam";
    case RuleLabel::S: return "S";
    case RuleLabel::Del: return "del";
    }
    return "?";
}

PrefixedState compress(const PrefixedState& s) {
    PrefixedState out;
    out.body = s.body;
    if (s.annotated()) {
        out.prefix_pos.emplace();
        out.body_pos = s.body_pos;
    }
    for (size_t i = 0; i < s.prefix.size(); ++i) {
        if (occurs_free(s.body, s.prefix[i])) {
            out.prefix.push_back(s.prefix[i]);
            if (s.annotated()) out.prefix_pos->push_back((*s.prefix_pos)[i]);
        }
    }
    return out;
}

namespace {

PrefixedState remove_entry(const PrefixedState& s, size_t i) {
    PrefixedState out = s;
    out.prefix.erase(out.prefix.begin() + static_cast<long>(i));
    if (out.prefix_pos)
        out.prefix_pos->erase(out.prefix_pos->begin() + static_cast<long>(i));
    return out;
}

} // namespace

std::vector<Step> decompose_step(const PrefixedState& s, Strategy strategy,
                                 InfiniteTermHandle* h) {
    if (s.annotated() && strategy != Strategy::RegPlus)
        throw std::logic_error("annotated states decompose under reg+ only");

    std::vector<Step> out;

    // Removal steps preempt everything else (eagerness).
    if (strategy == Strategy::Reg) {
        std::vector<size_t> vac;
        for (size_t i = 0; i < s.prefix.size(); ++i)
            if (vacuous_in(s, s.prefix[i])) vac.push_back(i);
        if (!vac.empty()) {
            for (size_t i : vac)
                out.push_back({RuleLabel::Del, static_cast<int>(i), remove_entry(s, i)});
            return out;
        }
    } else {
        if (!s.prefix.empty() && vacuous_in(s, s.prefix.back())) {
            out.push_back({RuleLabel::S, -1, remove_entry(s, s.prefix.size() - 1)});
            return out;
        }
    }

    TermPtr head = s.body;
    if (head->kind == Kind::Mu || head->kind == Kind::Call) {
        if (!h)
            throw std::logic_error("decompose_step: Call/Mu body needs a handle");
        head = h->head(head);
    }

    switch (head->kind) {
    case Kind::Var:
        // With no removal step available this is a normal form:
        // (x1...xn) xn under reg+, (x) x under reg.
        return out;
    case Kind::App: {
        PrefixedState l = s, r = s;
        l.body = head->left;
        r.body = head->right;
        if (s.annotated()) {
            *l.body_pos += '0';
            *r.body_pos += '1';
        }
        out.push_back({RuleLabel::AppLeft, -1, std::move(l)});
        out.push_back({RuleLabel::AppRight, -1, std::move(r)});
        return out;
    }
    case Kind::Abs: {
        PrefixedState t = s;
        std::string binder = fresh_name(head->name, s.prefix);
        TermPtr body = head->left;
        if (binder != head->name)
            body = rename_free(body, {{head->name, binder}});
        t.prefix.push_back(binder);
        t.body = body;
        if (s.annotated()) {
            t.prefix_pos->push_back(*s.body_pos);
            *t.body_pos += "00";
        }
        out.push_back({RuleLabel::Lam, -1, std::move(t)});
        return out;
    }
    default:
        throw std::logic_error("decompose_step: unexpected head kind");
    }
}

std::vector<int> TransitionGraph::path_from_root(int state) const {
    std::vector<int> path;
    for (int cur = state; cur != -1; cur = parent[static_cast<size_t>(cur)])
        path.push_back(cur);
    std::reverse(path.begin(), path.end());
    return path;
}

size_t TransitionGraph::max_prefix_len() const {
    size_t m = 0;
    for (auto& s : states) m = std::max(m, s.prefix.size());
    return m;
}

namespace {

// Does replaying the pump segment's labels from `v` reach a state with the
// same compressed form and a strictly longer prefix, touching none of v's
// own prefix entries? Validates the witness before the Infinite verdict.
bool pump_replays(const PrefixedState& v,
                  const std::vector<std::pair<RuleLabel, int>>& labels,
                  Strategy strategy, InfiniteTermHandle* h) {
    auto reached = replay_labels(v, labels, strategy, h);
    if (!reached || reached->empty()) return false;
    const PrefixedState& w = reached->back();
    if (w.prefix.size() <= v.prefix.size()) return false;
    if (!alpha_eq(compress(w), compress(v))) return false;
    // None of v's entries may have been removed along the replay.
    size_t alive = v.prefix.size();
    const PrefixedState* prev = &v;
    for (auto& st : *reached) {
        if (st.prefix.size() < prev->prefix.size()) {
            size_t slot = 0;
            while (slot < st.prefix.size() && st.prefix[slot] == prev->prefix[slot])
                ++slot;
            if (slot < alive) return false;
        }
        prev = &st;
    }
    return true;
}

// True iff no step on path[i..] removes an entry present in the prefix of
// path[i]'s state. `removed` gives, per step along the path, the removed
// slot (or -1).
bool keeps_prefix(const std::vector<size_t>& prefix_sizes,
                  const std::vector<int>& removed, size_t from) {
    // Entries of the state at `from` occupy slots 0..n-1; later appends go
    // behind them, removals shift. Track how many of the original entries
    // remain as the lowest `alive` slots.
    size_t alive = prefix_sizes[from];
    for (size_t k = from; k < removed.size(); ++k) {
        int slot = removed[k];
        if (slot < 0) continue;
        if (static_cast<size_t>(slot) < alive) return false;
    }
    return true;
}

} // namespace

TransitionGraph explore(InfiniteTermHandle& h, Strategy strategy,
                        const ExploreBudget& budget, bool detect_pump) {
    TransitionGraph g;
    g.strategy = strategy;

    PrefixedState root;
    root.body = h.root();

    std::unordered_map<std::string, int> index;
    auto intern = [&](const PrefixedState& s) -> std::pair<int, bool> {
        std::string key = state_key(s);
        auto it = index.find(key);
        if (it != index.end()) return {it->second, false};
        int id = static_cast<int>(g.states.size());
        index.emplace(std::move(key), id);
        g.states.push_back(s);
        g.edges.emplace_back();
        g.parent.push_back(-1);
        g.parent_edge.push_back({RuleLabel::Lam, -1, -1});
        return {id, true};
    };

    intern(root);
    std::deque<int> queue{0};
    bool exhausted = false;

    while (!queue.empty()) {
        int id = queue.front();
        queue.pop_front();
        // states[id] may be invalidated by push_back; copy.
        PrefixedState state = g.states[static_cast<size_t>(id)];
        std::vector<Step> steps = decompose_step(state, strategy, &h);
        for (auto& st : steps) {
            if (st.target.prefix.size() > budget.max_prefix) {
                exhausted = true;
                continue;
            }
            auto [tid, fresh] = intern(st.target);
            g.edges[static_cast<size_t>(id)].push_back({st.label, st.del_slot, tid});
            if (!fresh) continue;
            g.parent[static_cast<size_t>(tid)] = id;
            g.parent_edge[static_cast<size_t>(tid)] = {st.label, st.del_slot, tid};

            if (detect_pump) {
                // Look for an ancestor u with a smaller prefix, the same
                // compressed form, and no removal of u's entries in between.
                std::vector<int> path = g.path_from_root(tid);
                std::vector<size_t> sizes;
                std::vector<int> removed; // removal slot of step path[k] -> path[k+1]
                for (size_t k = 0; k < path.size(); ++k) {
                    sizes.push_back(
                        g.states[static_cast<size_t>(path[k])].prefix.size());
                    if (k + 1 < path.size()) {
                        const Edge& e = g.parent_edge[static_cast<size_t>(path[k + 1])];
                        removed.push_back(
                            e.label == RuleLabel::S
                                ? static_cast<int>(sizes.back()) - 1
                                : e.label == RuleLabel::Del ? e.del_slot : -1);
                    }
                }
                const PrefixedState& vstate = g.states[static_cast<size_t>(tid)];
                PrefixedState vcomp = compress(vstate);
                for (size_t k = 0; k + 1 < path.size(); ++k) {
                    const PrefixedState& ustate =
                        g.states[static_cast<size_t>(path[k])];
                    if (ustate.prefix.size() >= vstate.prefix.size()) continue;
                    if (!keeps_prefix(sizes, removed, k)) continue;
                    if (!alpha_eq(compress(ustate), vcomp)) continue;
                    std::vector<std::pair<RuleLabel, int>> labels;
                    for (size_t j = k; j + 1 < path.size(); ++j) {
                        const Edge& e = g.parent_edge[static_cast<size_t>(path[j + 1])];
                        labels.emplace_back(e.label, e.del_slot);
                    }
                    if (!pump_replays(vstate, labels, strategy, &h)) continue;
                    g.verdict = Verdict::Infinite;
                    g.witness = PumpWitness{path[k], tid, labels};
                    return g;
                }
            }

            if (g.states.size() > budget.max_states) {
                exhausted = true;
                queue.clear();
                break;
            }
            queue.push_back(tid);
        }
        if (exhausted && queue.empty()) break;
    }

    g.verdict = exhausted ? Verdict::BudgetExhausted : Verdict::Finite;
    return g;
}

TransitionGraph explore_annotated(InfiniteTermHandle& h,
                                  const ExploreBudget& budget) {
    TransitionGraph g;
    g.strategy = Strategy::RegPlus;
    g.annotated = true;

    PrefixedState root;
    root.body = h.root();
    root.prefix_pos.emplace();
    root.body_pos = Position{};

    g.states.push_back(root);
    g.edges.emplace_back();
    g.parent.push_back(-1);
    g.parent_edge.push_back({RuleLabel::Lam, -1, -1});

    std::deque<int> queue{0};
    bool exhausted = false;
    while (!queue.empty()) {
        int id = queue.front();
        queue.pop_front();
        PrefixedState state = g.states[static_cast<size_t>(id)];
        if (state.body_pos->size() >= budget.max_depth) {
            exhausted = true;
            continue;
        }
        for (auto& st : decompose_step(state, Strategy::RegPlus, &h)) {
            if (g.states.size() >= budget.max_states) {
                exhausted = true;
                break;
            }
            int tid = static_cast<int>(g.states.size());
            g.states.push_back(st.target);
            g.edges.emplace_back();
            g.parent.push_back(id);
            g.parent_edge.push_back({st.label, st.del_slot, tid});
            g.edges[static_cast<size_t>(id)].push_back({st.label, st.del_slot, tid});
            queue.push_back(tid);
        }
        if (exhausted) break;
    }
    g.verdict = exhausted ? Verdict::BudgetExhausted : Verdict::Finite;
    return g;
}

RegularityResult is_regular(InfiniteTermHandle& h, const ExploreBudget& budget,
                            bool detect_pump) {
    auto g = std::make_shared<TransitionGraph>(
        explore(h, Strategy::Reg, budget, detect_pump));
    return {g->verdict, g->states.size(), g};
}

RegularityResult is_strongly_regular(InfiniteTermHandle& h,
                                     const ExploreBudget& budget,
                                     bool detect_pump) {
    auto g = std::make_shared<TransitionGraph>(
        explore(h, Strategy::RegPlus, budget, detect_pump));
    return {g->verdict, g->states.size(), g};
}

bool validate_sequence(const RewriteSequence& seq, Strategy strategy,
                       InfiniteTermHandle* h) {
    const PrefixedState* cur = &seq.start;
    for (auto& st : seq.steps) {
        bool ok = false;
        for (auto& cand : decompose_step(*cur, strategy, h)) {
            if (cand.label == st.label && cand.del_slot == st.del_slot &&
                alpha_eq(cand.target, st.target)) {
                ok = true;
                break;
            }
        }
        if (!ok) return false;
        cur = &st.target;
    }
    return true;
}

RewriteSequence project_sequence(const RewriteSequence& seq, InfiniteTermHandle* h) {
    if (!alpha_eq(compress(seq.start), seq.start) ||
        !validate_sequence(seq, Strategy::RegPlus, h))
        throw std::invalid_argument("not a valid reg+ sequence");

    RewriteSequence out;
    out.start = seq.start;
    PrefixedState cur = seq.start; // invariant: compressed
    for (auto& st : seq.steps) {
        if (st.label == RuleLabel::S) {
            // The removed entry was vacuous, hence already absent here.
            continue;
        }
        // cur is compressed, so the strategy permits the same @/lam step.
        bool advanced = false;
        for (auto& cand : decompose_step(cur, Strategy::Reg, h)) {
            if (cand.label != st.label) continue;
            out.steps.push_back(cand);
            cur = cand.target;
            advanced = true;
            break;
        }
        if (!advanced)
            throw std::invalid_argument("not a valid reg+ sequence");
        // Restore the del-normal form, recording each del step.
        for (;;) {
            auto steps = decompose_step(cur, Strategy::Reg, h);
            if (steps.empty() || steps.front().label != RuleLabel::Del) break;
            out.steps.push_back(steps.front());
            cur = steps.front().target;
        }
    }
    return out;
}

bool del_reduct_of(const PrefixedState& sup, const PrefixedState& sub) {
    // sub arises from sup by deleting vacuous entries: choose an increasing
    // embedding of sub's prefix into sup's; remaining entries must be
    // vacuous, and bodies must agree under the induced renaming. Prefix
    // entries of sup are matched to sub entries left to right (names are
    // matched structurally through the state key after renaming).
    if (sub.prefix.size() > sup.prefix.size()) return false;
    // Greedy matching on usedness: the embedding is forced, because exactly
    // the non-vacuous entries of sup survive in any del-reduct that is
    // compressed -- but sub need not be compressed. Try all embeddings
    // (sequences are short) via backtracking.
    std::function<bool(size_t, size_t, std::vector<int>&)> go =
        [&](size_t i, size_t j, std::vector<int>& map_) -> bool {
        if (j == sub.prefix.size()) {
            for (size_t k = i; k < sup.prefix.size(); ++k)
                if (occurs_free(sup.body, sup.prefix[k])) return false;
            // Build renamed copy of sup restricted to mapped entries.
            PrefixedState renamed;
            renamed.body = sup.body;
            std::unordered_map<std::string, std::string> ren;
            for (size_t k = 0; k < map_.size(); ++k) {
                const std::string& from = sup.prefix[static_cast<size_t>(map_[k])];
                const std::string& to = sub.prefix[k];
                if (from != to) ren[from] = to;
            }
            // Renaming must not collide with sub names already present.
            PrefixedState probe;
            probe.prefix = sub.prefix;
            probe.body = ren.empty() ? sup.body : rename_free(sup.body, ren);
            for (auto& n : probe.body->free_names())
                if (std::find(probe.prefix.begin(), probe.prefix.end(), n) ==
                    probe.prefix.end())
                    return false;
            return alpha_eq(probe, sub);
        }
        if (i == sup.prefix.size()) return false;
        // Option 1: sup[i] maps to sub[j].
        map_.push_back(static_cast<int>(i));
        if (go(i + 1, j + 1, map_)) return true;
        map_.pop_back();
        // Option 2: sup[i] is deleted (must be vacuous).
        if (!occurs_free(sup.body, sup.prefix[i]) && go(i + 1, j, map_))
            return true;
        return false;
    };
    std::vector<int> map_;
    return go(0, 0, map_);
}

LiftResult lift_sequence(const RewriteSequence& seq, InfiniteTermHandle* h) {
    if (!validate_sequence(seq, Strategy::Reg, h))
        throw std::invalid_argument("not a valid reg sequence");

    LiftResult res;
    res.lifted.start = seq.start;
    res.correspondence.push_back(0);
    PrefixedState cur = seq.start;

    auto take = [&](RuleLabel want) -> bool {
        for (auto& cand : decompose_step(cur, Strategy::RegPlus, h)) {
            if (cand.label != want) continue;
            res.lifted.steps.push_back(cand);
            cur = cand.target;
            return true;
        }
        return false;
    };

    for (auto& st : seq.steps) {
        if (st.label == RuleLabel::Del) {
            // Stutter: the lifted state keeps the (vacuous) entry.
            res.correspondence.push_back(res.lifted.steps.size());
            continue;
        }
        // Strip the vacuous tail; the stripped entries cannot occur in the
        // reg state (its step is @/lam, so it has no vacuous entries at all).
        while (!cur.prefix.empty() && vacuous_in(cur, cur.prefix.back())) {
            if (!take(RuleLabel::S))
                throw std::logic_error("lift_sequence: S step vanished");
        }
        if (!take(st.label))
            throw std::logic_error("lift_sequence: step does not lift");
        res.correspondence.push_back(res.lifted.steps.size());
    }
    return res;
}

std::optional<std::vector<PrefixedState>> replay_labels(
    const PrefixedState& from, const std::vector<std::pair<RuleLabel, int>>& labels,
    Strategy strategy, InfiniteTermHandle* h) {
    std::vector<PrefixedState> acc;
    std::function<bool(const PrefixedState&, size_t)> go =
        [&](const PrefixedState& cur, size_t k) -> bool {
        if (k == labels.size()) return true;
        for (auto& cand : decompose_step(cur, strategy, h)) {
            if (cand.label != labels[k].first) continue;
            // Del slots need not match across replays (prefixes shift);
            // branch over all Del successors, other labels are unique.
            acc.push_back(cand.target);
            if (go(cand.target, k + 1)) return true;
            acc.pop_back();
        }
        return false;
    };
    if (!go(from, 0)) return std::nullopt;
    return acc;
}

} // namespace cyclam
