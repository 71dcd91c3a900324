#pragma once

// Decomposition strategies on prefixed terms and exploration of the
// generated-subterm space.
//
// Rules, on (x1...xn) T:
//   @0 / @1 : T = T0 T1        -> (x1...xn) Ti
//   lam     : T = \y. T0       -> (x1...xn y) T0
//   S       : xn vacuous       -> (x1...x{n-1}) T      (reg+ only)
//   del     : xi vacuous       -> prefix minus xi      (reg only)
// reg is del-eager and reg+ is S-eager: whenever a removal step applies,
// only removal steps are offered.
//
// The position-annotated variant (reg+ only) tracks where prefix bindings
// and the current body sit in the underlying tree:
//   @i sets q := q i, lam appends q to the prefix positions and sets
//   q := q 00, S drops the last prefix position.

#include "cyclam/handle.hpp"
#include "cyclam/state.hpp"

#include <memory>
#include <optional>
#include <vector>

namespace cyclam {

enum class Strategy { Reg, RegPlus };

enum class RuleLabel { AppLeft, AppRight, Lam, S, Del };

const char* label_name(RuleLabel l); // "@0", "@1", "lam", "S", "del"

struct Step {
    RuleLabel label;
    int del_slot; // removed prefix index for Del, -1 otherwise
    PrefixedState target;
};

// The unique del-normal form: all vacuous prefix entries removed, survivor
// order preserved. Annotations of removed entries are dropped alongside.
PrefixedState compress(const PrefixedState& s);

// Exactly the steps the eager strategy permits, in the order
// AppLeft < AppRight < Lam < S < Del (Del by ascending slot). Normal forms
// yield the empty list. `h` resolves Call/Mu heads; it may be null when the
// body is already constructor-rooted.
std::vector<Step> decompose_step(const PrefixedState& s, Strategy strategy,
                                 InfiniteTermHandle* h = nullptr);

struct ExploreBudget {
    size_t max_states = 10000;
    size_t max_prefix = 64;
    size_t max_depth = 256; // annotated exploration: bound on |q|
};

enum class Verdict { Finite, Infinite, BudgetExhausted };

struct Edge {
    RuleLabel label;
    int del_slot;
    int target;
};

// A pumpable segment: a path u ->+ v with compress(u) = compress(v),
// |prefix(v)| > |prefix(u)|, and no step on the path removing an entry of
// prefix(u). Replaying its labels from v grows the prefix again, so the
// state space is infinite.
struct PumpWitness {
    int u = -1, v = -1;
    std::vector<std::pair<RuleLabel, int>> cycle_labels; // (label, del slot)
};

struct TransitionGraph {
    Strategy strategy = Strategy::RegPlus;
    bool annotated = false;
    std::vector<PrefixedState> states; // discovery (BFS) order; 0 = start
    std::vector<std::vector<Edge>> edges;
    std::vector<int> parent;           // BFS-tree parent, -1 for the root
    std::vector<Edge> parent_edge;
    Verdict verdict = Verdict::BudgetExhausted;
    std::optional<PumpWitness> witness;

    std::vector<int> path_from_root(int state) const;
    size_t max_prefix_len() const;
};

// Breadth-first closure from () root. Verdicts: Finite when the closure
// completes, Infinite when a validated pump witness is found (suppressed by
// detect_pump=false), BudgetExhausted otherwise.
TransitionGraph explore(InfiniteTermHandle& h, Strategy strategy,
                        const ExploreBudget& budget = {},
                        bool detect_pump = true);

// reg+ exploration with position annotations; the graph is a tree.
TransitionGraph explore_annotated(InfiniteTermHandle& h,
                                  const ExploreBudget& budget = {});

struct RegularityResult {
    Verdict verdict;     // Finite = yes, Infinite = no, BudgetExhausted = unknown
    size_t state_count;  // meaningful for Finite
    std::shared_ptr<TransitionGraph> graph;
};

RegularityResult is_regular(InfiniteTermHandle& h, const ExploreBudget& budget = {},
                            bool detect_pump = true);
RegularityResult is_strongly_regular(InfiniteTermHandle& h,
                                     const ExploreBudget& budget = {},
                                     bool detect_pump = true);

struct RewriteSequence {
    PrefixedState start;
    std::vector<Step> steps;
};

// Checks that `seq` is a valid rewrite sequence for the strategy.
bool validate_sequence(const RewriteSequence& seq, Strategy strategy,
                       InfiniteTermHandle* h);

// Projection of a reg+ sequence (from a compressed start state) to a reg
// sequence: states compress pointwise; S steps vanish, @/lam steps are
// followed by the del steps that restore the del-normal form.
// Throws std::invalid_argument("not a valid reg+ sequence") on bad input.
RewriteSequence project_sequence(const RewriteSequence& seq, InfiniteTermHandle* h);

// Lift of a reg sequence to a reg+ sequence: del steps become stutters, @/lam
// steps are preceded by the S steps that strip the vacuous prefix tail.
// Returns the lifted sequence plus, for every input state index, the index
// into the lifted sequence of its corresponding state (which deletes down to
// the input state).
struct LiftResult {
    RewriteSequence lifted;
    std::vector<size_t> correspondence;
};
LiftResult lift_sequence(const RewriteSequence& seq, InfiniteTermHandle* h);

// State `sub` obtainable from `sup` by deleting vacuous prefix entries.
bool del_reduct_of(const PrefixedState& sup, const PrefixedState& sub);

// Replays labels from `from`, resolving Del ambiguity by depth-first search;
// returns the reached states (one per step) or nullopt if no resolution
// applies.
std::optional<std::vector<PrefixedState>> replay_labels(
    const PrefixedState& from, const std::vector<std::pair<RuleLabel, int>>& labels,
    Strategy strategy, InfiniteTermHandle* h);

} // namespace cyclam
