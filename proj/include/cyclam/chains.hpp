#pragma once

// Binding and capturing relations on tree positions, binding-capturing
// chains, and the chain-based characterization of strong regularity.
//
// A binder at p binds the variable occurrences in its scope; an occurrence
// at q is captured by every binder strictly between its own binder and q.
// Chains alternate binding and capturing links
//   p1 <- q2 -> p2 <- q3 -> p3 ...
// and their length is the number of capturing links. A regular term is
// strongly regular exactly when all its chains are finite, and the maximal
// chain length equals the maximal reg+ prefix length minus one.

#include "cyclam/decompose.hpp"
#include "cyclam/handle.hpp"
#include "cyclam/state.hpp"

#include <optional>
#include <set>
#include <vector>

namespace cyclam {

struct Chain {
    std::vector<Position> binders;     // p1 ... pn
    std::vector<Position> occurrences; // q2 ... qn, one per capturing link
    size_t length() const { return occurrences.size(); }
};

struct ChainRelations {
    std::set<std::pair<Position, Position>> binds;   // (binder, occurrence)
    std::set<std::pair<Position, Position>> capture; // (occurrence, binder)
};

// All pairs with both positions of length <= depth.
ChainRelations binding_capturing_relations(InfiniteTermHandle& h, size_t depth,
                                           size_t max_states = 200000);

// Per-link validation of a chain against a truncated tree (the truncation
// must be deep enough to contain every position of the chain).
bool validate_chain(const Chain& chain, const TermPtr& truncated);

// Loop descriptor witnessing an infinite chain: the annotated states of the
// pumpable segment plus the chain certified by the segment's end state.
struct InfiniteChainWitness {
    std::vector<PrefixedState> path; // annotated, root .. u .. v
    size_t u_index = 0;              // position of u on the path
    std::vector<std::pair<RuleLabel, int>> cycle_labels;
    Chain chain;
};

struct MaxChainResult {
    Verdict verdict; // Finite / Infinite / BudgetExhausted(unknown)
    long max_length = 0;
    std::optional<InfiniteChainWitness> witness;
};

// Maximal chain length, computed as (maximal prefix length over the reg+
// generated subterms) - 1, clamped at 0.
MaxChainResult max_chain_length(InfiniteTermHandle& h,
                                const ExploreBudget& budget = {});

struct InfiniteChainResult {
    Verdict verdict; // Infinite = yes, Finite = no, BudgetExhausted = unknown
    std::optional<InfiniteChainWitness> witness;
};

// Yes iff the (regular) term is not strongly regular. Unknown unless
// regularity is established within budget.
InfiniteChainResult has_infinite_chain(InfiniteTermHandle& h,
                                       const ExploreBudget& budget = {});

// The chain certified by an annotated state with prefix positions p1...pn:
// p1 <- q2 -> p2 <- ... -> pn, with occurrence positions recovered by
// walking from each binder's lambda step to a bound variable occurrence.
// `path` is the annotated exploration path from the root to the state.
Chain chain_of_annotated_path(InfiniteTermHandle& h,
                              const std::vector<PrefixedState>& path);

} // namespace cyclam
