#pragma once

// Lazy view of the infinite lambda-tree denoted by a guarded lambda-mu term
// or by a regular equation system. The tree is only ever observed through
// head expansion and depth-bounded truncation; Mu and Call nodes are
// resolved internally and never escape.
//
// Handles memoize expansion (per-node closures). The caches are not
// synchronized: share a handle across threads only behind external
// synchronization, or confine it to one thread.

#include "cyclam/system.hpp"
#include "cyclam/term.hpp"

#include <memory>
#include <unordered_map>

namespace cyclam {

struct UnproductiveError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

class InfiniteTermHandle {
public:
    static std::shared_ptr<InfiniteTermHandle> of_term(TermPtr closed_mu_term);
    static std::shared_ptr<InfiniteTermHandle> of_system(SystemPtr system);

    const TermPtr& root() const { return root_; }
    const RegularSystem* system() const { return system_.get(); }
    const SystemPtr& system_ptr() const { return system_; }
    const TermPtr& source_term() const { return source_term_; }
    bool from_system() const { return system_ != nullptr; }

    // Rewrites Mu/Call roots until the head is Var, App or Abs. Guard bound:
    // more than (#equations + 1) resp. (#mu nodes + 1) expansions without
    // emitting a constructor raise UnproductiveError. Results are memoized.
    TermPtr head(const TermPtr& t);

    // This handle's view of mu-unfolding: body with the binder replaced by
    // the Mu node itself (memoized so repeated descriptors stay shared).
    TermPtr mu_close(const TermPtr& mu_node);

    // Finite tree agreeing with the infinite term on all nodes of depth
    // < depth; Cut leaves exactly at `depth` (depth counted in constructors).
    TermPtr truncate(size_t depth);
    TermPtr truncate(const TermPtr& at, size_t depth);

    std::string pretty_source() const;

private:
    InfiniteTermHandle() = default;
    TermPtr root_;
    TermPtr source_term_; // null for system handles
    SystemPtr system_;    // null for term handles
    size_t guard_bound_ = 1;
    // Keys share ownership: a memo keyed on a freed node would alias
    // unrelated allocations.
    std::unordered_map<TermPtr, TermPtr> head_memo_;
    std::unordered_map<TermPtr, TermPtr> close_memo_;
};

using HandlePtr = std::shared_ptr<InfiniteTermHandle>;

// Depth-bounded alpha-comparison of two infinite terms without
// materializing the trees (memoized on node pairs).
bool agree_to_depth(InfiniteTermHandle& a, InfiniteTermHandle& b, size_t depth);

} // namespace cyclam
