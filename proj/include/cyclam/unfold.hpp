#pragma once

#include "cyclam/handle.hpp"
#include "cyclam/term.hpp"

namespace cyclam {

struct UnguardedMuError : std::runtime_error {
    UnguardedMuError() : std::runtime_error("unguarded mu") {}
};

// One parallel unfolding step: every outermost Mu node mu f. B is replaced
// by B[f := mu f. B]. A term without Mu nodes is returned unchanged.
TermPtr unfold_step(const TermPtr& term);

// True iff no mu-binder reaches its own bound variable through mu-binders
// only, i.e. every use is separated from its binding by an App or Abs.
// Exactly the terms for which unfolding is productive at every position.
bool is_mu_guarded(const TermPtr& term);

// Truncation at `depth` of the unique infinite unfolding.
// Throws UnguardedMuError when the precondition fails.
TermPtr unfold_to_depth(const TermPtr& term, size_t depth);

HandlePtr handle_of(const TermPtr& mu_term);   // throws UnguardedMuError
HandlePtr handle_of(const SystemPtr& system);

} // namespace cyclam
