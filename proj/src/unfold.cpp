#include "cyclam/unfold.hpp"

#include <functional>
#include <unordered_set>

namespace cyclam {

TermPtr unfold_step(const TermPtr& term) {
    switch (term->kind) {
    case Kind::Mu:
        // Outermost redex: contract and stop descending.
        return subst_closed(term->left, {{term->name, term}});
    case Kind::App:
        return mk_app(unfold_step(term->left), unfold_step(term->right));
    case Kind::Abs:
        return mk_abs(term->name, unfold_step(term->left));
    default:
        return term;
    }
}

bool is_mu_guarded(const TermPtr& term) {
    // A mu-chain mu x0...mu xn. v with v bound by one of the chain binders
    // never emits a constructor; anything else does. Checking every Mu node
    // of the finite term covers all decomposition-reachable instances,
    // because unfolding only substitutes closed copies of these same nodes.
    std::function<bool(const TermPtr&)> ok = [&](const TermPtr& t) -> bool {
        switch (t->kind) {
        case Kind::Mu: {
            std::vector<std::string> chain;
            TermPtr cur = t;
            while (cur->kind == Kind::Mu) {
                chain.push_back(cur->name);
                cur = cur->left;
            }
            if (cur->kind == Kind::Var) {
                for (auto it = chain.rbegin(); it != chain.rend(); ++it)
                    if (*it == cur->name) return false;
                return true;
            }
            return ok(cur);
        }
        case Kind::App:
            return ok(t->left) && ok(t->right);
        case Kind::Abs:
            return ok(t->left);
        default:
            return true;
        }
    };
    return ok(term);
}

TermPtr unfold_to_depth(const TermPtr& term, size_t depth) {
    return handle_of(term)->truncate(depth);
}

HandlePtr handle_of(const TermPtr& mu_term) {
    if (!is_mu_guarded(mu_term)) throw UnguardedMuError();
    return InfiniteTermHandle::of_term(mu_term);
}

HandlePtr handle_of(const SystemPtr& system) {
    return InfiniteTermHandle::of_system(system);
}

} // namespace cyclam
