#include "cyclam/handle.hpp"

#include "cyclam/unfold.hpp"

#include <functional>

namespace cyclam {

std::shared_ptr<InfiniteTermHandle> InfiniteTermHandle::of_term(TermPtr t) {
    auto h = std::shared_ptr<InfiniteTermHandle>(new InfiniteTermHandle());
    h->root_ = t;
    h->source_term_ = t;
    h->guard_bound_ = mu_count(t) + 1;
    return h;
}

std::shared_ptr<InfiniteTermHandle> InfiniteTermHandle::of_system(SystemPtr sys) {
    auto h = std::shared_ptr<InfiniteTermHandle>(new InfiniteTermHandle());
    h->root_ = sys->start;
    h->system_ = std::move(sys);
    h->guard_bound_ = h->system_->equations.size() + 1;
    return h;
}

TermPtr InfiniteTermHandle::mu_close(const TermPtr& mu_node) {
    auto it = close_memo_.find(mu_node);
    if (it != close_memo_.end()) return it->second;
    TermPtr body = subst_closed(mu_node->left, {{mu_node->name, mu_node}});
    close_memo_.emplace(mu_node, body);
    return body;
}

TermPtr InfiniteTermHandle::head(const TermPtr& t) {
    if (t->kind == Kind::Var || t->kind == Kind::App || t->kind == Kind::Abs)
        return t;
    auto it = head_memo_.find(t);
    if (it != head_memo_.end()) return it->second;
    TermPtr cur = t;
    size_t steps = 0;
    while (cur->kind == Kind::Mu || cur->kind == Kind::Call) {
        if (++steps > guard_bound_)
            throw UnproductiveError("unproductive source");
        if (cur->kind == Kind::Mu) {
            cur = mu_close(cur);
        } else {
            if (!system_)
                throw std::logic_error("call node in a system-free handle");
            cur = system_->instantiate(cur);
        }
    }
    if (cur->kind == Kind::Const || cur->kind == Kind::Cut)
        throw std::logic_error("head: marker node in infinite term");
    head_memo_.emplace(t, cur);
    return cur;
}

TermPtr InfiniteTermHandle::truncate(const TermPtr& at, size_t depth) {
    if (depth == 0) return mk_cut();
    TermPtr h = head(at);
    switch (h->kind) {
    case Kind::Var:
        return h;
    case Kind::App:
        return mk_app(truncate(h->left, depth - 1), truncate(h->right, depth - 1));
    case Kind::Abs:
        return mk_abs(h->name, truncate(h->left, depth - 1));
    default:
        throw std::logic_error("truncate: unexpected head");
    }
}

TermPtr InfiniteTermHandle::truncate(size_t depth) { return truncate(root_, depth); }

std::string InfiniteTermHandle::pretty_source() const {
    return system_ ? system_->pretty() : pretty(source_term_);
}

namespace {

struct PairKey {
    const Term* a;
    const Term* b;
    size_t depth;
    std::string scope_sig;
    bool operator==(const PairKey& o) const {
        return a == o.a && b == o.b && depth == o.depth && scope_sig == o.scope_sig;
    }
};
struct PairKeyHash {
    size_t operator()(const PairKey& k) const {
        return std::hash<const void*>()(k.a) * 31 +
               std::hash<const void*>()(k.b) * 17 + k.depth * 131 +
               std::hash<std::string>()(k.scope_sig);
    }
};

} // namespace

bool agree_to_depth(InfiniteTermHandle& ha, InfiniteTermHandle& hb, size_t depth) {
    std::unordered_map<PairKey, bool, PairKeyHash> memo;
    // Bound variables are matched by pairing binder names per path; free
    // variables cannot occur at the roots (closed). A memo entry is only
    // valid for a fixed resolution of the subtrees' free names against the
    // binder stack, so that resolution is part of the key.
    auto scope_sig = [](const TermPtr& t,
                        const std::vector<std::pair<std::string, std::string>>& binders,
                        bool first_component) {
        std::string sig;
        for (auto& n : t->free_names()) {
            int dist = -1, i = 0;
            for (auto rit = binders.rbegin(); rit != binders.rend(); ++rit, ++i) {
                const std::string& bn = first_component ? rit->first : rit->second;
                if (bn == n) { dist = i; break; }
            }
            sig += std::to_string(dist);
            sig += ',';
        }
        return sig;
    };
    std::function<bool(const TermPtr&, const TermPtr&,
                       std::vector<std::pair<std::string, std::string>>&, size_t)>
        rec = [&](const TermPtr& a, const TermPtr& b,
                  std::vector<std::pair<std::string, std::string>>& binders,
                  size_t d) -> bool {
        if (d == 0) return true;
        PairKey key{a.get(), b.get(), d,
                    scope_sig(a, binders, true) + "|" + scope_sig(b, binders, false)};
        auto it = memo.find(key);
        if (it != memo.end()) return it->second;
        TermPtr x = ha.head(a);
        TermPtr y = hb.head(b);
        bool res = false;
        if (x->kind == y->kind) {
            switch (x->kind) {
            case Kind::Var: {
                // Nearest matching binder pair must line up.
                res = false;
                for (auto rit = binders.rbegin(); rit != binders.rend(); ++rit) {
                    bool ma = rit->first == x->name;
                    bool mb = rit->second == y->name;
                    if (ma || mb) { res = ma && mb; break; }
                }
                break;
            }
            case Kind::App:
                res = rec(x->left, y->left, binders, d - 1) &&
                      rec(x->right, y->right, binders, d - 1);
                break;
            case Kind::Abs:
                binders.emplace_back(x->name, y->name);
                res = rec(x->left, y->left, binders, d - 1);
                binders.pop_back();
                break;
            default:
                res = false;
            }
        }
        memo.emplace(key, res);
        return res;
    };
    std::vector<std::pair<std::string, std::string>> binders;
    return rec(ha.root(), hb.root(), binders, depth);
}

} // namespace cyclam
