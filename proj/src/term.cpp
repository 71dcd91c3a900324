#include "cyclam/term.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>
#include <unordered_set>

namespace cyclam {

const std::vector<std::string>& Term::free_names() const {
    std::call_once(fv_once_, [this] {
        std::set<std::string> acc;
        switch (kind) {
        case Kind::Var:
            acc.insert(name);
            break;
        case Kind::Const:
        case Kind::Cut:
            break;
        case Kind::App:
            for (auto& n : left->free_names()) acc.insert(n);
            for (auto& n : right->free_names()) acc.insert(n);
            break;
        case Kind::Abs:
        case Kind::Mu:
            for (auto& n : left->free_names())
                if (n != name) acc.insert(n);
            break;
        case Kind::Call:
            for (auto& a : args) acc.insert(a);
            break;
        }
        fv_.assign(acc.begin(), acc.end());
    });
    return fv_;
}

TermPtr mk_var(const std::string& name) {
    return std::make_shared<Term>(Kind::Var, name, nullptr, nullptr,
                                  std::vector<std::string>{});
}
TermPtr mk_app(TermPtr fun, TermPtr arg) {
    return std::make_shared<Term>(Kind::App, "", std::move(fun), std::move(arg),
                                  std::vector<std::string>{});
}
TermPtr mk_abs(const std::string& binder, TermPtr body) {
    return std::make_shared<Term>(Kind::Abs, binder, std::move(body), nullptr,
                                  std::vector<std::string>{});
}
TermPtr mk_mu(const std::string& binder, TermPtr body) {
    return std::make_shared<Term>(Kind::Mu, binder, std::move(body), nullptr,
                                  std::vector<std::string>{});
}
TermPtr mk_call(const std::string& target, std::vector<std::string> args) {
    return std::make_shared<Term>(Kind::Call, target, nullptr, nullptr,
                                  std::move(args));
}
TermPtr mk_const(const std::string& marker) {
    return std::make_shared<Term>(Kind::Const, marker, nullptr, nullptr,
                                  std::vector<std::string>{});
}
TermPtr mk_cut() {
    return std::make_shared<Term>(Kind::Cut, "", nullptr, nullptr,
                                  std::vector<std::string>{});
}

bool occurs_free(const TermPtr& t, const std::string& name) {
    const auto& fv = t->free_names();
    return std::binary_search(fv.begin(), fv.end(), name);
}

namespace {

bool any_free_in(const TermPtr& t,
                 const std::unordered_map<std::string, TermPtr>& repl) {
    for (auto& n : t->free_names())
        if (repl.count(n)) return true;
    return false;
}

} // namespace

TermPtr subst_closed(const TermPtr& t,
                     const std::unordered_map<std::string, TermPtr>& repl) {
    if (repl.empty() || !any_free_in(t, repl)) return t;
    switch (t->kind) {
    case Kind::Var: {
        auto it = repl.find(t->name);
        return it == repl.end() ? t : it->second;
    }
    case Kind::App:
        return mk_app(subst_closed(t->left, repl), subst_closed(t->right, repl));
    case Kind::Abs:
    case Kind::Mu: {
        // Replacement values are closed, so shadowing is the only concern.
        auto inner = repl;
        inner.erase(t->name);
        auto body = subst_closed(t->left, inner);
        return t->kind == Kind::Abs ? mk_abs(t->name, body) : mk_mu(t->name, body);
    }
    case Kind::Call: {
        // Call arguments are variable names; a closed replacement term cannot
        // be spliced into an argument position. System normalization
        // guarantees this never comes up (only mu-unfolding substitutes
        // closed terms, and mu-terms contain no calls).
        for (auto& a : t->args)
            if (repl.count(a))
                throw std::logic_error("subst_closed: call argument substitution");
        return t;
    }
    default:
        return t;
    }
}

TermPtr rename_free(const TermPtr& t,
                    const std::unordered_map<std::string, std::string>& repl) {
    bool touches = false;
    for (auto& n : t->free_names())
        if (repl.count(n)) { touches = true; break; }
    if (!touches) return t;
    switch (t->kind) {
    case Kind::Var: {
        auto it = repl.find(t->name);
        return it == repl.end() ? t : mk_var(it->second);
    }
    case Kind::App:
        return mk_app(rename_free(t->left, repl), rename_free(t->right, repl));
    case Kind::Abs:
    case Kind::Mu: {
        auto inner = repl;
        inner.erase(t->name);
        // Freshen the binder if some incoming name would be captured.
        bool capture = false;
        for (auto& [from, to] : inner) {
            (void)from;
            if (to == t->name && occurs_free(t->left, from)) { capture = true; break; }
        }
        std::string binder = t->name;
        TermPtr body = t->left;
        if (capture) {
            std::vector<std::string> taken(t->left->free_names());
            for (auto& [from, to] : inner) { (void)from; taken.push_back(to); }
            binder = fresh_name(t->name, taken);
            body = rename_free(body, {{t->name, binder}});
        }
        body = rename_free(body, inner);
        return t->kind == Kind::Abs ? mk_abs(binder, body) : mk_mu(binder, body);
    }
    case Kind::Call: {
        auto args = t->args;
        for (auto& a : args) {
            auto it = repl.find(a);
            if (it != repl.end()) a = it->second;
        }
        return mk_call(t->name, std::move(args));
    }
    default:
        return t;
    }
}

std::string fresh_name(const std::string& hint,
                       const std::vector<std::string>& taken) {
    auto used = [&](const std::string& n) {
        return std::find(taken.begin(), taken.end(), n) != taken.end();
    };
    if (!used(hint)) return hint;
    for (int i = 1;; ++i) {
        std::string cand = hint + std::to_string(i);
        if (!used(cand)) return cand;
    }
}

std::string alpha_key(const TermPtr& t,
                      const std::unordered_map<std::string, int>& slots) {
    std::string out;
    // bound: binder name -> de Bruijn level (outermost = 0)
    std::vector<std::string> bound;
    std::function<void(const TermPtr&)> rec = [&](const TermPtr& u) {
        switch (u->kind) {
        case Kind::Var: {
            for (int i = static_cast<int>(bound.size()) - 1; i >= 0; --i) {
                if (bound[static_cast<size_t>(i)] == u->name) {
                    out += 'b';
                    out += std::to_string(static_cast<int>(bound.size()) - 1 - i);
                    out += ';';
                    return;
                }
            }
            auto it = slots.find(u->name);
            if (it == slots.end())
                throw std::logic_error("alpha_key: unbound variable " + u->name);
            out += 'f';
            out += std::to_string(it->second);
            out += ';';
            return;
        }
        case Kind::App:
            out += '@';
            rec(u->left);
            rec(u->right);
            return;
        case Kind::Abs:
            out += 'L';
            bound.push_back(u->name);
            rec(u->left);
            bound.pop_back();
            return;
        case Kind::Mu:
            out += 'M';
            bound.push_back(u->name);
            rec(u->left);
            bound.pop_back();
            return;
        case Kind::Call: {
            out += 'C';
            out += u->name;
            out += '(';
            for (auto& a : u->args) {
                rec(mk_var(a));
            }
            out += ')';
            return;
        }
        case Kind::Const:
            out += '#';
            out += u->name;
            out += ';';
            return;
        case Kind::Cut:
            out += '_';
            return;
        }
    };
    rec(t);
    return out;
}

bool alpha_eq_terms(const TermPtr& a, const TermPtr& b) {
    std::unordered_map<std::string, int> slots_a, slots_b;
    int next = 0;
    for (auto& n : a->free_names()) slots_a[n] = next++;
    next = 0;
    for (auto& n : b->free_names()) slots_b[n] = next++;
    if (slots_a.size() != slots_b.size()) return false;
    // Free names must correspond by identity for bare-term comparison: a
    // closed term has none, and open comparisons are only meaningful when the
    // two sides use the same free names.
    for (auto& [n, s] : slots_a) {
        auto it = slots_b.find(n);
        if (it == slots_b.end()) return false;
        if (it->second != s) return false;
    }
    return alpha_key(a, slots_a) == alpha_key(b, slots_b);
}

namespace {

void pretty_rec(const TermPtr& t, std::ostringstream& os, bool app_left,
                bool app_right) {
    switch (t->kind) {
    case Kind::Var:
        os << t->name;
        return;
    case Kind::Const:
        os << '#' << t->name;
        return;
    case Kind::Cut:
        os << '_';
        return;
    case Kind::Call: {
        os << t->name << '(';
        for (size_t i = 0; i < t->args.size(); ++i) {
            if (i) os << ", ";
            os << t->args[i];
        }
        os << ')';
        return;
    }
    case Kind::App: {
        bool parens = app_right;
        if (parens) os << '(';
        pretty_rec(t->left, os, true, false);
        os << ' ';
        pretty_rec(t->right, os, false, true);
        if (parens) os << ')';
        return;
    }
    case Kind::Abs:
    case Kind::Mu: {
        bool parens = app_left || app_right;
        if (parens) os << '(';
        os << (t->kind == Kind::Abs ? "\\" : "mu ") << t->name << ". ";
        pretty_rec(t->left, os, false, false);
        if (parens) os << ')';
        return;
    }
    }
}

} // namespace

std::string pretty(const TermPtr& t) {
    std::ostringstream os;
    pretty_rec(t, os, false, false);
    return os.str();
}

namespace {

void collect(const Term* t, std::unordered_set<const Term*>& seen) {
    if (!t || seen.count(t)) return;
    seen.insert(t);
    collect(t->left.get(), seen);
    collect(t->right.get(), seen);
}

} // namespace

std::size_t term_size(const TermPtr& t) {
    std::unordered_set<const Term*> seen;
    collect(t.get(), seen);
    return seen.size();
}

std::size_t mu_count(const TermPtr& t) {
    std::unordered_set<const Term*> seen;
    collect(t.get(), seen);
    std::size_t n = 0;
    for (auto* p : seen)
        if (p->kind == Kind::Mu) ++n;
    return n;
}

} // namespace cyclam
