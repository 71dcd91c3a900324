#include "cyclam/proofs.hpp"

#include "cyclam/parse.hpp"
#include "cyclam/unfold.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace cyclam {

const char* deriv_system_name(DerivSystem s) {
    switch (s) {
    case DerivSystem::Reg: return "reg";
    case DerivSystem::RegPlus: return "reg+";
    case DerivSystem::RegZeroPlus: return "reg0+";
    case DerivSystem::Expr: return "expr";
    }
    return "?";
}

std::optional<DerivSystem> deriv_system_of(const std::string& name) {
    if (name == "reg") return DerivSystem::Reg;
    if (name == "reg+") return DerivSystem::RegPlus;
    if (name == "reg0+") return DerivSystem::RegZeroPlus;
    if (name == "expr") return DerivSystem::Expr;
    return std::nullopt;
}

size_t DerivNode::depth() const {
    size_t d = 0;
    for (auto& c : children) d = std::max(d, 1 + c->depth());
    return d;
}

size_t DerivNode::node_count() const {
    size_t n = 1;
    for (auto& c : children) n += c->node_count();
    return n;
}

HandlePtr Derivation::make_handle() const {
    if (source_system) return handle_of(source_system);
    if (source_term) return handle_of(source_term);
    // Formula bodies are plain finite trees; any term handle will do for
    // head resolution, which then never consults the source.
    return handle_of(root ? mk_abs("x", mk_var("x")) : mk_abs("x", mk_var("x")));
}

bool formula_eq(InfiniteTermHandle& h, const PrefixedState& a,
                const PrefixedState& b) {
    if (a.prefix.size() != b.prefix.size()) return false;
    PrefixedState na = a, nb = b;
    na.prefix_pos.reset();
    na.body_pos.reset();
    nb.prefix_pos.reset();
    nb.body_pos.reset();
    if (state_key(na) == state_key(nb)) return true;
    na.body = h.head(na.body);
    nb.body = h.head(nb.body);
    return state_key(na) == state_key(nb);
}

namespace {

Strategy strategy_for(DerivSystem sys) {
    return sys == DerivSystem::Reg ? Strategy::Reg : Strategy::RegPlus;
}

struct ThreadEntry {
    std::string key;
    size_t prefix_len;
    std::string marker; // assigned on first discharge
};

struct Builder {
    InfiniteTermHandle& h;
    DerivSystem sys;
    Strategy strat;
    size_t max_nodes;
    size_t built = 0;
    int next_marker = 1;
    std::vector<ThreadEntry> stack;

    std::unique_ptr<DerivNode> node(DerivRule r, PrefixedState f) {
        if (++built > max_nodes)
            throw NotRegularError("derivation budget exceeded");
        auto n = std::make_unique<DerivNode>();
        n->rule = r;
        n->formula = std::move(f);
        return n;
    }

    // Deepest stack occurrence of `key` that a FIX may fold to; for Reg0+
    // every formula from the occurrence (exclusive) to the top must keep at
    // least the occurrence's prefix length.
    ThreadEntry* fold_target(const std::string& key, size_t prefix_len) {
        for (size_t i = stack.size(); i-- > 0;) {
            if (stack[i].key != key) continue;
            if (sys == DerivSystem::RegZeroPlus || sys == DerivSystem::Expr) {
                bool ok = true;
                for (size_t j = i; j < stack.size(); ++j)
                    if (stack[j].prefix_len < prefix_len) { ok = false; break; }
                if (!ok) continue;
            }
            return &stack[i];
        }
        return nullptr;
    }

    std::unique_ptr<DerivNode> build(const PrefixedState& s) {
        std::string key = state_key(s);
        if (ThreadEntry* target = fold_target(key, s.prefix.size())) {
            if (target->marker.empty())
                target->marker = "l" + std::to_string(next_marker++);
            auto n = node(DerivRule::Assume, s);
            n->marker = target->marker;
            return n;
        }

        std::vector<Step> steps = decompose_step(s, strat, &h);
        if (steps.empty()) return node(DerivRule::Axiom, s);

        stack.push_back({key, s.prefix.size(), ""});
        std::unique_ptr<DerivNode> n;
        switch (steps[0].label) {
        case RuleLabel::AppLeft: {
            n = node(DerivRule::App, s);
            n->children.push_back(build(steps[0].target));
            n->children.push_back(build(steps[1].target));
            break;
        }
        case RuleLabel::Lam:
            n = node(DerivRule::Lam, s);
            n->children.push_back(build(steps[0].target));
            break;
        case RuleLabel::S:
            n = node(DerivRule::S, s);
            n->children.push_back(build(steps[0].target));
            break;
        case RuleLabel::Del:
            // Several vacuous entries give several del steps; the derivation
            // removes the first one (the rest follow below).
            n = node(DerivRule::Del, s);
            n->children.push_back(build(steps[0].target));
            break;
        default:
            throw std::logic_error("build: unexpected first step");
        }
        std::string marker = stack.back().marker;
        stack.pop_back();
        if (!marker.empty()) {
            auto fix = node(DerivRule::Fix, s);
            fix->marker = marker;
            fix->children.push_back(std::move(n));
            n = std::move(fix);
        }
        return n;
    }
};

} // namespace

Derivation build_derivation(const HandlePtr& h, DerivSystem system,
                            const ExploreBudget& budget) {
    if (system == DerivSystem::Expr) {
        Derivation base = build_derivation(h, DerivSystem::RegZeroPlus, budget);
        return annotate_to_expr(base);
    }
    // Pre-condition: the matching regularity notion must hold.
    if (system == DerivSystem::Reg) {
        if (is_regular(*h, budget).verdict != Verdict::Finite)
            throw NotRegularError("not regular within budget");
    } else {
        auto sr = is_strongly_regular(*h, budget);
        if (sr.verdict == Verdict::Infinite)
            throw NotRegularError("not strongly regular");
        if (sr.verdict != Verdict::Finite)
            throw NotRegularError("not strongly regular within budget");
    }

    PrefixedState root;
    root.body = h->root();
    Builder b{*h, system, strategy_for(system),
              std::max<size_t>(budget.max_states * 100, 1000000), 0, 1, {}};
    Derivation d;
    d.system = system;
    if (h->from_system())
        d.source_system = h->system_ptr();
    else
        d.source_term = h->source_term();
    d.root = b.build(root);
    return d;
}

namespace {

TermPtr subst_const(const TermPtr& t, const std::string& marker,
                    const TermPtr& repl) {
    switch (t->kind) {
    case Kind::Const:
        return t->name == marker ? repl : t;
    case Kind::App:
        return mk_app(subst_const(t->left, marker, repl),
                      subst_const(t->right, marker, repl));
    case Kind::Abs:
        return mk_abs(t->name, subst_const(t->left, marker, repl));
    case Kind::Mu:
        return mk_mu(t->name, subst_const(t->left, marker, repl));
    default:
        return t;
    }
}

bool contains_const(const TermPtr& t, const std::string& marker) {
    switch (t->kind) {
    case Kind::Const:
        return t->name == marker;
    case Kind::App:
        return contains_const(t->left, marker) || contains_const(t->right, marker);
    case Kind::Abs:
    case Kind::Mu:
        return contains_const(t->left, marker);
    default:
        return false;
    }
}

// Some occurrence of the constant sits below a binder named `f`, so that
// substituting Var(f) for it would be captured.
bool const_under_binder(const TermPtr& t, const std::string& marker,
                        const std::string& f, bool shadowed = false) {
    switch (t->kind) {
    case Kind::Const:
        return shadowed && t->name == marker;
    case Kind::App:
        return const_under_binder(t->left, marker, f, shadowed) ||
               const_under_binder(t->right, marker, f, shadowed);
    case Kind::Abs:
    case Kind::Mu:
        return const_under_binder(t->left, marker, f, shadowed || t->name == f);
    default:
        return false;
    }
}

std::vector<std::string> const_markers(const TermPtr& t) {
    std::vector<std::string> out;
    std::function<void(const TermPtr&)> rec = [&](const TermPtr& u) {
        switch (u->kind) {
        case Kind::Const:
            if (std::find(out.begin(), out.end(), u->name) == out.end())
                out.push_back(u->name);
            return;
        case Kind::App:
            rec(u->left);
            rec(u->right);
            return;
        case Kind::Abs:
        case Kind::Mu:
            rec(u->left);
            return;
        default:
            return;
        }
    };
    rec(t);
    return out;
}

std::unique_ptr<DerivNode> annotate_node(const DerivNode& n) {
    auto out = std::make_unique<DerivNode>();
    out->rule = n.rule;
    out->formula = n.formula;
    out->marker = n.marker;
    for (auto& c : n.children) out->children.push_back(annotate_node(*c));
    switch (n.rule) {
    case DerivRule::Axiom:
        out->annotation = mk_var(n.formula.prefix.back());
        break;
    case DerivRule::Assume:
        out->annotation = mk_const(n.marker);
        break;
    case DerivRule::S:
        out->annotation = out->children[0]->annotation;
        break;
    case DerivRule::Lam:
        out->annotation = mk_abs(out->children[0]->formula.prefix.back(),
                                 out->children[0]->annotation);
        break;
    case DerivRule::App:
        out->annotation = mk_app(out->children[0]->annotation,
                                 out->children[1]->annotation);
        break;
    case DerivRule::Fix: {
        const TermPtr& body = out->children[0]->annotation;
        std::vector<std::string> taken(body->free_names());
        for (auto& p : n.formula.prefix) taken.push_back(p);
        std::string f = fresh_name(n.marker, taken);
        out->annotation = mk_mu(f, subst_const(body, n.marker, mk_var(f)));
        break;
    }
    case DerivRule::Del:
        throw std::invalid_argument("invalid input derivation");
    }
    return out;
}

} // namespace

Derivation annotate_to_expr(const Derivation& d) {
    if (d.system != DerivSystem::RegZeroPlus)
        throw std::invalid_argument("invalid input derivation");
    CheckResult chk = check_derivation(d);
    if (!chk.valid) throw std::invalid_argument("invalid input derivation");
    Derivation out;
    out.system = DerivSystem::Expr;
    out.source_system = d.source_system;
    out.source_term = d.source_term;
    out.root = annotate_node(*d.root);
    return out;
}

TermPtr extract_mu_term(const HandlePtr& h, const ExploreBudget& budget) {
    Derivation expr = build_derivation(h, DerivSystem::Expr, budget);
    TermPtr m = expr.root->annotation;
    if (!const_markers(m).empty() || !m->free_names().empty() || !is_mu_guarded(m))
        throw std::logic_error("extract_mu_term: broken extraction");
    return m;
}

bool verify_expresses(const TermPtr& m, const HandlePtr& h, size_t depth) {
    HandlePtr mh = handle_of(m); // throws UnguardedMuError
    return agree_to_depth(*mh, *h, depth);
}

namespace {

struct Checker {
    const Derivation& d;
    HandlePtr handle;
    CheckResult res;
    std::vector<size_t> path;
    std::map<std::string, const DerivNode*> open_fix; // marker -> node
    std::set<std::string> seen_markers;

    bool fail(const std::string& reason) {
        if (res.valid) {
            res.valid = false;
            res.reason = reason;
            res.node_path = path;
        }
        return false;
    }

    bool plus_family() const { return d.system != DerivSystem::Reg; }

    bool rule_allowed(DerivRule r) const {
        if (r == DerivRule::S) return plus_family();
        if (r == DerivRule::Del) return !plus_family();
        return true;
    }

    bool formula_ok(const PrefixedState& s) {
        try {
            validate_state(s);
        } catch (const std::exception&) {
            return false;
        }
        return true;
    }

    bool visit(const DerivNode& n) {
        if (!rule_allowed(n.rule)) return fail("rule not in system");
        if (!formula_ok(n.formula)) return fail("malformed formula");

        size_t want = n.rule == DerivRule::App ? 2
                      : (n.rule == DerivRule::Axiom || n.rule == DerivRule::Assume)
                          ? 0
                          : 1;
        if (n.children.size() != want) return fail("arity");

        if (d.system == DerivSystem::Expr && !n.annotation)
            return fail("annotation");
        if (d.system != DerivSystem::Expr && n.annotation)
            return fail("annotation");

        const PrefixedState& f = n.formula;
        switch (n.rule) {
        case DerivRule::Axiom: {
            TermPtr head = head_of(f);
            if (!head || head->kind != Kind::Var || f.prefix.empty() ||
                head->name != f.prefix.back())
                return fail("axiom shape");
            if (d.system == DerivSystem::Reg && f.prefix.size() != 1)
                return fail("axiom shape");
            if (d.system == DerivSystem::Expr &&
                !alpha_eq_terms_in(f, n.annotation, mk_var(f.prefix.back())))
                return fail("annotation");
            return true;
        }
        case DerivRule::Assume: {
            if (n.marker.empty()) return fail("missing marker");
            auto it = open_fix.find(n.marker);
            if (it == open_fix.end()) return fail("open assumption");
            if (!formula_eq(*handle, f, it->second->formula))
                return fail("assumption formula");
            if (d.system == DerivSystem::Expr &&
                !(n.annotation->kind == Kind::Const && n.annotation->name == n.marker))
                return fail("annotation");
            // Prefix condition bookkeeping happens at the Fix (threads).
            return true;
        }
        case DerivRule::Lam: {
            TermPtr head = head_of(f);
            if (!head || head->kind != Kind::Abs) return fail("local");
            PrefixedState prem = f;
            std::string binder = fresh_name(head->name, f.prefix);
            TermPtr body = head->left;
            if (binder != head->name) body = rename_free(body, {{head->name, binder}});
            prem.prefix.push_back(binder);
            prem.body = body;
            if (!formula_eq(*handle, prem, n.children[0]->formula))
                return fail("local");
            if (!eager_ok(f)) return fail("eagerness");
            if (d.system == DerivSystem::Expr) {
                TermPtr expect =
                    mk_abs(n.children[0]->formula.prefix.back(),
                           n.children[0]->annotation);
                if (!alpha_eq_terms_in(f, n.annotation, expect))
                    return fail("annotation");
            }
            return descend(n);
        }
        case DerivRule::App: {
            TermPtr head = head_of(f);
            if (!head || head->kind != Kind::App) return fail("local");
            PrefixedState l = f, r = f;
            l.body = head->left;
            r.body = head->right;
            if (!formula_eq(*handle, l, n.children[0]->formula) ||
                !formula_eq(*handle, r, n.children[1]->formula))
                return fail("local");
            if (!eager_ok(f)) return fail("eagerness");
            if (d.system == DerivSystem::Expr) {
                TermPtr expect = mk_app(n.children[0]->annotation,
                                        n.children[1]->annotation);
                if (!alpha_eq_terms_in(f, n.annotation, expect))
                    return fail("annotation");
            }
            return descend(n);
        }
        case DerivRule::S: {
            if (f.prefix.empty()) return fail("local");
            if (occurs_free(f.body, f.prefix.back())) return fail("vacuity");
            PrefixedState prem = f;
            prem.prefix.pop_back();
            if (!formula_eq(*handle, prem, n.children[0]->formula))
                return fail("local");
            if (d.system == DerivSystem::Expr) {
                if (!alpha_eq_terms_in(f, n.annotation, n.children[0]->annotation))
                    return fail("annotation");
                if (occurs_free(n.annotation, f.prefix.back()))
                    return fail("annotation");
            }
            return descend(n);
        }
        case DerivRule::Del: {
            bool matched = false;
            for (size_t i = 0; i < f.prefix.size() && !matched; ++i) {
                if (occurs_free(f.body, f.prefix[i])) continue;
                PrefixedState prem = f;
                prem.prefix.erase(prem.prefix.begin() + static_cast<long>(i));
                if (formula_eq(*handle, prem, n.children[0]->formula))
                    matched = true;
            }
            if (!matched) return fail("vacuity");
            return descend(n);
        }
        case DerivRule::Fix: {
            if (n.marker.empty()) return fail("missing marker");
            if (!seen_markers.insert(n.marker).second)
                return fail("duplicate marker");
            if (!formula_eq(*handle, f, n.children[0]->formula))
                return fail("local");
            if (n.children[0]->depth() < 1) return fail("fix depth");
            if (d.system == DerivSystem::Expr) {
                if (n.annotation->kind != Kind::Mu) return fail("annotation");
                if (const_under_binder(n.children[0]->annotation, n.marker,
                                       n.annotation->name))
                    return fail("annotation");
                TermPtr expect = subst_const(n.children[0]->annotation, n.marker,
                                             mk_var(n.annotation->name));
                TermPtr whole = mk_mu(n.annotation->name, expect);
                if (!alpha_eq_terms_in(f, n.annotation, whole))
                    return fail("annotation");
                if (contains_const(expect, n.marker)) return fail("annotation");
            }
            open_fix[n.marker] = &n;
            bool ok = descend(n);
            open_fix.erase(n.marker);
            if (!ok) return false;
            // Reg0+/Expr: every formula on a thread from a discharged
            // assumption down to this instance keeps the prefix length.
            if (d.system == DerivSystem::RegZeroPlus ||
                d.system == DerivSystem::Expr) {
                if (!threads_keep_prefix(*n.children[0], n.marker, f.prefix.size()))
                    return fail("prefix condition");
            }
            return true;
        }
        }
        return fail("unknown rule");
    }

    bool threads_keep_prefix(const DerivNode& n, const std::string& marker,
                             size_t len) {
        // Does every node on a path from an Assume(marker) leaf down to here
        // have prefix length >= len?
        std::function<bool(const DerivNode&, bool&)> rec =
            [&](const DerivNode& cur, bool& has) -> bool {
            bool any = cur.rule == DerivRule::Assume && cur.marker == marker;
            bool ok = true;
            for (auto& c : cur.children) {
                bool child_has = false;
                ok = ok && rec(*c, child_has);
                any = any || child_has;
            }
            has = any;
            if (any && cur.formula.prefix.size() < len) return false;
            return ok;
        };
        bool has = false;
        return rec(n, has);
    }

    bool descend(const DerivNode& n) {
        for (size_t i = 0; i < n.children.size(); ++i) {
            path.push_back(i);
            bool ok = visit(*n.children[i]);
            path.pop_back();
            if (!ok) return false;
        }
        return true;
    }

    TermPtr head_of(const PrefixedState& f) {
        try {
            return handle->head(f.body);
        } catch (const std::exception&) {
            return nullptr;
        }
    }

    bool eager_ok(const PrefixedState& f) {
        if (d.system == DerivSystem::Reg) {
            for (auto& n : f.prefix)
                if (!occurs_free(f.body, n)) return false;
            return true;
        }
        return f.prefix.empty() || occurs_free(f.body, f.prefix.back());
    }

    // Alpha-comparison of annotations relative to the formula's prefix.
    bool alpha_eq_terms_in(const PrefixedState& f, const TermPtr& a,
                           const TermPtr& b) {
        std::unordered_map<std::string, int> slots;
        for (size_t i = 0; i < f.prefix.size(); ++i)
            slots[f.prefix[i]] = static_cast<int>(i);
        try {
            return alpha_key(a, slots) == alpha_key(b, slots);
        } catch (const std::exception&) {
            return false;
        }
    }
};

} // namespace

CheckResult check_derivation(const Derivation& d,
                             const std::optional<PrefixedState>& expected_root) {
    Checker c{d, d.make_handle(), {}, {}, {}, {}};
    if (!d.root) {
        c.res.valid = false;
        c.res.reason = "empty derivation";
        return c.res;
    }
    c.visit(*d.root);
    if (c.res.valid && expected_root &&
        !formula_eq(*c.handle, d.root->formula, *expected_root)) {
        c.res.valid = false;
        c.res.reason = "root mismatch";
    }
    return c.res;
}

namespace {

const char* rule_word(DerivRule r) {
    switch (r) {
    case DerivRule::Axiom: return "AX";
    case DerivRule::Lam: return "LAM";
    case DerivRule::App: return "APP";
    case DerivRule::S: return "S";
    case DerivRule::Del: return "DEL";
    case DerivRule::Fix: return "FIX";
    case DerivRule::Assume: return "ASSUME";
    }
    return "?";
}

std::optional<DerivRule> rule_of_word(const std::string& w) {
    if (w == "AX") return DerivRule::Axiom;
    if (w == "LAM") return DerivRule::Lam;
    if (w == "APP") return DerivRule::App;
    if (w == "S") return DerivRule::S;
    if (w == "DEL") return DerivRule::Del;
    if (w == "FIX") return DerivRule::Fix;
    if (w == "ASSUME") return DerivRule::Assume;
    return std::nullopt;
}

std::string format_formula(const PrefixedState& s) {
    std::string out = "(";
    for (size_t i = 0; i < s.prefix.size(); ++i) {
        if (i) out += ' ';
        out += s.prefix[i];
    }
    out += ") ";
    out += pretty(s.body);
    return out;
}

void format_node(const DerivNode& n, size_t indent, bool expr, std::string& out) {
    out.append(indent, ' ');
    out += rule_word(n.rule);
    out += " | ";
    out += format_formula(n.formula);
    if (expr) {
        out += " | ";
        out += pretty(n.annotation);
    }
    if (!n.marker.empty()) {
        out += " | ";
        out += n.marker;
    }
    out += '\n';
    for (auto& c : n.children) format_node(*c, indent + 1, expr, out);
}

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r");
    size_t e = s.find_last_not_of(" \t\r");
    if (b == std::string::npos) return "";
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    size_t start = 0;
    for (size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == '|') {
            out.push_back(trim(line.substr(start, i - start)));
            start = i + 1;
        }
    }
    return out;
}

PrefixedState parse_formula(const std::string& text, const RegularSystem* sys,
                            bool allow_const) {
    size_t open = text.find('(');
    size_t close = text.find(')');
    if (open != 0 || close == std::string::npos)
        throw ParseError("formula must start with a (prefix)", 0, 0);
    PrefixedState s;
    std::istringstream names(text.substr(1, close - 1));
    std::string n;
    while (names >> n) s.prefix.push_back(n);
    s.body = parse_term_in_context(trim(text.substr(close + 1)), sys, s.prefix,
                                   allow_const);
    validate_state(s);
    return s;
}

} // namespace

std::string format_derivation(const Derivation& d) {
    std::string out = "source: ";
    if (d.source_system) {
        out += "system ";
        out += d.source_system->pretty();
    } else {
        out += "term ";
        out += pretty(d.source_term);
    }
    out += '\n';
    format_node(*d.root, 0, d.system == DerivSystem::Expr, out);
    return out;
}

Derivation parse_derivation(const std::string& text, DerivSystem system) {
    std::istringstream in(text);
    std::string line;
    Derivation d;
    d.system = system;

    // Header.
    for (;;) {
        if (!std::getline(in, line))
            throw ParseError("missing 'source:' header", 0, 0);
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        if (t.rfind("source:", 0) != 0)
            throw ParseError("missing 'source:' header", 0, 0);
        std::string rest = trim(t.substr(7));
        if (rest.rfind("system ", 0) == 0) {
            d.source_system = parse_regular_system(rest.substr(7));
        } else if (rest.rfind("term ", 0) == 0) {
            d.source_term = parse_lambda_mu(rest.substr(5));
        } else {
            throw ParseError("source must be 'system ...' or 'term ...'", 0, 0);
        }
        break;
    }

    struct Raw {
        size_t indent;
        std::unique_ptr<DerivNode> node;
    };
    std::vector<Raw> stack;
    const RegularSystem* sys = d.source_system.get();
    bool expr = system == DerivSystem::Expr;
    int lineno = 1;

    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty() || trim(line)[0] == '#') continue;
        size_t indent = 0;
        while (indent < line.size() && line[indent] == ' ') ++indent;
        auto fields = split_fields(line);
        auto rule = rule_of_word(fields.empty() ? "" : fields[0]);
        if (!rule)
            throw ParseError("unknown rule '" + (fields.empty() ? "" : fields[0]) +
                                 "'",
                             lineno, 1);
        size_t want = 2; // rule + formula
        bool marked = *rule == DerivRule::Fix || *rule == DerivRule::Assume;
        if (expr) ++want;
        if (marked) ++want;
        if (fields.size() != want)
            throw ParseError("expected " + std::to_string(want) +
                                 " '|'-separated fields",
                             lineno, 1);
        auto node = std::make_unique<DerivNode>();
        node->rule = *rule;
        node->formula = parse_formula(fields[1], sys, false);
        size_t next = 2;
        if (expr)
            node->annotation = parse_term_in_context(
                fields[next++], sys, node->formula.prefix, /*allow_const=*/true);
        if (marked) node->marker = fields[next++];

        while (!stack.empty() && stack.back().indent >= indent) {
            Raw top = std::move(stack.back());
            stack.pop_back();
            if (stack.empty())
                throw ParseError("multiple roots in derivation", lineno, 1);
            stack.back().node->children.push_back(std::move(top.node));
        }
        if (stack.empty() && d.root)
            throw ParseError("multiple roots in derivation", lineno, 1);
        if (stack.empty() && !d.root && indent != 0)
            throw ParseError("root must not be indented", lineno, 1);
        stack.push_back({indent, std::move(node)});
    }
    while (!stack.empty()) {
        Raw top = std::move(stack.back());
        stack.pop_back();
        if (stack.empty())
            d.root = std::move(top.node);
        else
            stack.back().node->children.push_back(std::move(top.node));
    }
    if (!d.root) throw ParseError("empty derivation", 0, 0);
    return d;
}

} // namespace cyclam
