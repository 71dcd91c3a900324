#include "cyclam/parse.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace cyclam {

namespace {

struct Token {
    enum Type { Ident, Lambda, MuKw, Dot, LParen, RParen, Comma, Eq, Semi,
                StartKw, Hash, End } type;
    std::string text;
    int line, col;
};

struct Lexer {
    std::string src;
    size_t pos = 0;
    int line = 1, col = 1;
    Token cur;

    explicit Lexer(std::string s) : src(std::move(s)) { advance(); }

    [[noreturn]] void fail(const std::string& msg, int l, int c) {
        throw ParseError(msg, l, c);
    }

    void advance() {
        while (pos < src.size() &&
               (std::isspace(static_cast<unsigned char>(src[pos])) || src[pos] == '\r')) {
            if (src[pos] == '\n') { ++line; col = 1; } else { ++col; }
            ++pos;
        }
        int l = line, c = col;
        if (pos >= src.size()) { cur = {Token::End, "", l, c}; return; }
        char ch = src[pos];
        auto one = [&](Token::Type t) {
            cur = {t, std::string(1, ch), l, c};
            ++pos; ++col;
        };
        switch (ch) {
        case '\\': one(Token::Lambda); return;
        case '.': one(Token::Dot); return;
        case '(': one(Token::LParen); return;
        case ')': one(Token::RParen); return;
        case ',': one(Token::Comma); return;
        case '=': one(Token::Eq); return;
        case ';': one(Token::Semi); return;
        case '#': one(Token::Hash); return;
        default: break;
        }
        if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
            size_t start = pos;
            while (pos < src.size() &&
                   (std::isalnum(static_cast<unsigned char>(src[pos])) ||
                    src[pos] == '_' || src[pos] == '\'')) {
                ++pos; ++col;
            }
            std::string word = src.substr(start, pos - start);
            if (word == "mu") cur = {Token::MuKw, word, l, c};
            else if (word == "start") cur = {Token::StartKw, word, l, c};
            else cur = {Token::Ident, word, l, c};
            return;
        }
        fail(std::string("unexpected character '") + ch + "'", l, c);
    }

    Token expect(Token::Type t, const std::string& what) {
        if (cur.type != t)
            fail("expected " + what + ", got '" + cur.text + "'", cur.line, cur.col);
        Token tok = cur;
        advance();
        return tok;
    }
};

struct BodyParser {
    Lexer& lx;
    const std::set<std::string>* call_names; // null: calls not recognized
    bool allow_mu;
    bool allow_const;

    bool starts_atom() const {
        switch (lx.cur.type) {
        case Token::Ident:
        case Token::Lambda:
        case Token::MuKw:
        case Token::LParen:
        case Token::Hash:
            return true;
        default:
            return false;
        }
    }

    TermPtr atom() {
        Token t = lx.cur;
        switch (t.type) {
        case Token::LParen: {
            lx.advance();
            TermPtr inner = term();
            lx.expect(Token::RParen, "')'");
            return inner;
        }
        case Token::Lambda: {
            lx.advance();
            Token v = lx.expect(Token::Ident, "binder name");
            lx.expect(Token::Dot, "'.'");
            return mk_abs(v.text, term());
        }
        case Token::MuKw: {
            if (!allow_mu)
                lx.fail("'mu' is not allowed here", t.line, t.col);
            lx.advance();
            Token v = lx.expect(Token::Ident, "binder name");
            lx.expect(Token::Dot, "'.'");
            return mk_mu(v.text, term());
        }
        case Token::Hash: {
            if (!allow_const)
                lx.fail("'#' constants are only allowed in annotations", t.line, t.col);
            lx.advance();
            Token v = lx.expect(Token::Ident, "constant marker");
            return mk_const(v.text);
        }
        case Token::Ident: {
            lx.advance();
            if (call_names && call_names->count(t.text)) {
                lx.expect(Token::LParen, "'(' after equation name");
                std::vector<std::string> args;
                if (lx.cur.type != Token::RParen) {
                    for (;;) {
                        Token a = lx.expect(Token::Ident, "call argument variable");
                        args.push_back(a.text);
                        if (lx.cur.type == Token::Comma) { lx.advance(); continue; }
                        break;
                    }
                }
                lx.expect(Token::RParen, "')'");
                return mk_call(t.text, std::move(args));
            }
            return mk_var(t.text);
        }
        default:
            lx.fail("expected a term, got '" + t.text + "'", t.line, t.col);
        }
        return nullptr;
    }

    TermPtr term() {
        TermPtr acc = atom();
        while (starts_atom())
            acc = mk_app(acc, atom());
        return acc;
    }
};

void check_scoped(const TermPtr& t, std::vector<std::string>& scope,
                  const RegularSystem* sys) {
    switch (t->kind) {
    case Kind::Var:
        if (std::find(scope.begin(), scope.end(), t->name) == scope.end())
            throw ParseError("open term: " + t->name, 0, 0);
        return;
    case Kind::Const:
    case Kind::Cut:
        return;
    case Kind::App:
        check_scoped(t->left, scope, sys);
        check_scoped(t->right, scope, sys);
        return;
    case Kind::Abs:
    case Kind::Mu:
        scope.push_back(t->name);
        check_scoped(t->left, scope, sys);
        scope.pop_back();
        return;
    case Kind::Call: {
        if (!sys)
            throw ParseError("call " + t->name + " without an equation system", 0, 0);
        const Equation* eq = sys->find(t->name);
        if (!eq)
            throw ParseError("call to undefined equation " + t->name, 0, 0);
        if (eq->params.size() != t->args.size())
            throw ParseError("arity mismatch in call to " + t->name + ": expected " +
                                 std::to_string(eq->params.size()) + ", got " +
                                 std::to_string(t->args.size()),
                             0, 0);
        for (auto& a : t->args)
            if (std::find(scope.begin(), scope.end(), a) == scope.end())
                throw ParseError("open term: " + a, 0, 0);
        return;
    }
    }
}

// Least fixpoint of "parameter is used in the denoted tree": a parameter is
// used if it occurs at a Var position, or is passed to a used parameter.
std::map<std::string, std::vector<bool>> used_params(
    const std::vector<Equation>& eqs) {
    std::map<std::string, std::vector<bool>> used;
    for (auto& e : eqs) used[e.name] = std::vector<bool>(e.params.size(), false);
    bool changed = true;
    auto scan = [&](const Equation& e) {
        std::function<void(const TermPtr&, std::vector<std::string>&)> rec =
            [&](const TermPtr& t, std::vector<std::string>& shadow) {
                switch (t->kind) {
                case Kind::Var: {
                    if (std::find(shadow.begin(), shadow.end(), t->name) != shadow.end())
                        return;
                    auto it = std::find(e.params.begin(), e.params.end(), t->name);
                    if (it != e.params.end()) {
                        size_t i = static_cast<size_t>(it - e.params.begin());
                        if (!used[e.name][i]) { used[e.name][i] = true; changed = true; }
                    }
                    return;
                }
                case Kind::App:
                    rec(t->left, shadow);
                    rec(t->right, shadow);
                    return;
                case Kind::Abs:
                case Kind::Mu:
                    shadow.push_back(t->name);
                    rec(t->left, shadow);
                    shadow.pop_back();
                    return;
                case Kind::Call: {
                    auto& target_used = used[t->name];
                    for (size_t i = 0; i < t->args.size(); ++i) {
                        if (!target_used[i]) continue;
                        const std::string& a = t->args[i];
                        if (std::find(shadow.begin(), shadow.end(), a) != shadow.end())
                            continue;
                        auto it = std::find(e.params.begin(), e.params.end(), a);
                        if (it != e.params.end()) {
                            size_t j = static_cast<size_t>(it - e.params.begin());
                            if (!used[e.name][j]) { used[e.name][j] = true; changed = true; }
                        }
                    }
                    return;
                }
                default:
                    return;
                }
            };
        std::vector<std::string> shadow;
        rec(e.body, shadow);
    };
    while (changed) {
        changed = false;
        for (auto& e : eqs) scan(e);
    }
    return used;
}

TermPtr drop_unused_args(const TermPtr& t,
                         const std::map<std::string, std::vector<bool>>& used) {
    switch (t->kind) {
    case Kind::App:
        return mk_app(drop_unused_args(t->left, used), drop_unused_args(t->right, used));
    case Kind::Abs:
        return mk_abs(t->name, drop_unused_args(t->left, used));
    case Kind::Mu:
        return mk_mu(t->name, drop_unused_args(t->left, used));
    case Kind::Call: {
        auto& mask = used.at(t->name);
        std::vector<std::string> args;
        for (size_t i = 0; i < t->args.size(); ++i)
            if (mask[i]) args.push_back(t->args[i]);
        return mk_call(t->name, std::move(args));
    }
    default:
        return t;
    }
}

} // namespace

TermPtr parse_lambda_mu(const std::string& text) {
    Lexer lx(text);
    BodyParser p{lx, nullptr, /*allow_mu=*/true, /*allow_const=*/false};
    TermPtr t = p.term();
    if (lx.cur.type != Token::End)
        lx.fail("trailing input '" + lx.cur.text + "'", lx.cur.line, lx.cur.col);
    std::vector<std::string> scope;
    check_scoped(t, scope, nullptr);
    return t;
}

SystemPtr parse_regular_system(const std::string& text) {
    Lexer lx(text);

    // Pre-scan for equation headers (IDENT '(' params ')' '=' at statement
    // starts) so calls can be recognized while parsing bodies.
    std::set<std::string> names;
    {
        Lexer scan(text);
        bool stmt_start = true;
        while (scan.cur.type != Token::End) {
            if (stmt_start && scan.cur.type == Token::Ident) {
                std::string name = scan.cur.text;
                scan.advance();
                if (scan.cur.type == Token::LParen) {
                    Lexer probe = scan;
                    int depth = 0;
                    do {
                        if (probe.cur.type == Token::LParen) ++depth;
                        if (probe.cur.type == Token::RParen) --depth;
                        probe.advance();
                    } while (probe.cur.type != Token::End && depth > 0);
                    if (probe.cur.type == Token::Eq) names.insert(name);
                }
                stmt_start = false;
                continue;
            }
            stmt_start = scan.cur.type == Token::Semi;
            scan.advance();
        }
    }

    auto sys = std::make_shared<RegularSystem>();
    BodyParser p{lx, &names, /*allow_mu=*/false, /*allow_const=*/false};

    while (lx.cur.type != Token::StartKw) {
        if (lx.cur.type == Token::End)
            lx.fail("missing 'start' expression", lx.cur.line, lx.cur.col);
        Token name = lx.expect(Token::Ident, "equation name");
        lx.expect(Token::LParen, "'('");
        std::vector<std::string> params;
        if (lx.cur.type != Token::RParen) {
            for (;;) {
                Token prm = lx.expect(Token::Ident, "parameter name");
                params.push_back(prm.text);
                if (lx.cur.type == Token::Comma) { lx.advance(); continue; }
                break;
            }
        }
        lx.expect(Token::RParen, "')'");
        lx.expect(Token::Eq, "'='");
        TermPtr body = p.term();
        lx.expect(Token::Semi, "';'");
        for (auto& e : sys->equations)
            if (e.name == name.text)
                lx.fail("duplicate equation " + name.text, name.line, name.col);
        std::set<std::string> uniq(params.begin(), params.end());
        if (uniq.size() != params.size())
            lx.fail("duplicate parameter in " + name.text, name.line, name.col);
        sys->equations.push_back({name.text, std::move(params), std::move(body)});
    }
    lx.expect(Token::StartKw, "'start'");
    sys->start = p.term();
    if (lx.cur.type == Token::Semi) lx.advance();
    if (lx.cur.type != Token::End)
        lx.fail("trailing input '" + lx.cur.text + "'", lx.cur.line, lx.cur.col);

    // Scope, arity, closedness.
    for (auto& e : sys->equations) {
        std::vector<std::string> scope(e.params);
        check_scoped(e.body, scope, sys.get());
    }
    {
        std::vector<std::string> scope;
        check_scoped(sys->start, scope, sys.get());
    }

    // Guardedness: follow bare-call chains (body roots); a cycle means no
    // constructor is ever emitted.
    for (auto& e : sys->equations) {
        std::set<std::string> seen;
        const Equation* cur = &e;
        while (cur->body->kind == Kind::Call) {
            if (!seen.insert(cur->name).second)
                throw ParseError("unguarded cycle through " + cur->name, 0, 0);
            cur = sys->find(cur->body->name);
        }
    }

    // Normalize: drop parameters that never reach a variable occurrence, so
    // vacuousness of prefix bindings is a syntactic free-variable check.
    auto used = used_params(sys->equations);
    auto norm = std::make_shared<RegularSystem>();
    for (auto& e : sys->equations) {
        auto& mask = used[e.name];
        std::vector<std::string> params;
        for (size_t i = 0; i < e.params.size(); ++i)
            if (mask[i]) params.push_back(e.params[i]);
        norm->equations.push_back({e.name, std::move(params),
                                   drop_unused_args(e.body, used)});
    }
    norm->start = drop_unused_args(sys->start, used);
    return norm;
}

TermPtr parse_term_in_context(const std::string& text, const RegularSystem* sys,
                              const std::vector<std::string>& scope,
                              bool allow_const) {
    Lexer lx(text);
    std::set<std::string> names;
    if (sys)
        for (auto& e : sys->equations) names.insert(e.name);
    BodyParser p{lx, sys ? &names : nullptr, /*allow_mu=*/true, allow_const};
    TermPtr t = p.term();
    if (lx.cur.type != Token::End)
        lx.fail("trailing input '" + lx.cur.text + "'", lx.cur.line, lx.cur.col);
    std::vector<std::string> sc(scope);
    check_scoped(t, sc, sys);
    return t;
}

} // namespace cyclam
