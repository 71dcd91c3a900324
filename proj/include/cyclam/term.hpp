#pragma once

// Finite term syntax shared by the whole library.
//
// One node type covers all three finite languages we deal with:
//   - lambda-mu terms            (Var/App/Abs/Mu)
//   - equation-system bodies     (Var/App/Abs/Call)
//   - truncated infinite trees   (Var/App/Abs/Cut)
// Const nodes only ever appear inside derivation annotations (assumption
// constants); Cut only in truncations. Validation keeps the languages apart.
//
// Terms are immutable and shared via shared_ptr; substitution and unfolding
// build new spines and reuse untouched subtrees, so materialized unfoldings
// stay small as DAGs even when large as trees.

#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace cyclam {

enum class Kind { Var, App, Abs, Mu, Call, Const, Cut };

struct Term;
using TermPtr = std::shared_ptr<const Term>;

struct Term {
    Kind kind;
    std::string name;             // Var/Const: name; Abs/Mu: binder; Call: target
    TermPtr left;                 // App: function; Abs/Mu: body
    TermPtr right;                // App: argument
    std::vector<std::string> args; // Call: argument variable names

    Term(Kind k, std::string n, TermPtr l, TermPtr r, std::vector<std::string> a)
        : kind(k), name(std::move(n)), left(std::move(l)), right(std::move(r)),
          args(std::move(a)) {}
    Term(const Term&) = delete;
    Term& operator=(const Term&) = delete;

    // Free variable names, computed once. Call nodes contribute their
    // argument names (systems are normalized so every argument is used).
    const std::vector<std::string>& free_names() const;

private:
    mutable std::once_flag fv_once_;
    mutable std::vector<std::string> fv_;
};

TermPtr mk_var(const std::string& name);
TermPtr mk_app(TermPtr fun, TermPtr arg);
TermPtr mk_abs(const std::string& binder, TermPtr body);
TermPtr mk_mu(const std::string& binder, TermPtr body);
TermPtr mk_call(const std::string& target, std::vector<std::string> args);
TermPtr mk_const(const std::string& marker);
TermPtr mk_cut();

bool occurs_free(const TermPtr& t, const std::string& name);

// Capture-avoiding substitution of whole closed terms for variables.
// `repl` values must be closed (this is all mu-unfolding ever needs).
TermPtr subst_closed(const TermPtr& t,
                     const std::unordered_map<std::string, TermPtr>& repl);

// Capture-avoiding renaming of free variables (used when instantiating
// equation bodies; binders that would capture a new name are freshened).
TermPtr rename_free(const TermPtr& t,
                    const std::unordered_map<std::string, std::string>& repl);

std::string fresh_name(const std::string& hint,
                       const std::vector<std::string>& taken);

// Canonical alpha-key. Free variables are printed through `slots`
// (name -> slot id); bound variables by de Bruijn distance. Two terms get
// equal keys iff they are alpha-equivalent relative to the slot maps.
std::string alpha_key(const TermPtr& t,
                      const std::unordered_map<std::string, int>& slots);

bool alpha_eq_terms(const TermPtr& a, const TermPtr& b);

// Concrete syntax (the grammar accepted by the parser; Cut prints as "_",
// Const as "#marker").
std::string pretty(const TermPtr& t);

std::size_t term_size(const TermPtr& t); // distinct reachable nodes (DAG size)
std::size_t mu_count(const TermPtr& t);  // distinct reachable Mu nodes

struct ParseError : std::runtime_error {
    int line, col;
    ParseError(const std::string& msg, int line_, int col_)
        : std::runtime_error(msg), line(line_), col(col_) {}
};

} // namespace cyclam
