#pragma once

// Finite natural-deduction derivations certifying regularity (Reg), strong
// regularity (Reg+, Reg0+) and lambda-mu expressibility (Expr).
//
// Nodes conclude prefixed terms; reading upwards, the rules undo one
// decomposition step each:
//   AX          (x...y) y                      axiom (Reg: (y) y only)
//   LAM         (xs) \y.B      from (xs y) B
//   APP         (xs) B0 B1     from (xs) B0 and (xs) B1
//   S           (xs y) B       from (xs) B     (y vacuous; reg+ family)
//   DEL         (xs) B         from xs minus one vacuous entry (Reg)
//   FIX,l       discharges assumptions marked l that repeat the conclusion
// Closed, eager derivations with FIX subderivations of depth >= 1 exist for
// the root () T exactly when T is regular (Reg) / strongly regular (Reg+,
// Reg0+). Reg0+ additionally requires every formula between a discharged
// assumption and its FIX to have a prefix at least as long as the
// assumption's; those derivations annotate to Expr, whose conclusion
// annotation is a lambda-mu term unfolding to T.

#include "cyclam/decompose.hpp"
#include "cyclam/handle.hpp"
#include "cyclam/state.hpp"
#include "cyclam/system.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace cyclam {

enum class DerivSystem { Reg, RegPlus, RegZeroPlus, Expr };

const char* deriv_system_name(DerivSystem s);
std::optional<DerivSystem> deriv_system_of(const std::string& name);

enum class DerivRule { Axiom, Lam, App, S, Del, Fix, Assume };

struct DerivNode {
    DerivRule rule;
    PrefixedState formula;
    std::string marker;  // Fix / Assume
    TermPtr annotation;  // Expr formulas; may contain assumption constants
    std::vector<std::unique_ptr<DerivNode>> children;

    size_t depth() const;
    size_t node_count() const;
};

struct Derivation {
    DerivSystem system = DerivSystem::RegPlus;
    SystemPtr source_system; // Call context (null for term sources)
    TermPtr source_term;     // lambda-mu source (null for system sources)
    std::unique_ptr<DerivNode> root;

    HandlePtr make_handle() const;
};

struct NotRegularError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Closed, eager derivation with conclusion () root, FIX introduced at the
// first repetition on each depth-first thread (Reg0+: the first repetition
// whose in-between formulas keep the assumption's prefix length).
// Throws NotRegularError when the input is not (strongly) regular within
// budget; `system` Expr builds the Reg0+ derivation and annotates it.
Derivation build_derivation(const HandlePtr& h, DerivSystem system,
                            const ExploreBudget& budget = {});

struct CheckResult {
    bool valid = true;
    std::string reason;
    std::vector<size_t> node_path; // child indices from the root
};

CheckResult check_derivation(const Derivation& d,
                             const std::optional<PrefixedState>& expected_root =
                                 std::nullopt);

// Expr derivation of identical shape, annotations computed bottom-up;
// requires a valid Reg0+ input.
Derivation annotate_to_expr(const Derivation& d);

// The Expr conclusion annotation of the folded Reg0+ derivation: a closed,
// mu-guarded lambda-mu term unfolding to the handle's tree.
TermPtr extract_mu_term(const HandlePtr& h, const ExploreBudget& budget = {});

// Truncated comparison of m's unfolding against the handle's tree.
bool verify_expresses(const TermPtr& m, const HandlePtr& h, size_t depth);

// Serialization: "source: system <text>" or "source: term <text>", then one
// node per line, children indented one space below their parent:
//   RULE | formula [| annotation] [| marker]
std::string format_derivation(const Derivation& d);
Derivation parse_derivation(const std::string& text, DerivSystem system);

// Equality of formulas as (unfoldings of) prefixed terms: alpha-equality
// after expanding Call/Mu heads at the root.
bool formula_eq(InfiniteTermHandle& h, const PrefixedState& a,
                const PrefixedState& b);

} // namespace cyclam
