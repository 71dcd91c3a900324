#pragma once

#include "cyclam/system.hpp"
#include "cyclam/term.hpp"

#include <string>

namespace cyclam {

// Closed finite lambda-mu term. Errors: syntax (with location), open term.
TermPtr parse_lambda_mu(const std::string& text);

// Arity-checked, guarded, closed equation system.
SystemPtr parse_regular_system(const std::string& text);

// Term over the lambda-mu grammar extended with calls into `sys` (which may
// be null when no calls are expected) and, when `allow_const`, assumption
// constants written "#marker". Free variables must come from `scope`.
TermPtr parse_term_in_context(const std::string& text, const RegularSystem* sys,
                              const std::vector<std::string>& scope,
                              bool allow_const = false);

} // namespace cyclam
