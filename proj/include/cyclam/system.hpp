#pragma once

// Guarded first-order equation systems denoting infinite lambda-trees.
//
// Grammar:   (Name "(" params ")" "=" body ";")*  "start" body
// Bodies are built from variables, application, abstraction and calls
// F(x1,...,xk) whose arguments are variables in scope. Guardedness: on every
// cyclic call path at least one App or Abs is crossed. Parsing normalizes
// away equation parameters that are never used in the denoted tree, so that
// syntactic free variables coincide with the free variables of the unfolding.

#include "cyclam/term.hpp"

#include <map>
#include <string>
#include <vector>

namespace cyclam {

struct Equation {
    std::string name;
    std::vector<std::string> params;
    TermPtr body;
};

struct RegularSystem {
    std::vector<Equation> equations;
    TermPtr start;

    const Equation* find(const std::string& name) const;
    int index_of(const std::string& name) const; // -1 if absent

    // Instantiated body of a call node (arguments renamed in, binders
    // freshened against capture).
    TermPtr instantiate(const TermPtr& call) const;

    std::string pretty() const;
};

using SystemPtr = std::shared_ptr<const RegularSystem>;

} // namespace cyclam
