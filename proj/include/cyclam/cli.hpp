#pragma once

// Command-line front end. Verbs:
//   parse, unfold, analyze, subterms, chains, derive, check-derivation,
//   express, roundtrip
// Reports are line-oriented "key: value" text on stdout. Exit codes:
//   0 definitive success, 1 definitive negative analysis,
//   2 unknown / budget exhausted, 3 input errors.

#include "cyclam/decompose.hpp"

#include <ostream>
#include <string>
#include <vector>

namespace cyclam {

int run_cli(const std::vector<std::string>& args, std::ostream& out);

// DOT rendering of an explored transition graph: one node per state labeled
// with its pretty-printed form, edges labeled @0/@1/lambda/S/del.
std::string emit_dot(const TransitionGraph& g);

} // namespace cyclam
