#pragma once

// Abstraction-prefixed terms (x1...xn)T, the objects the decomposition
// strategies act on, optionally carrying position annotations.

#include "cyclam/term.hpp"

#include <optional>
#include <string>
#include <vector>

namespace cyclam {

// Position in a lambda-tree, a string over {0,1}: App children of a node at
// q sit at q0 and q1, an Abs node at q declares its binder at q0 and its
// body starts at q00.
using Position = std::string;

inline bool pos_lt(const Position& a, const Position& b) {
    return a.size() < b.size() && b.compare(0, a.size(), a) == 0;
}
inline bool pos_le(const Position& a, const Position& b) {
    return a == b || pos_lt(a, b);
}

struct PrefixedState {
    std::vector<std::string> prefix; // distinct binder names
    TermPtr body;                    // free names of body are prefix names
    // Position annotations (present in annotated explorations): one position
    // per prefix entry plus the body position, strictly increasing in the
    // prefix order.
    std::optional<std::vector<Position>> prefix_pos;
    std::optional<Position> body_pos;

    bool annotated() const { return prefix_pos.has_value(); }
};

// Construction-time checks: distinct prefix names, free(body) within prefix,
// annotation shape. Throws std::invalid_argument.
void validate_state(const PrefixedState& s);

// Canonical key: prefix entries by slot, bound variables by de Bruijn
// distance; annotations are not part of the key.
std::string state_key(const PrefixedState& s);

// Equal after canonical renaming. Annotations are ignored unless both states
// carry them, in which case they must match exactly.
bool alpha_eq(const PrefixedState& a, const PrefixedState& b);

bool alpha_eq(const TermPtr& a, const TermPtr& b);

// Is the prefix entry `name` vacuous (no free occurrence in the body)?
bool vacuous_in(const PrefixedState& s, const std::string& name);

std::string pretty(const PrefixedState& s);

} // namespace cyclam
