#include "cyclam/state.hpp"

#include <set>
#include <sstream>
#include <stdexcept>

namespace cyclam {

void validate_state(const PrefixedState& s) {
    std::set<std::string> seen;
    for (auto& n : s.prefix) {
        if (n.empty()) throw std::invalid_argument("empty prefix name");
        if (!seen.insert(n).second)
            throw std::invalid_argument("duplicate prefix name " + n);
    }
    for (auto& n : s.body->free_names())
        if (!seen.count(n))
            throw std::invalid_argument("body variable " + n + " not in prefix");
    if (s.prefix_pos.has_value() != s.body_pos.has_value())
        throw std::invalid_argument("partial position annotation");
    if (s.prefix_pos) {
        if (s.prefix_pos->size() != s.prefix.size())
            throw std::invalid_argument("annotation arity mismatch");
        const Position* prev = nullptr;
        for (auto& p : *s.prefix_pos) {
            if (prev && !pos_lt(*prev, p))
                throw std::invalid_argument("prefix positions not increasing");
            prev = &p;
        }
        if (prev && !pos_lt(*prev, *s.body_pos))
            throw std::invalid_argument("body position does not extend prefix positions");
    }
}

std::string state_key(const PrefixedState& s) {
    std::unordered_map<std::string, int> slots;
    for (size_t i = 0; i < s.prefix.size(); ++i)
        slots[s.prefix[i]] = static_cast<int>(i);
    std::string key = std::to_string(s.prefix.size());
    key += '|';
    key += alpha_key(s.body, slots);
    return key;
}

bool alpha_eq(const PrefixedState& a, const PrefixedState& b) {
    if (a.prefix.size() != b.prefix.size()) return false;
    if (a.annotated() && b.annotated()) {
        if (*a.prefix_pos != *b.prefix_pos || *a.body_pos != *b.body_pos)
            return false;
    }
    return state_key(a) == state_key(b);
}

bool alpha_eq(const TermPtr& a, const TermPtr& b) { return alpha_eq_terms(a, b); }

bool vacuous_in(const PrefixedState& s, const std::string& name) {
    return !occurs_free(s.body, name);
}

static std::string pretty_pos(const Position& p) { return p.empty() ? "e" : p; }

std::string pretty(const PrefixedState& s) {
    std::ostringstream os;
    os << '(';
    for (size_t i = 0; i < s.prefix.size(); ++i) {
        if (i) os << ' ';
        os << s.prefix[i];
    }
    os << ')';
    if (s.annotated()) {
        os << '{';
        for (size_t i = 0; i < s.prefix_pos->size(); ++i) {
            if (i) os << ',';
            os << pretty_pos((*s.prefix_pos)[i]);
        }
        os << "}^" << pretty_pos(*s.body_pos);
    }
    os << ' ' << cyclam::pretty(s.body);
    return os.str();
}

} // namespace cyclam
