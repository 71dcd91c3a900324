#include "cyclam/system.hpp"

#include <sstream>

namespace cyclam {

const Equation* RegularSystem::find(const std::string& name) const {
    for (auto& e : equations)
        if (e.name == name) return &e;
    return nullptr;
}

int RegularSystem::index_of(const std::string& name) const {
    for (size_t i = 0; i < equations.size(); ++i)
        if (equations[i].name == name) return static_cast<int>(i);
    return -1;
}

TermPtr RegularSystem::instantiate(const TermPtr& call) const {
    const Equation* eq = find(call->name);
    if (!eq || eq->params.size() != call->args.size())
        throw std::logic_error("instantiate: bad call " + call->name);
    std::unordered_map<std::string, std::string> repl;
    for (size_t i = 0; i < eq->params.size(); ++i)
        repl[eq->params[i]] = call->args[i];
    return rename_free(eq->body, repl);
}

std::string RegularSystem::pretty() const {
    std::ostringstream os;
    for (auto& e : equations) {
        os << e.name << '(';
        for (size_t i = 0; i < e.params.size(); ++i) {
            if (i) os << ", ";
            os << e.params[i];
        }
        os << ") = " << cyclam::pretty(e.body) << " ; ";
    }
    os << "start " << cyclam::pretty(start);
    return os.str();
}

} // namespace cyclam
