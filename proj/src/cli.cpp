#include "cyclam/cli.hpp"

#include "cyclam/chains.hpp"
#include "cyclam/parse.hpp"
#include "cyclam/proofs.hpp"
#include "cyclam/unfold.hpp"

#include "CLI11.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace cyclam {

namespace {

std::string pos_text(const Position& p) { return p.empty() ? "e" : p; }

std::string read_input(const std::string& arg) {
    if (arg == "-") {
        std::ostringstream os;
        os << std::cin.rdbuf();
        return os.str();
    }
    std::ifstream in(arg);
    if (in.good()) {
        std::ostringstream os;
        os << in.rdbuf();
        return os.str();
    }
    return arg; // inline source text
}

bool looks_like_system(const std::string& text) {
    // A top-level 'start' token marks the system grammar.
    for (size_t i = 0; i + 5 <= text.size(); ++i) {
        if (text.compare(i, 5, "start") != 0) continue;
        auto wordish = [&](size_t k) {
            return std::isalnum(static_cast<unsigned char>(text[k])) ||
                   text[k] == '_' || text[k] == '\'';
        };
        bool left_ok = i == 0 || !wordish(i - 1);
        bool right_ok = i + 5 == text.size() || !wordish(i + 5);
        if (left_ok && right_ok) return true;
    }
    return false;
}

struct Input {
    HandlePtr handle;
    bool is_system;
};

Input load(const std::string& arg) {
    std::string text = read_input(arg);
    if (looks_like_system(text))
        return {handle_of(parse_regular_system(text)), true};
    return {handle_of(parse_lambda_mu(text)), false};
}

const char* verdict_text(Verdict v) {
    switch (v) {
    case Verdict::Finite: return "finite";
    case Verdict::Infinite: return "infinite";
    case Verdict::BudgetExhausted: return "budget-exhausted";
    }
    return "?";
}

void write_file(const std::string& path, const std::string& text,
                std::ostream& out) {
    if (path == "-") {
        out << text;
        return;
    }
    std::ofstream f(path);
    if (!f.good()) throw std::runtime_error("cannot write " + path);
    f << text;
    out << "written: " << path << "\n";
}

void print_witness(std::ostream& out, const InfiniteChainWitness& w) {
    out << "witness_u: " << pretty(w.path[w.u_index]) << "\n";
    out << "witness_v: " << pretty(w.path.back()) << "\n";
    std::string cyc;
    for (auto& [label, slot] : w.cycle_labels) {
        (void)slot;
        if (!cyc.empty()) cyc += ' ';
        cyc += label_name(label);
    }
    out << "witness_cycle: " << cyc << "\n";
    for (size_t i = w.u_index; i < w.path.size(); ++i)
        out << "witness_path " << (i - w.u_index) << ": " << pretty(w.path[i])
            << "\n";
    std::string chain;
    for (size_t i = 0; i < w.chain.binders.size(); ++i) {
        if (i) {
            chain += " <- " + pos_text(w.chain.occurrences[i - 1]) + " -> ";
        }
        chain += pos_text(w.chain.binders[i]);
    }
    out << "witness_chain: " << chain << "\n";
}

struct Options {
    std::string input;
    std::string strategy = "reg+";
    size_t depth = 8;
    ExploreBudget budget;
    bool no_pump = false;
    std::string dot_file;
    std::string out_file;
    std::string system = "reg0+";
    std::string root;
};

int do_analyze(const Options& opt, std::ostream& out) {
    Input in = load(opt.input);
    out << "kind: " << (in.is_system ? "system" : "term") << "\n";
    bool pump = !opt.no_pump;
    auto reg = is_regular(*in.handle, opt.budget, pump);
    out << "regular: "
        << (reg.verdict == Verdict::Finite
                ? "yes"
                : reg.verdict == Verdict::Infinite ? "no" : "unknown")
        << "\n";
    if (reg.verdict == Verdict::Finite)
        out << "reg_states: " << reg.state_count << "\n";
    auto sreg = is_strongly_regular(*in.handle, opt.budget, pump);
    out << "strongly_regular: "
        << (sreg.verdict == Verdict::Finite
                ? "yes"
                : sreg.verdict == Verdict::Infinite ? "no" : "unknown")
        << "\n";
    if (sreg.verdict == Verdict::Finite)
        out << "reg_plus_states: " << sreg.state_count << "\n";
    MaxChainResult mc = max_chain_length(*in.handle, opt.budget);
    out << "max_chain: "
        << (mc.verdict == Verdict::Finite
                ? std::to_string(mc.max_length)
                : mc.verdict == Verdict::Infinite ? "infinite" : "unknown")
        << "\n";
    if (mc.witness) print_witness(out, *mc.witness);
    bool unknown = reg.verdict == Verdict::BudgetExhausted ||
                   sreg.verdict == Verdict::BudgetExhausted ||
                   mc.verdict == Verdict::BudgetExhausted;
    return unknown ? 2 : 0;
}

int do_parse(const Options& opt, std::ostream& out) {
    std::string text = read_input(opt.input);
    if (looks_like_system(text)) {
        SystemPtr s = parse_regular_system(text);
        out << "kind: system\n";
        out << "parsed: " << s->pretty() << "\n";
    } else {
        TermPtr t = parse_lambda_mu(text);
        out << "kind: term\n";
        out << "parsed: " << pretty(t) << "\n";
    }
    return 0;
}

int do_unfold(const Options& opt, std::ostream& out) {
    Input in = load(opt.input);
    out << "depth: " << opt.depth << "\n";
    out << "unfolded: " << pretty(in.handle->truncate(opt.depth)) << "\n";
    return 0;
}

int do_subterms(const Options& opt, std::ostream& out) {
    Input in = load(opt.input);
    Strategy strat = opt.strategy == "reg" ? Strategy::Reg : Strategy::RegPlus;
    TransitionGraph g = explore(*in.handle, strat, opt.budget, !opt.no_pump);
    out << "strategy: " << opt.strategy << "\n";
    out << "verdict: " << verdict_text(g.verdict) << "\n";
    out << "states: " << g.states.size() << "\n";
    for (size_t i = 0; i < g.states.size(); ++i)
        out << "state " << i << ": " << pretty(g.states[i]) << "\n";
    for (size_t i = 0; i < g.states.size(); ++i)
        for (auto& e : g.edges[i])
            out << "edge: " << i << " -> " << e.target << " " << label_name(e.label)
                << "\n";
    if (g.witness) {
        out << "pump_u: " << pretty(g.states[static_cast<size_t>(g.witness->u)])
            << "\n";
        out << "pump_v: " << pretty(g.states[static_cast<size_t>(g.witness->v)])
            << "\n";
    }
    if (!opt.dot_file.empty()) write_file(opt.dot_file, emit_dot(g), out);
    return g.verdict == Verdict::BudgetExhausted ? 2 : 0;
}

int do_chains(const Options& opt, std::ostream& out) {
    Input in = load(opt.input);
    ChainRelations rel = binding_capturing_relations(*in.handle, opt.depth,
                                                     opt.budget.max_states);
    out << "depth: " << opt.depth << "\n";
    for (auto& [p, q] : rel.binds)
        out << "binds: (" << pos_text(p) << ", " << pos_text(q) << ")\n";
    for (auto& [q, p] : rel.capture)
        out << "capture: (" << pos_text(q) << ", " << pos_text(p) << ")\n";
    MaxChainResult mc = max_chain_length(*in.handle, opt.budget);
    out << "max_chain: "
        << (mc.verdict == Verdict::Finite
                ? std::to_string(mc.max_length)
                : mc.verdict == Verdict::Infinite ? "infinite" : "unknown")
        << "\n";
    if (mc.witness) print_witness(out, *mc.witness);
    return mc.verdict == Verdict::BudgetExhausted ? 2 : 0;
}

int do_derive(const Options& opt, std::ostream& out) {
    Input in = load(opt.input);
    auto sys = deriv_system_of(opt.system);
    if (!sys) throw std::runtime_error("unknown derivation system " + opt.system);
    Derivation d;
    try {
        d = build_derivation(in.handle, *sys, opt.budget);
    } catch (const NotRegularError& e) {
        out << "error: " << e.what() << "\n";
        return std::string(e.what()).find("within budget") != std::string::npos ? 2
                                                                                : 1;
    }
    out << "system: " << deriv_system_name(*sys) << "\n";
    out << "nodes: " << d.root->node_count() << "\n";
    if (!opt.out_file.empty()) write_file(opt.out_file, format_derivation(d), out);
    return 0;
}

int do_check_derivation(const Options& opt, std::ostream& out) {
    std::ifstream f(opt.input);
    if (!f.good()) throw std::runtime_error("cannot read " + opt.input);
    std::ostringstream os;
    os << f.rdbuf();
    auto sys = deriv_system_of(opt.system);
    if (!sys) throw std::runtime_error("unknown derivation system " + opt.system);
    Derivation d = parse_derivation(os.str(), *sys);
    std::optional<PrefixedState> root;
    if (!opt.root.empty()) {
        PrefixedState r;
        if (opt.root[0] == '(') {
            // full formula syntax "(xs) body"
            size_t close = opt.root.find(')');
            if (close == std::string::npos)
                throw std::runtime_error("bad --root formula");
            std::istringstream names(opt.root.substr(1, close - 1));
            std::string n;
            while (names >> n) r.prefix.push_back(n);
            r.body = parse_term_in_context(opt.root.substr(close + 1),
                                           d.source_system.get(), r.prefix);
        } else {
            r.body = parse_term_in_context(opt.root, d.source_system.get(), {});
        }
        validate_state(r);
        root = r;
    }
    CheckResult res = check_derivation(d, root);
    out << "valid: " << (res.valid ? "yes" : "no") << "\n";
    if (!res.valid) {
        out << "reason: " << res.reason << "\n";
        std::string path;
        for (size_t i : res.node_path) {
            if (!path.empty()) path += '.';
            path += std::to_string(i);
        }
        out << "node_path: " << (path.empty() ? "root" : path) << "\n";
    }
    return res.valid ? 0 : 1;
}

int do_express(const Options& opt, std::ostream& out) {
    Input in = load(opt.input);
    auto sr = is_strongly_regular(*in.handle, opt.budget, !opt.no_pump);
    if (sr.verdict == Verdict::BudgetExhausted) {
        out << "strongly_regular: unknown\n";
        return 2;
    }
    if (sr.verdict == Verdict::Infinite) {
        out << "strongly_regular: no\n";
        InfiniteChainResult ch = has_infinite_chain(*in.handle, opt.budget);
        if (ch.witness) print_witness(out, *ch.witness);
        return 1;
    }
    out << "strongly_regular: yes\n";
    TermPtr m = extract_mu_term(in.handle, opt.budget);
    out << "mu_term: " << pretty(m) << "\n";
    return 0;
}

int do_roundtrip(const Options& opt, std::ostream& out) {
    Input in = load(opt.input);
    auto sr = is_strongly_regular(*in.handle, opt.budget, !opt.no_pump);
    if (sr.verdict == Verdict::BudgetExhausted) {
        out << "strongly_regular: unknown\n";
        return 2;
    }
    if (sr.verdict == Verdict::Infinite) {
        out << "strongly_regular: no\n";
        return 1;
    }
    TermPtr m = extract_mu_term(in.handle, opt.budget);
    out << "mu_term: " << pretty(m) << "\n";
    bool ok = verify_expresses(m, in.handle, opt.depth);
    out << "depth: " << opt.depth << "\n";
    out << "verified: " << (ok ? "true" : "false") << "\n";
    return ok ? 0 : 1;
}

} // namespace

std::string emit_dot(const TransitionGraph& g) {
    std::ostringstream os;
    os << "digraph subterms {\n";
    os << "  rankdir=LR;\n";
    for (size_t i = 0; i < g.states.size(); ++i) {
        std::string label = pretty(g.states[i]);
        std::string esc;
        for (char c : label) {
            if (c == '"' || c == '\\') esc += '\\';
            esc += c;
        }
        os << "  n" << i << " [label=\"" << esc << "\"];\n";
    }
    for (size_t i = 0; i < g.states.size(); ++i) {
        for (auto& e : g.edges[i]) {
            const char* lbl = e.label == RuleLabel::Lam ? "\xce\xbb"
                              : e.label == RuleLabel::Del ? "del"
                                                          : label_name(e.label);
            os << "  n" << i << " -> n" << e.target << " [label=\"" << lbl
               << "\"];\n";
        }
    }
    os << "}\n";
    return os.str();
}

int run_cli(const std::vector<std::string>& args, std::ostream& out) {
    CLI::App app{"analyzer for finitely represented infinite lambda-terms"};
    app.require_subcommand(1);

    Options opt;
    if (const char* env = std::getenv("CYCLAM_BUDGET"))
        opt.budget.max_states = static_cast<size_t>(std::strtoull(env, nullptr, 10));

    auto add_common = [&](CLI::App* cmd, bool with_input = true) {
        if (with_input)
            cmd->add_option("input", opt.input,
                            "input file, inline source text, or - for stdin")
                ->required();
        cmd->add_option("--max-states", opt.budget.max_states,
                        "exploration state budget");
        cmd->add_option("--max-prefix", opt.budget.max_prefix,
                        "abstraction prefix budget");
        cmd->add_flag("--no-pump", opt.no_pump,
                      "disable the infinite-state pump rule");
    };

    CLI::App* parse_cmd = app.add_subcommand("parse", "parse and echo the input");
    add_common(parse_cmd);

    CLI::App* unfold_cmd =
        app.add_subcommand("unfold", "truncated unfolding of the input");
    add_common(unfold_cmd);
    unfold_cmd->add_option("--depth", opt.depth, "truncation depth");

    CLI::App* analyze_cmd =
        app.add_subcommand("analyze", "regularity, strong regularity, chains");
    add_common(analyze_cmd);

    CLI::App* subterms_cmd =
        app.add_subcommand("subterms", "explore generated subterms");
    add_common(subterms_cmd);
    subterms_cmd->add_option("--strategy", opt.strategy, "reg or reg+")
        ->check(CLI::IsMember({"reg", "reg+"}));
    subterms_cmd->add_option("--dot", opt.dot_file, "write DOT graph to file");

    CLI::App* chains_cmd =
        app.add_subcommand("chains", "binding-capturing relations and chains");
    add_common(chains_cmd);
    chains_cmd->add_option("--max-depth", opt.depth,
                           "position length bound for relations");

    CLI::App* derive_cmd =
        app.add_subcommand("derive", "build a closed derivation");
    add_common(derive_cmd);
    derive_cmd->add_option("--system", opt.system, "reg, reg+, reg0+ or expr");
    derive_cmd->add_option("--out", opt.out_file,
                           "write the derivation to file (- for stdout)");

    CLI::App* check_cmd =
        app.add_subcommand("check-derivation", "check a derivation file");
    check_cmd->add_option("file", opt.input, "derivation file")->required();
    check_cmd->add_option("--system", opt.system, "reg, reg+, reg0+ or expr");
    check_cmd->add_option("--root", opt.root, "expected root formula");

    CLI::App* express_cmd =
        app.add_subcommand("express", "extract the expressing mu-term");
    add_common(express_cmd);

    CLI::App* roundtrip_cmd = app.add_subcommand(
        "roundtrip", "extract a mu-term and verify it by unfolding");
    add_common(roundtrip_cmd);
    CLI::Option* rt_depth =
        roundtrip_cmd->add_option("--depth", opt.depth, "verification depth");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
        if (roundtrip_cmd->parsed() && rt_depth->count() == 0) opt.depth = 20;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            // --help
            out << app.help();
            return 0;
        }
        out << "error: " << e.what() << "\n";
        return 3;
    }

    try {
        if (parse_cmd->parsed()) return do_parse(opt, out);
        if (unfold_cmd->parsed()) return do_unfold(opt, out);
        if (analyze_cmd->parsed()) return do_analyze(opt, out);
        if (subterms_cmd->parsed()) return do_subterms(opt, out);
        if (chains_cmd->parsed()) return do_chains(opt, out);
        if (derive_cmd->parsed()) return do_derive(opt, out);
        if (check_cmd->parsed()) return do_check_derivation(opt, out);
        if (express_cmd->parsed()) return do_express(opt, out);
        if (roundtrip_cmd->parsed()) return do_roundtrip(opt, out);
    } catch (const ParseError& e) {
        out << "error: " << e.what() << "\n";
        if (e.line > 0) out << "location: " << e.line << ":" << e.col << "\n";
        return 3;
    } catch (const UnguardedMuError& e) {
        out << "error: " << e.what() << "\n";
        return 3;
    } catch (const UnproductiveError& e) {
        out << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        out << "error: " << e.what() << "\n";
        return 3;
    }
    out << "error: no command\n";
    return 3;
}

} // namespace cyclam
