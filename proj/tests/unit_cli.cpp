#include "doctest.h"

#include "cyclam/cli.hpp"
#include "cyclam/parse.hpp"
#include "cyclam/unfold.hpp"

#include <cstdlib>
#include <sstream>

using namespace cyclam;

namespace {

const char* kT = "T() = \\x.\\y. ((T()) y) x ; start T()";
const char* kU = "R(x) = \\y. (R(y)) x ; start \\x. R(x)";

struct Run {
    int code;
    std::string out;
};

Run cli(std::vector<std::string> args) {
    std::ostringstream os;
    int code = run_cli(args, os);
    return {code, os.str()};
}

bool has_line(const std::string& text, const std::string& line) {
    std::istringstream in(text);
    std::string l;
    while (std::getline(in, l))
        if (l == line) return true;
    return false;
}

} // namespace

TEST_CASE("analyze reports the pinned counts") {
    Run t = cli({"analyze", kT});
    CHECK(t.code == 0);
    CHECK(has_line(t.out, "regular: yes"));
    CHECK(has_line(t.out, "strongly_regular: yes"));
    CHECK(has_line(t.out, "reg_plus_states: 9"));
    CHECK(has_line(t.out, "max_chain: 1"));

    Run u = cli({"analyze", kU});
    CHECK(u.code == 0);
    CHECK(has_line(u.out, "regular: yes"));
    CHECK(has_line(u.out, "reg_states: 6"));
    CHECK(has_line(u.out, "strongly_regular: no"));
    CHECK(has_line(u.out, "max_chain: infinite"));
}

TEST_CASE("exit codes") {
    CHECK(cli({"parse", "\\x.y"}).code == 3);
    CHECK(cli({"parse", "\\x.x"}).code == 0);
    CHECK(cli({"express", kU}).code == 1);
    CHECK(cli({"express", kT}).code == 0);
    CHECK(cli({"unfold", "--depth", "3", "mu x. x"}).code == 3);
    CHECK(cli({"subterms", "--strategy", "reg+", "--no-pump", "--max-states",
               "100", kU})
              .code == 2);
    CHECK(cli({"nonsense"}).code == 3);
}

TEST_CASE("express prints the extracted term and witnesses") {
    Run t = cli({"express", kT});
    CHECK(has_line(t.out, "strongly_regular: yes"));
    // The term is alpha-equivalent to the expected one.
    std::istringstream in(t.out);
    std::string line, mu;
    while (std::getline(in, line))
        if (line.rfind("mu_term: ", 0) == 0) mu = line.substr(9);
    REQUIRE(!mu.empty());
    CHECK(alpha_eq_terms(parse_lambda_mu(mu),
                         parse_lambda_mu("mu f. \\x. \\y. (f y) x")));

    Run u = cli({"express", kU});
    CHECK(has_line(u.out, "strongly_regular: no"));
    CHECK(u.out.find("witness_cycle: ") != std::string::npos);
    CHECK(u.out.find("witness_chain: ") != std::string::npos);
}

TEST_CASE("roundtrip verb") {
    Run r = cli({"roundtrip", "--depth", "12", kT});
    CHECK(r.code == 0);
    CHECK(has_line(r.out, "verified: true"));
    CHECK(has_line(r.out, "depth: 12"));
}

TEST_CASE("dot output") {
    SystemPtr t = parse_regular_system(kT);
    HandlePtr th = handle_of(t);
    TransitionGraph g = explore(*th, Strategy::RegPlus);
    std::string dot = emit_dot(g);
    // 9 nodes, edge labels among @0/@1/lambda/S.
    size_t nodes = 0;
    std::istringstream in(dot);
    std::string line;
    bool saw_del = false;
    while (std::getline(in, line)) {
        if (line.find("[label=") != std::string::npos &&
            line.find("->") == std::string::npos)
            ++nodes;
        if (line.find("\"del\"") != std::string::npos) saw_del = true;
    }
    CHECK(nodes == 9);
    CHECK_FALSE(saw_del);

    HandlePtr uh = handle_of(parse_regular_system(kU));
    TransitionGraph ug = explore(*uh, Strategy::Reg);
    std::string udot = emit_dot(ug);
    size_t unodes = 0, udels = 0;
    std::istringstream uin(udot);
    while (std::getline(uin, line)) {
        if (line.find("[label=") != std::string::npos &&
            line.find("->") == std::string::npos)
            ++unodes;
        if (line.find("\"del\"") != std::string::npos) ++udels;
    }
    CHECK(unodes == 6);
    CHECK(udels == 2);

    // Degenerate single-state graph renders as a one-node digraph.
    TransitionGraph one;
    PrefixedState root;
    root.body = parse_lambda_mu("\\x.x");
    one.states.push_back(root);
    one.edges.emplace_back();
    one.parent.push_back(-1);
    one.parent_edge.push_back({RuleLabel::Lam, -1, -1});
    std::string onedot = emit_dot(one);
    CHECK(onedot.find("n0") != std::string::npos);
    CHECK(onedot.find("n1") == std::string::npos);
    CHECK(onedot.find("->") == std::string::npos);
}

TEST_CASE("reports are deterministic") {
    for (auto verb : {"analyze", "subterms", "chains", "express"}) {
        Run a = cli({verb, kU});
        Run b = cli({verb, kU});
        CHECK(a.out == b.out);
        CHECK(a.code == b.code);
    }
}

TEST_CASE("budget environment variable") {
    setenv("CYCLAM_BUDGET", "2", 1);
    Run r = cli({"analyze", kT});
    unsetenv("CYCLAM_BUDGET");
    CHECK(r.code == 2);
    CHECK(has_line(r.out, "strongly_regular: unknown"));
    // Flags override the environment.
    setenv("CYCLAM_BUDGET", "2", 1);
    Run s = cli({"analyze", "--max-states", "10000", kT});
    unsetenv("CYCLAM_BUDGET");
    CHECK(s.code == 0);
}

TEST_CASE("derive and check-derivation work over files") {
    std::string dir = FIXTURE_DIR;
    Run chk = cli({"check-derivation", dir + "/u_reg.deriv", "--system", "reg"});
    CHECK(chk.code == 0);
    CHECK(has_line(chk.out, "valid: yes"));

    Run bad = cli({"check-derivation", dir + "/t_regplus_low_fix.deriv",
                   "--system", "reg0+"});
    CHECK(bad.code == 1);
    CHECK(has_line(bad.out, "valid: no"));
    CHECK(has_line(bad.out, "reason: prefix condition"));

    Run root_ok = cli({"check-derivation", dir + "/t_reg0plus.deriv", "--system",
                       "reg0+", "--root", "T()"});
    CHECK(root_ok.code == 0);
    Run root_bad = cli({"check-derivation", dir + "/t_reg0plus.deriv", "--system",
                        "reg0+", "--root", "\\x.x"});
    CHECK(root_bad.code == 1);
    CHECK(has_line(root_bad.out, "reason: root mismatch"));
}
