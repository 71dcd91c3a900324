#include "doctest.h"

#include "cyclam/parse.hpp"
#include "cyclam/unfold.hpp"
#include "gen.hpp"
#include "oracles.hpp"

#include <random>

using namespace cyclam;

TEST_CASE("unfold_step contracts outermost redexes in parallel") {
    TermPtr t = parse_lambda_mu("mu f. \\x. \\y. (f y) x");
    TermPtr once = unfold_step(t);
    TermPtr expect =
        parse_lambda_mu("\\x. \\y. ((mu f. \\x. \\y. (f y) x) y) x");
    CHECK(alpha_eq_terms(once, expect));

    TermPtr id = parse_lambda_mu("\\x.x");
    CHECK(alpha_eq_terms(unfold_step(id), id));

    TermPtr loop = parse_lambda_mu("mu x. x");
    CHECK(alpha_eq_terms(unfold_step(loop), loop));

    // Two parallel outermost redexes, inner ones untouched this step.
    TermPtr two = parse_lambda_mu("(mu f. \\x. f) (mu g. \\y. g)");
    TermPtr expect2 =
        parse_lambda_mu("(\\x. mu f. \\x. f) (\\y. mu g. \\y. g)");
    CHECK(alpha_eq_terms(unfold_step(two), expect2));
}

TEST_CASE("is_mu_guarded") {
    CHECK_FALSE(is_mu_guarded(parse_lambda_mu("mu x. x")));
    CHECK(is_mu_guarded(parse_lambda_mu("mu f. \\x. f")));
    CHECK_FALSE(is_mu_guarded(parse_lambda_mu("mu f. mu g. f")));
    CHECK_FALSE(is_mu_guarded(parse_lambda_mu("mu f. mu g. g")));
    CHECK(is_mu_guarded(parse_lambda_mu("\\h. mu f. mu g. h")));
    CHECK(is_mu_guarded(parse_lambda_mu("mu f. (\\x. x) f")));
    CHECK_FALSE(is_mu_guarded(parse_lambda_mu("\\z. z (mu a. mu b. a)")));
    CHECK(is_mu_guarded(parse_lambda_mu("\\x.x")));
}

TEST_CASE("is_mu_guarded agrees with the unfolding oracle") {
    std::mt19937 rng(101);
    size_t guarded = 0, unguarded = 0;
    for (int i = 0; i < 400; ++i) {
        TermPtr t = testgen::random_mu_term(rng, 25);
        bool fast = is_mu_guarded(t);
        bool slow = testoracle::guarded_by_unfolding(t);
        CHECK(fast == slow);
        (fast ? guarded : unguarded) += 1;
    }
    // The corpus must exercise both outcomes.
    CHECK(guarded > 20);
    CHECK(unguarded > 20);
}

TEST_CASE("unfold_to_depth") {
    TermPtr t = parse_lambda_mu("mu f. \\x. \\y. (f y) x");
    CHECK(alpha_eq_terms(unfold_to_depth(t, 2), mk_abs("x", mk_abs("y", mk_cut()))));
    CHECK(alpha_eq_terms(unfold_to_depth(parse_lambda_mu("\\x.x"), 99),
                         parse_lambda_mu("\\x.x")));
    CHECK_THROWS_AS(unfold_to_depth(parse_lambda_mu("mu x. x"), 1),
                    UnguardedMuError);
}

TEST_CASE("handle_of matches unfold_to_depth and rejects unguarded terms") {
    TermPtr t = parse_lambda_mu("mu f. \\x. \\y. (f y) x");
    HandlePtr h = handle_of(t);
    CHECK(alpha_eq_terms(h->truncate(3),
                         mk_abs("x", mk_abs("y", mk_app(mk_cut(), mk_cut())))));
    for (size_t d = 0; d <= 8; ++d)
        CHECK(alpha_eq_terms(h->truncate(d), unfold_to_depth(t, d)));

    HandlePtr id = handle_of(parse_lambda_mu("\\x.x"));
    CHECK(alpha_eq_terms(id->truncate(5), parse_lambda_mu("\\x.x")));

    CHECK_THROWS_AS(handle_of(parse_lambda_mu("mu x. x")), UnguardedMuError);
}

TEST_CASE("unfold_step preserves the infinite normal form") {
    std::mt19937 rng(202);
    for (int i = 0; i < 60; ++i) {
        TermPtr t = testgen::random_guarded_mu_term(rng, 20);
        TermPtr stepped = unfold_step(t);
        REQUIRE(is_mu_guarded(stepped));
        HandlePtr a = handle_of(t);
        HandlePtr b = handle_of(stepped);
        for (size_t d : {1u, 4u, 10u})
            CHECK(agree_to_depth(*a, *b, d));
    }
}

TEST_CASE("agree_to_depth is exactly truncation agreement") {
    HandlePtr a = handle_of(parse_lambda_mu("mu f. \\x. \\y. (f y) x"));
    SystemPtr tsys = parse_regular_system("T() = \\x.\\y. ((T()) y) x ; start T()");
    SystemPtr usys = parse_regular_system("R(x) = \\y. (R(y)) x ; start \\x. R(x)");
    HandlePtr t = handle_of(tsys);
    HandlePtr u = handle_of(usys);
    CHECK(agree_to_depth(*a, *t, 20));
    // T and U agree for two constructor levels and differ at depth 3.
    CHECK(agree_to_depth(*t, *u, 3));
    CHECK_FALSE(agree_to_depth(*t, *u, 4));
    CHECK_FALSE(agree_to_depth(*a, *u, 4));
    for (size_t d = 0; d <= 6; ++d)
        CHECK(agree_to_depth(*t, *u, d) ==
              alpha_eq_terms(t->truncate(d), u->truncate(d)));
}
