#include <doctest.h>

#include <functional>

#include "cmin/errors.hpp"
#include "cmin/oracle.hpp"
#include "cmin/term.hpp"

using namespace cmin;
using nk = functor_term::node_kind;

TEST_SUITE_BEGIN("term");

TEST_CASE("parsing the example functors") {
    functor_term t = parse_functor("DX");
    CHECK(t.kind == nk::dist);
    REQUIRE(t.children.size() == 1);
    CHECK(t.children[0].kind == nk::var);

    t = parse_functor("{f,n} x X^{a,b}");
    REQUIRE(t.kind == nk::product);
    REQUIRE(t.children.size() == 2);
    CHECK(t.children[0].kind == nk::const_set);
    CHECK(t.children[0].symbols == std::vector<std::string>{"f", "n"});
    CHECK(t.children[1].kind == nk::exp);
    CHECK(t.children[1].symbols == std::vector<std::string>{"a", "b"});
    CHECK(t.children[1].children[0].kind == nk::var);

    t = parse_functor("X");
    CHECK(t.kind == nk::var);

    t = parse_functor("(N,max)^(4 x X^3)");
    REQUIRE(t.kind == nk::monoid_val);
    CHECK(t.monoid == monoid_id::nat_max);
    const functor_term& arg = t.children[0];
    REQUIRE(arg.kind == nk::product);
    CHECK(arg.children[0].kind == nk::const_set);
    CHECK(arg.children[0].symbols.size() == 4);
    CHECK(arg.children[1].kind == nk::exp);
    CHECK(arg.children[1].symbols == std::vector<std::string>{"0", "1", "2"});
}

TEST_CASE("precedence and prefix binding") {
    // ^ binds tighter than x, which binds tighter than +
    functor_term t = parse_functor("2 x X^2 + P X");
    REQUIRE(t.kind == nk::sum);
    CHECK(t.children[0].kind == nk::product);
    CHECK(t.children[1].kind == nk::pow);

    // prefixes grab their argument before any infix applies
    t = parse_functor("P X x B X");
    REQUIRE(t.kind == nk::product);
    CHECK(t.children[0].kind == nk::pow);
    CHECK(t.children[1].kind == nk::bag);

    t = parse_functor("P X^{a,b}");
    REQUIRE(t.kind == nk::exp);
    CHECK(t.children[0].kind == nk::pow);

    // monoid arguments stop before an infix operator
    t = parse_functor("Z^X x P X");
    REQUIRE(t.kind == nk::product);
    CHECK(t.children[0].kind == nk::monoid_val);

    CHECK(parse_functor("PPX") == parse_functor("P (P X)"));
    CHECK(parse_functor("N+^X").kind == nk::monoid_val);
    CHECK(parse_functor("N+^X").monoid == monoid_id::nat_add);
    CHECK(parse_functor("W64^X").monoid == monoid_id::word64_or);
    CHECK(parse_functor("N").kind == nk::const_nat);
}

TEST_CASE("parse errors carry positions") {
    CHECK_THROWS_AS(parse_functor("C^X"), parse_error);
    CHECK_THROWS_WITH_AS(parse_functor("C^X"),
                         doctest::Contains("unsupported monoid"), parse_error);
    CHECK_THROWS_AS(parse_functor("P"), parse_error);
    CHECK_THROWS_AS(parse_functor("X +"), parse_error);
    CHECK_THROWS_AS(parse_functor("X ^"), parse_error);
    CHECK_THROWS_AS(parse_functor("{a,a}"), parse_error);
    CHECK_THROWS_AS(parse_functor("{}"), parse_error);
    CHECK_THROWS_AS(parse_functor("X^0"), parse_error);
    CHECK_THROWS_AS(parse_functor("X)"), parse_error);
    CHECK_THROWS_AS(parse_functor(""), parse_error);
}

namespace {

functor_term random_term(rng& rand, int depth) {
    functor_term t;
    if (depth <= 0 || rand.below(4) == 0) {
        switch (rand.below(3)) {
        case 0: return t; // var
        case 1:
            t.kind = nk::const_set;
            for (std::uint64_t i = 0, k = 1 + rand.below(3); i < k; ++i)
                t.symbols.push_back("s" + std::to_string(i));
            return t;
        default: t.kind = nk::const_nat; return t;
        }
    }
    switch (rand.below(8)) {
    case 0: t.kind = nk::pow; break;
    case 1: t.kind = nk::bag; break;
    case 2: t.kind = nk::dist; break;
    case 3:
        t.kind = nk::monoid_val;
        t.monoid = static_cast<monoid_id>(rand.below(5)); // all but bool_or
        break;
    case 4: t.kind = nk::product; break;
    case 5: t.kind = nk::sum; break;
    case 6:
        t.kind = nk::exp;
        for (std::uint64_t i = 0, k = 1 + rand.below(3); i < k; ++i)
            t.symbols.push_back("l" + std::to_string(i));
        break;
    default: return random_term(rand, depth - 1);
    }
    std::size_t arity =
        (t.kind == nk::product || t.kind == nk::sum) ? 2 + rand.below(2) : 1;
    for (std::size_t i = 0; i < arity; ++i)
        t.children.push_back(random_term(rand, depth - 1));
    return t;
}

} // namespace

TEST_CASE("print/parse round trip") {
    CHECK(print_functor(parse_functor("DX")) == "D X");
    CHECK(print_functor(parse_functor("{f,n} x X^{a,b}")) == "{f,n} x X^{a,b}");
    CHECK(print_functor(parse_functor("(N,max)^(4 x X^3)")) == "(N,max)^(4 x X^3)");

    rng rand(5);
    for (int i = 0; i < 300; ++i) {
        functor_term t = random_term(rand, 4);
        std::string printed = print_functor(t);
        CAPTURE(printed);
        CHECK(parse_functor(printed) == t);
    }
}

namespace {

std::size_t count_basic(const functor_term& t) {
    std::size_t n = t.kind == nk::pow || t.kind == nk::bag || t.kind == nk::dist ||
                            t.kind == nk::monoid_val
                        ? 1
                        : 0;
    for (const auto& c : t.children)
        n += count_basic(c);
    return n;
}

bool has_var(const functor_term& t) {
    if (t.kind == nk::var)
        return true;
    for (const auto& c : t.children)
        if (has_var(c))
            return true;
    return false;
}

} // namespace

TEST_CASE("decomposition plans") {
    // one sort per basic functor plus the fused polynomial region
    functor_term t = parse_functor("D(N x P X x B X)");
    sort_plan plan = plan_decomposition(t);
    REQUIRE(plan.sorts.size() == 4);
    CHECK(plan.sorts[0].kind == sort_kind::dist);
    CHECK(plan.sorts[1].kind == sort_kind::poly);
    CHECK(plan.sorts[2].kind == sort_kind::pow);
    CHECK(plan.sorts[3].kind == sort_kind::bag);
    CHECK(plan.original_sort == 0);

    CHECK(plan_decomposition(parse_functor("P X")).sorts.size() == 1);
    CHECK(plan_decomposition(parse_functor("X")).sorts.size() == 1);

    sort_plan wta_plan = plan_decomposition(parse_functor("Z^(2 x X^2)"));
    REQUIRE(wta_plan.sorts.size() == 2);
    CHECK(wta_plan.sorts[0].kind == sort_kind::monoid_val);
    CHECK(wta_plan.sorts[1].kind == sort_kind::poly);

    CHECK(plan_decomposition(parse_functor("P P X")).sorts.size() == 2);
    CHECK(plan_decomposition(parse_functor("{f,n} x X^{a,b}")).sorts.size() == 1);

    CHECK_THROWS_AS(plan_decomposition(parse_functor("{a,b}")), parse_error);
    CHECK_THROWS_AS(plan_decomposition(parse_functor("N x {a,b}")), parse_error);
}

TEST_CASE("plan structure on random terms") {
    rng rand(17);
    for (int i = 0; i < 200; ++i) {
        functor_term t = random_term(rand, 4);
        if (!has_var(t)) {
            CHECK_THROWS_AS(plan_decomposition(t), parse_error);
            continue;
        }
        sort_plan plan = plan_decomposition(t);
        std::size_t poly_regions = 0;
        for (const auto& s : plan.sorts)
            if (s.kind == sort_kind::poly)
                ++poly_regions;
        // sorts = basic nodes + maximal polynomial regions
        CHECK(plan.sorts.size() == count_basic(t) + poly_regions);

        // maximality: crossing a region boundary between polynomial nodes
        // never happens (adjacent polynomial nodes share one region)
        auto is_poly_node = [](const functor_term& n) {
            return n.kind == nk::var || n.kind == nk::product || n.kind == nk::sum ||
                   n.kind == nk::exp || n.kind == nk::const_set || n.kind == nk::const_nat;
        };
        std::function<void(const functor_term&)> walk = [&](const functor_term& n) {
            std::uint32_t rn = plan.region_of(&n);
            for (const auto& c : n.children) {
                std::uint32_t rc = plan.region_of(&c);
                if (is_poly_node(n) && is_poly_node(c) && rn != sort_plan::k_direct &&
                    rc != sort_plan::k_direct)
                    CHECK(rn == rc);
                walk(c);
            }
        };
        walk(t);
    }
}

TEST_SUITE_END();
