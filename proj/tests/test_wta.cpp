#include <doctest.h>

#include <algorithm>
#include <set>

#include "cmin/errors.hpp"
#include "cmin/oracle.hpp"
#include "cmin/wta.hpp"

using namespace cmin;

TEST_SUITE_BEGIN("wta");

namespace {

mvalue iv(long long x) { return mvalue(big_int(x)); }

// disjoint union with renamed state copies
wta self_union(const wta& w) {
    wta u = w;
    std::uint32_t n = static_cast<std::uint32_t>(w.states.size());
    for (const auto& name : w.states) {
        u.states.push_back(name + "__copy");
    }
    for (std::uint32_t i = 0; i < n; ++i)
        u.outputs.push_back(w.outputs[i]);
    for (const auto& tr : w.transitions) {
        wta::transition t2 = tr;
        t2.target += n;
        for (auto& s : t2.sources)
            s += n;
        u.transitions.push_back(std::move(t2));
    }
    return u;
}

} // namespace

TEST_CASE("conversion of a one-transition automaton") {
    wta w;
    w.monoid = descriptor(monoid_id::int_add);
    w.signature = {{"s", 2}};
    w.states = {"x"};
    w.outputs = {w.monoid.zero()};
    w.transitions.push_back({0, {0, 0}, 0, iv(3)});

    // with outputs: a leading output-class number
    symbolic_coalgebra s = wta_to_coalgebra(w);
    CHECK(print_functor(s.term) == "N x Z^(X x X)");
    CHECK(print_coalgebra(s).find("x: (0, {(x, x): 3})") != std::string::npos);
    CHECK_NOTHROW(parse_coalgebra_file(print_coalgebra(s)));
    encoded_coalgebra e = flatten(s, plan_decomposition(s.term));
    CHECK(e.num_states == 3);
    CHECK(e.num_edges == 4);

    // ignoring outputs reproduces the bare weighted shape
    symbolic_coalgebra s2 = wta_to_coalgebra(w, true);
    CHECK(print_functor(s2.term) == "Z^(X x X)");
    encoded_coalgebra e2 = flatten(s2, plan_decomposition(s2.term));
    CHECK(e2.num_states == 2); // one original + one intermediate per transition
    CHECK(e2.num_edges == 3);  // weighted edge in, two positions out
}

TEST_CASE("without transitions, outputs alone decide equivalence") {
    wta w;
    w.monoid = descriptor(monoid_id::nat_max);
    w.signature = {{"a", 1}};
    w.states = {"x", "y", "z"};
    w.outputs = {iv(5), iv(5), iv(7)};
    CHECK(minimize_wta(w) == state_partition{{0, 1}, {2}});
    CHECK(minimize_wta(w, {.ignore_outputs = true}) == state_partition{{0, 1, 2}});
}

TEST_CASE("unary signatures give weighted word automata") {
    std::vector<wta_symbol> sig = {{"a", 1}, {"b", 1}};
    wta w = random_wta(6, sig, monoid_id::int_add, 4, 10, 3);
    CHECK(w.transitions.size() == 24);
    symbolic_coalgebra s = wta_to_coalgebra(w, true);
    encoded_coalgebra e = flatten(s, plan_decomposition(s.term));
    CHECK(e.num_edges == 2 * w.transitions.size()); // one in, one out per transition
}

TEST_CASE("symmetric states share a block") {
    wta w;
    w.monoid = descriptor(monoid_id::int_add);
    w.signature = {{"f", 1}};
    w.states = {"x", "y", "z"};
    w.outputs = {iv(1), iv(1), iv(1)};
    w.transitions.push_back({0, {2}, 0, iv(4)});
    w.transitions.push_back({0, {2}, 1, iv(4)});
    CHECK(minimize_wta(w) == state_partition{{0, 1}, {2}});
}

TEST_CASE("both monoid routes agree on cancellative weights") {
    std::vector<wta_symbol> sig = {{"f", 2}, {"g", 1}};
    for (monoid_id m : {monoid_id::nat_add, monoid_id::int_add}) {
        for (std::uint64_t seed = 1; seed <= 6; ++seed) {
            wta w = random_wta(10, sig, m, 5, 6, seed, true);
            wta_options groth, generic;
            generic.force_generic_monoid = true;
            CHECK(minimize_wta(w, groth) == minimize_wta(w, generic));
        }
    }
}

TEST_CASE("minimization agrees with the reference on random automata") {
    std::vector<wta_symbol> sig = {{"f", 2}, {"c", 0}};
    for (monoid_id m :
         {monoid_id::nat_max, monoid_id::int_add, monoid_id::word64_or}) {
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            wta w = random_wta(10, sig, m, 6, 5, seed, true);
            symbolic_coalgebra s = wta_to_coalgebra(w);
            encoded_coalgebra e = flatten(s, plan_decomposition(s.term));
            CHECK(minimize_encoded(e) == naive_minimize(e));
        }
    }
}

TEST_CASE("self-union doubles every block") {
    std::vector<wta_symbol> sig = {{"f", 2}};
    wta w = random_wta(8, sig, monoid_id::nat_max, 5, 4, 21);
    wta u = self_union(w);
    state_partition base = minimize_wta(w);
    state_partition doubled = minimize_wta(u);
    CHECK(doubled.size() == base.size());
    std::size_t total = 0;
    for (std::size_t i = 0; i < base.size(); ++i)
        total += base[i].size();
    std::size_t total2 = 0;
    for (std::size_t i = 0; i < doubled.size(); ++i) {
        total2 += doubled[i].size();
    }
    CHECK(total2 == 2 * total);
    // each doubled block contains the copy of each of its states
    std::uint32_t n = static_cast<std::uint32_t>(w.states.size());
    for (const auto& blk : doubled) {
        std::set<std::uint32_t> members(blk.begin(), blk.end());
        for (std::uint32_t x : blk)
            CHECK(members.count(x < n ? x + n : x - n) == 1);
    }
}

TEST_CASE("erasing outputs only coarsens the partition") {
    std::vector<wta_symbol> sig = {{"f", 1}, {"g", 2}};
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        wta w = random_wta(10, sig, monoid_id::nat_max, 5, 4, seed, true);
        state_partition fine = minimize_wta(w);
        state_partition coarse = minimize_wta(w, {.ignore_outputs = true});
        // every fine block lies inside one coarse block
        std::vector<std::uint32_t> coarse_of(w.states.size());
        for (std::uint32_t b = 0; b < coarse.size(); ++b)
            for (std::uint32_t x : coarse[b])
                coarse_of[x] = b;
        for (const auto& blk : fine)
            for (std::uint32_t x : blk)
                CHECK(coarse_of[x] == coarse_of[blk[0]]);
    }
}

TEST_CASE("backward bisimulation matches minimization without outputs") {
    std::vector<wta_symbol> sig = {{"f", 2}, {"g", 1}, {"c", 0}};
    for (monoid_id m : {monoid_id::nat_max, monoid_id::int_add, monoid_id::nat_add}) {
        for (std::uint64_t seed = 1; seed <= 6; ++seed) {
            wta w = random_wta(12, sig, m, 6, 5, seed, true);
            CHECK(backward_bisimulation(w) == minimize_wta(w, {.ignore_outputs = true}));
        }
    }
}

TEST_CASE("flattened edge count stays within (rank+1) per transition") {
    std::vector<wta_symbol> sig = {{"f", 2}, {"g", 1}, {"c", 0}};
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        wta w = random_wta(8, sig, monoid_id::int_add, 5, 6, seed, true);
        symbolic_coalgebra s = wta_to_coalgebra(w, true);
        encoded_coalgebra e = flatten(s, plan_decomposition(s.term));
        CHECK(e.num_edges <= (w.rank() + 1) * w.transitions.size());
        CHECK(e.num_states == w.states.size() + w.transitions.size());
    }
}

TEST_CASE("fixed-count generator") {
    std::vector<wta_symbol> sig = {{"a", 5}, {"b", 5}, {"c", 5}, {"d", 5}};
    wta w = random_wta(20, sig, monoid_id::nat_max, 50, 50, 99);
    CHECK(w.transitions.size() == 50 * 20);
    for (const auto& tr : w.transitions)
        CHECK(tr.sources.size() == 5);

    // the benchmark protocol: 50 transitions per state
    CHECK(random_wta(100, sig, monoid_id::nat_max, 50, 50, 1).transitions.size() == 5000);

    // distinct weights bounded by the pool
    std::set<std::string> weights;
    for (const auto& tr : w.transitions)
        weights.insert(tr.weight.encode());
    CHECK(weights.size() <= 50);

    // same seed, same automaton
    CHECK(print_wta(w) == print_wta(random_wta(20, sig, monoid_id::nat_max, 50, 50, 99)));

    // n = 1 with a 50-symbol signature: 50 self-structured transitions
    std::vector<wta_symbol> wide;
    for (int i = 0; i < 50; ++i)
        wide.push_back({"s" + std::to_string(i), 2});
    wta tiny = random_wta(1, wide, monoid_id::int_add, 50, 50, 5);
    CHECK(tiny.transitions.size() == 50);
    for (const auto& tr : tiny.transitions) {
        CHECK(tr.target == 0);
        CHECK(tr.sources == std::vector<std::uint32_t>{0, 0});
    }

    // only maximal-rank symbols fire unless mixed ranks are requested
    std::vector<wta_symbol> mixed = {{"lo", 1}, {"hi", 2}};
    wta max_only = random_wta(5, mixed, monoid_id::int_add, 4, 4, 8);
    for (const auto& tr : max_only.transitions)
        CHECK(tr.symbol == 1);
    wta with_lo = random_wta(5, mixed, monoid_id::int_add, 20, 4, 8, true);
    CHECK(std::any_of(with_lo.transitions.begin(), with_lo.transitions.end(),
                      [](const auto& tr) { return tr.symbol == 0; }));

    CHECK_THROWS_AS(random_wta(1, {{"f", 2}}, monoid_id::int_add, 50, 50, 1), parse_error);
}

TEST_CASE("dense generator") {
    std::vector<wta_symbol> sig8;
    for (int i = 0; i < 8; ++i)
        sig8.push_back({"u" + std::to_string(i), 1});

    CHECK(dense_random_wta(10, sig8, monoid_id::nat_max, 1.0, 1).transitions.empty());
    CHECK(dense_random_wta(10, sig8, monoid_id::nat_max, 0.0, 1).transitions.size() ==
          10 * 8 * 10);

    // expected transition volume: Binomial(100 * 800, 0.3), three-sigma band
    std::uint64_t total = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed)
        total += dense_random_wta(10, sig8, monoid_id::nat_max, 0.7, seed).transitions.size();
    double mean = 100.0 * 800.0 * 0.3;
    double sigma = std::sqrt(100.0 * 800.0 * 0.3 * 0.7);
    CHECK(static_cast<double>(total) > mean - 3 * sigma);
    CHECK(static_cast<double>(total) < mean + 3 * sigma);

    // term cap guards against combinatorial blow-up
    CHECK_THROWS_AS(dense_random_wta(100, {{"f", 5}}, monoid_id::nat_max, 0.7, 1, 1000),
                    parse_error);
}

TEST_CASE("text format round trip and errors") {
    std::vector<wta_symbol> sig = {{"f", 2}, {"g", 0}};
    wta w = random_wta(6, sig, monoid_id::nat_max, 4, 6, 17, true);
    std::string text = print_wta(w);
    CHECK(looks_like_wta(text));
    wta back = parse_wta(text);
    CHECK(print_wta(back) == text);

    CHECK_NOTHROW(parse_wta("wta Z f/2\nf(a,b) -> c : 3\nout a : -1\n"));
    CHECK_THROWS_AS(parse_wta("wta Z f/2\nh(a,b) -> c : 3\n"), parse_error);
    CHECK_THROWS_AS(parse_wta("wta Z f/2\nf(a) -> c : 3\n"), parse_error);
    CHECK_THROWS_AS(parse_wta("wta Z f/2\nf(a,b) -> c : 0\n"), parse_error);
    CHECK_THROWS_AS(parse_wta("wta Z f/2\nf(a,b) -> c : 1\nf(a,b) -> c : 2\n"), parse_error);
    CHECK_THROWS_AS(parse_wta("wta Z f/2\nout a : 1\nout a : 2\n"), parse_error);
    CHECK_THROWS_AS(parse_wta("wta 2 f/2\n"), parse_error);
    CHECK_THROWS_AS(parse_wta("wta Q f/2\n"), parse_error);

    // mutated automata either parse or raise a parse diagnostic
    rng rand(4096);
    for (int i = 0; i < 300; ++i) {
        std::string mutated = text;
        std::size_t at = rand.below(mutated.size());
        mutated[at] = static_cast<char>(32 + rand.below(95));
        try {
            parse_wta(mutated);
        } catch (const parse_error&) {
        }
    }

    // isolated states survive through the states line
    wta iso;
    iso.monoid = descriptor(monoid_id::int_add);
    iso.signature = {{"f", 1}};
    iso.states = {"alone"};
    iso.outputs = {iso.monoid.zero()};
    CHECK(parse_wta(print_wta(iso)).states == std::vector<std::string>{"alone"});
}

TEST_SUITE_END();
