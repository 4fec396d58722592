#include <doctest.h>

#include <algorithm>
#include <map>

#include "cmin/iface.hpp"
#include "cmin/oracle.hpp"
#include "cmin/refine.hpp"

using namespace cmin;

TEST_SUITE_BEGIN("iface");

namespace {

mvalue iv(long long x) { return mvalue(big_int(x)); }

std::vector<std::uint32_t> label_ids(std::initializer_list<std::uint32_t> ids) {
    return std::vector<std::uint32_t>(ids);
}

} // namespace

TEST_CASE("init per interface") {
    // powerset: three unit-labelled edges
    auto pow = make_pow_iface();
    std::vector<edge> out3 = {{1, 0}, {2, 0}, {3, 0}};
    weight w = pow->init(0, out3);
    CHECK(pow->weight_equal(w, weight(pow_weight{false, 3})));

    // monoid over (N,max): labels {3, 5}
    std::vector<mvalue> pool = {iv(3), iv(5)};
    auto mon = make_monoid_iface(descriptor(monoid_id::nat_max), &pool);
    std::vector<edge> out2 = {{1, 0}, {2, 1}};
    weight mw = mon->init(0, out2);
    const auto& got = std::get<mon_weight>(mw);
    CHECK(got.outside == iv(0));
    CHECK(got.inside.entries() ==
          std::vector<std::pair<mvalue, std::uint64_t>>{{iv(3), 1}, {iv(5), 1}});

    // group over Z: labels {2, -2} cancel
    std::vector<mvalue> zpool = {iv(2), iv(-2)};
    auto grp = make_group_iface(group_view(descriptor(monoid_id::int_add)), &zpool);
    weight gw = grp->init(0, out2);
    CHECK(grp->weight_equal(gw, weight(group_weight{iv(0), iv(0)})));

    // polynomial: all positions inside
    auto poly = make_poly_iface();
    weight yw = poly->init(0, out2);
    CHECK(std::get<poly_weight>(yw).colors == std::vector<std::uint8_t>{1, 1});
}

TEST_CASE("monoid update over (Z,+) follows the bag formula") {
    std::vector<mvalue> pool = {iv(1), iv(2)};
    auto mon = make_monoid_iface(descriptor(monoid_id::int_add), &pool);

    sum_bag inside(descriptor(monoid_id::int_add));
    inside.insert(iv(1), 2);
    inside.insert(iv(2), 1);
    weight w = mon_weight{iv(0), std::move(inside)};

    update_result r = mon->update(label_ids({0, 0}), std::move(w)); // two copies of 1

    const auto& sub = std::get<mon_weight>(r.to_sub);
    CHECK(sub.outside == iv(2));
    CHECK(sub.inside.entries() ==
          std::vector<std::pair<mvalue, std::uint64_t>>{{iv(1), 2}});

    const auto& rest = std::get<mon_weight>(r.to_rest);
    CHECK(rest.outside == iv(2));
    CHECK(rest.inside.entries() ==
          std::vector<std::pair<mvalue, std::uint64_t>>{{iv(2), 1}});

    std::string f3 = "m";
    iv(0).encode(f3);
    iv(2).encode(f3);
    iv(2).encode(f3);
    CHECK(r.f3 == f3);
}

TEST_CASE("monoid update over (N,max)") {
    std::vector<mvalue> pool = {iv(3), iv(5)};
    auto mon = make_monoid_iface(descriptor(monoid_id::nat_max), &pool);

    sum_bag inside(descriptor(monoid_id::nat_max));
    inside.insert(iv(3), 1);
    inside.insert(iv(5), 1);
    weight w = mon_weight{iv(0), std::move(inside)};

    update_result r = mon->update(label_ids({0}), std::move(w)); // the label 3

    const auto& sub = std::get<mon_weight>(r.to_sub);
    CHECK(sub.outside == iv(5));
    CHECK(sub.inside.entries() ==
          std::vector<std::pair<mvalue, std::uint64_t>>{{iv(3), 1}});
    const auto& rest = std::get<mon_weight>(r.to_rest);
    CHECK(rest.outside == iv(3));
    CHECK(rest.inside.entries() ==
          std::vector<std::pair<mvalue, std::uint64_t>>{{iv(5), 1}});

    std::string f3 = "m";
    iv(0).encode(f3);
    iv(5).encode(f3);
    iv(3).encode(f3);
    CHECK(r.f3 == f3);
}

TEST_CASE("powerset update: t = {a,b,c}, B = {a,b}, S = {a}") {
    auto pow = make_pow_iface();
    weight w = pow_weight{true, 2}; // one edge out of B, two inside
    update_result r = pow->update(label_ids({0}), std::move(w));
    CHECK(pow->weight_equal(r.to_sub, weight(pow_weight{true, 1})));
    CHECK(pow->weight_equal(r.to_rest, weight(pow_weight{true, 1})));
    std::string f3 = "p";
    f3 += '\x01';
    f3 += '\x01';
    f3 += '\x01';
    CHECK(r.f3 == f3);
}

TEST_CASE("empty update is stable and matches f3_empty") {
    std::vector<mvalue> pool = {iv(4), iv(9)};
    std::vector<std::unique_ptr<refinement_iface>> ifaces;
    ifaces.push_back(make_pow_iface());
    ifaces.push_back(make_bag_iface());
    ifaces.push_back(make_poly_iface());
    ifaces.push_back(make_group_iface(group_view(descriptor(monoid_id::int_add)), &pool));
    ifaces.push_back(make_monoid_iface(descriptor(monoid_id::nat_max), &pool));

    std::vector<edge> edges = {{0, 0}, {1, 1}, {2, 0}};
    for (const auto& f : ifaces) {
        weight w = f->init(0, edges);
        weight w2 = f->clone(w);
        std::string empty_f3 = f->f3_empty(w);
        update_result r = f->update({}, std::move(w));
        CHECK(f->weight_equal(r.to_rest, w2));
        CHECK(r.f3 == empty_f3);
    }
}

TEST_CASE("coherence spot checks (full suite in acceptance)") {
    for (iface_config cfg : all_iface_configs()) {
        coherence_report rep = check_coherence(cfg, 200, 2024);
        CAPTURE(iface_config_name(cfg));
        CHECK(rep.ok());
        if (!rep.ok())
            MESSAGE(rep.first_failure);
    }
}

namespace {

// w(B) is reachable from init through one update along the labels into B.
weight weight_of_block(const refinement_iface& f, std::span<const edge> edges,
                       const std::vector<bool>& in_b) {
    weight wx = f.init(0, edges);
    std::vector<std::uint32_t> labels;
    for (const edge& e : edges)
        if (in_b[e.target])
            labels.push_back(e.label);
    update_result r = f.update(labels, std::move(wx));
    return std::move(r.to_sub);
}

} // namespace

TEST_CASE("group and generic monoid induce the same F3 grouping over Z") {
    rng rand(31);
    std::vector<mvalue> pool = {iv(1), iv(-1), iv(2), iv(-2), iv(3)};
    auto grp = make_group_iface(group_view(descriptor(monoid_id::int_add)), &pool);
    auto mon = make_monoid_iface(descriptor(monoid_id::int_add), &pool);

    for (int round = 0; round < 100; ++round) {
        std::uint32_t nx = 6;
        std::vector<bool> in_b(nx, false), in_s(nx, false);
        for (std::uint32_t x = 0; x < nx; ++x) {
            switch (rand.below(3)) {
            case 0: break;
            case 1: in_b[x] = true; break;
            default: in_b[x] = in_s[x] = true; break;
            }
        }
        std::vector<std::vector<edge>> states;
        for (int s = 0; s < 8; ++s) {
            std::vector<edge> edges;
            for (std::uint64_t i = 0, k = rand.below(6); i < k; ++i)
                edges.push_back({static_cast<std::uint32_t>(rand.below(nx)),
                                 static_cast<std::uint32_t>(rand.below(pool.size()))});
            states.push_back(std::move(edges));
        }
        auto grouping = [&](const refinement_iface& f) {
            std::map<std::string, std::vector<int>> groups;
            for (int s = 0; s < 8; ++s) {
                weight wb = weight_of_block(f, states[s], in_b);
                std::vector<std::uint32_t> labels;
                for (const edge& e : states[s])
                    if (in_s[e.target])
                        labels.push_back(e.label);
                update_result r = f.update(labels, std::move(wb));
                groups[r.f3].push_back(s);
            }
            std::vector<std::vector<int>> out;
            for (auto& [k, v] : groups)
                out.push_back(v);
            std::sort(out.begin(), out.end());
            return out;
        };
        CHECK(grouping(*grp) == grouping(*mon));
    }
}

TEST_CASE("observe aggregates like the functor on colourings") {
    // weighted: equal sums into one colour class observe equally
    functor_term t = parse_functor("R^X");
    symbolic_coalgebra s =
        parse_coalgebra(t, "x: {y: 0.5, z: 0.5}\nw: {y: 1}\ny: {}\nz: {}");
    encoded_coalgebra e = flatten(s, plan_decomposition(t));
    auto ifaces = build_interfaces(e);
    std::vector<std::uint32_t> colors = {9, 9, 5, 5}; // y ~ z
    CHECK(ifaces[0]->observe(e, 0, colors) == ifaces[0]->observe(e, 1, colors));
    std::vector<std::uint32_t> split_colors = {9, 9, 5, 6};
    CHECK(ifaces[0]->observe(e, 0, split_colors) != ifaces[0]->observe(e, 1, split_colors));

    // powerset collapses duplicates
    functor_term p = parse_functor("P X");
    symbolic_coalgebra sp = parse_coalgebra(p, "x: {y, z}\nw: {y}\ny: {}\nz: {}");
    encoded_coalgebra ep = flatten(sp, plan_decomposition(p));
    auto pifaces = build_interfaces(ep);
    CHECK(pifaces[0]->observe(ep, 0, colors) == pifaces[0]->observe(ep, 1, colors));

    // (N,max) aggregation: {3,5} vs {5} under one colour
    functor_term m = parse_functor("(N,max)^X");
    symbolic_coalgebra sm = parse_coalgebra(m, "x: {y: 3, z: 5}\nw: {y: 5}\ny: {}\nz: {}");
    encoded_coalgebra em = flatten(sm, plan_decomposition(m));
    auto mifaces = build_interfaces(em);
    CHECK(mifaces[0]->observe(em, 0, colors) == mifaces[0]->observe(em, 1, colors));
}

TEST_CASE("observe is equivariant under colour permutation") {
    const char* functors[] = {"P X", "B X", "Z^X", "(N,max)^X", "2 x X^{a,b}"};
    rng rand(77);
    for (const char* fstr : functors) {
        functor_term t = parse_functor(fstr);
        random_opts opts;
        opts.seed = 123;
        symbolic_coalgebra s = random_coalgebra(t, 10, opts);
        encoded_coalgebra e = flatten(s, plan_decomposition(t));
        auto ifaces = build_interfaces(e);

        std::vector<std::uint32_t> colors(e.num_states);
        for (auto& c : colors)
            c = static_cast<std::uint32_t>(rand.below(4));
        std::vector<std::uint32_t> perm = {7, 2, 9, 4}; // injective relabelling
        std::vector<std::uint32_t> permuted(e.num_states);
        for (std::uint32_t x = 0; x < e.num_states; ++x)
            permuted[x] = perm[colors[x]];

        // equal observations stay equal, distinct stay distinct
        for (std::uint32_t a = 0; a < e.num_states; ++a)
            for (std::uint32_t b = a + 1; b < e.num_states; ++b) {
                if (e.sort_of[a] != e.sort_of[b])
                    continue;
                const auto& f = *ifaces[e.sort_of[a]];
                CHECK((f.observe(e, a, colors) == f.observe(e, b, colors)) ==
                      (f.observe(e, a, permuted) == f.observe(e, b, permuted)));
            }
    }
}

TEST_SUITE_END();
