#include "cmin/oracle.hpp"

#include <algorithm>
#include <map>

#include "cmin/errors.hpp"
#include "cmin/iface.hpp"

namespace cmin {

state_partition naive_minimize(const encoded_coalgebra& e, bool force_generic_monoid) {
    auto ifaces = build_interfaces(e, force_generic_monoid);
    std::uint32_t n = e.num_states;
    std::vector<std::uint32_t> color(e.f1_id);
    std::uint32_t colors = e.num_f1;

    for (std::uint32_t iter = 0; n > 0; ++iter) {
        CMIN_REQUIRE(iter <= n, "naive_minimize failed to stabilize within n iterations");
        std::map<std::pair<std::uint32_t, std::string>, std::uint32_t> index;
        std::vector<std::uint32_t> next(n);
        for (std::uint32_t x = 0; x < n; ++x) {
            auto key = std::make_pair(color[x], ifaces[e.sort_of[x]]->observe(e, x, color));
            auto [it, fresh] =
                index.emplace(std::move(key), static_cast<std::uint32_t>(index.size()));
            next[x] = it->second;
        }
        std::uint32_t next_colors = static_cast<std::uint32_t>(index.size());
        color.swap(next);
        if (next_colors == colors)
            break; // refining by one more step changed nothing
        colors = next_colors;
    }
    return blocks_from_coloring(color, e.num_original);
}

// ---------------------------------------------------------------------------
// Random instances

std::vector<mvalue> weight_pool(const monoid_descriptor& desc, std::uint32_t size) {
    std::vector<mvalue> pool;
    pool.reserve(size);
    for (std::uint32_t k = 1; pool.size() < size; ++k) {
        switch (desc.id) {
        case monoid_id::int_add:
            pool.push_back(mvalue(big_int(k)));
            if (pool.size() < size)
                pool.push_back(mvalue(big_int(-static_cast<int>(k))));
            break;
        case monoid_id::nat_add:
        case monoid_id::nat_max: pool.push_back(mvalue(big_int(k))); break;
        case monoid_id::rat_add:
            // dyadic, so re-emitted files keep plain decimal literals
            pool.push_back(mvalue(big_rat(big_int(k), big_int(2))));
            break;
        case monoid_id::word64_or:
            pool.push_back(mvalue(
                static_cast<std::uint64_t>(k * 0x9e3779b97f4a7c15ull | 1u)));
            break;
        case monoid_id::bool_or:
            pool.push_back(mvalue(true));
            return pool; // the only nonzero element
        }
    }
    return pool;
}

namespace {

using nk = functor_term::node_kind;
using vk = sym_value::kind;

struct generator {
    std::uint32_t n;
    const random_opts& opts;
    rng& rand;

    sym_value state_ref() {
        sym_value v;
        v.k = vk::state_ref;
        v.idx = static_cast<std::uint32_t>(rand.below(n));
        return v;
    }

    sym_value gen(const functor_term& node) {
        switch (node.kind) {
        case nk::var: return state_ref();
        case nk::product: {
            sym_value v;
            v.k = vk::tuple;
            for (const auto& c : node.children)
                v.children.push_back(gen(c));
            return v;
        }
        case nk::sum: {
            sym_value v;
            v.k = vk::inj;
            v.idx = static_cast<std::uint32_t>(rand.below(node.children.size()));
            v.children.push_back(gen(node.children[v.idx]));
            return v;
        }
        case nk::exp: {
            sym_value v;
            v.k = vk::exp_map;
            for (std::size_t i = 0; i < node.symbols.size(); ++i)
                v.children.push_back(gen(node.children[0]));
            return v;
        }
        case nk::const_set: {
            sym_value v;
            v.k = vk::const_sym;
            v.idx = static_cast<std::uint32_t>(rand.below(node.symbols.size()));
            return v;
        }
        case nk::const_nat: {
            sym_value v;
            v.k = vk::const_num;
            v.num = std::make_unique<big_int>(rand.below(std::max(1u, opts.nat_range)));
            return v;
        }
        case nk::pow:
        case nk::bag: {
            std::uint64_t k = rand.below(opts.max_fanout + 1);
            sym_value v;
            v.k = vk::collection;
            std::vector<std::string> seen;
            for (std::uint64_t i = 0; i < k; ++i) {
                sym_value c = gen(node.children[0]);
                if (node.kind == nk::pow) {
                    std::string b = value_bytes(node.children[0], c);
                    if (std::find(seen.begin(), seen.end(), b) != seen.end())
                        continue;
                    seen.push_back(std::move(b));
                }
                v.children.push_back(std::move(c));
            }
            return v;
        }
        case nk::dist: {
            std::uint64_t want = 1 + rand.below(opts.max_fanout);
            sym_value v;
            v.k = vk::weighted_map;
            std::vector<std::string> seen;
            for (std::uint64_t i = 0; i < want; ++i) {
                sym_value key = gen(node.children[0]);
                std::string b = value_bytes(node.children[0], key);
                if (std::find(seen.begin(), seen.end(), b) != seen.end())
                    continue;
                seen.push_back(std::move(b));
                v.children.push_back(std::move(key));
            }
            // exact dyadic weights summing to 1: distinct cuts of [0, 2^b]
            std::size_t parts = v.children.size();
            std::uint64_t denom_bits = 6 + rand.below(4);
            std::uint64_t denom = 1ull << denom_bits;
            std::vector<std::uint64_t> cuts{0, denom};
            while (cuts.size() < parts + 1) {
                std::uint64_t c = 1 + rand.below(denom - 1);
                if (std::find(cuts.begin(), cuts.end(), c) == cuts.end())
                    cuts.push_back(c);
            }
            std::sort(cuts.begin(), cuts.end());
            for (std::size_t i = 0; i < parts; ++i)
                v.weights.push_back(
                    mvalue(big_rat(big_int(cuts[i + 1] - cuts[i]), big_int(denom))));
            return v;
        }
        case nk::monoid_val: {
            monoid_descriptor desc = descriptor(node.monoid);
            std::vector<mvalue> pool = weight_pool(desc, opts.weight_pool);
            std::uint64_t want = rand.below(opts.max_fanout + 1);
            sym_value v;
            v.k = vk::weighted_map;
            std::vector<std::string> seen;
            for (std::uint64_t i = 0; i < want; ++i) {
                sym_value key = gen(node.children[0]);
                std::string b = value_bytes(node.children[0], key);
                if (std::find(seen.begin(), seen.end(), b) != seen.end())
                    continue;
                seen.push_back(std::move(b));
                v.children.push_back(std::move(key));
                v.weights.push_back(pool[rand.below(pool.size())]);
            }
            return v;
        }
        }
        throw internal_error("generator: unhandled node kind");
    }
};

} // namespace

symbolic_coalgebra random_coalgebra(const functor_term& t, std::uint32_t n,
                                    const random_opts& opts) {
    symbolic_coalgebra s;
    s.term = t;
    rng rand(opts.seed);
    for (std::uint32_t i = 0; i < n; ++i)
        s.state_names.push_back("s" + std::to_string(i));
    generator g{n, opts, rand};
    for (std::uint32_t i = 0; i < n; ++i)
        s.values.push_back(g.gen(t));
    return s;
}

// ---------------------------------------------------------------------------
// Coherence checking

namespace {

void put_flag(std::string& out, bool b) { out.push_back(b ? '\x01' : '\x00'); }

// A single randomly drawn encoded state over a carrier {0..nx-1}: a label
// pool, one edge list, and nested subsets S within B.
struct trial {
    std::uint32_t nx;
    std::vector<mvalue> pool;
    std::vector<edge> edges;
    std::vector<bool> in_b;
    std::vector<bool> in_s;

    std::vector<std::uint32_t> labels_into_s() const {
        std::vector<std::uint32_t> out;
        for (const edge& e : edges)
            if (in_s[e.target])
                out.push_back(e.label);
        return out;
    }
};

enum class membership { outside, rest, sub }; // C\B, B\S, S

membership where(const trial& t, std::uint32_t x) {
    if (t.in_s[x])
        return membership::sub;
    if (t.in_b[x])
        return membership::rest;
    return membership::outside;
}

struct checker {
    iface_config cfg;
    rng rand;
    std::unique_ptr<refinement_iface> iface;
    monoid_descriptor desc = descriptor(monoid_id::int_add);
    std::vector<mvalue> pool;
    bool is_group_cfg = false;

    explicit checker(iface_config c, std::uint64_t seed) : cfg(c), rand(seed) {
        switch (cfg) {
        case iface_config::pow: iface = make_pow_iface(); break;
        case iface_config::bag: iface = make_bag_iface(); break;
        case iface_config::poly: iface = make_poly_iface(); break;
        case iface_config::group_int: setup_group(monoid_id::int_add); break;
        case iface_config::group_rat: setup_group(monoid_id::rat_add); break;
        case iface_config::group_nat_groth: setup_group(monoid_id::nat_add); break;
        case iface_config::mon_int: setup_monoid(monoid_id::int_add); break;
        case iface_config::mon_nat: setup_monoid(monoid_id::nat_add); break;
        case iface_config::mon_natmax: setup_monoid(monoid_id::nat_max); break;
        case iface_config::mon_word64: setup_monoid(monoid_id::word64_or); break;
        case iface_config::mon_bool: setup_monoid(monoid_id::bool_or); break;
        }
    }

    void setup_group(monoid_id m) {
        desc = descriptor(m);
        pool = weight_pool(desc, 8);
        is_group_cfg = true;
        iface = make_group_iface(group_view(desc), &pool);
    }

    void setup_monoid(monoid_id m) {
        desc = descriptor(m);
        pool = weight_pool(desc, 8);
        iface = make_monoid_iface(desc, &pool);
    }

    trial draw() {
        trial t;
        t.nx = 1 + static_cast<std::uint32_t>(rand.below(8));
        t.pool = pool;
        std::uint32_t edges = static_cast<std::uint32_t>(rand.below(9));
        bool set_like = cfg == iface_config::pow;
        std::vector<bool> used(t.nx, false);
        for (std::uint32_t i = 0; i < edges; ++i) {
            std::uint32_t target = static_cast<std::uint32_t>(rand.below(t.nx));
            if (set_like) {
                if (used[target])
                    continue;
                used[target] = true;
            }
            std::uint32_t label = 0;
            if (is_monoidish())
                label = static_cast<std::uint32_t>(rand.below(pool.size()));
            else if (cfg == iface_config::poly)
                label = static_cast<std::uint32_t>(t.edges.size());
            t.edges.push_back({target, label});
        }
        t.in_b.assign(t.nx, false);
        t.in_s.assign(t.nx, false);
        for (std::uint32_t x = 0; x < t.nx; ++x) {
            switch (rand.below(4)) {
            case 0: break;                                   // outside B
            case 1: t.in_b[x] = true; break;                 // B \ S
            default: t.in_b[x] = t.in_s[x] = true; break;    // S
            }
        }
        return t;
    }

    bool is_monoidish() const { return is_group_cfg || static_cast<int>(cfg) >= 6; }

    // --- definitional weight maps -----------------------------------------

    weight direct_weight(const trial& t, bool full, bool rest_only) const {
        // full: w(X); rest_only: w(B\S); otherwise w(B) or w(S) via in_b/in_s
        auto inside = [&](std::uint32_t x) {
            if (full)
                return true;
            if (rest_only)
                return t.in_b[x] && !t.in_s[x];
            return t.in_b[x];
        };
        return direct_weight_pred(t, inside);
    }

    template <class Pred>
    weight direct_weight_pred(const trial& t, Pred inside) const {
        switch (cfg) {
        case iface_config::pow: {
            bool outside = false;
            std::uint64_t cnt = 0;
            for (const edge& e : t.edges) {
                if (inside(e.target))
                    ++cnt;
                else
                    outside = true;
            }
            return pow_weight{outside, cnt};
        }
        case iface_config::bag: {
            std::uint64_t out = 0, in = 0;
            for (const edge& e : t.edges)
                ++(inside(e.target) ? in : out);
            return bag_weight{out, in};
        }
        case iface_config::poly: {
            std::vector<std::uint8_t> colors(t.edges.size(), 0);
            for (const edge& e : t.edges)
                colors[e.label] = inside(e.target) ? 1 : 0;
            return poly_weight{std::move(colors)};
        }
        case iface_config::group_int:
        case iface_config::group_rat:
        case iface_config::group_nat_groth: {
            group_view view(desc);
            mvalue out = view.zero(), in = view.zero();
            for (const edge& e : t.edges) {
                mvalue v = view.embed(pool[e.label]);
                if (inside(e.target))
                    in = view.add(in, v);
                else
                    out = view.add(out, v);
            }
            return group_weight{std::move(out), std::move(in)};
        }
        default: {
            mvalue out = desc.zero();
            sum_bag bag(desc);
            for (const edge& e : t.edges) {
                if (inside(e.target))
                    bag.insert(pool[e.label], 1);
                else
                    out = desc.add(out, pool[e.label]);
            }
            return mon_weight{std::move(out), std::move(bag)};
        }
        }
    }

    // F chi_S^B of the state, in the interface's canonical byte format.
    std::string direct_f3(const trial& t) const {
        switch (cfg) {
        case iface_config::pow: {
            bool o = false, r = false, s = false;
            for (const edge& e : t.edges) {
                switch (where(t, e.target)) {
                case membership::outside: o = true; break;
                case membership::rest: r = true; break;
                case membership::sub: s = true; break;
                }
            }
            std::string f3 = "p";
            put_flag(f3, o);
            put_flag(f3, r);
            put_flag(f3, s);
            return f3;
        }
        case iface_config::bag: {
            std::uint64_t c[3] = {0, 0, 0};
            for (const edge& e : t.edges)
                ++c[static_cast<int>(where(t, e.target))];
            std::string f3 = "g";
            encode_u64(f3, c[0]);
            encode_u64(f3, c[1]);
            encode_u64(f3, c[2]);
            return f3;
        }
        case iface_config::poly: {
            std::vector<std::uint8_t> colors(t.edges.size(), 0);
            for (const edge& e : t.edges)
                colors[e.label] = static_cast<std::uint8_t>(where(t, e.target));
            std::string f3 = "y";
            f3.append(reinterpret_cast<const char*>(colors.data()), colors.size());
            return f3;
        }
        case iface_config::group_int:
        case iface_config::group_rat:
        case iface_config::group_nat_groth: {
            group_view view(desc);
            mvalue sums[3] = {view.zero(), view.zero(), view.zero()};
            for (const edge& e : t.edges) {
                mvalue& slot = sums[static_cast<int>(where(t, e.target))];
                slot = view.add(slot, view.embed(pool[e.label]));
            }
            std::string f3 = "v";
            sums[0].encode(f3);
            sums[1].encode(f3);
            sums[2].encode(f3);
            return f3;
        }
        default: {
            mvalue sums[3] = {desc.zero(), desc.zero(), desc.zero()};
            for (const edge& e : t.edges) {
                mvalue& slot = sums[static_cast<int>(where(t, e.target))];
                slot = desc.add(slot, pool[e.label]);
            }
            std::string f3 = "m";
            sums[0].encode(f3);
            sums[1].encode(f3);
            sums[2].encode(f3);
            return f3;
        }
        }
    }

    bool run_trial(std::string& failure) {
        trial t = draw();

        // first axiom: init from the full label bag gives w(X)
        weight got_init = iface->init(0, t.edges);
        weight want_init = direct_weight(t, true, false);
        if (!iface->weight_equal(got_init, want_init)) {
            failure = "init disagrees with w(X)";
            return false;
        }

        // second axiom: update from w(B) gives (w(S), F3, w(B\S))
        weight wb = direct_weight(t, false, false);
        auto labels = t.labels_into_s();
        update_result res = iface->update(labels, std::move(wb));
        weight want_sub = direct_weight_pred(t, [&](std::uint32_t x) { return t.in_s[x]; });
        weight want_rest = direct_weight(t, false, true);
        if (!iface->weight_equal(res.to_sub, want_sub)) {
            failure = "update.to_sub disagrees with w(S)";
            return false;
        }
        if (!iface->weight_equal(res.to_rest, want_rest)) {
            failure = "update.to_rest disagrees with w(B\\S)";
            return false;
        }
        std::string want_f3 = direct_f3(t);
        if (res.f3 != want_f3) {
            failure = "update.f3 disagrees with F chi_S^B";
            return false;
        }

        // stability law used by the engine: update with no labels must return
        // the input weight unchanged as to_rest
        weight wb2 = direct_weight(t, false, false);
        std::string empty_f3 = iface->f3_empty(wb2);
        update_result res2 = iface->update({}, std::move(wb2));
        weight wb3 = direct_weight(t, false, false);
        if (!iface->weight_equal(res2.to_rest, wb3)) {
            failure = "update(empty, w).to_rest differs from w";
            return false;
        }
        if (res2.f3 != empty_f3) {
            failure = "f3_empty differs from update(empty, w).f3";
            return false;
        }
        return true;
    }
};

} // namespace

const char* iface_config_name(iface_config c) {
    switch (c) {
    case iface_config::pow: return "powerset";
    case iface_config::bag: return "bag";
    case iface_config::poly: return "polynomial";
    case iface_config::group_int: return "group Z";
    case iface_config::group_rat: return "group R";
    case iface_config::group_nat_groth: return "group N+ (Grothendieck)";
    case iface_config::mon_int: return "monoid Z";
    case iface_config::mon_nat: return "monoid N+";
    case iface_config::mon_natmax: return "monoid (N,max)";
    case iface_config::mon_word64: return "monoid W64";
    case iface_config::mon_bool: return "monoid 2";
    }
    return "?";
}

std::vector<iface_config> all_iface_configs() {
    return {iface_config::pow,       iface_config::bag,        iface_config::poly,
            iface_config::group_int, iface_config::group_rat,  iface_config::group_nat_groth,
            iface_config::mon_int,   iface_config::mon_nat,    iface_config::mon_natmax,
            iface_config::mon_word64, iface_config::mon_bool};
}

coherence_report check_coherence(iface_config cfg, std::uint32_t trials, std::uint64_t seed) {
    checker ch(cfg, seed);
    coherence_report rep;
    rep.trials = trials;
    for (std::uint32_t i = 0; i < trials; ++i) {
        std::string failure;
        if (!ch.run_trial(failure)) {
            if (rep.failures == 0)
                rep.first_failure = std::string(iface_config_name(cfg)) + ", trial " +
                                    std::to_string(i) + ": " + failure;
            ++rep.failures;
        }
    }
    return rep;
}

} // namespace cmin
