#include "cmin/iface.hpp"

#include <algorithm>
#include <map>

#include "cmin/errors.hpp"

namespace cmin {

namespace {

void put_flag(std::string& out, bool b) { out.push_back(b ? '\x01' : '\x00'); }

class pow_iface final : public refinement_iface {
public:
    weight init(std::uint32_t, std::span<const edge> out) const override {
        return pow_weight{false, out.size()};
    }

    update_result update(std::span<const std::uint32_t> labels, weight w) const override {
        auto& pw = std::get<pow_weight>(w);
        std::uint64_t to_sub = labels.size();
        CMIN_REQUIRE(to_sub <= pw.inside, "pow update: more labels than stored edges");
        std::uint64_t rest = pw.inside - to_sub;
        update_result r;
        r.to_sub = pow_weight{pw.has_outside || rest > 0, to_sub};
        r.f3 = make_f3(pw.has_outside, rest > 0, to_sub > 0);
        r.to_rest = pow_weight{pw.has_outside || to_sub > 0, rest};
        return r;
    }

    std::string f3_empty(const weight& w) const override {
        const auto& pw = std::get<pow_weight>(w);
        return make_f3(pw.has_outside, pw.inside > 0, false);
    }

    std::string observe(const encoded_coalgebra& e, std::uint32_t state,
                        std::span<const std::uint32_t> coloring) const override {
        std::vector<std::uint32_t> cols;
        for (const edge& ed : e.out_edges(state))
            cols.push_back(coloring[ed.target]);
        std::sort(cols.begin(), cols.end());
        cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
        std::string out = "P";
        for (std::uint32_t c : cols)
            encode_u64(out, c);
        return out;
    }

    bool weight_equal(const weight& a, const weight& b) const override {
        const auto& x = std::get<pow_weight>(a);
        const auto& y = std::get<pow_weight>(b);
        return x.has_outside == y.has_outside && x.inside == y.inside;
    }

    weight clone(const weight& w) const override { return std::get<pow_weight>(w); }

private:
    static std::string make_f3(bool to_outside, bool to_rest, bool to_sub) {
        std::string f3 = "p";
        put_flag(f3, to_outside);
        put_flag(f3, to_rest);
        put_flag(f3, to_sub);
        return f3;
    }
};

class bag_iface final : public refinement_iface {
public:
    weight init(std::uint32_t, std::span<const edge> out) const override {
        return bag_weight{0, out.size()};
    }

    update_result update(std::span<const std::uint32_t> labels, weight w) const override {
        auto& bw = std::get<bag_weight>(w);
        std::uint64_t k = labels.size();
        CMIN_REQUIRE(k <= bw.inside, "bag update: more labels than stored edges");
        std::uint64_t rest = bw.inside - k;
        update_result r;
        r.to_sub = bag_weight{bw.outside + rest, k};
        r.f3 = make_f3(bw.outside, rest, k);
        r.to_rest = bag_weight{bw.outside + k, rest};
        return r;
    }

    std::string f3_empty(const weight& w) const override {
        const auto& bw = std::get<bag_weight>(w);
        return make_f3(bw.outside, bw.inside, 0);
    }

    std::string observe(const encoded_coalgebra& e, std::uint32_t state,
                        std::span<const std::uint32_t> coloring) const override {
        std::vector<std::uint32_t> cols;
        for (const edge& ed : e.out_edges(state))
            cols.push_back(coloring[ed.target]);
        std::sort(cols.begin(), cols.end());
        std::string out = "G";
        for (std::uint32_t c : cols)
            encode_u64(out, c);
        return out;
    }

    bool weight_equal(const weight& a, const weight& b) const override {
        const auto& x = std::get<bag_weight>(a);
        const auto& y = std::get<bag_weight>(b);
        return x.outside == y.outside && x.inside == y.inside;
    }

    weight clone(const weight& w) const override { return std::get<bag_weight>(w); }

private:
    static std::string make_f3(std::uint64_t outside, std::uint64_t rest, std::uint64_t sub) {
        std::string f3 = "g";
        encode_u64(f3, outside);
        encode_u64(f3, rest);
        encode_u64(f3, sub);
        return f3;
    }
};

class group_iface final : public refinement_iface {
public:
    group_iface(group_view view, const std::vector<mvalue>* pool)
        : view_(std::move(view)), pool_(pool) {}

    weight init(std::uint32_t, std::span<const edge> out) const override {
        mvalue sum = view_.zero();
        for (const edge& ed : out)
            sum = view_.add(sum, view_.embed((*pool_)[ed.label]));
        return group_weight{view_.zero(), std::move(sum)};
    }

    update_result update(std::span<const std::uint32_t> labels, weight w) const override {
        auto& gw = std::get<group_weight>(w);
        mvalue sum_sub = view_.zero();
        for (std::uint32_t l : labels)
            sum_sub = view_.add(sum_sub, view_.embed((*pool_)[l]));
        mvalue sum_rest = view_.sub(gw.inside, sum_sub);
        update_result r;
        r.f3 = make_f3(gw.outside, sum_rest, sum_sub);
        mvalue out_sub = view_.add(gw.outside, sum_rest);
        mvalue out_rest = view_.add(gw.outside, sum_sub);
        r.to_sub = group_weight{std::move(out_sub), std::move(sum_sub)};
        r.to_rest = group_weight{std::move(out_rest), std::move(sum_rest)};
        return r;
    }

    std::string f3_empty(const weight& w) const override {
        const auto& gw = std::get<group_weight>(w);
        return make_f3(gw.outside, gw.inside, view_.zero());
    }

    std::string observe(const encoded_coalgebra& e, std::uint32_t state,
                        std::span<const std::uint32_t> coloring) const override {
        std::map<std::uint32_t, mvalue> per_color;
        for (const edge& ed : e.out_edges(state)) {
            mvalue v = view_.embed((*pool_)[ed.label]);
            auto [it, fresh] = per_color.emplace(coloring[ed.target], v);
            if (!fresh)
                it->second = view_.add(it->second, v);
        }
        std::string out = "V";
        mvalue zero = view_.zero();
        for (const auto& [c, sum] : per_color) {
            if (sum == zero)
                continue; // image-measure aggregation drops vanished entries
            encode_u64(out, c);
            sum.encode(out);
        }
        return out;
    }

    bool weight_equal(const weight& a, const weight& b) const override {
        const auto& x = std::get<group_weight>(a);
        const auto& y = std::get<group_weight>(b);
        return x.outside == y.outside && x.inside == y.inside;
    }

    weight clone(const weight& w) const override { return std::get<group_weight>(w); }

private:
    static std::string make_f3(const mvalue& outside, const mvalue& rest, const mvalue& sub) {
        std::string f3 = "v";
        outside.encode(f3);
        rest.encode(f3);
        sub.encode(f3);
        return f3;
    }

    group_view view_;
    const std::vector<mvalue>* pool_;
};

// Generic monoid interface per the bag-based update
//   update(l, (r, c)) = ((r + S(c-l), l), (r, S(c-l), S(l)), (r + S(l), c - l))
// with S the canonical summation of a bag, read from the sum_bag root.
class monoid_iface final : public refinement_iface {
public:
    monoid_iface(monoid_descriptor desc, const std::vector<mvalue>* pool)
        : desc_(desc), pool_(pool) {}

    weight init(std::uint32_t, std::span<const edge> out) const override {
        sum_bag bag(desc_);
        for (const edge& ed : out)
            bag.insert((*pool_)[ed.label], 1);
        return mon_weight{desc_.zero(), std::move(bag)};
    }

    update_result update(std::span<const std::uint32_t> labels, weight w) const override {
        auto& mw = std::get<mon_weight>(w);
        sum_bag sub_bag(desc_);
        for (std::uint32_t l : labels)
            sub_bag.insert((*pool_)[l], 1);
        sub_bag.for_each([&](const mvalue& key, std::uint64_t k) {
            std::uint64_t removed = mw.inside.erase_up_to(key, k);
            CMIN_REQUIRE(removed == k, "monoid update: labels not contained in stored bag");
        });
        mvalue sum_rest = mw.inside.total();
        mvalue sum_sub = sub_bag.total();
        update_result r;
        r.f3 = make_f3(mw.outside, sum_rest, sum_sub);
        r.to_sub = mon_weight{desc_.add(mw.outside, sum_rest), std::move(sub_bag)};
        r.to_rest = mon_weight{desc_.add(mw.outside, sum_sub), std::move(mw.inside)};
        return r;
    }

    std::string f3_empty(const weight& w) const override {
        const auto& mw = std::get<mon_weight>(w);
        return make_f3(mw.outside, mw.inside.total(), desc_.zero());
    }

    std::string observe(const encoded_coalgebra& e, std::uint32_t state,
                        std::span<const std::uint32_t> coloring) const override {
        std::map<std::uint32_t, mvalue> per_color;
        for (const edge& ed : e.out_edges(state)) {
            const mvalue& v = (*pool_)[ed.label];
            auto [it, fresh] = per_color.emplace(coloring[ed.target], v);
            if (!fresh)
                it->second = desc_.add(it->second, v);
        }
        std::string out = "W";
        for (const auto& [c, sum] : per_color) {
            if (desc_.is_zero(sum))
                continue;
            encode_u64(out, c);
            sum.encode(out);
        }
        return out;
    }

    bool weight_equal(const weight& a, const weight& b) const override {
        const auto& x = std::get<mon_weight>(a);
        const auto& y = std::get<mon_weight>(b);
        return x.outside == y.outside && x.inside.same_entries(y.inside);
    }

    weight clone(const weight& w) const override {
        const auto& mw = std::get<mon_weight>(w);
        return mon_weight{mw.outside, mw.inside.clone()};
    }

private:
    static std::string make_f3(const mvalue& outside, const mvalue& rest, const mvalue& sub) {
        std::string f3 = "m";
        outside.encode(f3);
        rest.encode(f3);
        sub.encode(f3);
        return f3;
    }

    monoid_descriptor desc_;
    const std::vector<mvalue>* pool_;
};

// Positions carry colours 0 (outside B), 1 (inside). The constructor shape
// itself lives in the F1 fingerprint, so states compared here always agree on
// it. Updates touch all r positions, hence the factor r for polynomial sorts.
class poly_iface final : public refinement_iface {
public:
    weight init(std::uint32_t, std::span<const edge> out) const override {
        return poly_weight{std::vector<std::uint8_t>(out.size(), 1)};
    }

    update_result update(std::span<const std::uint32_t> labels, weight w) const override {
        auto& pw = std::get<poly_weight>(w);
        for (std::uint32_t pos : labels) {
            CMIN_REQUIRE(pos < pw.colors.size() && pw.colors[pos] == 1,
                         "poly update: label outside the stored block");
            pw.colors[pos] = 2;
        }
        update_result r;
        r.f3 = make_f3(pw.colors);
        poly_weight to_sub{pw.colors}, to_rest{std::move(pw.colors)};
        for (std::size_t i = 0; i < to_sub.colors.size(); ++i) {
            to_sub.colors[i] = to_sub.colors[i] == 2 ? 1 : 0;
            to_rest.colors[i] = to_rest.colors[i] == 1 ? 1 : 0;
        }
        r.to_sub = std::move(to_sub);
        r.to_rest = std::move(to_rest);
        return r;
    }

    std::string f3_empty(const weight& w) const override {
        return make_f3(std::get<poly_weight>(w).colors);
    }

    std::string observe(const encoded_coalgebra& e, std::uint32_t state,
                        std::span<const std::uint32_t> coloring) const override {
        auto out_edges = e.out_edges(state);
        std::vector<std::uint32_t> by_pos(out_edges.size());
        for (const edge& ed : out_edges)
            by_pos[ed.label] = coloring[ed.target];
        std::string out = "Y";
        out += e.f1_pool[e.f1_id[state]];
        for (std::uint32_t c : by_pos)
            encode_u64(out, c);
        return out;
    }

    bool weight_equal(const weight& a, const weight& b) const override {
        return std::get<poly_weight>(a).colors == std::get<poly_weight>(b).colors;
    }

    weight clone(const weight& w) const override { return std::get<poly_weight>(w); }

private:
    static std::string make_f3(const std::vector<std::uint8_t>& colors) {
        std::string f3 = "y";
        f3.append(reinterpret_cast<const char*>(colors.data()), colors.size());
        return f3;
    }
};

} // namespace

std::unique_ptr<refinement_iface> make_pow_iface() { return std::make_unique<pow_iface>(); }
std::unique_ptr<refinement_iface> make_bag_iface() { return std::make_unique<bag_iface>(); }
std::unique_ptr<refinement_iface> make_group_iface(group_view view,
                                                   const std::vector<mvalue>* pool) {
    return std::make_unique<group_iface>(std::move(view), pool);
}
std::unique_ptr<refinement_iface> make_monoid_iface(monoid_descriptor desc,
                                                    const std::vector<mvalue>* pool) {
    return std::make_unique<monoid_iface>(desc, pool);
}
std::unique_ptr<refinement_iface> make_poly_iface() { return std::make_unique<poly_iface>(); }

std::vector<std::unique_ptr<refinement_iface>>
build_interfaces(const encoded_coalgebra& e, bool force_generic_monoid) {
    std::vector<std::unique_ptr<refinement_iface>> out;
    out.reserve(e.sorts.size());
    for (const sort_runtime& s : e.sorts) {
        switch (s.kind) {
        case sort_kind::pow: out.push_back(make_pow_iface()); break;
        case sort_kind::bag: out.push_back(make_bag_iface()); break;
        case sort_kind::poly: out.push_back(make_poly_iface()); break;
        case sort_kind::dist:
            out.push_back(make_group_iface(group_view(s.desc), &s.label_pool));
            break;
        case sort_kind::monoid_val:
            if (!force_generic_monoid && s.desc.is_cancellative)
                out.push_back(make_group_iface(group_view(s.desc), &s.label_pool));
            else
                out.push_back(make_monoid_iface(s.desc, &s.label_pool));
            break;
        }
    }
    return out;
}

} // namespace cmin
