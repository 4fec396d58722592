#ifndef CMIN_IFACE_HPP
#define CMIN_IFACE_HPP

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "cmin/monoid.hpp"
#include "cmin/sumbag.hpp"
#include "cmin/syntax.hpp"

namespace cmin {

// Weights: per-state bookkeeping of the edges into one block, per interface.

struct pow_weight { // (some edge leaves the block?, edges into the block)
    bool has_outside;
    std::uint64_t inside;
};

struct bag_weight { // edge counts outside/inside the block
    std::uint64_t outside;
    std::uint64_t inside;
};

struct group_weight { // accumulated group weight outside/inside the block
    mvalue outside;
    mvalue inside;
};

struct mon_weight { // total weight outside; bag of the weights into the block
    mvalue outside;
    sum_bag inside;
};

struct poly_weight { // one colour per variable position: 1 inside, 0 outside
    std::vector<std::uint8_t> colors;
};

using weight = std::variant<pow_weight, bag_weight, group_weight, mon_weight, poly_weight>;

struct update_result {
    weight to_sub;  // weight of the edges into S
    std::string f3; // canonical bytes of the three-way split value
    weight to_rest; // weight of the edges into B \ S
};

// The behaviour bundle the engine calls per sort. init computes the weight of
// the full state set from a state's outgoing labels; update splits a stored
// block weight along the labels that lead into the dequeued subblock,
// returning the two successor weights and the value whose equality decides
// whether two states stay together.
//
// All implementations satisfy update(empty, w).to_rest == w; the engine
// relies on it to keep untouched states' stored weights valid when a block
// shrinks to its unmarked part.
class refinement_iface {
public:
    virtual ~refinement_iface() = default;

    virtual weight init(std::uint32_t f1, std::span<const edge> out) const = 0;
    virtual update_result update(std::span<const std::uint32_t> labels, weight w) const = 0;

    // update(empty, w).f3 without materializing the weights.
    virtual std::string f3_empty(const weight& w) const = 0;

    // Value of the state's successor structure under a full colouring of the
    // target states, as canonical comparable bytes. Test/oracle machinery,
    // not called on the refinement path.
    virtual std::string observe(const encoded_coalgebra& e, std::uint32_t state,
                                std::span<const std::uint32_t> coloring) const = 0;

    virtual bool weight_equal(const weight& a, const weight& b) const = 0;

    virtual weight clone(const weight& w) const = 0;
};

// One interface per sort of the encoded coalgebra. Monoid-valued sorts route
// through the group interface when the monoid embeds into a group (directly,
// or via the Grothendieck construction for cancellative monoids); the generic
// bag-based interface handles the rest. force_generic_monoid selects the
// generic interface for every monoid-valued sort, for differential testing.
std::vector<std::unique_ptr<refinement_iface>>
build_interfaces(const encoded_coalgebra& e, bool force_generic_monoid = false);

std::unique_ptr<refinement_iface> make_pow_iface();
std::unique_ptr<refinement_iface> make_bag_iface();
std::unique_ptr<refinement_iface> make_group_iface(group_view view,
                                                   const std::vector<mvalue>* pool);
std::unique_ptr<refinement_iface> make_monoid_iface(monoid_descriptor desc,
                                                    const std::vector<mvalue>* pool);
std::unique_ptr<refinement_iface> make_poly_iface();

} // namespace cmin

#endif
