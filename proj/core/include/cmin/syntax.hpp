#ifndef CMIN_SYNTAX_HPP
#define CMIN_SYNTAX_HPP

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cmin/monoid.hpp"
#include "cmin/term.hpp"

namespace cmin {

// Tree-shaped value of one state, mirroring the functor term's shape.
// Collections under powerset nodes are kept deduplicated and weighted maps
// carry no zero entries, so structural equality respects the functor's
// semantics.
struct sym_value {
    enum class kind : std::uint8_t {
        state_ref,    // reference to a named state
        tuple,        // product value
        inj,          // sum value: injection idx + one child
        collection,   // powerset/bag value: element list
        weighted_map, // dist/monoid value: children are keys, weights parallel
        exp_map,      // exponent value: one child per letter, in letter order
        const_sym,    // member of a finite constant set, by symbol index
        const_num,    // natural constant
    };

    kind k = kind::state_ref;
    std::uint32_t idx = 0; // state_ref: state id; inj: injection; const_sym: symbol
    std::unique_ptr<big_int> num;
    std::vector<sym_value> children;
    std::vector<mvalue> weights;

    sym_value() = default;
    sym_value(sym_value&&) noexcept = default;
    sym_value& operator=(sym_value&&) noexcept = default;
    sym_value(const sym_value& o);
    sym_value& operator=(const sym_value& o);
};

struct symbolic_coalgebra {
    functor_term term;
    std::vector<std::string> state_names;
    std::vector<sym_value> values; // parallel to state_names
};

// Parses the body of an input file (one `name: value` line per state) against
// a previously parsed functor term. line_offset is the 1-based number of the
// first body line, for error positions. Comments start with '#'; blank lines
// are ignored. Distribution values must sum to exactly 1.
symbolic_coalgebra parse_coalgebra(functor_term term, std::string_view body,
                                   std::size_t line_offset = 2);

// Parses a whole input file: line 1 is the functor term, the rest the body.
symbolic_coalgebra parse_coalgebra_file(std::string_view text);

std::string print_coalgebra(const symbolic_coalgebra& s);

// Canonical injective byte string of a value; used for grouping and
// deduplication. Equality of encodings is semantic equality of values.
std::string value_bytes(const functor_term& node, const sym_value& v);

// Rewrites a value along a renaming of states and restores canonical form
// (sets deduplicated, map keys merged with summed weights, zeros dropped).
sym_value map_value(const functor_term& node, const sym_value& v,
                    std::span<const std::uint32_t> rename);

// The coalgebra on block representatives induced by a partition of the
// states. Each block is represented by its smallest state; values are mapped
// through the quotient.
symbolic_coalgebra quotient_coalgebra(const symbolic_coalgebra& s,
                                      const std::vector<std::vector<std::uint32_t>>& blocks);

// ---------------------------------------------------------------------------
// Flattened, encoded form: the algorithm's sole view of the system.

struct edge {
    std::uint32_t target;
    std::uint32_t label; // interface-specific: pool id, position index, or 0
};

struct sort_runtime {
    sort_kind kind;
    monoid_descriptor desc;    // monoid_val: the weight monoid; dist: exact rationals
    std::vector<mvalue> label_pool; // dist/monoid_val: interned edge weights
};

struct encoded_coalgebra {
    functor_term term;
    std::uint32_t num_original = 0;
    std::uint32_t num_states = 0; // n (originals + intermediates)
    std::uint64_t num_edges = 0;  // m
    std::vector<std::string> state_names; // originals; global id < num_original

    std::vector<std::uint32_t> sort_of; // per state
    std::vector<std::uint32_t> f1_id;   // per state; dense, namespaced by sort
    std::vector<std::string> f1_pool;   // f1 id -> canonical bytes
    std::uint32_t num_f1 = 0;

    std::vector<std::uint64_t> fwd_off;
    std::vector<edge> fwd;
    std::vector<std::uint64_t> rev_off;
    std::vector<edge> rev; // rev entries: {source, label}

    std::vector<sort_runtime> sorts;

    std::span<const edge> out_edges(std::uint32_t s) const {
        return {fwd.data() + fwd_off[s], static_cast<std::size_t>(fwd_off[s + 1] - fwd_off[s])};
    }
    std::span<const edge> in_edges(std::uint32_t s) const {
        return {rev.data() + rev_off[s], static_cast<std::size_t>(rev_off[s + 1] - rev_off[s])};
    }
    std::uint32_t outdeg(std::uint32_t s) const {
        return static_cast<std::uint32_t>(fwd_off[s + 1] - fwd_off[s]);
    }
};

// Flattens a composite-functor coalgebra into the multi-sorted encoded form,
// creating one intermediate state per sort-crossing value occurrence and one
// edge per encoded successor. Also builds the reverse edge index.
encoded_coalgebra flatten(const symbolic_coalgebra& s, const sort_plan& plan);

} // namespace cmin

#endif
