#ifndef CMIN_TERM_HPP
#define CMIN_TERM_HPP

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cmin/monoid.hpp"

namespace cmin {

// AST of a functor expression. The grammar, with precedence ^ > x > + and
// the prefix operators binding tighter than any infix:
//
//   term    := sum
//   sum     := prod ('+' prod)*
//   prod    := expo ('x' expo)*
//   expo    := prefix ('^' alphabet)*
//   prefix  := ('P' | 'B' | 'D') prefix | primary
//   primary := 'X' | 'N' | numeral | '{' id (',' id)* '}'
//            | monoid '^' prefix | '(' sum ')'
//   monoid  := 'Z' | 'R' | 'N+' | '(N,max)' | 'W64'
//   alphabet:= numeral | '{' id (',' id)* '}'
//
// A numeral k used as a constant or exponent denotes the k-element set with
// tags 0..k-1. 'N' is the constant set of all decimal naturals. 'C' is
// recognised and rejected (complex weights are not supported). Whitespace is
// optional everywhere, so "DX" is 'D' applied to 'X'.
struct functor_term {
    enum class node_kind : std::uint8_t {
        var,        // the terminal X
        pow,        // finite powerset
        bag,        // finite multisets
        dist,       // finite probability distributions
        monoid_val, // monoid-valued functor M^(T)
        product,
        sum,
        exp,       // T^A for a finite alphabet A
        const_set, // finite set of identifiers (or numeral tags)
        const_nat, // the constant set of all naturals
    };

    node_kind kind = node_kind::var;
    monoid_id monoid = monoid_id::int_add;    // monoid_val only
    std::vector<functor_term> children;       // pow/bag/dist/monoid_val/exp: 1; product/sum: >= 2
    std::vector<std::string> symbols;         // const_set members; exp letters

    bool operator==(const functor_term& o) const;
};

// Parses a functor expression. Throws parse_error with a 1-based column on
// bad syntax and rejects the unsupported complex-number monoid.
functor_term parse_functor(std::string_view line);

// Prints with minimal parentheses; parsing the result yields an equal AST.
std::string print_functor(const functor_term& t);

enum class sort_kind : std::uint8_t { pow, bag, dist, monoid_val, poly };

// The flattening plan: one sort per non-polynomial basic node, and one sort
// per maximal region of polynomial nodes (products, sums, exponents,
// constants fused together). Original states live in the root region's sort.
struct sort_plan {
    struct sort_info {
        sort_kind kind;
        monoid_id monoid;          // monoid_val only
        const functor_term* node;  // root node of this sort's region
    };

    std::vector<sort_info> sorts;
    std::uint32_t original_sort = 0;

    // Region of every AST node. Var nodes that sit directly below a basic
    // functor map to k_direct: their values are plain references to original
    // states, with no intermediate state in between.
    static constexpr std::uint32_t k_direct = UINT32_MAX;
    std::unordered_map<const functor_term*, std::uint32_t> region;

    std::uint32_t region_of(const functor_term* n) const { return region.at(n); }
};

// Computes the sort plan. Rejects terms without any occurrence of X (the
// coalgebra would be degenerate: a constant).
sort_plan plan_decomposition(const functor_term& t);

} // namespace cmin

#endif
