#ifndef CMIN_WTA_HPP
#define CMIN_WTA_HPP

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "cmin/monoid.hpp"
#include "cmin/refine.hpp"
#include "cmin/syntax.hpp"

namespace cmin {

struct wta_symbol {
    std::string name;
    std::uint32_t arity;
};

// Bottom-up weighted tree automaton: states, a ranked signature, per-state
// outputs and monoid-weighted transitions (symbol, source tuple) -> target.
struct wta {
    monoid_descriptor monoid = descriptor(monoid_id::int_add);
    std::vector<wta_symbol> signature;
    std::vector<std::string> states;
    std::vector<mvalue> outputs; // parallel to states

    struct transition {
        std::uint32_t symbol;
        std::vector<std::uint32_t> sources; // length = arity of symbol
        std::uint32_t target;
        mvalue weight; // nonzero
    };
    std::vector<transition> transitions;

    std::uint32_t rank() const;
};

// Text format:
//   wta <monoid> <sym>/<arity> ...
//   states <name> ...            (optional, repeatable)
//   <sym>(<x1>,...,<xk>) -> <x> : <weight>
//   out <x> : <weight>
// States may also be introduced by first use. '#' starts a comment.
wta parse_wta(std::string_view text);
std::string print_wta(const wta& w);
bool looks_like_wta(std::string_view text);

// The coalgebra the automaton denotes: transitions into a state become that
// state's outgoing weighted map over signature terms. Outputs enter as an
// initial partition through a leading natural-number component (states with
// equal outputs share a number), unless dropped.
symbolic_coalgebra wta_to_coalgebra(const wta& w, bool ignore_outputs = false);

struct wta_options {
    bool ignore_outputs = false;
    bool force_generic_monoid = false;
    bool singleton_opt = true;
};

state_partition minimize_wta(const wta& w, const wta_options& opts = {},
                             refine_stats* stats = nullptr);

// Random WTA with exactly transitions_per_state * n transitions, weights from
// a pool of at most max_distinct_weights nonzero elements, reproducible from
// the seed. Only symbols of maximal rank are used unless mixed_ranks is set.
wta random_wta(std::uint32_t n, std::vector<wta_symbol> signature, monoid_id monoid,
               std::uint32_t transitions_per_state = 50,
               std::uint32_t max_distinct_weights = 50, std::uint64_t seed = 1,
               bool mixed_ranks = false);

// Dense protocol: every (state, signature term) pair independently carries
// weight 0 with the given probability, a pool weight otherwise. The number of
// signature terms per state is capped to keep the instance materializable.
wta dense_random_wta(std::uint32_t n, std::vector<wta_symbol> signature, monoid_id monoid,
                     double zero_probability = 0.7, std::uint64_t seed = 1,
                     std::uint64_t term_cap = 1u << 24);

// Greatest fixpoint directly on the automaton presentation, aggregating
// incoming weights per (symbol, source-class tuple); outputs are ignored.
// Reference implementation for the equivalence with coalgebra minimization.
state_partition backward_bisimulation(const wta& w);

} // namespace cmin

#endif
