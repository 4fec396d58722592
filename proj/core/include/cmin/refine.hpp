#ifndef CMIN_REFINE_HPP
#define CMIN_REFINE_HPP

#include <cstdint>
#include <vector>

#include "cmin/syntax.hpp"

namespace cmin {

struct refine_options {
    bool singleton_opt = true;        // skip weight upkeep for single-state blocks
    bool debug_audits = false;        // expensive structural checks per step
    bool force_generic_monoid = false;
};

struct refine_stats {
    std::uint32_t num_original = 0;
    std::uint32_t num_states = 0; // after flattening
    std::uint64_t num_edges = 0;
    std::uint32_t initial_blocks = 0; // over original states, after initialization
    std::uint32_t final_blocks = 0;   // over original states
    std::uint64_t label_volume = 0;   // sum of |l| over all update calls
    double t_init = 0.0;              // flattening + initialization, seconds
    double t_refine = 0.0;            // main loop, seconds
};

using state_partition = std::vector<std::vector<std::uint32_t>>;

// Partition of the original states of an already-encoded coalgebra into
// behavioural-equivalence classes. Blocks are ordered by their smallest
// state id; states inside a block are ascending. Deterministic.
// final_coloring, when given, receives the block index of every flattened
// state (intermediates included).
state_partition minimize_encoded(const encoded_coalgebra& e, const refine_options& opts = {},
                                 refine_stats* stats = nullptr,
                                 std::vector<std::uint32_t>* final_coloring = nullptr);

// Flattens and minimizes a symbolic coalgebra.
state_partition minimize(const symbolic_coalgebra& s, const refine_options& opts = {},
                         refine_stats* stats = nullptr);

// Normal form shared by engine and oracle outputs: a block per distinct
// colour, restricted to original states, ordered as described above.
state_partition blocks_from_coloring(std::span<const std::uint32_t> coloring,
                                     std::uint32_t num_original);

} // namespace cmin

#endif
