#ifndef CMIN_PARTITION_HPP
#define CMIN_PARTITION_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace cmin {

// Refinable partition of {0..n-1}: constant-time block size, state marking
// and marked-count; splitting off the marked states costs time linear in the
// number of marked states only.
//
// Layout: a permutation of the states in which every block is contiguous and
// the marked states of a block occupy a prefix of its range. splitMarked
// turns the marked prefix into a fresh block; the unmarked remainder keeps
// the original block id, so bookkeeping keyed by block ids of untouched
// states stays valid.
class refinable_partition {
public:
    // n states in a single block (no blocks when n = 0).
    explicit refinable_partition(std::uint32_t n);

    // States pre-grouped by a dense key; block ids equal the key values.
    static refinable_partition grouped(const std::vector<std::uint32_t>& key,
                                       std::uint32_t num_groups);

    std::uint32_t num_states() const { return static_cast<std::uint32_t>(block_of_.size()); }
    std::uint32_t num_blocks() const { return static_cast<std::uint32_t>(blocks_.size()); }

    std::uint32_t block_of(std::uint32_t s) const { return block_of_[s]; }
    std::uint32_t block_size(std::uint32_t b) const {
        return blocks_[b].end - blocks_[b].begin;
    }
    std::uint32_t marked_count(std::uint32_t b) const { return blocks_[b].marked; }

    // Members of b; marked states first. Invalidated by mark/unmark/split.
    std::span<const std::uint32_t> members(std::uint32_t b) const {
        return {elems_.data() + blocks_[b].begin, block_size(b)};
    }

    void mark(std::uint32_t s);   // idempotent, O(1)
    void unmark(std::uint32_t s); // idempotent, O(1)
    void clear_marks(std::uint32_t b);

    // If 0 < marked < size: the marked states become a fresh block (returned)
    // and the unmarked states keep b. Otherwise no split happens and nothing
    // is returned. Marks of b are cleared either way.
    std::optional<std::uint32_t> split_marked(std::uint32_t b);

    // Elementary operations performed by split_marked so far; used by tests
    // to pin the linear-in-marked cost.
    std::uint64_t split_steps() const { return split_steps_; }

    // Blocks as sorted state lists, for test comparisons.
    std::vector<std::vector<std::uint32_t>> block_lists() const;

private:
    struct block {
        std::uint32_t begin;
        std::uint32_t end;
        std::uint32_t marked;
    };

    void swap_positions(std::uint32_t i, std::uint32_t j);

    std::vector<std::uint32_t> elems_;    // permutation of states
    std::vector<std::uint32_t> location_; // state -> index into elems_
    std::vector<std::uint32_t> block_of_; // state -> block id
    std::vector<block> blocks_;
    std::uint64_t split_steps_ = 0;
};

} // namespace cmin

#endif
