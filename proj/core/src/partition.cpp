#include "cmin/partition.hpp"

#include <algorithm>
#include <numeric>

#include "cmin/errors.hpp"

namespace cmin {

refinable_partition::refinable_partition(std::uint32_t n)
    : elems_(n), location_(n), block_of_(n, 0) {
    std::iota(elems_.begin(), elems_.end(), 0u);
    std::iota(location_.begin(), location_.end(), 0u);
    if (n > 0)
        blocks_.push_back({0, n, 0});
}

refinable_partition refinable_partition::grouped(const std::vector<std::uint32_t>& key,
                                                 std::uint32_t num_groups) {
    refinable_partition p(static_cast<std::uint32_t>(key.size()));
    if (key.empty())
        return p;
    // counting sort by key; block g holds exactly the states with key g
    std::vector<std::uint32_t> count(num_groups + 1, 0);
    for (std::uint32_t k : key) {
        CMIN_REQUIRE(k < num_groups, "partition: group key out of range");
        ++count[k + 1];
    }
    for (std::uint32_t g = 0; g < num_groups; ++g)
        count[g + 1] += count[g];
    p.blocks_.clear();
    for (std::uint32_t g = 0; g < num_groups; ++g) {
        CMIN_REQUIRE(count[g + 1] > count[g], "partition: empty group");
        p.blocks_.push_back({count[g], count[g + 1], 0});
    }
    std::vector<std::uint32_t> next(count.begin(), count.end() - 1);
    for (std::uint32_t s = 0; s < key.size(); ++s) {
        std::uint32_t at = next[key[s]]++;
        p.elems_[at] = s;
        p.location_[s] = at;
        p.block_of_[s] = key[s];
    }
    return p;
}

void refinable_partition::swap_positions(std::uint32_t i, std::uint32_t j) {
    if (i == j)
        return;
    std::uint32_t a = elems_[i], b = elems_[j];
    std::swap(elems_[i], elems_[j]);
    location_[a] = j;
    location_[b] = i;
}

void refinable_partition::mark(std::uint32_t s) {
    block& b = blocks_[block_of_[s]];
    std::uint32_t at = location_[s];
    std::uint32_t fence = b.begin + b.marked;
    if (at < fence)
        return; // already marked
    swap_positions(at, fence);
    ++b.marked;
}

void refinable_partition::unmark(std::uint32_t s) {
    block& b = blocks_[block_of_[s]];
    std::uint32_t at = location_[s];
    std::uint32_t fence = b.begin + b.marked;
    if (at >= fence)
        return;
    swap_positions(at, fence - 1);
    --b.marked;
}

void refinable_partition::clear_marks(std::uint32_t b) {
    blocks_[b].marked = 0;
}

std::optional<std::uint32_t> refinable_partition::split_marked(std::uint32_t b) {
    block& blk = blocks_[b];
    std::uint32_t marked = blk.marked;
    blk.marked = 0;
    if (marked == 0 || marked == blk.end - blk.begin)
        return std::nullopt;
    std::uint32_t fresh = static_cast<std::uint32_t>(blocks_.size());
    blocks_.push_back({blk.begin, blk.begin + marked, 0});
    block& nb = blocks_.back();
    blocks_[b].begin += marked;
    for (std::uint32_t i = nb.begin; i < nb.end; ++i) {
        block_of_[elems_[i]] = fresh;
        ++split_steps_;
    }
    return fresh;
}

std::vector<std::vector<std::uint32_t>> refinable_partition::block_lists() const {
    std::vector<std::vector<std::uint32_t>> out(blocks_.size());
    for (std::uint32_t b = 0; b < blocks_.size(); ++b) {
        auto m = members(b);
        out[b].assign(m.begin(), m.end());
        std::sort(out[b].begin(), out[b].end());
    }
    return out;
}

} // namespace cmin
