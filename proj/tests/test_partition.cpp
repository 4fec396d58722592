#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "cmin/oracle.hpp"
#include "cmin/partition.hpp"

using namespace cmin;

TEST_SUITE_BEGIN("partition");

TEST_CASE("marking is idempotent and counted") {
    refinable_partition p(3);
    CHECK(p.marked_count(0) == 0);
    p.mark(1);
    CHECK(p.marked_count(0) == 1);
    p.mark(1);
    CHECK(p.marked_count(0) == 1);
    p.mark(0);
    p.mark(2);
    CHECK(p.marked_count(0) == 3);
    p.unmark(2);
    CHECK(p.marked_count(0) == 2);
    p.unmark(2);
    CHECK(p.marked_count(0) == 2);
}

TEST_CASE("split keeps the old id for the unmarked part") {
    refinable_partition p(3);
    p.mark(0);
    auto nb = p.split_marked(0);
    REQUIRE(nb.has_value());
    CHECK(p.block_size(*nb) == 1);
    CHECK(p.block_of(0) == *nb);
    CHECK(p.block_size(0) == 2);
    CHECK(p.block_of(1) == 0);
    CHECK(p.block_of(2) == 0);
    CHECK(p.marked_count(0) == 0);
    CHECK(p.marked_count(*nb) == 0);
}

TEST_CASE("full or empty marking never splits") {
    refinable_partition p(2);
    p.mark(0);
    p.mark(1);
    CHECK_FALSE(p.split_marked(0).has_value());
    CHECK(p.marked_count(0) == 0);
    CHECK(p.block_size(0) == 2);

    CHECK_FALSE(p.split_marked(0).has_value()); // nothing marked

    refinable_partition q(1);
    q.mark(0);
    CHECK_FALSE(q.split_marked(0).has_value());
}

TEST_CASE("block info reads") {
    refinable_partition p(5);
    CHECK(p.num_blocks() == 1);
    CHECK(p.block_size(0) == 5);
    CHECK(p.marked_count(0) == 0);
    p.mark(3);
    CHECK(p.marked_count(0) == 1);
    auto nb = p.split_marked(0);
    REQUIRE(nb.has_value());
    CHECK(p.block_size(0) + p.block_size(*nb) == 5);
}

TEST_CASE("grouped construction") {
    std::vector<std::uint32_t> key = {1, 0, 1, 2, 0};
    refinable_partition p = refinable_partition::grouped(key, 3);
    CHECK(p.num_blocks() == 3);
    for (std::uint32_t s = 0; s < key.size(); ++s)
        CHECK(p.block_of(s) == key[s]);
    CHECK(p.block_size(0) == 2);
    CHECK(p.block_size(1) == 2);
    CHECK(p.block_size(2) == 1);
}

TEST_CASE("random workload: tiling, inverse maps, split cost") {
    rng rand(3);
    refinable_partition p(200);
    for (int round = 0; round < 400; ++round) {
        std::uint32_t b = static_cast<std::uint32_t>(rand.below(p.num_blocks()));
        auto mem = p.members(b);
        std::vector<std::uint32_t> chosen;
        for (std::uint32_t s : mem)
            if (rand.below(3) == 0)
                chosen.push_back(s);
        for (std::uint32_t s : chosen)
            p.mark(s);
        std::uint64_t marked = p.marked_count(b);
        std::uint64_t steps_before = p.split_steps();
        p.split_marked(b);
        CHECK(p.split_steps() - steps_before <= 4 * marked);

        // blocks tile the state set
        std::uint64_t total = 0;
        for (std::uint32_t blk = 0; blk < p.num_blocks(); ++blk) {
            total += p.block_size(blk);
            for (std::uint32_t s : p.members(blk))
                CHECK(p.block_of(s) == blk);
        }
        CHECK(total == 200);
    }
}

TEST_SUITE_END();
