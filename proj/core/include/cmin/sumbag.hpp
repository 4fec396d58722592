#ifndef CMIN_SUMBAG_HPP
#define CMIN_SUMBAG_HPP

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "cmin/monoid.hpp"

namespace cmin {

// Finite bag over nonzero monoid elements, stored as a weight-balanced binary
// search tree whose nodes cache the monoid sum of their subtree. total() is a
// root read; insert and truncated subtraction are logarithmic in the number
// of distinct keys, which is bounded by min(|M|, m).
//
// Balancing follows Adams-style weight-balanced trees (subtree sizes are
// stored anyway); any O(log) scheme, e.g. AVL, would do equally well.
class sum_bag {
public:
    explicit sum_bag(monoid_descriptor desc) : desc_(desc) {}

    sum_bag(sum_bag&&) noexcept = default;
    sum_bag& operator=(sum_bag&&) noexcept = default;
    sum_bag(const sum_bag&) = delete;
    sum_bag& operator=(const sum_bag&) = delete;

    const monoid_descriptor& monoid() const { return desc_; }

    // Multiplicity of e grows by k. Rejects the monoid zero.
    void insert(const mvalue& e, std::uint64_t k);

    // Removes up to k occurrences of e; returns how many were present to
    // remove. Truncated: disjoint keys are a no-op.
    std::uint64_t erase_up_to(const mvalue& e, std::uint64_t k);

    // Truncated bag subtraction, (a-b)(y) = max(0, a(y) - b(y)).
    void subtract(std::span<const std::pair<mvalue, std::uint64_t>> other);

    // Canonical summation of the bag, read from the root cache.
    mvalue total() const { return root_ ? root_->sum : desc_.zero(); }

    std::uint64_t distinct_size() const { return root_ ? root_->size : 0; }
    std::uint64_t multiplicity(const mvalue& e) const;
    bool empty() const { return !root_; }

    // In-order (key, multiplicity) stream; this is the canonical form used
    // for bag equality in assertions and tests.
    std::vector<std::pair<mvalue, std::uint64_t>> entries() const;
    void for_each(const std::function<void(const mvalue&, std::uint64_t)>& fn) const;

    bool same_entries(const sum_bag& o) const;

    sum_bag clone() const;

    // Test-build support: full-tree check of order, sizes, cached sums and
    // the balance invariant. Throws internal_error on violation.
    void audit() const;
    std::size_t height() const;

private:
    struct node {
        mvalue key;
        std::uint64_t mult;
        std::uint64_t size; // distinct keys in subtree
        mvalue contrib;     // scale(mult, key)
        mvalue sum;         // sum(left) + contrib + sum(right)
        std::unique_ptr<node> left, right;
    };

    static std::uint64_t size_of(const node* n) { return n ? n->size : 0; }
    void pull(node& n) const;
    void rotate_left(std::unique_ptr<node>& n) const;
    void rotate_right(std::unique_ptr<node>& n) const;
    void rebalance(std::unique_ptr<node>& n) const;
    void insert_rec(std::unique_ptr<node>& n, const mvalue& e, std::uint64_t k);
    std::uint64_t erase_rec(std::unique_ptr<node>& n, const mvalue& e, std::uint64_t k);
    void pop_min(std::unique_ptr<node>& n, node& dst) const;

    monoid_descriptor desc_;
    std::unique_ptr<node> root_;
};

} // namespace cmin

#endif
