#include "cmin/sumbag.hpp"

#include <algorithm>
#include <cmath>

#include "cmin/errors.hpp"

namespace cmin {

// Weight-balance parameters (delta, gamma) = (3, 2) with the size+1
// convention; this pair is known to be valid for insert and delete.
namespace {
constexpr std::uint64_t kDelta = 3;
constexpr std::uint64_t kGamma = 2;

bool balanced_pair(std::uint64_t a, std::uint64_t b) {
    return kDelta * (a + 1) >= (b + 1);
}
} // namespace

void sum_bag::pull(node& n) const {
    n.size = 1 + size_of(n.left.get()) + size_of(n.right.get());
    mvalue s = n.left ? desc_.add(n.left->sum, n.contrib) : n.contrib;
    if (n.right)
        s = desc_.add(s, n.right->sum);
    n.sum = std::move(s);
}

void sum_bag::rotate_left(std::unique_ptr<node>& n) const {
    std::unique_ptr<node> y = std::move(n->right);
    n->right = std::move(y->left);
    pull(*n);
    y->left = std::move(n);
    n = std::move(y);
    pull(*n);
}

void sum_bag::rotate_right(std::unique_ptr<node>& n) const {
    std::unique_ptr<node> y = std::move(n->left);
    n->left = std::move(y->right);
    pull(*n);
    y->right = std::move(n);
    n = std::move(y);
    pull(*n);
}

void sum_bag::rebalance(std::unique_ptr<node>& n) const {
    std::uint64_t ls = size_of(n->left.get());
    std::uint64_t rs = size_of(n->right.get());
    if (!balanced_pair(ls, rs)) {
        // right-heavy
        node* r = n->right.get();
        if (size_of(r->left.get()) + 1 >= kGamma * (size_of(r->right.get()) + 1))
            rotate_right(n->right);
        rotate_left(n);
        return;
    }
    if (!balanced_pair(rs, ls)) {
        node* l = n->left.get();
        if (size_of(l->right.get()) + 1 >= kGamma * (size_of(l->left.get()) + 1))
            rotate_left(n->left);
        rotate_right(n);
        return;
    }
    pull(*n);
}

void sum_bag::insert(const mvalue& e, std::uint64_t k) {
    if (desc_.is_zero(e))
        throw internal_error("sum_bag: inserting the monoid zero");
    if (k == 0)
        return;
    insert_rec(root_, e, k);
}

void sum_bag::insert_rec(std::unique_ptr<node>& n, const mvalue& e, std::uint64_t k) {
    if (!n) {
        n = std::make_unique<node>();
        n->key = e;
        n->mult = k;
        n->size = 1;
        n->contrib = desc_.scale(k, e);
        n->sum = n->contrib;
        return;
    }
    if (e < n->key) {
        insert_rec(n->left, e, k);
    } else if (n->key < e) {
        insert_rec(n->right, e, k);
    } else {
        n->mult += k;
        n->contrib = desc_.scale(n->mult, n->key);
        pull(*n);
        return;
    }
    rebalance(n);
}

std::uint64_t sum_bag::erase_up_to(const mvalue& e, std::uint64_t k) {
    if (k == 0)
        return 0;
    return erase_rec(root_, e, k);
}

void sum_bag::pop_min(std::unique_ptr<node>& n, node& dst) const {
    if (!n->left) {
        dst.key = std::move(n->key);
        dst.mult = n->mult;
        dst.contrib = std::move(n->contrib);
        n = std::move(n->right);
        return;
    }
    pop_min(n->left, dst);
    rebalance(n);
}

std::uint64_t sum_bag::erase_rec(std::unique_ptr<node>& n, const mvalue& e, std::uint64_t k) {
    if (!n)
        return 0;
    std::uint64_t removed;
    if (e < n->key) {
        removed = erase_rec(n->left, e, k);
    } else if (n->key < e) {
        removed = erase_rec(n->right, e, k);
    } else {
        removed = std::min(n->mult, k);
        n->mult -= removed;
        if (n->mult > 0) {
            n->contrib = desc_.scale(n->mult, n->key);
            pull(*n);
            return removed;
        }
        if (!n->left) {
            n = std::move(n->right);
            return removed;
        }
        if (!n->right) {
            n = std::move(n->left);
            return removed;
        }
        pop_min(n->right, *n);
        n->contrib = desc_.scale(n->mult, n->key);
        rebalance(n);
        return removed;
    }
    if (removed != 0)
        rebalance(n);
    return removed;
}

void sum_bag::subtract(std::span<const std::pair<mvalue, std::uint64_t>> other) {
    for (const auto& [key, k] : other)
        erase_up_to(key, k);
}

std::uint64_t sum_bag::multiplicity(const mvalue& e) const {
    const node* n = root_.get();
    while (n) {
        if (e < n->key)
            n = n->left.get();
        else if (n->key < e)
            n = n->right.get();
        else
            return n->mult;
    }
    return 0;
}

void sum_bag::for_each(const std::function<void(const mvalue&, std::uint64_t)>& fn) const {
    struct rec {
        const std::function<void(const mvalue&, std::uint64_t)>& fn;
        void operator()(const node* n) const {
            if (!n)
                return;
            (*this)(n->left.get());
            fn(n->key, n->mult);
            (*this)(n->right.get());
        }
    };
    rec{fn}(root_.get());
}

std::vector<std::pair<mvalue, std::uint64_t>> sum_bag::entries() const {
    std::vector<std::pair<mvalue, std::uint64_t>> out;
    out.reserve(distinct_size());
    for_each([&](const mvalue& k, std::uint64_t m) { out.emplace_back(k, m); });
    return out;
}

bool sum_bag::same_entries(const sum_bag& o) const {
    return entries() == o.entries();
}

sum_bag sum_bag::clone() const {
    sum_bag out(desc_);
    for_each([&](const mvalue& k, std::uint64_t m) { out.insert(k, m); });
    return out;
}

std::size_t sum_bag::height() const {
    struct rec {
        std::size_t operator()(const node* n) const {
            if (!n)
                return 0;
            return 1 + std::max((*this)(n->left.get()), (*this)(n->right.get()));
        }
    };
    return rec{}(root_.get());
}

void sum_bag::audit() const {
    struct rec {
        const sum_bag& bag;
        void operator()(const node* n, const mvalue* lo, const mvalue* hi) const {
            if (!n)
                return;
            CMIN_REQUIRE(n->mult >= 1, "sum_bag: zero multiplicity node");
            CMIN_REQUIRE(!bag.desc_.is_zero(n->key), "sum_bag: zero key");
            if (lo)
                CMIN_REQUIRE(*lo < n->key, "sum_bag: order violation");
            if (hi)
                CMIN_REQUIRE(n->key < *hi, "sum_bag: order violation");
            CMIN_REQUIRE(n->size == 1 + size_of(n->left.get()) + size_of(n->right.get()),
                         "sum_bag: size cache wrong");
            CMIN_REQUIRE(balanced_pair(size_of(n->left.get()), size_of(n->right.get())) &&
                             balanced_pair(size_of(n->right.get()), size_of(n->left.get())),
                         "sum_bag: balance violation");
            CMIN_REQUIRE(n->contrib == bag.desc_.scale(n->mult, n->key),
                         "sum_bag: contrib cache wrong");
            mvalue s = n->left ? bag.desc_.add(n->left->sum, n->contrib) : n->contrib;
            if (n->right)
                s = bag.desc_.add(s, n->right->sum);
            CMIN_REQUIRE(s == n->sum, "sum_bag: sum cache wrong");
            (*this)(n->left.get(), lo, &n->key);
            (*this)(n->right.get(), &n->key, hi);
        }
    };
    rec{*this}(root_.get(), nullptr, nullptr);
}

} // namespace cmin
