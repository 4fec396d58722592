#ifndef CMIN_MONOID_HPP
#define CMIN_MONOID_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include <boost/multiprecision/cpp_int.hpp>

namespace cmin {

using big_int = boost::multiprecision::cpp_int;
using big_rat = boost::multiprecision::cpp_rational;

// The commutative monoids usable as edge weights. rat_add realizes (R,+,0)
// with exact rationals: partition refinement groups states by exact weight
// equality, which floating point cannot provide.
enum class monoid_id : std::uint8_t {
    int_add,   // (Z, +, 0)
    rat_add,   // exact rationals with (+, 0)
    nat_add,   // (N, +, 0)
    nat_max,   // (N, max, 0)
    word64_or, // 64-bit words with bitwise or
    bool_or,   // (2, v, 0); never appears in literals, the powerset interface covers it
};

const char* monoid_name(monoid_id id);

// Element of the Grothendieck group of a cancellative monoid, kept in the
// monoid-specific canonical form so structural equality coincides with the
// quotient equality (a+,a-) ~ (b+,b-) iff a+ + b- = b+ + a-.
struct groth_pair {
    big_int pos;
    big_int neg;

    bool operator==(const groth_pair& o) const { return pos == o.pos && neg == o.neg; }
    bool operator<(const groth_pair& o) const {
        if (pos != o.pos)
            return pos < o.pos;
        return neg < o.neg;
    }
};

// A single monoid element. Equality is exact and decidable; a total order and
// an injective byte encoding exist so values can serve as sort/grouping keys.
class mvalue {
public:
    mvalue() : v_(big_int(0)) {}
    explicit mvalue(big_int i) : v_(std::move(i)) {}
    explicit mvalue(big_rat r) : v_(std::move(r)) {}
    explicit mvalue(std::uint64_t w) : v_(w) {}
    explicit mvalue(bool b) : v_(b) {}
    explicit mvalue(groth_pair g) : v_(std::move(g)) {}

    const big_int& as_int() const { return std::get<big_int>(v_); }
    const big_rat& as_rat() const { return std::get<big_rat>(v_); }
    std::uint64_t as_word() const { return std::get<std::uint64_t>(v_); }
    bool as_bool() const { return std::get<bool>(v_); }
    const groth_pair& as_groth() const { return std::get<groth_pair>(v_); }
    bool is_groth() const { return std::holds_alternative<groth_pair>(v_); }

    bool operator==(const mvalue& o) const { return v_ == o.v_; }
    bool operator!=(const mvalue& o) const { return !(v_ == o.v_); }

    // Fixed total order: numeric where one exists, componentwise (pos, neg)
    // for Grothendieck pairs. Search-tree keys need any fixed total order,
    // not a semantic one.
    bool operator<(const mvalue& o) const;

    // Canonical injective byte encoding, usable as a grouping key.
    void encode(std::string& out) const;
    std::string encode() const;

private:
    std::variant<big_int, big_rat, std::uint64_t, bool, groth_pair> v_;
};

struct monoid_descriptor {
    monoid_id id;
    bool is_group;        // negate exists
    bool is_cancellative; // a+b = a+c implies b = c

    mvalue zero() const;
    mvalue add(const mvalue& a, const mvalue& b) const;
    mvalue negate(const mvalue& a) const; // groups only
    bool is_zero(const mvalue& a) const { return a == zero(); }

    // a added to itself k times; k = 0 gives zero. Binary doubling, O(log k)
    // additions.
    mvalue scale(std::uint64_t k, const mvalue& a) const;

    // Literal syntax used by the coalgebra parser. Returns nothing when the
    // text is not a valid literal of this monoid (bool_or has no literals).
    std::optional<mvalue> parse_literal(std::string_view text) const;
    std::string print_literal(const mvalue& v) const;
};

monoid_descriptor descriptor(monoid_id id);

// Canonical representative of [(pos, neg)] in the Grothendieck group of a
// cancellative monoid. The embedding of a value v is normalize(v, zero).
// For group monoids the pair collapses into the group itself.
mvalue grothendieck_normalize(const monoid_descriptor& m, const mvalue& pos, const mvalue& neg);

// The group the cancellative monoid m embeds into, as used by the group
// refinement interface: labels are embedded on the fly, arithmetic happens on
// canonical representatives.
class group_view {
public:
    explicit group_view(monoid_descriptor base);

    const monoid_descriptor& base() const { return base_; }
    bool via_grothendieck() const { return via_groth_; }

    mvalue zero() const;
    mvalue embed(const mvalue& label) const;
    mvalue add(const mvalue& a, const mvalue& b) const;
    mvalue negate(const mvalue& a) const;
    mvalue sub(const mvalue& a, const mvalue& b) const { return add(a, negate(b)); }

private:
    monoid_descriptor base_;
    bool via_groth_;
};

// Encoding helpers shared by the canonical byte formats.
void encode_u64(std::string& out, std::uint64_t v);
void encode_big_int(std::string& out, const big_int& v);

// Rationals print as plain decimals whenever the denominator divides a power
// of ten, and as "p/q" otherwise. The parser accepts both forms.
std::string print_rational(const big_rat& r);

} // namespace cmin

#endif
