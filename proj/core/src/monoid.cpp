#include "cmin/monoid.hpp"

#include <algorithm>
#include <cstddef>

#include "cmin/errors.hpp"

namespace cmin {

const char* monoid_name(monoid_id id) {
    switch (id) {
    case monoid_id::int_add: return "Z";
    case monoid_id::rat_add: return "R";
    case monoid_id::nat_add: return "N+";
    case monoid_id::nat_max: return "(N,max)";
    case monoid_id::word64_or: return "W64";
    case monoid_id::bool_or: return "2";
    }
    return "?";
}

bool mvalue::operator<(const mvalue& o) const {
    CMIN_REQUIRE(v_.index() == o.v_.index(), "ordering mvalues of different monoids");
    return v_ < o.v_;
}

void encode_u64(std::string& out, std::uint64_t v) {
    for (int i = 7; i >= 0; --i)
        out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void encode_big_int(std::string& out, const big_int& v) {
    out.push_back(v.sign() < 0 ? '\x00' : (v.sign() == 0 ? '\x01' : '\x02'));
    big_int mag = abs(v);
    std::string bytes;
    while (mag != 0) {
        bytes.push_back(static_cast<char>(static_cast<unsigned>(mag & 0xff)));
        mag >>= 8;
    }
    std::reverse(bytes.begin(), bytes.end());
    encode_u64(out, bytes.size());
    out += bytes;
}

void mvalue::encode(std::string& out) const {
    struct visitor {
        std::string& out;
        void operator()(const big_int& i) const {
            out.push_back('i');
            encode_big_int(out, i);
        }
        void operator()(const big_rat& r) const {
            out.push_back('r');
            encode_big_int(out, numerator(r));
            encode_big_int(out, denominator(r));
        }
        void operator()(std::uint64_t w) const {
            out.push_back('w');
            encode_u64(out, w);
        }
        void operator()(bool b) const {
            out.push_back('b');
            out.push_back(b ? '\x01' : '\x00');
        }
        void operator()(const groth_pair& g) const {
            out.push_back('g');
            encode_big_int(out, g.pos);
            encode_big_int(out, g.neg);
        }
    };
    std::visit(visitor{out}, v_);
}

std::string mvalue::encode() const {
    std::string s;
    encode(s);
    return s;
}

monoid_descriptor descriptor(monoid_id id) {
    switch (id) {
    case monoid_id::int_add: return {id, true, true};
    case monoid_id::rat_add: return {id, true, true};
    case monoid_id::nat_add: return {id, false, true};
    case monoid_id::nat_max: return {id, false, false};
    case monoid_id::word64_or: return {id, false, false};
    case monoid_id::bool_or: return {id, false, false};
    }
    throw internal_error("unknown monoid id");
}

mvalue monoid_descriptor::zero() const {
    switch (id) {
    case monoid_id::int_add:
    case monoid_id::nat_add:
    case monoid_id::nat_max: return mvalue(big_int(0));
    case monoid_id::rat_add: return mvalue(big_rat(0));
    case monoid_id::word64_or: return mvalue(std::uint64_t{0});
    case monoid_id::bool_or: return mvalue(false);
    }
    throw internal_error("unknown monoid id");
}

mvalue monoid_descriptor::add(const mvalue& a, const mvalue& b) const {
    switch (id) {
    case monoid_id::int_add:
    case monoid_id::nat_add: return mvalue(big_int(a.as_int() + b.as_int()));
    case monoid_id::nat_max: return mvalue(big_int(std::max(a.as_int(), b.as_int())));
    case monoid_id::rat_add: return mvalue(big_rat(a.as_rat() + b.as_rat()));
    case monoid_id::word64_or: return mvalue(a.as_word() | b.as_word());
    case monoid_id::bool_or: return mvalue(a.as_bool() || b.as_bool());
    }
    throw internal_error("unknown monoid id");
}

mvalue monoid_descriptor::negate(const mvalue& a) const {
    CMIN_REQUIRE(is_group, "negate on a non-group monoid");
    if (id == monoid_id::int_add)
        return mvalue(big_int(-a.as_int()));
    return mvalue(big_rat(-a.as_rat()));
}

mvalue monoid_descriptor::scale(std::uint64_t k, const mvalue& a) const {
    mvalue acc = zero();
    mvalue base = a;
    while (k != 0) {
        if (k & 1)
            acc = add(acc, base);
        k >>= 1;
        if (k != 0)
            base = add(base, base);
    }
    return acc;
}

namespace {

bool all_digits(std::string_view s) {
    if (s.empty())
        return false;
    for (char c : s)
        if (c < '0' || c > '9')
            return false;
    return true;
}

std::optional<big_int> parse_signed_int(std::string_view s) {
    bool neg = false;
    if (!s.empty() && (s[0] == '-' || s[0] == '+')) {
        neg = s[0] == '-';
        s.remove_prefix(1);
    }
    if (!all_digits(s))
        return std::nullopt;
    big_int v{std::string(s)};
    return neg ? big_int(-v) : v;
}

std::optional<big_rat> parse_decimal(std::string_view s) {
    bool neg = false;
    if (!s.empty() && (s[0] == '-' || s[0] == '+')) {
        neg = s[0] == '-';
        s.remove_prefix(1);
    }
    auto dot = s.find('.');
    std::string_view ip = s.substr(0, dot);
    std::string_view fp = dot == std::string_view::npos ? std::string_view{} : s.substr(dot + 1);
    if (dot != std::string_view::npos && fp.empty())
        return std::nullopt;
    if (!all_digits(ip))
        return std::nullopt;
    big_int num{std::string(ip)};
    big_int den(1);
    if (!fp.empty()) {
        if (!all_digits(fp))
            return std::nullopt;
        for (char c : fp) {
            num = num * 10 + (c - '0');
            den *= 10;
        }
    }
    big_rat r(num, den);
    return neg ? big_rat(-r) : r;
}

// Fraction extension: "p/q" with a decimal integer p and positive decimal
// integer q. Needed so re-emitted coalgebras can carry exact weights whose
// denominators do not divide a power of ten.
std::optional<big_rat> parse_fraction(std::string_view s) {
    auto slash = s.find('/');
    if (slash == std::string_view::npos)
        return std::nullopt;
    auto num = parse_signed_int(s.substr(0, slash));
    std::string_view dens = s.substr(slash + 1);
    if (!num || !all_digits(dens))
        return std::nullopt;
    big_int den{std::string(dens)};
    if (den == 0)
        return std::nullopt;
    return big_rat(*num, den);
}

} // namespace

std::optional<mvalue> monoid_descriptor::parse_literal(std::string_view text) const {
    switch (id) {
    case monoid_id::int_add: {
        auto v = parse_signed_int(text);
        if (!v)
            return std::nullopt;
        return mvalue(std::move(*v));
    }
    case monoid_id::nat_add: {
        auto v = parse_signed_int(text);
        if (!v || *v < 0)
            return std::nullopt;
        return mvalue(std::move(*v));
    }
    case monoid_id::nat_max: {
        if (!all_digits(text))
            return std::nullopt;
        return mvalue(big_int(std::string(text)));
    }
    case monoid_id::rat_add: {
        if (auto f = parse_fraction(text))
            return mvalue(std::move(*f));
        auto v = parse_decimal(text);
        if (!v)
            return std::nullopt;
        return mvalue(std::move(*v));
    }
    case monoid_id::word64_or: {
        std::string_view s = text;
        std::uint64_t acc = 0;
        if (s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X')) {
            s.remove_prefix(2);
            if (s.empty() || s.size() > 16)
                return std::nullopt;
            for (char c : s) {
                int d;
                if (c >= '0' && c <= '9')
                    d = c - '0';
                else if (c >= 'a' && c <= 'f')
                    d = c - 'a' + 10;
                else if (c >= 'A' && c <= 'F')
                    d = c - 'A' + 10;
                else
                    return std::nullopt;
                acc = (acc << 4) | static_cast<std::uint64_t>(d);
            }
            return mvalue(acc);
        }
        if (!all_digits(s))
            return std::nullopt;
        big_int v{std::string(s)};
        if (v > big_int(std::numeric_limits<std::uint64_t>::max()))
            return std::nullopt;
        return mvalue(static_cast<std::uint64_t>(v));
    }
    case monoid_id::bool_or: return std::nullopt;
    }
    return std::nullopt;
}

std::string print_rational(const big_rat& r) {
    big_int num = numerator(r);
    big_int den = denominator(r);
    // Strip factors of 2 and 5; what remains decides decimal vs fraction form.
    big_int rest = den;
    int twos = 0, fives = 0;
    while (rest % 2 == 0) {
        rest /= 2;
        ++twos;
    }
    while (rest % 5 == 0) {
        rest /= 5;
        ++fives;
    }
    if (rest != 1)
        return num.str() + "/" + den.str();
    int digits = std::max(twos, fives);
    if (digits == 0)
        return num.str();
    big_int scale = 1;
    for (int i = 0; i < digits; ++i)
        scale *= 10;
    big_int scaled = num * (scale / den);
    bool neg = scaled < 0;
    std::string s = big_int(abs(scaled)).str();
    if (s.size() <= static_cast<std::size_t>(digits))
        s.insert(0, static_cast<std::size_t>(digits) + 1 - s.size(), '0');
    s.insert(s.size() - static_cast<std::size_t>(digits), ".");
    while (s.back() == '0')
        s.pop_back();
    if (s.back() == '.')
        s.pop_back();
    return neg ? "-" + s : s;
}

std::string monoid_descriptor::print_literal(const mvalue& v) const {
    switch (id) {
    case monoid_id::int_add:
    case monoid_id::nat_add:
    case monoid_id::nat_max: return v.as_int().str();
    case monoid_id::rat_add: return print_rational(v.as_rat());
    case monoid_id::word64_or: {
        char buf[32];
        std::snprintf(buf, sizeof buf, "0x%llx", static_cast<unsigned long long>(v.as_word()));
        return buf;
    }
    case monoid_id::bool_or: throw internal_error("bool_or has no literal form");
    }
    throw internal_error("unknown monoid id");
}

mvalue grothendieck_normalize(const monoid_descriptor& m, const mvalue& pos, const mvalue& neg) {
    if (!m.is_cancellative)
        throw parse_error("Grothendieck construction requires a cancellative monoid, got " +
                          std::string(monoid_name(m.id)));
    if (m.is_group)
        return m.add(pos, m.negate(neg));
    // nat_add: subtract min(pos, neg) from both components.
    const big_int& p = pos.as_int();
    const big_int& n = neg.as_int();
    const big_int& mn = std::min(p, n);
    return mvalue(groth_pair{p - mn, n - mn});
}

group_view::group_view(monoid_descriptor base)
    : base_(base), via_groth_(!base.is_group) {
    CMIN_REQUIRE(base.is_cancellative, "group view over a non-cancellative monoid");
}

mvalue group_view::zero() const {
    if (via_groth_)
        return mvalue(groth_pair{0, 0});
    return base_.zero();
}

mvalue group_view::embed(const mvalue& label) const {
    if (via_groth_)
        return grothendieck_normalize(base_, label, base_.zero());
    return label;
}

mvalue group_view::add(const mvalue& a, const mvalue& b) const {
    if (!via_groth_)
        return base_.add(a, b);
    const auto& x = a.as_groth();
    const auto& y = b.as_groth();
    big_int p = x.pos + y.pos;
    big_int n = x.neg + y.neg;
    const big_int& mn = std::min(p, n);
    return mvalue(groth_pair{p - mn, n - mn});
}

mvalue group_view::negate(const mvalue& a) const {
    if (!via_groth_)
        return base_.negate(a);
    const auto& x = a.as_groth();
    return mvalue(groth_pair{x.neg, x.pos});
}

} // namespace cmin
