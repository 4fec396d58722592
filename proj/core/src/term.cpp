#include "cmin/term.hpp"

#include <algorithm>
#include <cctype>

#include "cmin/errors.hpp"

namespace cmin {

bool functor_term::operator==(const functor_term& o) const {
    return kind == o.kind && (kind != node_kind::monoid_val || monoid == o.monoid) &&
           children == o.children && symbols == o.symbols;
}

namespace {

constexpr std::size_t kMaxAlphabet = 1u << 20;

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

// Recursive-descent parser over the raw line; single-character operators and
// the fixed monoid tokens make a separate tokenizer pointless.
class term_parser {
public:
    explicit term_parser(std::string_view s) : s_(s) {}

    functor_term parse() {
        functor_term t = parse_sum();
        skip_ws();
        if (pos_ != s_.size())
            fail("unexpected trailing input in functor expression");
        return t;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const {
        throw parse_error(msg, 1, pos_ + 1);
    }

    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_])))
            ++pos_;
    }

    char peek() {
        skip_ws();
        return pos_ < s_.size() ? s_[pos_] : '\0';
    }

    bool eat(char c) {
        if (peek() != c)
            return false;
        ++pos_;
        return true;
    }

    void expect(char c, const char* what) {
        if (!eat(c))
            fail(std::string("expected '") + c + "' " + what);
    }

    std::string parse_ident() {
        skip_ws();
        if (pos_ >= s_.size() || !is_ident_start(s_[pos_]))
            fail("expected identifier");
        std::size_t start = pos_;
        while (pos_ < s_.size() && is_ident_char(s_[pos_]))
            ++pos_;
        return std::string(s_.substr(start, pos_ - start));
    }

    std::uint64_t parse_numeral() {
        skip_ws();
        std::size_t start = pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_])))
            ++pos_;
        if (start == pos_)
            fail("expected numeral");
        std::string digits(s_.substr(start, pos_ - start));
        if (digits.size() > 7)
            fail("numeral too large for a finite constant/alphabet");
        return std::stoull(digits);
    }

    std::vector<std::string> parse_symbol_set() {
        expect('{', "to open a symbol set");
        std::vector<std::string> syms;
        syms.push_back(parse_ident());
        while (eat(','))
            syms.push_back(parse_ident());
        expect('}', "to close a symbol set");
        for (std::size_t i = 0; i < syms.size(); ++i)
            for (std::size_t j = i + 1; j < syms.size(); ++j)
                if (syms[i] == syms[j])
                    fail("duplicate symbol '" + syms[i] + "' in set");
        return syms;
    }

    static std::vector<std::string> numeral_tags(std::uint64_t k) {
        std::vector<std::string> syms;
        syms.reserve(k);
        for (std::uint64_t i = 0; i < k; ++i)
            syms.push_back(std::to_string(i));
        return syms;
    }

    std::vector<std::string> parse_alphabet() {
        char c = peek();
        if (c == '{')
            return parse_symbol_set();
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::uint64_t k = parse_numeral();
            if (k == 0)
                fail("alphabets must be non-empty");
            if (k > kMaxAlphabet)
                fail("alphabet too large");
            return numeral_tags(k);
        }
        fail("expected an alphabet ('{...}' or a numeral) after '^'");
    }

    // Tries to read "(N,max)" starting at the current '('; leaves pos_
    // untouched when it is an ordinary parenthesis.
    bool try_nat_max() {
        std::size_t save = pos_;
        auto restore = [&] { pos_ = save; return false; };
        if (!eat('('))
            return restore();
        if (peek() != 'N')
            return restore();
        ++pos_;
        if (!eat(','))
            return restore();
        skip_ws();
        if (s_.substr(pos_, 3) != "max")
            return restore();
        pos_ += 3;
        if (!eat(')'))
            return restore();
        return true;
    }

    functor_term parse_monoid_val(monoid_id id) {
        expect('^', "after a monoid token");
        functor_term t;
        t.kind = functor_term::node_kind::monoid_val;
        t.monoid = id;
        t.children.push_back(parse_prefix());
        return t;
    }

    functor_term parse_primary() {
        char c = peek();
        if (c == '\0')
            fail("unexpected end of functor expression");
        if (c == '(') {
            if (try_nat_max())
                return parse_monoid_val(monoid_id::nat_max);
            ++pos_;
            functor_term t = parse_sum();
            expect(')', "to close a parenthesized term");
            return t;
        }
        if (c == 'X') {
            ++pos_;
            return functor_term{};
        }
        if (c == 'Z') {
            ++pos_;
            return parse_monoid_val(monoid_id::int_add);
        }
        if (c == 'R') {
            ++pos_;
            return parse_monoid_val(monoid_id::rat_add);
        }
        if (c == 'C') {
            fail("unsupported monoid (C,+,0): complex weights are not implemented");
        }
        if (c == 'W') {
            if (s_.substr(pos_, 3) != "W64")
                fail("expected 'W64'");
            pos_ += 3;
            return parse_monoid_val(monoid_id::word64_or);
        }
        if (c == 'N') {
            ++pos_;
            if (pos_ < s_.size() && s_[pos_] == '+') {
                ++pos_;
                return parse_monoid_val(monoid_id::nat_add);
            }
            functor_term t;
            t.kind = functor_term::node_kind::const_nat;
            return t;
        }
        if (c == '{') {
            functor_term t;
            t.kind = functor_term::node_kind::const_set;
            t.symbols = parse_symbol_set();
            return t;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::uint64_t k = parse_numeral();
            if (k == 0)
                fail("the empty constant set is not supported");
            if (k > kMaxAlphabet)
                fail("constant set too large");
            functor_term t;
            t.kind = functor_term::node_kind::const_set;
            t.symbols = numeral_tags(k);
            return t;
        }
        fail(std::string("unexpected character '") + c + "' in functor expression");
    }

    functor_term parse_prefix() {
        char c = peek();
        auto wrap = [&](functor_term::node_kind k) {
            ++pos_;
            functor_term t;
            t.kind = k;
            t.children.push_back(parse_prefix());
            return t;
        };
        if (c == 'P')
            return wrap(functor_term::node_kind::pow);
        if (c == 'B')
            return wrap(functor_term::node_kind::bag);
        if (c == 'D')
            return wrap(functor_term::node_kind::dist);
        return parse_primary();
    }

    functor_term parse_expo() {
        functor_term t = parse_prefix();
        while (peek() == '^') {
            ++pos_;
            functor_term e;
            e.kind = functor_term::node_kind::exp;
            e.symbols = parse_alphabet();
            e.children.push_back(std::move(t));
            t = std::move(e);
        }
        return t;
    }

    functor_term parse_prod() {
        functor_term t = parse_expo();
        if (peek() != 'x')
            return t;
        functor_term p;
        p.kind = functor_term::node_kind::product;
        p.children.push_back(std::move(t));
        while (eat('x'))
            p.children.push_back(parse_expo());
        return p;
    }

    functor_term parse_sum() {
        functor_term t = parse_prod();
        if (peek() != '+')
            return t;
        functor_term p;
        p.kind = functor_term::node_kind::sum;
        p.children.push_back(std::move(t));
        while (eat('+'))
            p.children.push_back(parse_prod());
        return p;
    }

    std::string_view s_;
    std::size_t pos_ = 0;
};

bool is_numeral_range(const std::vector<std::string>& syms) {
    for (std::size_t i = 0; i < syms.size(); ++i)
        if (syms[i] != std::to_string(i))
            return false;
    return true;
}

// Precedence levels for printing: sum < prod < exp < prefix/atom.
enum level : int { lv_sum = 0, lv_prod = 1, lv_exp = 2, lv_atom = 3 };

void print_rec(const functor_term& t, int min_level, std::string& out) {
    using nk = functor_term::node_kind;
    auto paren = [&](int self, auto&& body) {
        bool need = self < min_level;
        if (need)
            out += '(';
        body();
        if (need)
            out += ')';
    };
    switch (t.kind) {
    case nk::var: out += 'X'; return;
    case nk::const_nat: out += 'N'; return;
    case nk::const_set:
        if (is_numeral_range(t.symbols)) {
            out += std::to_string(t.symbols.size());
        } else {
            out += '{';
            for (std::size_t i = 0; i < t.symbols.size(); ++i) {
                if (i)
                    out += ',';
                out += t.symbols[i];
            }
            out += '}';
        }
        return;
    case nk::pow:
    case nk::bag:
    case nk::dist:
        paren(lv_atom, [&] {
            out += t.kind == nk::pow ? 'P' : t.kind == nk::bag ? 'B' : 'D';
            out += ' ';
            print_rec(t.children[0], lv_atom, out);
        });
        return;
    case nk::monoid_val:
        paren(lv_atom, [&] {
            out += monoid_name(t.monoid);
            out += '^';
            print_rec(t.children[0], lv_atom, out);
        });
        return;
    case nk::exp:
        paren(lv_exp, [&] {
            print_rec(t.children[0], lv_exp, out);
            out += '^';
            if (is_numeral_range(t.symbols)) {
                out += std::to_string(t.symbols.size());
            } else {
                out += '{';
                for (std::size_t i = 0; i < t.symbols.size(); ++i) {
                    if (i)
                        out += ',';
                    out += t.symbols[i];
                }
                out += '}';
            }
        });
        return;
    case nk::product:
        paren(lv_prod, [&] {
            for (std::size_t i = 0; i < t.children.size(); ++i) {
                if (i)
                    out += " x ";
                print_rec(t.children[i], lv_exp, out);
            }
        });
        return;
    case nk::sum:
        paren(lv_sum, [&] {
            for (std::size_t i = 0; i < t.children.size(); ++i) {
                if (i)
                    out += " + ";
                print_rec(t.children[i], lv_prod, out);
            }
        });
        return;
    }
}

bool contains_var(const functor_term& t) {
    if (t.kind == functor_term::node_kind::var)
        return true;
    return std::any_of(t.children.begin(), t.children.end(),
                       [](const functor_term& c) { return contains_var(c); });
}

bool is_basic(const functor_term& t) {
    using nk = functor_term::node_kind;
    return t.kind == nk::pow || t.kind == nk::bag || t.kind == nk::dist ||
           t.kind == nk::monoid_val;
}

struct planner {
    sort_plan plan;

    std::uint32_t new_sort(sort_kind k, monoid_id m, const functor_term* node) {
        plan.sorts.push_back({k, m, node});
        return static_cast<std::uint32_t>(plan.sorts.size() - 1);
    }

    static sort_kind basic_kind(const functor_term& t) {
        switch (t.kind) {
        case functor_term::node_kind::pow: return sort_kind::pow;
        case functor_term::node_kind::bag: return sort_kind::bag;
        case functor_term::node_kind::dist: return sort_kind::dist;
        default: return sort_kind::monoid_val;
        }
    }

    // Assigns the node that starts a fresh region; returns its sort id.
    std::uint32_t enter(const functor_term& t) {
        if (is_basic(t)) {
            std::uint32_t s = new_sort(basic_kind(t), t.monoid, &t);
            plan.region[&t] = s;
            child_of_basic(t.children[0]);
            return s;
        }
        // polynomial region root (a bare root Var counts as one as well)
        std::uint32_t s = new_sort(sort_kind::poly, monoid_id::int_add, &t);
        poly_region(t, s);
        return s;
    }

    void child_of_basic(const functor_term& t) {
        if (t.kind == functor_term::node_kind::var) {
            plan.region[&t] = sort_plan::k_direct;
            return;
        }
        enter(t);
    }

    void poly_region(const functor_term& t, std::uint32_t region) {
        plan.region[&t] = region;
        if (t.kind == functor_term::node_kind::var)
            return;
        for (const functor_term& c : t.children) {
            if (is_basic(c))
                enter(c);
            else
                poly_region(c, region);
        }
    }
};

} // namespace

functor_term parse_functor(std::string_view line) {
    return term_parser(line).parse();
}

std::string print_functor(const functor_term& t) {
    std::string out;
    print_rec(t, lv_sum, out);
    return out;
}

sort_plan plan_decomposition(const functor_term& t) {
    if (!contains_var(t))
        throw parse_error("functor has no occurrence of X: the coalgebra would be a constant");
    planner p;
    p.plan.original_sort = p.enter(t);
    CMIN_REQUIRE(p.plan.original_sort == 0, "root region must be sort 0");
    return p.plan;
}

} // namespace cmin
