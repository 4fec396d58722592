#include "cmin/syntax.hpp"

#include <algorithm>
#include <cctype>
#include <map>

#include "cmin/errors.hpp"

namespace cmin {

sym_value::sym_value(const sym_value& o)
    : k(o.k), idx(o.idx), num(o.num ? std::make_unique<big_int>(*o.num) : nullptr),
      children(o.children), weights(o.weights) {}

sym_value& sym_value::operator=(const sym_value& o) {
    if (this != &o) {
        k = o.k;
        idx = o.idx;
        num = o.num ? std::make_unique<big_int>(*o.num) : nullptr;
        children = o.children;
        weights = o.weights;
    }
    return *this;
}

namespace {

using nk = functor_term::node_kind;
using vk = sym_value::kind;

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

bool is_literal_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '/' || c == '+' ||
           c == '-';
}

monoid_descriptor node_monoid(const functor_term& node) {
    return descriptor(node.kind == nk::dist ? monoid_id::rat_add : node.monoid);
}

void append_len_prefixed(std::string& out, const std::string& part) {
    encode_u64(out, part.size());
    out += part;
}

// Parses one `name: value` line against the term shape.
class value_parser {
public:
    value_parser(std::string_view line, std::size_t line_no,
                 const std::unordered_map<std::string, std::uint32_t>& names)
        : s_(line), line_(line_no), names_(names) {}

    std::string parse_state_name() {
        std::string name = parse_ident("state name");
        expect(':', "after the state name");
        return name;
    }

    sym_value parse_value(const functor_term& node) {
        sym_value v = parse(node);
        skip_ws();
        if (pos_ != s_.size())
            fail("unexpected trailing input after state value");
        return v;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const {
        throw parse_error(msg, line_, pos_ + 1);
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

    std::string parse_ident(const char* what) {
        skip_ws();
        if (pos_ >= s_.size() || !is_ident_start(s_[pos_]))
            fail(std::string("expected ") + what);
        std::size_t start = pos_;
        while (pos_ < s_.size() && is_ident_char(s_[pos_]))
            ++pos_;
        return std::string(s_.substr(start, pos_ - start));
    }

    std::string parse_digits() {
        skip_ws();
        std::size_t start = pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_])))
            ++pos_;
        if (start == pos_)
            fail("expected a numeral");
        return std::string(s_.substr(start, pos_ - start));
    }

    std::string parse_literal_token() {
        skip_ws();
        std::size_t start = pos_;
        while (pos_ < s_.size() && is_literal_char(s_[pos_]))
            ++pos_;
        if (start == pos_)
            fail("expected a weight literal");
        return std::string(s_.substr(start, pos_ - start));
    }

    // tag token for constant-set members and exponent letters
    std::string parse_symbol_token() {
        char c = peek();
        if (std::isdigit(static_cast<unsigned char>(c)))
            return parse_digits();
        return parse_ident("symbol");
    }

    sym_value parse(const functor_term& node) {
        // Redundant parentheses are accepted around any non-tuple value.
        if (node.kind != nk::product && peek() == '(') {
            ++pos_;
            sym_value v = parse(node);
            expect(')', "to close a parenthesized value");
            return v;
        }
        switch (node.kind) {
        case nk::var: {
            std::string name = parse_ident("state name");
            auto it = names_.find(name);
            if (it == names_.end())
                fail("unknown state name '" + name + "'");
            sym_value v;
            v.k = vk::state_ref;
            v.idx = it->second;
            return v;
        }
        case nk::product: {
            expect('(', "to open a tuple");
            sym_value v;
            v.k = vk::tuple;
            for (std::size_t i = 0; i < node.children.size(); ++i) {
                if (i)
                    expect(',', "between tuple components");
                v.children.push_back(parse(node.children[i]));
            }
            expect(')', "to close a tuple");
            return v;
        }
        case nk::sum: {
            std::string kw = parse_ident("'inj'");
            if (kw != "inj")
                fail("expected 'inj' for a sum value");
            std::string digits = parse_digits();
            if (digits.size() > 7)
                fail("injection index out of range");
            std::uint64_t i = std::stoull(digits);
            if (i >= node.children.size())
                fail("injection index " + digits + " out of range (sum has " +
                     std::to_string(node.children.size()) + " components)");
            sym_value v;
            v.k = vk::inj;
            v.idx = static_cast<std::uint32_t>(i);
            v.children.push_back(parse(node.children[i]));
            return v;
        }
        case nk::pow:
        case nk::bag: {
            expect('{', "to open a collection");
            sym_value v;
            v.k = vk::collection;
            if (!eat('}')) {
                v.children.push_back(parse(node.children[0]));
                while (eat(','))
                    v.children.push_back(parse(node.children[0]));
                expect('}', "to close a collection");
            }
            if (node.kind == nk::pow) {
                // sets collapse duplicates
                std::vector<std::string> seen;
                std::vector<sym_value> kept;
                for (auto& c : v.children) {
                    std::string b = value_bytes(node.children[0], c);
                    if (std::find(seen.begin(), seen.end(), b) == seen.end()) {
                        seen.push_back(std::move(b));
                        kept.push_back(std::move(c));
                    }
                }
                v.children = std::move(kept);
            }
            return v;
        }
        case nk::dist:
        case nk::monoid_val: {
            monoid_descriptor desc = node_monoid(node);
            expect('{', "to open a weighted map");
            sym_value v;
            v.k = vk::weighted_map;
            std::vector<std::string> key_bytes;
            std::vector<mvalue> raw_weights;
            if (!eat('}')) {
                do {
                    sym_value key = parse(node.children[0]);
                    expect(':', "between map key and weight");
                    std::string lit = parse_literal_token();
                    auto w = desc.parse_literal(lit);
                    if (!w)
                        fail("invalid " + std::string(monoid_name(desc.id)) + " literal '" +
                             lit + "'");
                    std::string b = value_bytes(node.children[0], key);
                    if (std::find(key_bytes.begin(), key_bytes.end(), b) != key_bytes.end())
                        fail("duplicate key in a weighted map");
                    key_bytes.push_back(std::move(b));
                    v.children.push_back(std::move(key));
                    raw_weights.push_back(std::move(*w));
                } while (eat(','));
                expect('}', "to close a weighted map");
            }
            if (node.kind == nk::dist) {
                mvalue sum = desc.zero();
                for (const auto& w : raw_weights) {
                    if (w.as_rat() < 0)
                        fail("negative weight in a distribution");
                    sum = desc.add(sum, w);
                }
                if (!(sum == mvalue(big_rat(1))))
                    fail("distribution weights must sum to exactly 1");
            }
            // zero entries denote absent keys
            std::vector<sym_value> keys;
            std::vector<mvalue> weights;
            for (std::size_t i = 0; i < raw_weights.size(); ++i) {
                if (!desc.is_zero(raw_weights[i])) {
                    keys.push_back(std::move(v.children[i]));
                    weights.push_back(std::move(raw_weights[i]));
                }
            }
            v.children = std::move(keys);
            v.weights = std::move(weights);
            return v;
        }
        case nk::exp: {
            expect('{', "to open a function table");
            std::vector<bool> filled(node.symbols.size(), false);
            std::vector<sym_value> slots(node.symbols.size());
            do {
                std::string letter = parse_symbol_token();
                auto it = std::find(node.symbols.begin(), node.symbols.end(), letter);
                if (it == node.symbols.end())
                    fail("unknown letter '" + letter + "' in function table");
                std::size_t li = static_cast<std::size_t>(it - node.symbols.begin());
                if (filled[li])
                    fail("duplicate letter '" + letter + "' in function table");
                expect(':', "between letter and value");
                slots[li] = parse(node.children[0]);
                filled[li] = true;
            } while (eat(','));
            expect('}', "to close a function table");
            for (std::size_t i = 0; i < filled.size(); ++i)
                if (!filled[i])
                    fail("missing letter '" + node.symbols[i] + "' in function table");
            sym_value v;
            v.k = vk::exp_map;
            v.children = std::move(slots);
            return v;
        }
        case nk::const_set: {
            std::string sym = parse_symbol_token();
            auto it = std::find(node.symbols.begin(), node.symbols.end(), sym);
            if (it == node.symbols.end())
                fail("'" + sym + "' is not a member of the constant set");
            sym_value v;
            v.k = vk::const_sym;
            v.idx = static_cast<std::uint32_t>(it - node.symbols.begin());
            return v;
        }
        case nk::const_nat: {
            std::string digits = parse_digits();
            sym_value v;
            v.k = vk::const_num;
            v.num = std::make_unique<big_int>(digits);
            return v;
        }
        }
        fail("internal: unhandled term node");
    }

    std::string_view s_;
    std::size_t pos_ = 0;
    std::size_t line_;
    const std::unordered_map<std::string, std::uint32_t>& names_;
};

struct body_line {
    std::string_view text;
    std::size_t number;
};

std::vector<body_line> split_body(std::string_view body, std::size_t line_offset) {
    std::vector<body_line> out;
    std::size_t line_no = line_offset;
    std::size_t start = 0;
    while (start <= body.size()) {
        std::size_t end = body.find('\n', start);
        std::string_view line = body.substr(
            start, end == std::string_view::npos ? body.size() - start : end - start);
        if (auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        bool blank = line.find_first_not_of(" \t\r") == std::string_view::npos;
        if (!blank)
            out.push_back({line, line_no});
        if (end == std::string_view::npos)
            break;
        start = end + 1;
        ++line_no;
    }
    return out;
}

} // namespace

symbolic_coalgebra parse_coalgebra(functor_term term, std::string_view body,
                                   std::size_t line_offset) {
    symbolic_coalgebra s;
    s.term = std::move(term);
    auto lines = split_body(body, line_offset);

    std::unordered_map<std::string, std::uint32_t> names;
    for (const auto& ln : lines) {
        value_parser head(ln.text, ln.number, names);
        std::string name = head.parse_state_name();
        if (name == "inj")
            throw parse_error("'inj' is reserved and cannot name a state", ln.number);
        if (!names.emplace(name, static_cast<std::uint32_t>(s.state_names.size())).second)
            throw parse_error("duplicate state '" + name + "'", ln.number);
        s.state_names.push_back(std::move(name));
    }

    s.values.reserve(lines.size());
    for (const auto& ln : lines) {
        value_parser p(ln.text, ln.number, names);
        p.parse_state_name();
        s.values.push_back(p.parse_value(s.term));
    }
    return s;
}

symbolic_coalgebra parse_coalgebra_file(std::string_view text) {
    // the functor term is the first line carrying anything
    std::size_t start = 0, line_no = 1;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        std::string_view line = text.substr(
            start, end == std::string_view::npos ? text.size() - start : end - start);
        if (auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        if (line.find_first_not_of(" \t\r") != std::string_view::npos) {
            functor_term t;
            try {
                t = parse_functor(line);
            } catch (const parse_error& e) {
                throw parse_error(std::string("in functor expression: ") + e.what(), line_no);
            }
            std::string_view body =
                end == std::string_view::npos ? std::string_view{} : text.substr(end + 1);
            return parse_coalgebra(std::move(t), body, line_no + 1);
        }
        if (end == std::string_view::npos)
            break;
        start = end + 1;
        ++line_no;
    }
    throw parse_error("empty input: expected a functor expression on the first line");
}

std::string value_bytes(const functor_term& node, const sym_value& v) {
    std::string out;
    switch (node.kind) {
    case nk::var:
        out += 'S';
        encode_u64(out, v.idx);
        break;
    case nk::product:
        out += 'T';
        for (std::size_t i = 0; i < node.children.size(); ++i)
            append_len_prefixed(out, value_bytes(node.children[i], v.children[i]));
        break;
    case nk::sum:
        out += 'I';
        encode_u64(out, v.idx);
        out += value_bytes(node.children[v.idx], v.children[0]);
        break;
    case nk::pow:
    case nk::bag: {
        out += node.kind == nk::pow ? 'P' : 'G';
        std::vector<std::string> parts;
        parts.reserve(v.children.size());
        for (const auto& c : v.children)
            parts.push_back(value_bytes(node.children[0], c));
        std::sort(parts.begin(), parts.end());
        if (node.kind == nk::pow)
            parts.erase(std::unique(parts.begin(), parts.end()), parts.end());
        encode_u64(out, parts.size());
        for (const auto& p : parts)
            append_len_prefixed(out, p);
        break;
    }
    case nk::dist:
    case nk::monoid_val: {
        out += 'M';
        std::vector<std::pair<std::string, std::string>> parts;
        parts.reserve(v.children.size());
        for (std::size_t i = 0; i < v.children.size(); ++i)
            parts.emplace_back(value_bytes(node.children[0], v.children[i]),
                               v.weights[i].encode());
        std::sort(parts.begin(), parts.end());
        encode_u64(out, parts.size());
        for (const auto& [kb, wb] : parts) {
            append_len_prefixed(out, kb);
            append_len_prefixed(out, wb);
        }
        break;
    }
    case nk::exp:
        out += 'E';
        for (std::size_t i = 0; i < v.children.size(); ++i)
            append_len_prefixed(out, value_bytes(node.children[0], v.children[i]));
        break;
    case nk::const_set:
        out += 'C';
        encode_u64(out, v.idx);
        break;
    case nk::const_nat:
        out += 'Q';
        encode_big_int(out, *v.num);
        break;
    }
    return out;
}

namespace {

void print_value(const functor_term& node, const sym_value& v,
                 const std::vector<std::string>& names, std::string& out);

void print_map_key(const functor_term& node, const sym_value& v,
                   const std::vector<std::string>& names, std::string& out) {
    bool parens = v.k == vk::inj;
    if (parens)
        out += '(';
    print_value(node, v, names, out);
    if (parens)
        out += ')';
}

void print_value(const functor_term& node, const sym_value& v,
                 const std::vector<std::string>& names, std::string& out) {
    switch (node.kind) {
    case nk::var: out += names[v.idx]; return;
    case nk::product:
        out += '(';
        for (std::size_t i = 0; i < v.children.size(); ++i) {
            if (i)
                out += ", ";
            print_value(node.children[i], v.children[i], names, out);
        }
        out += ')';
        return;
    case nk::sum:
        out += "inj " + std::to_string(v.idx) + " ";
        print_value(node.children[v.idx], v.children[0], names, out);
        return;
    case nk::pow:
    case nk::bag:
        out += '{';
        for (std::size_t i = 0; i < v.children.size(); ++i) {
            if (i)
                out += ", ";
            print_value(node.children[0], v.children[i], names, out);
        }
        out += '}';
        return;
    case nk::dist:
    case nk::monoid_val: {
        monoid_descriptor desc = node_monoid(node);
        out += '{';
        for (std::size_t i = 0; i < v.children.size(); ++i) {
            if (i)
                out += ", ";
            print_map_key(node.children[0], v.children[i], names, out);
            out += ": " + desc.print_literal(v.weights[i]);
        }
        out += '}';
        return;
    }
    case nk::exp:
        out += '{';
        for (std::size_t i = 0; i < v.children.size(); ++i) {
            if (i)
                out += ", ";
            out += node.symbols[i] + ": ";
            print_value(node.children[0], v.children[i], names, out);
        }
        out += '}';
        return;
    case nk::const_set: out += node.symbols[v.idx]; return;
    case nk::const_nat: out += v.num->str(); return;
    }
}

} // namespace

std::string print_coalgebra(const symbolic_coalgebra& s) {
    std::string out = print_functor(s.term);
    out += "\n\n";
    for (std::size_t i = 0; i < s.state_names.size(); ++i) {
        out += s.state_names[i] + ": ";
        print_value(s.term, s.values[i], s.state_names, out);
        out += '\n';
    }
    return out;
}

sym_value map_value(const functor_term& node, const sym_value& v,
                    std::span<const std::uint32_t> rename) {
    sym_value out;
    switch (node.kind) {
    case nk::var:
        out.k = vk::state_ref;
        out.idx = rename[v.idx];
        return out;
    case nk::product:
        out.k = vk::tuple;
        for (std::size_t i = 0; i < v.children.size(); ++i)
            out.children.push_back(map_value(node.children[i], v.children[i], rename));
        return out;
    case nk::sum:
        out.k = vk::inj;
        out.idx = v.idx;
        out.children.push_back(map_value(node.children[v.idx], v.children[0], rename));
        return out;
    case nk::pow:
    case nk::bag: {
        out.k = vk::collection;
        std::vector<std::pair<std::string, sym_value>> parts;
        for (const auto& c : v.children) {
            sym_value m = map_value(node.children[0], c, rename);
            parts.emplace_back(value_bytes(node.children[0], m), std::move(m));
        }
        std::sort(parts.begin(), parts.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        for (std::size_t i = 0; i < parts.size(); ++i) {
            if (node.kind == nk::pow && i > 0 && parts[i].first == parts[i - 1].first)
                continue;
            out.children.push_back(std::move(parts[i].second));
        }
        return out;
    }
    case nk::dist:
    case nk::monoid_val: {
        monoid_descriptor desc = node_monoid(node);
        out.k = vk::weighted_map;
        std::map<std::string, std::pair<sym_value, mvalue>> merged;
        for (std::size_t i = 0; i < v.children.size(); ++i) {
            sym_value m = map_value(node.children[0], v.children[i], rename);
            std::string b = value_bytes(node.children[0], m);
            auto it = merged.find(b);
            if (it == merged.end())
                merged.emplace(std::move(b), std::make_pair(std::move(m), v.weights[i]));
            else
                it->second.second = desc.add(it->second.second, v.weights[i]);
        }
        for (auto& [b, kv] : merged) {
            if (desc.is_zero(kv.second))
                continue;
            out.children.push_back(std::move(kv.first));
            out.weights.push_back(std::move(kv.second));
        }
        return out;
    }
    case nk::exp:
        out.k = vk::exp_map;
        for (const auto& c : v.children)
            out.children.push_back(map_value(node.children[0], c, rename));
        return out;
    case nk::const_set:
        out.k = vk::const_sym;
        out.idx = v.idx;
        return out;
    case nk::const_nat:
        out.k = vk::const_num;
        out.num = std::make_unique<big_int>(*v.num);
        return out;
    }
    return out;
}

symbolic_coalgebra quotient_coalgebra(const symbolic_coalgebra& s,
                                      const std::vector<std::vector<std::uint32_t>>& blocks) {
    std::vector<std::uint32_t> rename(s.state_names.size(), 0);
    std::vector<std::uint32_t> reps;
    for (const auto& blk : blocks) {
        CMIN_REQUIRE(!blk.empty(), "quotient: empty block");
        std::uint32_t rep = *std::min_element(blk.begin(), blk.end());
        reps.push_back(rep);
        for (std::uint32_t x : blk)
            rename[x] = rep;
    }
    std::sort(reps.begin(), reps.end());

    // compact names/values to representatives, with refs renamed then
    // compacted
    std::vector<std::uint32_t> compact(s.state_names.size(), 0);
    for (std::size_t i = 0; i < reps.size(); ++i)
        compact[reps[i]] = static_cast<std::uint32_t>(i);
    std::vector<std::uint32_t> full(s.state_names.size());
    for (std::size_t x = 0; x < full.size(); ++x)
        full[x] = compact[rename[x]];

    symbolic_coalgebra out;
    out.term = s.term;
    for (std::uint32_t rep : reps) {
        out.state_names.push_back(s.state_names[rep]);
        out.values.push_back(map_value(s.term, s.values[rep], full));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Flattening

namespace {

struct flattener {
    const symbolic_coalgebra& s;
    const sort_plan& plan;
    encoded_coalgebra& e;

    flattener(const symbolic_coalgebra& s_, const sort_plan& plan_, encoded_coalgebra& e_)
        : s(s_), plan(plan_), e(e_) {}

    struct pending {
        std::uint32_t sort;
        const sym_value* value;
    };
    std::vector<pending> states;
    std::vector<std::map<std::string, std::uint32_t>> pool_index;
    std::map<std::string, std::uint32_t> f1_index;

    std::uint32_t target_of(const functor_term& child, const sym_value& v) {
        if (child.kind == nk::var) {
            CMIN_REQUIRE(v.k == vk::state_ref, "flatten: shape mismatch at X");
            return v.idx;
        }
        std::uint32_t region = plan.region_of(&child);
        CMIN_REQUIRE(region != sort_plan::k_direct, "flatten: unexpected direct region");
        std::uint32_t id = static_cast<std::uint32_t>(states.size());
        states.push_back({region, &v});
        return id;
    }

    std::uint32_t intern_label(std::uint32_t sort, const mvalue& w) {
        std::string b = w.encode();
        auto [it, inserted] =
            pool_index[sort].emplace(std::move(b), static_cast<std::uint32_t>(
                                                       e.sorts[sort].label_pool.size()));
        if (inserted)
            e.sorts[sort].label_pool.push_back(w);
        return it->second;
    }

    void poly_walk(std::uint32_t region, const functor_term& node, const sym_value& v,
                   std::string& f1, std::uint32_t& next_pos) {
        if (node.kind == nk::var) {
            f1 += '\xFF';
            e.fwd.push_back({v.idx, next_pos++});
            return;
        }
        if (plan.region_of(&node) != region) {
            f1 += '\xFF';
            e.fwd.push_back({target_of(node, v), next_pos++});
            return;
        }
        switch (node.kind) {
        case nk::product:
            f1 += 'T';
            for (std::size_t i = 0; i < node.children.size(); ++i)
                poly_walk(region, node.children[i], v.children[i], f1, next_pos);
            return;
        case nk::sum:
            f1 += 'I';
            encode_u64(f1, v.idx);
            poly_walk(region, node.children[v.idx], v.children[0], f1, next_pos);
            return;
        case nk::exp:
            f1 += 'E';
            for (std::size_t i = 0; i < v.children.size(); ++i)
                poly_walk(region, node.children[0], v.children[i], f1, next_pos);
            return;
        case nk::const_set:
            f1 += 'C';
            encode_u64(f1, v.idx);
            return;
        case nk::const_nat:
            f1 += 'Q';
            encode_big_int(f1, *v.num);
            return;
        default: throw internal_error("flatten: basic node inside a polynomial region");
        }
    }

    void encode_state(std::uint32_t id) {
        auto [sort, vp] = states[id];
        const sym_value& v = *vp;
        const sort_plan::sort_info& si = plan.sorts[sort];
        std::string f1;
        encode_u64(f1, sort); // fingerprints are namespaced by sort
        switch (si.kind) {
        case sort_kind::pow:
        case sort_kind::bag: {
            for (const auto& c : v.children)
                e.fwd.push_back({target_of(si.node->children[0], c), 0});
            if (si.kind == sort_kind::pow)
                f1 += v.children.empty() ? '\x00' : '\x01';
            else
                encode_u64(f1, v.children.size());
            break;
        }
        case sort_kind::dist:
        case sort_kind::monoid_val: {
            const monoid_descriptor& desc = e.sorts[sort].desc;
            mvalue total = desc.zero();
            for (std::size_t i = 0; i < v.children.size(); ++i) {
                std::uint32_t label = intern_label(sort, v.weights[i]);
                e.fwd.push_back({target_of(si.node->children[0], v.children[i]), label});
                total = desc.add(total, v.weights[i]);
            }
            if (si.kind == sort_kind::dist)
                f1 += 'd'; // distributions all collapse to the one point of D1
            else
                total.encode(f1);
            break;
        }
        case sort_kind::poly: {
            std::uint32_t next_pos = 0;
            poly_walk(sort, *si.node, v, f1, next_pos);
            break;
        }
        }
        e.sort_of.push_back(sort);
        auto [it, inserted] =
            f1_index.emplace(std::move(f1), static_cast<std::uint32_t>(e.f1_pool.size()));
        if (inserted)
            e.f1_pool.push_back(it->first);
        e.f1_id.push_back(it->second);
        e.fwd_off.push_back(e.fwd.size());
    }

    void run() {
        e.sorts.reserve(plan.sorts.size());
        for (const auto& si : plan.sorts) {
            monoid_id m = si.kind == sort_kind::dist ? monoid_id::rat_add
                          : si.kind == sort_kind::monoid_val ? si.monoid
                                                             : monoid_id::int_add;
            e.sorts.push_back({si.kind, descriptor(m), {}});
        }
        pool_index.resize(plan.sorts.size());

        e.num_original = static_cast<std::uint32_t>(s.state_names.size());
        states.reserve(s.state_names.size());
        for (const auto& v : s.values)
            states.push_back({plan.original_sort, &v});

        e.fwd_off.push_back(0);
        for (std::uint32_t id = 0; id < states.size(); ++id) {
            CMIN_REQUIRE(states.size() < UINT32_MAX, "flatten: state space too large");
            encode_state(id);
        }
        e.num_states = static_cast<std::uint32_t>(states.size());
        e.num_edges = e.fwd.size();
        e.num_f1 = static_cast<std::uint32_t>(e.f1_pool.size());

        // reverse index
        e.rev_off.assign(e.num_states + 1, 0);
        for (const edge& ed : e.fwd)
            ++e.rev_off[ed.target + 1];
        for (std::uint32_t i = 0; i < e.num_states; ++i)
            e.rev_off[i + 1] += e.rev_off[i];
        e.rev.resize(e.fwd.size());
        std::vector<std::uint64_t> fill(e.rev_off.begin(), e.rev_off.end() - 1);
        for (std::uint32_t src = 0; src < e.num_states; ++src)
            for (const edge& ed : e.out_edges(src))
                e.rev[fill[ed.target]++] = {src, ed.label};

        CMIN_REQUIRE(e.rev.size() == e.fwd.size(), "flatten: edge audit failed");
    }
};

} // namespace

encoded_coalgebra flatten(const symbolic_coalgebra& s, const sort_plan& plan) {
    encoded_coalgebra e;
    e.term = s.term;
    e.state_names = s.state_names;
    flattener f{s, plan, e};
    f.run();
    return e;
}

} // namespace cmin
