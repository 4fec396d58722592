#include "cmin/wta.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <unordered_map>
#include <unordered_set>

#include "cmin/errors.hpp"
#include "cmin/oracle.hpp"

namespace cmin {

std::uint32_t wta::rank() const {
    std::uint32_t r = 0;
    for (const auto& s : signature)
        r = std::max(r, s.arity);
    return r;
}

namespace {

const char* const k_reserved[] = {"wta", "states", "out", "inj"};

bool is_reserved(const std::string& s) {
    return std::find(std::begin(k_reserved), std::end(k_reserved), s) != std::end(k_reserved);
}

bool is_ident(const std::string& s) {
    if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_'))
        return false;
    for (char c : s)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_'))
            return false;
    return true;
}

std::optional<monoid_id> monoid_from_token(std::string_view tok) {
    if (tok == "Z")
        return monoid_id::int_add;
    if (tok == "R")
        return monoid_id::rat_add;
    if (tok == "N+")
        return monoid_id::nat_add;
    if (tok == "(N,max)")
        return monoid_id::nat_max;
    if (tok == "W64")
        return monoid_id::word64_or;
    return std::nullopt;
}

struct line_scanner {
    std::string_view s;
    std::size_t pos = 0;
    std::size_t line_no;

    [[noreturn]] void fail(const std::string& msg) const {
        throw parse_error(msg, line_no, pos + 1);
    }

    void skip_ws() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos])))
            ++pos;
    }

    bool done() {
        skip_ws();
        return pos >= s.size();
    }

    char peek() {
        skip_ws();
        return pos < s.size() ? s[pos] : '\0';
    }

    bool eat(char c) {
        if (peek() != c)
            return false;
        ++pos;
        return true;
    }

    void expect(char c, const char* what) {
        if (!eat(c))
            fail(std::string("expected '") + c + "' " + what);
    }

    std::string ident(const char* what) {
        skip_ws();
        std::size_t start = pos;
        while (pos < s.size() &&
               (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_'))
            ++pos;
        if (start == pos)
            fail(std::string("expected ") + what);
        std::string out(s.substr(start, pos - start));
        if (!is_ident(out))
            fail("'" + out + "' is not a valid identifier");
        return out;
    }

    std::string literal() {
        skip_ws();
        std::size_t start = pos;
        while (pos < s.size() &&
               (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '.' ||
                s[pos] == '/' || s[pos] == '+' || s[pos] == '-'))
            ++pos;
        if (start == pos)
            fail("expected a weight literal");
        return std::string(s.substr(start, pos - start));
    }
};

struct wta_builder {
    wta w;
    std::unordered_map<std::string, std::uint32_t> state_index;
    std::unordered_map<std::string, std::uint32_t> symbol_index;
    std::unordered_set<std::string> transition_keys;
    std::vector<bool> has_output;

    std::uint32_t state(const std::string& name, std::size_t line_no) {
        if (is_reserved(name))
            throw parse_error("'" + name + "' is reserved and cannot name a state", line_no);
        auto it = state_index.find(name);
        if (it != state_index.end())
            return it->second;
        std::uint32_t id = static_cast<std::uint32_t>(w.states.size());
        state_index.emplace(name, id);
        w.states.push_back(name);
        w.outputs.push_back(w.monoid.zero());
        has_output.push_back(false);
        return id;
    }
};

} // namespace

bool looks_like_wta(std::string_view text) {
    std::size_t i = 0;
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i])))
        ++i;
    return text.substr(i, 3) == "wta" &&
           (i + 3 == text.size() || !std::isalnum(static_cast<unsigned char>(text[i + 3])));
}

wta parse_wta(std::string_view text) {
    wta_builder b;
    bool header_seen = false;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        std::string_view raw = text.substr(
            start, end == std::string_view::npos ? text.size() - start : end - start);
        ++line_no;
        if (auto hash = raw.find('#'); hash != std::string_view::npos)
            raw = raw.substr(0, hash);
        line_scanner ln{raw, 0, line_no};
        if (!ln.done()) {
            if (!header_seen) {
                std::string kw = ln.ident("'wta' header");
                if (kw != "wta")
                    ln.fail("WTA input must start with a 'wta' header line");
                ln.skip_ws();
                // monoid token runs to the next whitespace
                std::size_t tok_start = ln.pos;
                while (ln.pos < raw.size() &&
                       !std::isspace(static_cast<unsigned char>(raw[ln.pos])))
                    ++ln.pos;
                std::string tok(raw.substr(tok_start, ln.pos - tok_start));
                auto m = monoid_from_token(tok);
                if (!m) {
                    if (tok == "2")
                        ln.fail("boolean-weighted automata have no weight literals; "
                                "model them with the powerset functor instead");
                    ln.fail("unknown monoid '" + tok + "'");
                }
                b.w.monoid = descriptor(*m);
                while (!ln.done()) {
                    std::string sym = ln.ident("symbol name");
                    if (is_reserved(sym))
                        ln.fail("'" + sym + "' is reserved and cannot name a symbol");
                    ln.expect('/', "between symbol and arity");
                    std::string digits;
                    while (ln.pos < raw.size() &&
                           std::isdigit(static_cast<unsigned char>(raw[ln.pos])))
                        digits += raw[ln.pos++];
                    if (digits.empty() || digits.size() > 3)
                        ln.fail("bad arity for symbol '" + sym + "'");
                    if (b.symbol_index.count(sym))
                        ln.fail("duplicate symbol '" + sym + "'");
                    b.symbol_index.emplace(sym,
                                           static_cast<std::uint32_t>(b.w.signature.size()));
                    b.w.signature.push_back(
                        {sym, static_cast<std::uint32_t>(std::stoul(digits))});
                }
                if (b.w.signature.empty())
                    ln.fail("WTA header declares no symbols");
                header_seen = true;
            } else {
                std::string head = ln.ident("state, symbol, 'states' or 'out'");
                if (head == "states") {
                    while (!ln.done())
                        b.state(ln.ident("state name"), line_no);
                } else if (head == "out") {
                    std::uint32_t x = b.state(ln.ident("state name"), line_no);
                    ln.expect(':', "before the output weight");
                    std::string lit = ln.literal();
                    auto v = b.w.monoid.parse_literal(lit);
                    if (!v)
                        ln.fail("invalid weight literal '" + lit + "'");
                    if (b.has_output[x])
                        ln.fail("duplicate output for state '" + b.w.states[x] + "'");
                    b.has_output[x] = true;
                    b.w.outputs[x] = std::move(*v);
                    if (!ln.done())
                        ln.fail("unexpected trailing input");
                } else {
                    auto sit = b.symbol_index.find(head);
                    if (sit == b.symbol_index.end())
                        ln.fail("unknown symbol '" + head + "'");
                    const wta_symbol& sym = b.w.signature[sit->second];
                    wta::transition tr;
                    tr.symbol = sit->second;
                    if (ln.peek() == '(') {
                        ln.eat('(');
                        if (!ln.eat(')')) {
                            tr.sources.push_back(b.state(ln.ident("state name"), line_no));
                            while (ln.eat(','))
                                tr.sources.push_back(b.state(ln.ident("state name"), line_no));
                            ln.expect(')', "to close the source tuple");
                        }
                    }
                    if (tr.sources.size() != sym.arity)
                        ln.fail("symbol '" + sym.name + "' has arity " +
                                std::to_string(sym.arity) + ", got " +
                                std::to_string(tr.sources.size()) + " sources");
                    ln.expect('-', "'->' before the target state");
                    ln.expect('>', "'->' before the target state");
                    tr.target = b.state(ln.ident("state name"), line_no);
                    ln.expect(':', "before the transition weight");
                    std::string lit = ln.literal();
                    auto v = b.w.monoid.parse_literal(lit);
                    if (!v)
                        ln.fail("invalid weight literal '" + lit + "'");
                    if (b.w.monoid.is_zero(*v))
                        ln.fail("transition weights must be nonzero");
                    tr.weight = std::move(*v);
                    if (!ln.done())
                        ln.fail("unexpected trailing input");
                    std::string key;
                    encode_u64(key, tr.symbol);
                    for (std::uint32_t s : tr.sources)
                        encode_u64(key, s);
                    encode_u64(key, tr.target);
                    if (!b.transition_keys.insert(key).second)
                        ln.fail("duplicate transition");
                    b.w.transitions.push_back(std::move(tr));
                }
            }
        }
        if (end == std::string_view::npos)
            break;
        start = end + 1;
    }
    if (!header_seen)
        throw parse_error("empty input: expected a 'wta' header line");
    return b.w;
}

std::string print_wta(const wta& w) {
    std::string out = "wta ";
    out += monoid_name(w.monoid.id);
    for (const auto& s : w.signature)
        out += " " + s.name + "/" + std::to_string(s.arity);
    out += '\n';
    for (std::size_t i = 0; i < w.states.size(); ++i) {
        out += i % 16 == 0 ? (i ? "\nstates " : "states ") : " ";
        out += w.states[i];
    }
    if (!w.states.empty())
        out += '\n';
    for (const auto& tr : w.transitions) {
        out += w.signature[tr.symbol].name + "(";
        for (std::size_t i = 0; i < tr.sources.size(); ++i) {
            if (i)
                out += ",";
            out += w.states[tr.sources[i]];
        }
        out += ") -> " + w.states[tr.target] + " : " + w.monoid.print_literal(tr.weight) + "\n";
    }
    for (std::size_t i = 0; i < w.states.size(); ++i)
        if (!w.monoid.is_zero(w.outputs[i]))
            out += "out " + w.states[i] + " : " + w.monoid.print_literal(w.outputs[i]) + "\n";
    return out;
}

namespace {

// signature as a sum of per-symbol summands: k-fold products of X for arity
// k >= 2, a bare X for arity 1, the singleton constant for arity 0; a
// single-symbol signature is its summand alone
functor_term sigma_term(const wta& w) {
    std::vector<functor_term> summands;
    for (const auto& sym : w.signature) {
        functor_term t;
        if (sym.arity == 0) {
            t.kind = functor_term::node_kind::const_set;
            t.symbols.push_back(sym.name);
        } else if (sym.arity == 1) {
            t.kind = functor_term::node_kind::var;
        } else {
            t.kind = functor_term::node_kind::product;
            t.children.assign(sym.arity, functor_term{});
        }
        summands.push_back(std::move(t));
    }
    if (summands.size() == 1)
        return std::move(summands[0]);
    functor_term s;
    s.kind = functor_term::node_kind::sum;
    s.children = std::move(summands);
    return s;
}

sym_value sigma_value(const wta& w, const wta::transition& tr) {
    const wta_symbol& sym = w.signature[tr.symbol];
    sym_value inner;
    if (sym.arity == 0) {
        inner.k = sym_value::kind::const_sym;
        inner.idx = 0;
    } else if (sym.arity == 1) {
        inner.k = sym_value::kind::state_ref;
        inner.idx = tr.sources[0];
    } else {
        inner.k = sym_value::kind::tuple;
        for (std::uint32_t s : tr.sources) {
            sym_value ref;
            ref.k = sym_value::kind::state_ref;
            ref.idx = s;
            inner.children.push_back(std::move(ref));
        }
    }
    if (w.signature.size() == 1)
        return inner;
    sym_value v;
    v.k = sym_value::kind::inj;
    v.idx = tr.symbol;
    v.children.push_back(std::move(inner));
    return v;
}

} // namespace

symbolic_coalgebra wta_to_coalgebra(const wta& w, bool ignore_outputs) {
    functor_term mval;
    mval.kind = functor_term::node_kind::monoid_val;
    mval.monoid = w.monoid.id;
    mval.children.push_back(sigma_term(w));

    symbolic_coalgebra s;
    if (ignore_outputs) {
        s.term = std::move(mval);
    } else {
        // outputs become an initial partition: equal outputs share a number
        functor_term prod;
        prod.kind = functor_term::node_kind::product;
        functor_term cn;
        cn.kind = functor_term::node_kind::const_nat;
        prod.children.push_back(std::move(cn));
        prod.children.push_back(std::move(mval));
        s.term = std::move(prod);
    }

    s.state_names = w.states;
    std::vector<sym_value> maps(w.states.size());
    for (auto& m : maps)
        m.k = sym_value::kind::weighted_map;
    // direction reversal: a transition into x contributes to x's structure
    for (const auto& tr : w.transitions) {
        maps[tr.target].children.push_back(sigma_value(w, tr));
        maps[tr.target].weights.push_back(tr.weight);
    }

    std::map<std::string, std::uint32_t> output_class;
    for (std::size_t i = 0; i < w.states.size(); ++i) {
        if (ignore_outputs) {
            s.values.push_back(std::move(maps[i]));
            continue;
        }
        std::string key = w.outputs[i].encode();
        auto [it, fresh] =
            output_class.emplace(std::move(key),
                                 static_cast<std::uint32_t>(output_class.size()));
        sym_value num;
        num.k = sym_value::kind::const_num;
        num.num = std::make_unique<big_int>(it->second);
        sym_value tup;
        tup.k = sym_value::kind::tuple;
        tup.children.push_back(std::move(num));
        tup.children.push_back(std::move(maps[i]));
        s.values.push_back(std::move(tup));
    }
    return s;
}

state_partition minimize_wta(const wta& w, const wta_options& opts, refine_stats* stats) {
    symbolic_coalgebra s = wta_to_coalgebra(w, opts.ignore_outputs);
    refine_options ropts;
    ropts.singleton_opt = opts.singleton_opt;
    ropts.force_generic_monoid = opts.force_generic_monoid;
    return minimize(s, ropts, stats);
}

// ---------------------------------------------------------------------------
// Generators

namespace {

std::vector<std::uint32_t> max_rank_symbols(const std::vector<wta_symbol>& sig,
                                            bool mixed_ranks) {
    std::uint32_t rank = 0;
    for (const auto& s : sig)
        rank = std::max(rank, s.arity);
    std::vector<std::uint32_t> out;
    for (std::uint32_t i = 0; i < sig.size(); ++i)
        if (mixed_ranks || sig[i].arity == rank)
            out.push_back(i);
    return out;
}

// number of (symbol, tuple) keys; saturates at 2^63
std::uint64_t key_space(const std::vector<wta_symbol>& sig,
                        const std::vector<std::uint32_t>& symbols, std::uint64_t n) {
    constexpr std::uint64_t cap = 1ull << 63;
    std::uint64_t total = 0;
    for (std::uint32_t si : symbols) {
        std::uint64_t terms = 1;
        for (std::uint32_t i = 0; i < sig[si].arity; ++i) {
            if (n != 0 && terms > cap / n)
                return cap;
            terms *= n;
        }
        if (total > cap - terms)
            return cap;
        total += terms;
    }
    return total;
}

void validate_signature(const std::vector<wta_symbol>& sig) {
    if (sig.empty())
        throw parse_error("WTA signature must not be empty");
    for (const auto& s : sig)
        if (!is_ident(s.name) || is_reserved(s.name))
            throw parse_error("bad symbol name '" + s.name + "'");
    for (std::size_t i = 0; i < sig.size(); ++i)
        for (std::size_t j = i + 1; j < sig.size(); ++j)
            if (sig[i].name == sig[j].name)
                throw parse_error("duplicate symbol '" + sig[i].name + "'");
}

} // namespace

wta random_wta(std::uint32_t n, std::vector<wta_symbol> signature, monoid_id monoid,
               std::uint32_t transitions_per_state, std::uint32_t max_distinct_weights,
               std::uint64_t seed, bool mixed_ranks) {
    validate_signature(signature);
    if (n == 0)
        throw parse_error("random WTA needs at least one state");
    wta w;
    w.monoid = descriptor(monoid);
    w.signature = std::move(signature);
    rng rand(seed);
    std::vector<mvalue> pool = weight_pool(w.monoid, std::max(1u, max_distinct_weights));

    for (std::uint32_t i = 0; i < n; ++i) {
        w.states.push_back("q" + std::to_string(i));
        w.outputs.push_back(pool[rand.below(pool.size())]);
    }

    std::vector<std::uint32_t> symbols = max_rank_symbols(w.signature, mixed_ranks);
    std::uint64_t keys = key_space(w.signature, symbols, n);
    if (keys < transitions_per_state)
        throw parse_error("signature admits only " + std::to_string(keys) +
                          " transitions per state, need " +
                          std::to_string(transitions_per_state));

    w.transitions.reserve(static_cast<std::size_t>(transitions_per_state) * n);
    std::vector<std::uint32_t> tuple;
    for (std::uint32_t target = 0; target < n; ++target) {
        std::unordered_set<std::string> seen;
        while (seen.size() < transitions_per_state) {
            std::uint32_t si = symbols[rand.below(symbols.size())];
            std::uint32_t arity = w.signature[si].arity;
            tuple.clear();
            for (std::uint32_t i = 0; i < arity; ++i)
                tuple.push_back(static_cast<std::uint32_t>(rand.below(n)));
            std::string key;
            encode_u64(key, si);
            for (std::uint32_t s : tuple)
                encode_u64(key, s);
            if (!seen.insert(std::move(key)).second)
                continue;
            w.transitions.push_back(
                {si, tuple, target, pool[rand.below(pool.size())]});
        }
    }
    return w;
}

wta dense_random_wta(std::uint32_t n, std::vector<wta_symbol> signature, monoid_id monoid,
                     double zero_probability, std::uint64_t seed, std::uint64_t term_cap) {
    validate_signature(signature);
    wta w;
    w.monoid = descriptor(monoid);
    w.signature = std::move(signature);
    rng rand(seed);
    std::vector<mvalue> pool = weight_pool(w.monoid, 50);

    std::vector<std::uint32_t> all;
    for (std::uint32_t i = 0; i < w.signature.size(); ++i)
        all.push_back(i);
    std::uint64_t keys = key_space(w.signature, all, n);
    if (keys > term_cap)
        throw parse_error("signature-term space " + std::to_string(keys) +
                          " exceeds the cap of " + std::to_string(term_cap));

    for (std::uint32_t i = 0; i < n; ++i) {
        w.states.push_back("q" + std::to_string(i));
        w.outputs.push_back(w.monoid.zero());
    }

    // enumerate every (symbol, tuple) per target
    for (std::uint32_t target = 0; target < n; ++target) {
        for (std::uint32_t si = 0; si < w.signature.size(); ++si) {
            std::uint32_t arity = w.signature[si].arity;
            std::vector<std::uint32_t> tuple(arity, 0);
            while (true) {
                if (!rand.chance(zero_probability))
                    w.transitions.push_back(
                        {si, tuple, target, pool[rand.below(pool.size())]});
                // odometer
                std::uint32_t i = 0;
                for (; i < arity; ++i) {
                    if (++tuple[i] < n)
                        break;
                    tuple[i] = 0;
                }
                if (i == arity)
                    break;
            }
        }
    }
    return w;
}

state_partition backward_bisimulation(const wta& w) {
    std::uint32_t n = static_cast<std::uint32_t>(w.states.size());
    std::vector<std::uint32_t> color(n, 0);
    std::uint32_t colors = n == 0 ? 0 : 1;

    for (std::uint32_t iter = 0; n > 0; ++iter) {
        CMIN_REQUIRE(iter <= n, "backward bisimulation failed to stabilize");
        // aggregate incoming weight per (symbol, tuple of source classes)
        std::vector<std::map<std::string, mvalue>> sig(n);
        for (const auto& tr : w.transitions) {
            std::string key;
            encode_u64(key, tr.symbol);
            for (std::uint32_t s : tr.sources)
                encode_u64(key, color[s]);
            auto [it, fresh] = sig[tr.target].emplace(std::move(key), tr.weight);
            if (!fresh)
                it->second = w.monoid.add(it->second, tr.weight);
        }
        std::map<std::pair<std::uint32_t, std::string>, std::uint32_t> index;
        std::vector<std::uint32_t> next(n);
        for (std::uint32_t x = 0; x < n; ++x) {
            std::string bytes;
            for (const auto& [key, sum] : sig[x]) {
                if (w.monoid.is_zero(sum))
                    continue; // vanished aggregate equals an absent one
                encode_u64(bytes, key.size());
                bytes += key;
                sum.encode(bytes);
            }
            auto [it, fresh] = index.emplace(std::make_pair(color[x], std::move(bytes)),
                                             static_cast<std::uint32_t>(index.size()));
            next[x] = it->second;
        }
        std::uint32_t next_colors = static_cast<std::uint32_t>(index.size());
        color.swap(next);
        if (next_colors == colors)
            break;
        colors = next_colors;
    }
    return blocks_from_coloring(color, n);
}

} // namespace cmin
