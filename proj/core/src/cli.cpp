#include "cmin/cli.hpp"

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "cmin/errors.hpp"
#include "cmin/oracle.hpp"
#include "cmin/refine.hpp"
#include "cmin/sumbag.hpp"
#include "cmin/wta.hpp"

namespace cmin::cli {

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw parse_error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw parse_error("cannot open '" + path + "' for writing");
    out << content;
}

std::string format_partition(const state_partition& blocks,
                             const std::vector<std::string>& names) {
    std::string out;
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        out += "block " + std::to_string(b) + ":";
        for (std::uint32_t x : blocks[b])
            out += " " + names[x];
        out += "\n";
    }
    return out;
}

monoid_id monoid_from_flag(const std::string& tok) {
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
    throw parse_error("unknown monoid '" + tok + "' (expected Z, R, N+, (N,max) or W64)");
}

std::vector<wta_symbol> signature_from_flags(const std::string& sig, std::uint32_t symbols,
                                             std::uint32_t rank) {
    std::vector<wta_symbol> out;
    if (!sig.empty()) {
        std::size_t start = 0;
        while (start <= sig.size()) {
            std::size_t comma = sig.find(',', start);
            std::string item =
                sig.substr(start, comma == std::string::npos ? sig.size() - start : comma - start);
            std::size_t slash = item.find('/');
            if (slash == std::string::npos)
                throw parse_error("bad --sig item '" + item + "' (expected name/arity)");
            out.push_back({item.substr(0, slash),
                           static_cast<std::uint32_t>(std::stoul(item.substr(slash + 1)))});
            if (comma == std::string::npos)
                break;
            start = comma + 1;
        }
        return out;
    }
    for (std::uint32_t i = 0; i < symbols; ++i)
        out.push_back({"a" + std::to_string(i), rank});
    return out;
}

struct loaded_input {
    symbolic_coalgebra sym;
    double t_parse = 0.0;
};

loaded_input load_input(const std::string& path, bool ignore_outputs) {
    auto t0 = std::chrono::steady_clock::now();
    std::string text = read_file(path);
    loaded_input li;
    if (looks_like_wta(text)) {
        li.sym = wta_to_coalgebra(parse_wta(text), ignore_outputs);
    } else {
        if (ignore_outputs)
            throw parse_error("--ignore-outputs only applies to WTA input files");
        li.sym = parse_coalgebra_file(text);
    }
    li.t_parse = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return li;
}

int cmd_minimize(const std::string& file, const std::string& partition_out,
                 const std::string& coalgebra_out, bool stats, bool no_singleton_opt,
                 bool force_generic, bool ignore_outputs, std::ostream& out,
                 std::ostream& err) {
    loaded_input li = load_input(file, ignore_outputs);

    refine_options opts;
    opts.singleton_opt = !no_singleton_opt;
    opts.force_generic_monoid = force_generic;
    refine_stats rs;
    state_partition blocks = minimize(li.sym, opts, &rs);

    std::string text = format_partition(blocks, li.sym.state_names);
    if (partition_out.empty())
        out << text;
    else
        write_file(partition_out, text);

    if (!coalgebra_out.empty())
        write_file(coalgebra_out, print_coalgebra(quotient_coalgebra(li.sym, blocks)));

    if (stats) {
        nlohmann::json j{{"n", rs.num_original},     {"m", rs.num_edges},
                         {"initialBlocks", rs.initial_blocks},
                         {"finalBlocks", rs.final_blocks},
                         {"tParse", li.t_parse},     {"tInit", rs.t_init},
                         {"tRefine", rs.t_refine}};
        err << j.dump() << "\n";
    }
    return 0;
}

int cmd_check(const std::string& file, bool force_generic, std::ostream& out, std::ostream&) {
    loaded_input li = load_input(file, false);
    sort_plan plan = plan_decomposition(li.sym.term);
    encoded_coalgebra enc = flatten(li.sym, plan);

    refine_options opts;
    opts.force_generic_monoid = force_generic;
    state_partition engine_blocks = minimize_encoded(enc, opts);
    state_partition oracle_blocks = naive_minimize(enc, force_generic);

    if (engine_blocks == oracle_blocks) {
        out << "check passed: " << engine_blocks.size() << " blocks\n";
        return 0;
    }
    out << "check FAILED: engine computed " << engine_blocks.size()
        << " blocks, reference computed " << oracle_blocks.size() << "\n";
    out << "engine:\n" << format_partition(engine_blocks, li.sym.state_names);
    out << "reference:\n" << format_partition(oracle_blocks, li.sym.state_names);
    return 3;
}

int cmd_selftest(std::uint32_t trials, std::uint64_t seed, std::ostream& out) {
    bool ok = true;

    for (iface_config cfg : all_iface_configs()) {
        coherence_report rep = check_coherence(cfg, trials, seed);
        out << "coherence " << iface_config_name(cfg) << ": "
            << (rep.ok() ? "pass" : "FAIL") << " (" << rep.trials << " trials)\n";
        if (!rep.ok()) {
            out << "  " << rep.first_failure << "\n";
            ok = false;
        }
    }

    {
        // quick data-structure shakedown
        monoid_descriptor desc = descriptor(monoid_id::int_add);
        sum_bag bag(desc);
        rng rand(seed);
        mvalue expect = desc.zero();
        std::map<std::string, std::pair<mvalue, std::uint64_t>> shadow;
        for (int i = 0; i < 5000; ++i) {
            mvalue v(big_int(1 + rand.below(20)));
            std::uint64_t k = 1 + rand.below(3);
            if (rand.below(3) != 0) {
                bag.insert(v, k);
                auto [it, fresh] = shadow.emplace(v.encode(), std::make_pair(v, k));
                if (!fresh)
                    it->second.second += k;
            } else {
                std::uint64_t removed = bag.erase_up_to(v, k);
                auto it = shadow.find(v.encode());
                std::uint64_t want = it == shadow.end() ? 0
                                     : std::min(it->second.second, k);
                if (removed != want)
                    ok = false;
                if (it != shadow.end() && (it->second.second -= removed) == 0)
                    shadow.erase(it);
            }
        }
        bag.audit();
        expect = desc.zero();
        for (const auto& [key, kv] : shadow)
            expect = desc.add(expect, desc.scale(kv.second, kv.first));
        bool bag_ok = expect == bag.total();
        out << "sum-bag fuzz: " << (bag_ok ? "pass" : "FAIL") << "\n";
        ok = ok && bag_ok;
    }

    {
        // engine vs reference on a small random sweep
        const char* functors[] = {"P X", "B X", "DX", "Z^X", "(N,max)^X", "2 x X^{a,b}"};
        bool sweep_ok = true;
        for (const char* f : functors) {
            functor_term t = parse_functor(f);
            for (std::uint32_t i = 0; i < 10; ++i) {
                random_opts ropts;
                ropts.seed = seed + i;
                symbolic_coalgebra s = random_coalgebra(t, 1 + i % 12, ropts);
                sort_plan plan = plan_decomposition(s.term);
                encoded_coalgebra enc = flatten(s, plan);
                if (minimize_encoded(enc) != naive_minimize(enc))
                    sweep_ok = false;
            }
        }
        out << "engine vs reference sweep: " << (sweep_ok ? "pass" : "FAIL") << "\n";
        ok = ok && sweep_ok;
    }

    out << (ok ? "selftest passed\n" : "selftest FAILED\n");
    return ok ? 0 : 2;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"generic minimizer for state-based systems"};
    app.require_subcommand(1);

    // minimize
    std::string file, partition_out, coalgebra_out;
    bool stats = false, no_singleton = false, force_generic = false, ignore_outputs = false;
    CLI::App* minimize = app.add_subcommand("minimize", "minimize an input file");
    minimize->add_option("file", file, "input file")->required();
    minimize->add_option("--partition", partition_out, "write the partition to a file");
    minimize->add_option("--coalgebra", coalgebra_out,
                         "write the minimized coalgebra, one representative per block");
    minimize->add_flag("--stats", stats, "print run statistics as JSON on stderr");
    minimize->add_flag("--no-singleton-opt", no_singleton,
                       "disable the single-state block optimization");
    minimize->add_flag("--force-generic-monoid", force_generic,
                       "use the generic monoid interface even for cancellative monoids");
    minimize->add_flag("--ignore-outputs", ignore_outputs,
                       "WTA input: drop the output component");

    // check
    std::string check_file;
    bool check_force_generic = false;
    CLI::App* check = app.add_subcommand("check", "diff the engine against the"
                                                  " brute-force reference");
    check->add_option("file", check_file, "input file")->required();
    check->add_flag("--force-generic-monoid", check_force_generic);

    // wta random / dense
    CLI::App* wta_cmd = app.add_subcommand("wta", "generate random weighted tree automata");
    wta_cmd->require_subcommand(1);
    std::uint32_t g_states = 1, g_symbols = 4, g_rank = 1, g_tps = 50, g_pool = 50;
    std::uint64_t g_seed = 1;
    std::string g_sig, g_monoid = "(N,max)", g_out;
    bool g_mixed = false;
    double g_zero_prob = 0.7;
    std::uint64_t g_cap = 1u << 24;

    CLI::App* wrand = wta_cmd->add_subcommand("random", "fixed transition count per state");
    CLI::App* wdense = wta_cmd->add_subcommand("dense", "independent per-term coin flips");
    for (CLI::App* sub : {wrand, wdense}) {
        sub->add_option("--states", g_states, "number of states")->required();
        sub->add_option("--sig", g_sig, "signature, e.g. f/2,g/0");
        sub->add_option("--symbols", g_symbols, "symbol count (with --rank)");
        sub->add_option("--rank", g_rank, "uniform arity (with --symbols)");
        sub->add_option("--monoid", g_monoid, "Z, R, N+, (N,max) or W64");
        sub->add_option("--seed", g_seed, "RNG seed");
        sub->add_option("--out", g_out, "output file (default stdout)");
    }
    wrand->add_option("--tps", g_tps, "transitions per state");
    wrand->add_option("--pool", g_pool, "distinct weight pool size");
    wrand->add_flag("--mixed-ranks", g_mixed, "draw from all symbols, not only maximal rank");
    wdense->add_option("--zero-prob", g_zero_prob, "probability of weight 0");
    wdense->add_option("--cap", g_cap, "limit on signature terms per state");

    // selftest
    std::uint32_t st_trials = 1000;
    std::uint64_t st_seed = 1;
    CLI::App* selftest = app.add_subcommand("selftest", "coherence and invariant suites");
    selftest->add_option("--trials", st_trials, "trials per interface");
    selftest->add_option("--seed", st_seed, "RNG seed");

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }

    try {
        if (minimize->parsed())
            return cmd_minimize(file, partition_out, coalgebra_out, stats, no_singleton,
                                force_generic, ignore_outputs, out, err);
        if (check->parsed())
            return cmd_check(check_file, check_force_generic, out, err);
        if (wta_cmd->parsed()) {
            std::vector<wta_symbol> sig = signature_from_flags(g_sig, g_symbols, g_rank);
            monoid_id m = monoid_from_flag(g_monoid);
            wta w = wrand->parsed()
                        ? random_wta(g_states, std::move(sig), m, g_tps, g_pool, g_seed,
                                     g_mixed)
                        : dense_random_wta(g_states, std::move(sig), m, g_zero_prob, g_seed,
                                           g_cap);
            std::string text = print_wta(w);
            if (g_out.empty())
                out << text;
            else
                write_file(g_out, text);
            return 0;
        }
        if (selftest->parsed())
            return cmd_selftest(st_trials, st_seed, out);
    } catch (const parse_error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const internal_error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}

int run(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run(args, std::cout, std::cerr);
}

} // namespace cmin::cli
