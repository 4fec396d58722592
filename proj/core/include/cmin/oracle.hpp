#ifndef CMIN_ORACLE_HPP
#define CMIN_ORACLE_HPP

#include <cstdint>
#include <random>
#include <string>

#include "cmin/refine.hpp"
#include "cmin/syntax.hpp"

namespace cmin {

// Deterministic helper around mt19937_64; all generators draw through this.
class rng {
public:
    explicit rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next() { return eng_(); }

    // uniform in [0, k), k >= 1
    std::uint64_t below(std::uint64_t k) {
        std::uint64_t limit = UINT64_MAX - UINT64_MAX % k;
        std::uint64_t v;
        do {
            v = eng_();
        } while (v >= limit);
        return v % k;
    }

    bool chance(double p) {
        return static_cast<double>(eng_()) < p * static_cast<double>(UINT64_MAX);
    }

private:
    std::mt19937_64 eng_;
};

// Brute-force reference minimizer: iterated recolouring by observed behaviour
// under the current colouring, starting from the fingerprint partition.
// Independent of the init/update path; intended for small inputs.
state_partition naive_minimize(const encoded_coalgebra& e, bool force_generic_monoid = false);

struct random_opts {
    std::uint32_t max_fanout = 3;   // collection/support sizes in [0, max_fanout]
    std::uint32_t weight_pool = 50; // distinct nonzero weights per monoid
    std::uint32_t nat_range = 3;    // constant naturals in [0, nat_range)
    std::uint64_t seed = 1;
};

// Reproducible random coalgebra for a functor term: distributions are exact
// dyadic rationals summing to 1; monoid weights come from a bounded pool.
symbolic_coalgebra random_coalgebra(const functor_term& t, std::uint32_t n,
                                    const random_opts& opts);

// Deterministic pool of distinct nonzero elements of a monoid.
std::vector<mvalue> weight_pool(const monoid_descriptor& desc, std::uint32_t size);

// The interface instances the coherence suite exercises.
enum class iface_config : std::uint8_t {
    pow,
    bag,
    poly,
    group_int,
    group_rat,
    group_nat_groth, // cancellative non-group monoid through the Grothendieck group
    mon_int,
    mon_nat,
    mon_natmax,
    mon_word64,
    mon_bool,
};

const char* iface_config_name(iface_config c);
std::vector<iface_config> all_iface_configs();

struct coherence_report {
    std::uint32_t trials = 0;
    std::uint32_t failures = 0;
    std::string first_failure;

    bool ok() const { return failures == 0; }
};

// Randomized check of the refinement-interface coherence condition: draws a
// random encoded state t over a random carrier, random S inside B inside X,
// computes the weight maps and the three-way value directly from their
// definitions, and requires init/update to reproduce them exactly.
coherence_report check_coherence(iface_config cfg, std::uint32_t trials, std::uint64_t seed);

} // namespace cmin

#endif
