#include "cmin/refine.hpp"

#include <algorithm>
#include <chrono>
#include <deque>
#include <map>

#include "cmin/errors.hpp"
#include "cmin/iface.hpp"
#include "cmin/partition.hpp"

namespace cmin {

namespace {

constexpr std::uint32_t k_untouched = UINT32_MAX;

// One run of the refinement loop. Owns the two partitions (P fine, Q
// compound), the queue of subblocks, and the per-state weight store keyed by
// Q-block ids. Strictly single-threaded.
class engine {
public:
    engine(const encoded_coalgebra& e, const refine_options& opts)
        : e_(e), opts_(opts), ifaces_(build_interfaces(e, opts.force_generic_monoid)),
          p_(refinable_partition::grouped(e.f1_id, e.num_f1)),
          q_(e.num_states) {}

    void initialize() {
        std::uint32_t n = e_.num_states;
        inert_.assign(n, 0);
        store_.resize(n);
        dead_.assign(n, 0);
        scratch_.resize(n);
        v3_of_.resize(n);
        in_queue_.assign(p_.num_blocks(), 0);
        block_touch_.assign(p_.num_blocks(), k_untouched);

        if (opts_.singleton_opt)
            for (std::uint32_t b = 0; b < p_.num_blocks(); ++b)
                if (p_.block_size(b) == 1)
                    inert_[p_.members(b)[0]] = 1;

        for (std::uint32_t x = 0; x < n; ++x) {
            if (inert_[x] || e_.outdeg(x) == 0)
                continue;
            auto out = e_.out_edges(x);
            store_[x].push_back({0, e_.outdeg(x),
                                 ifaces_[e_.sort_of[x]]->init(e_.f1_id[x], out)});
        }

        // enqueue every initial block except a largest one
        if (p_.num_blocks() > 1) {
            std::uint32_t largest = 0;
            for (std::uint32_t b = 1; b < p_.num_blocks(); ++b)
                if (p_.block_size(b) > p_.block_size(largest))
                    largest = b;
            for (std::uint32_t b = 0; b < p_.num_blocks(); ++b)
                if (b != largest)
                    enqueue(b);
        }
    }

    void run() {
        while (!queue_.empty()) {
            std::uint32_t s = queue_.front();
            queue_.pop_front();
            in_queue_[s] = 0;
            split_step(s);
            if (opts_.debug_audits)
                audit();
        }
    }

    const refinable_partition& partition() const { return p_; }
    std::uint64_t label_volume() const { return label_volume_; }

private:
    struct wentry {
        std::uint32_t qblock;
        std::uint32_t cnt; // edges into qblock; 0 marks a dead entry
        weight w;
    };

    void enqueue(std::uint32_t b) {
        if (in_queue_.size() < p_.num_blocks())
            in_queue_.resize(p_.num_blocks(), 0);
        if (!in_queue_[b]) {
            in_queue_[b] = 1;
            queue_.push_back(b);
        }
    }

    wentry* find_entry(std::uint32_t x, std::uint32_t qb) {
        auto& vec = store_[x];
        auto it = std::lower_bound(vec.begin(), vec.end(), qb,
                                   [](const wentry& e, std::uint32_t b) { return e.qblock < b; });
        if (it == vec.end() || it->qblock != qb || it->cnt == 0)
            return nullptr;
        return &*it;
    }

    void kill_entry(std::uint32_t x, wentry& ent) {
        ent.cnt = 0;
        ent.w = pow_weight{false, 0}; // drop any heap payload
        if (2 * static_cast<std::size_t>(++dead_[x]) >= store_[x].size()) {
            std::erase_if(store_[x], [](const wentry& e) { return e.cnt == 0; });
            dead_[x] = 0;
        }
    }

    void push_entry(std::uint32_t x, std::uint32_t qb, std::uint32_t cnt, weight w) {
        auto& vec = store_[x];
        CMIN_REQUIRE(vec.empty() || vec.back().qblock < qb,
                     "weight store: non-monotone block id insert");
        vec.push_back({qb, cnt, std::move(w)});
    }

    void release_state(std::uint32_t x) {
        store_[x].clear();
        store_[x].shrink_to_fit();
        dead_[x] = 0;
    }

    void make_inert_if_singleton(std::uint32_t b) {
        if (!opts_.singleton_opt || p_.block_size(b) != 1)
            return;
        std::uint32_t x = p_.members(b)[0];
        if (!inert_[x]) {
            inert_[x] = 1;
            release_state(x);
        }
    }

    void split_step(std::uint32_t sblk) {
        auto smembers = p_.members(sblk);
        if (smembers.empty())
            return;
        std::uint32_t b = q_.block_of(smembers[0]);
        if (q_.block_size(b) == p_.block_size(sblk))
            return; // stability w.r.t. the whole compound block is already established

        // Q-split: the dequeued subblock becomes its own compound block; the
        // remainder keeps b's identity, so untouched predecessors' stored
        // weights stay valid by the empty-update stability law.
        for (std::uint32_t y : smembers)
            q_.mark(y);
        auto fresh_q = q_.split_marked(b);
        CMIN_REQUIRE(fresh_q.has_value(), "Q-split produced no block");
        std::uint32_t sq = *fresh_q;

        // gather the labels of all edges into S, per non-inert predecessor
        for (std::uint32_t y : smembers) {
            for (const edge& in : e_.in_edges(y)) {
                if (inert_[in.target])
                    continue; // rev entries store the source in .target
                auto& buf = scratch_[in.target];
                if (buf.empty())
                    touched_states_.push_back(in.target);
                buf.push_back(in.label);
            }
        }

        // mark predecessors; per touched P-block capture the reference value
        // v3zero that untouched members share, from a pre-update weight
        if (block_touch_.size() < p_.num_blocks())
            block_touch_.resize(p_.num_blocks(), k_untouched);
        for (std::uint32_t x : touched_states_) {
            std::uint32_t d = p_.block_of(x);
            if (block_touch_[d] == k_untouched) {
                block_touch_[d] = static_cast<std::uint32_t>(touched_blocks_.size());
                touched_blocks_.push_back(d);
                wentry* ent = find_entry(x, b);
                CMIN_REQUIRE(ent, "missing weight entry for predecessor");
                v3zero_.push_back(ifaces_[e_.sort_of[x]]->f3_empty(ent->w));
            } else if (opts_.debug_audits) {
                // all members of one block must agree on the no-labels value
                wentry* ent = find_entry(x, b);
                CMIN_REQUIRE(ent && ifaces_[e_.sort_of[x]]->f3_empty(ent->w) ==
                                        v3zero_[block_touch_[d]],
                             "v3zero differs across a block");
            }
            p_.mark(x);
        }

        // three-way update of every predecessor's stored weights
        for (std::uint32_t x : touched_states_) {
            auto& labels = scratch_[x];
            wentry* ent = find_entry(x, b);
            CMIN_REQUIRE(ent, "missing weight entry for predecessor");
            std::uint32_t cnt_sub = static_cast<std::uint32_t>(labels.size());
            CMIN_REQUIRE(cnt_sub <= ent->cnt, "more labels than stored edges");
            label_volume_ += cnt_sub;
            update_result res =
                ifaces_[e_.sort_of[x]]->update(labels, std::move(ent->w));
            v3_of_[x] = std::move(res.f3);
            if (ent->cnt > cnt_sub) {
                ent->w = std::move(res.to_rest);
                ent->cnt -= cnt_sub;
            } else {
                kill_entry(x, *ent);
            }
            push_entry(x, sq, cnt_sub, std::move(res.to_sub));
            labels.clear();
        }

        // split every touched block by the three-way value; members that
        // behave like untouched ones (v3 == v3zero) stay with the block
        for (std::size_t ti = 0; ti < touched_blocks_.size(); ++ti) {
            std::uint32_t d = touched_blocks_[ti];
            block_touch_[d] = k_untouched;
            const std::string& zero = v3zero_[ti];

            auto mem = p_.members(d);
            std::uint32_t marked = p_.marked_count(d);
            grouped_.clear();
            for (std::uint32_t i = 0; i < marked; ++i) {
                std::uint32_t x = mem[i];
                if (v3_of_[x] != zero)
                    grouped_.emplace_back(&v3_of_[x], x);
            }
            p_.clear_marks(d);
            std::sort(grouped_.begin(), grouped_.end(),
                      [](const auto& a, const auto& b) {
                          if (*a.first != *b.first)
                              return *a.first < *b.first;
                          return a.second < b.second;
                      });

            parts_.clear();
            parts_.push_back(d);
            std::size_t i = 0;
            while (i < grouped_.size()) {
                std::size_t j = i;
                while (j < grouped_.size() && *grouped_[j].first == *grouped_[i].first)
                    ++j;
                for (std::size_t k = i; k < j; ++k)
                    p_.mark(grouped_[k].second);
                if (auto nb = p_.split_marked(d))
                    parts_.push_back(*nb);
                i = j;
            }

            if (parts_.size() > 1 || in_queue_[d]) {
                if (in_queue_[d]) {
                    for (std::size_t pi = 1; pi < parts_.size(); ++pi)
                        enqueue(parts_[pi]);
                } else {
                    std::uint32_t largest = parts_[0];
                    for (std::uint32_t pb : parts_)
                        if (p_.block_size(pb) > p_.block_size(largest) ||
                            (p_.block_size(pb) == p_.block_size(largest) && pb < largest))
                            largest = pb;
                    for (std::uint32_t pb : parts_)
                        if (pb != largest)
                            enqueue(pb);
                }
            }
            for (std::uint32_t pb : parts_)
                make_inert_if_singleton(pb);
        }

        touched_states_.clear();
        touched_blocks_.clear();
        v3zero_.clear();
    }

    // expensive cross-checks, enabled by opts.debug_audits
    void audit() const {
        for (std::uint32_t bb = 0; bb < p_.num_blocks(); ++bb) {
            auto mem = p_.members(bb);
            if (mem.empty())
                continue;
            std::uint32_t qb = q_.block_of(mem[0]);
            std::uint32_t sort = e_.sort_of[mem[0]];
            for (std::uint32_t x : mem) {
                CMIN_REQUIRE(q_.block_of(x) == qb, "P does not refine Q");
                CMIN_REQUIRE(e_.sort_of[x] == sort, "states of different sorts share a block");
            }
        }
        // the weight store mirrors the true edge counts into each Q-block
        for (std::uint32_t x = 0; x < e_.num_states; ++x) {
            if (inert_[x]) {
                CMIN_REQUIRE(store_[x].empty(), "inert state still holds weights");
                continue;
            }
            std::map<std::uint32_t, std::uint32_t> counts;
            for (const edge& ed : e_.out_edges(x))
                ++counts[q_.block_of(ed.target)];
            std::size_t live = 0;
            for (const wentry& ent : store_[x]) {
                if (ent.cnt == 0)
                    continue;
                ++live;
                auto it = counts.find(ent.qblock);
                CMIN_REQUIRE(it != counts.end() && it->second == ent.cnt,
                             "weight-store edge count diverges");
            }
            CMIN_REQUIRE(live == counts.size(), "weight store misses a block entry");
        }
    }

    const encoded_coalgebra& e_;
    refine_options opts_;
    std::vector<std::unique_ptr<refinement_iface>> ifaces_;
    refinable_partition p_;
    refinable_partition q_;

    std::deque<std::uint32_t> queue_;
    std::vector<std::uint8_t> in_queue_;
    std::vector<std::uint8_t> inert_;
    std::vector<std::vector<wentry>> store_;
    std::vector<std::uint32_t> dead_;

    std::vector<std::vector<std::uint32_t>> scratch_;
    std::vector<std::uint32_t> touched_states_;
    std::vector<std::uint32_t> touched_blocks_;
    std::vector<std::uint32_t> block_touch_;
    std::vector<std::string> v3zero_;
    std::vector<std::string> v3_of_;
    std::vector<std::pair<const std::string*, std::uint32_t>> grouped_;
    std::vector<std::uint32_t> parts_;

    std::uint64_t label_volume_ = 0;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::uint32_t count_original_blocks(const refinable_partition& p, std::uint32_t num_original) {
    std::uint32_t count = 0;
    for (std::uint32_t b = 0; b < p.num_blocks(); ++b)
        for (std::uint32_t x : p.members(b))
            if (x < num_original) {
                ++count;
                break;
            }
    return count;
}

} // namespace

state_partition blocks_from_coloring(std::span<const std::uint32_t> coloring,
                                     std::uint32_t num_original) {
    std::map<std::uint32_t, std::vector<std::uint32_t>> by_color;
    for (std::uint32_t x = 0; x < num_original; ++x)
        by_color[coloring[x]].push_back(x);
    std::vector<std::pair<std::uint32_t, std::vector<std::uint32_t>>> ordered;
    for (auto& [c, blk] : by_color) {
        std::sort(blk.begin(), blk.end());
        ordered.emplace_back(blk[0], std::move(blk));
    }
    std::sort(ordered.begin(), ordered.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    state_partition out;
    out.reserve(ordered.size());
    for (auto& [min, blk] : ordered)
        out.push_back(std::move(blk));
    return out;
}

state_partition minimize_encoded(const encoded_coalgebra& e, const refine_options& opts,
                                 refine_stats* stats,
                                 std::vector<std::uint32_t>* final_coloring) {
    auto t0 = std::chrono::steady_clock::now();
    engine eng(e, opts);
    eng.initialize();
    double t_init = seconds_since(t0);
    std::uint32_t initial_blocks = count_original_blocks(eng.partition(), e.num_original);

    auto t1 = std::chrono::steady_clock::now();
    eng.run();
    double t_refine = seconds_since(t1);

    const refinable_partition& p = eng.partition();
    std::vector<std::uint32_t> coloring(e.num_states);
    for (std::uint32_t x = 0; x < e.num_states; ++x)
        coloring[x] = p.block_of(x);
    state_partition out = blocks_from_coloring(coloring, e.num_original);
    if (final_coloring)
        *final_coloring = std::move(coloring);

    if (stats) {
        stats->num_original = e.num_original;
        stats->num_states = e.num_states;
        stats->num_edges = e.num_edges;
        stats->initial_blocks = initial_blocks;
        stats->final_blocks = static_cast<std::uint32_t>(out.size());
        stats->label_volume = eng.label_volume();
        stats->t_init += t_init;
        stats->t_refine += t_refine;
    }
    return out;
}

state_partition minimize(const symbolic_coalgebra& s, const refine_options& opts,
                         refine_stats* stats) {
    auto t0 = std::chrono::steady_clock::now();
    sort_plan plan = plan_decomposition(s.term);
    encoded_coalgebra e = flatten(s, plan);
    double t_flatten = seconds_since(t0);
    if (stats)
        stats->t_init += t_flatten;
    return minimize_encoded(e, opts, stats);
}

} // namespace cmin
