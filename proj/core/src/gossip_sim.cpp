#include "blockprop/gossip_sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <string>
#include <thread>

#include "blockprop/rng.hpp"

namespace blockprop {

std::string_view to_string(SimMode mode) {
    switch (mode) {
        case SimMode::propagation: return "propagation";
        case SimMode::forking: return "forking";
        case SimMode::failure_exit: return "failure_exit";
        case SimMode::race: return "race";
    }
    return "?";
}

SimMode sim_mode_from_string(std::string_view name) {
    for (auto m : {SimMode::propagation, SimMode::forking, SimMode::failure_exit, SimMode::race}) {
        if (to_string(m) == name) return m;
    }
    throw ParameterError("unknown simulation mode '" + std::string(name) + "'");
}

void SimConfig::validate() const {
    chain.validate();
    net.validate();
    if (replications < 1) throw ParameterError("replications must be >= 1");
    if (threads < 0) throw ParameterError("threads must be >= 0");
}

void RaceConfig::validate() const {
    if (!(p >= 0.0 && q >= 0.0 && std::abs(p + q - 1.0) < 1e-12)) {
        throw ParameterError("race rates must be non-negative and sum to 1");
    }
    if (confirmations < 0) throw ParameterError("confirmations must be non-negative");
    if (replications < 1) throw ParameterError("replications must be >= 1");
    if (step_cap < 1) throw ParameterError("step cap must be >= 1");
    if (threads < 0) throw ParameterError("threads must be >= 0");
}

namespace {

int worker_count(int requested) {
    if (requested > 0) return requested;
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

// Runs f(i) for i in [begin, end) over contiguous blocks. f must only write
// to slots owned by i.
template <typename F>
void parallel_for(long begin, long end, int threads, F&& f) {
    const long count = end - begin;
    if (count <= 0) return;
    const long workers = std::min<long>(worker_count(threads), count);
    if (workers == 1) {
        for (long i = begin; i < end; ++i) f(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (long w = 0; w < workers; ++w) {
        const long lo = begin + count * w / workers;
        const long hi = begin + count * (w + 1) / workers;
        pool.emplace_back([lo, hi, &f] {
            for (long i = lo; i < hi; ++i) f(i);
        });
    }
    for (auto& t : pool) t.join();
}

class Accumulator {
public:
    void add(double x) {
        ++n_;
        const double d = x - mean_;
        mean_ += d / static_cast<double>(n_);
        m2_ += d * (x - mean_);
    }
    long count() const { return n_; }
    Estimate estimate() const {
        if (n_ == 0) return {};
        const double var = n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0;
        return {mean_, std::sqrt(var / static_cast<double>(n_))};
    }

private:
    long n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

double quantile(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) return 0.0;
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

SampleSummary summarize(std::vector<double> xs) {
    SampleSummary s;
    Accumulator acc;
    for (double x : xs) acc.add(x);
    s.count = acc.count();
    s.mean = acc.estimate().mean;
    s.std_error = acc.estimate().std_error;
    std::sort(xs.begin(), xs.end());
    if (!xs.empty()) {
        s.min = xs.front();
        s.max = xs.back();
        s.q05 = quantile(xs, 0.05);
        s.median = quantile(xs, 0.5);
        s.q95 = quantile(xs, 0.95);
    }
    return s;
}

struct Delivery {
    double time;
    std::uint64_t seq;
    int target;
    int sender;

    bool operator>(const Delivery& o) const {
        return time != o.time ? time > o.time : seq > o.seq;
    }
};

// One block's history across the original gossip and any rescue blocks.
struct Trajectory {
    std::vector<double> informed_at;  // per server; +inf while uninformed
    std::vector<double> reached;      // time the i-th server got the block, i = 1..n at i-1
    int first_stall = 0;              // informed count at the first stall; 0 if none
    std::vector<int> origins;         // informed count when each rescue was generated
};

class Gossip {
public:
    Gossip(const ChainParams& chain, const NetworkParams& net, Philox4x32& rng)
        : n_(chain.servers), k_(chain.fanout), link_(net.link_time()), block_(net.block_time_s), rng_(rng),
          peers_(static_cast<std::size_t>(n_)), got_(static_cast<std::size_t>(n_)),
          engaged_(static_cast<std::size_t>(n_)) {}

    void start(Trajectory& tr, const std::vector<int>& preinformed) {
        tr.informed_at.assign(static_cast<std::size_t>(n_), kNever);
        tr.reached.clear();
        tr.first_stall = 0;
        tr.origins.clear();
        for (int v : preinformed) mark(tr, v, 0.0);
    }

    // Spreads one block from `source` until nothing is in flight. Every
    // recipient learns block h; returns the time of the last delivery.
    double spread(Trajectory& tr, int source, double t0) {
        std::fill(got_.begin(), got_.end(), 0);
        std::fill(engaged_.begin(), engaged_.end(), 0);
        got_[static_cast<std::size_t>(source)] = 1;
        mark(tr, source, t0);
        select(source, -1, t0);
        double t = t0;
        while (!queue_.empty()) {
            const Delivery d = queue_.top();
            queue_.pop();
            t = d.time;
            engaged_[static_cast<std::size_t>(d.target)] = 0;
            got_[static_cast<std::size_t>(d.target)] = 1;
            mark(tr, d.target, t);
            select(d.target, d.sender, t);
        }
        return t;
    }

    // Keeps generating rescue blocks until `done` holds or every server has
    // block h.
    template <typename Done>
    double rescue_until(Trajectory& tr, double t, Done done) {
        while (static_cast<int>(tr.reached.size()) < n_ && !done(tr)) {
            t += rng_.exponential(block_);
            const int generator = static_cast<int>(rng_.below(static_cast<std::uint32_t>(n_)));
            tr.origins.push_back(static_cast<int>(tr.reached.size()));
            t = spread(tr, generator, t);
        }
        return t;
    }

    int pick_server() { return static_cast<int>(rng_.below(static_cast<std::uint32_t>(n_))); }

private:
    static constexpr double kNever = std::numeric_limits<double>::infinity();

    void mark(Trajectory& tr, int v, double t) {
        auto& at = tr.informed_at[static_cast<std::size_t>(v)];
        if (at == kNever) {
            at = t;
            tr.reached.push_back(t);
        }
    }

    // Contacts k peers other than `self` and `sender`; peers that already
    // hold this block or have accepted an inv for it ignore the new inv.
    void select(int self, int sender, double t) {
        int m = 0;
        for (int v = 0; v < n_; ++v) {
            if (v != self && v != sender) peers_[static_cast<std::size_t>(m++)] = v;
        }
        const int picks = std::min(k_, m);
        for (int i = 0; i < picks; ++i) {
            const int j = i + static_cast<int>(rng_.below(static_cast<std::uint32_t>(m - i)));
            std::swap(peers_[static_cast<std::size_t>(i)], peers_[static_cast<std::size_t>(j)]);
            const int w = peers_[static_cast<std::size_t>(i)];
            const auto wi = static_cast<std::size_t>(w);
            if (got_[wi] || engaged_[wi]) continue;
            engaged_[wi] = 1;
            queue_.push({t + rng_.exponential(link_), seq_++, w, self});
        }
    }

    int n_;
    int k_;
    double link_;
    double block_;
    Philox4x32& rng_;
    std::vector<int> peers_;
    std::vector<char> got_;
    std::vector<char> engaged_;
    std::priority_queue<Delivery, std::vector<Delivery>, std::greater<>> queue_;
    std::uint64_t seq_ = 0;
};

// A full propagation started at a uniformly random source.
double run_propagation(Gossip& g, Trajectory& tr, int n) {
    g.start(tr, {});
    double t = g.spread(tr, g.pick_server(), 0.0);
    if (static_cast<int>(tr.reached.size()) < n) tr.first_stall = static_cast<int>(tr.reached.size());
    t = g.rescue_until(tr, t, [](const Trajectory&) { return false; });
    return t;
}

struct PropagationRecord {
    std::vector<double> reached;
    bool stalled = false;
    int forks = 0;
};

SimReport propagation_report(const SimConfig& cfg, bool overlay_forks) {
    cfg.validate();
    const int n = cfg.chain.servers;
    std::vector<PropagationRecord> records(static_cast<std::size_t>(cfg.replications));
    parallel_for(0, cfg.replications, cfg.threads, [&](long i) {
        Philox4x32 rng(cfg.seed, static_cast<std::uint64_t>(i));
        Gossip g(cfg.chain, cfg.net, rng);
        Trajectory tr;
        const double end = run_propagation(g, tr, n);
        auto& rec = records[static_cast<std::size_t>(i)];
        rec.stalled = tr.first_stall != 0;
        if (overlay_forks) {
            // Poisson block generation over the whole domain; a block mined
            // by a server that has not yet seen h extends h-1.
            for (double t = rng.exponential(cfg.net.block_time_s); t < end;
                 t += rng.exponential(cfg.net.block_time_s)) {
                const int miner = g.pick_server();
                if (tr.informed_at[static_cast<std::size_t>(miner)] > t) ++rec.forks;
            }
        }
        rec.reached = std::move(tr.reached);
    });

    SimReport rep;
    rep.mode = overlay_forks ? SimMode::forking : SimMode::propagation;
    rep.rng = std::string(Philox4x32::kName);
    rep.seed = cfg.seed;
    rep.replications = cfg.replications;
    std::vector<Accumulator> curve(static_cast<std::size_t>(n));
    std::vector<Accumulator> rounds(static_cast<std::size_t>(n - 1));
    Accumulator fail, forks, forked;
    std::vector<double> delays;
    delays.reserve(records.size());
    for (const auto& rec : records) {
        for (int i = 0; i < n; ++i) curve[static_cast<std::size_t>(i)].add(rec.reached[static_cast<std::size_t>(i)]);
        for (int r = 0; r < n - 1; ++r) {
            rounds[static_cast<std::size_t>(r)].add(rec.reached[static_cast<std::size_t>(r) + 1] -
                                                    rec.reached[static_cast<std::size_t>(r)]);
        }
        delays.push_back(rec.reached.back());
        fail.add(rec.stalled ? 1.0 : 0.0);
        if (overlay_forks) {
            forks.add(rec.forks);
            forked.add(rec.forks > 0 ? 1.0 : 0.0);
        }
    }
    for (const auto& a : curve) rep.informed_curve_mean.push_back(a.estimate());
    for (const auto& a : rounds) rep.round_time_mean.push_back(a.estimate());
    rep.delay_samples = summarize(std::move(delays));
    rep.failure_freq = fail.estimate();
    if (overlay_forks) {
        rep.fork_counts = forks.estimate();
        rep.fork_freq = forked.estimate();
    }
    return rep;
}

struct ExitRecord {
    bool accepted = false;
    double exit_time = 0.0;
    int origin = 0;
};

// Deficit beyond which a walk's remaining chance (q/p)^d is negligible;
// -1 when walks never drift away.
long give_up_deficit(const RaceConfig& cfg) {
    if (!(cfg.p > cfg.q) || cfg.q == 0.0) return -1;
    return static_cast<long>(std::ceil(std::log(cfg.abandon_below) / std::log(cfg.q / cfg.p)));
}

// outcome: 0 lost, 1 won, 2 hit the step cap.
SimReport walk_report(const RaceConfig& cfg, const std::vector<char>& outcome) {
    SimReport rep;
    rep.mode = SimMode::race;
    rep.rng = std::string(Philox4x32::kName);
    rep.seed = cfg.seed;
    rep.replications = cfg.replications;
    Accumulator wins;
    long capped = 0;
    for (char o : outcome) {
        wins.add(o == 1 ? 1.0 : 0.0);
        if (o == 2) ++capped;
    }
    rep.race_win_freq = wins.estimate();
    rep.race_cap_hit_freq = static_cast<double>(capped) / static_cast<double>(cfg.replications);
    return rep;
}

}  // namespace

SimReport simulate_propagation(const SimConfig& cfg) { return propagation_report(cfg, false); }

SimReport simulate_forking(const SimConfig& cfg) { return propagation_report(cfg, true); }

SimReport simulate_failure_exit(const SimConfig& cfg, int informed) {
    cfg.validate();
    const int n = cfg.chain.servers;
    const int k = cfg.chain.fanout;
    if (k > n - 3 || informed < k + 2 || informed > n - 1) {
        throw ParameterError("{" + std::to_string(informed) + ",0} is not a reachable stall state for n=" +
                             std::to_string(n) + ", k=" + std::to_string(k));
    }
    const auto through = cfg.exit_sampling == ExitSampling::through;

    const auto run_one = [&](long i) {
        Philox4x32 rng(cfg.seed, static_cast<std::uint64_t>(i));
        Gossip g(cfg.chain, cfg.net, rng);
        Trajectory tr;
        ExitRecord rec;
        if (!through) {
            // Exchangeability: which I servers hold the block does not matter.
            std::vector<int> pre(static_cast<std::size_t>(informed));
            std::iota(pre.begin(), pre.end(), 0);
            g.start(tr, pre);
            g.rescue_until(tr, 0.0, [informed](const Trajectory& t) {
                return static_cast<int>(t.reached.size()) > informed;
            });
            rec.accepted = true;
            rec.exit_time = tr.reached[static_cast<std::size_t>(informed)];
            rec.origin = tr.origins.back();
            return rec;
        }
        run_propagation(g, tr, n);
        if (tr.first_stall == 0 || tr.first_stall > informed) return rec;
        rec.accepted = true;
        rec.exit_time = tr.reached[static_cast<std::size_t>(informed)] -
                        tr.reached[static_cast<std::size_t>(informed) - 1];
        for (int o : tr.origins) {
            if (o <= informed) rec.origin = o;
        }
        return rec;
    };

    std::vector<ExitRecord> kept;
    long attempts = 0;
    if (!through) {
        kept.resize(static_cast<std::size_t>(cfg.replications));
        parallel_for(0, cfg.replications, cfg.threads,
                     [&](long i) { kept[static_cast<std::size_t>(i)] = run_one(i); });
        attempts = cfg.replications;
    } else {
        // Batches of attempt indices, kept in index order, until enough
        // replications landed in failure mode by round I.
        long batch = std::max<long>(cfg.replications, 4096);
        while (static_cast<long>(kept.size()) < cfg.replications) {
            if (attempts >= cfg.max_attempts) {
                throw ConvergenceError("failure-exit sampling accepted only " + std::to_string(kept.size()) +
                                       " of " + std::to_string(cfg.replications) + " runs in " +
                                       std::to_string(attempts) + " attempts");
            }
            const long size = std::min(batch, cfg.max_attempts - attempts);
            std::vector<ExitRecord> recs(static_cast<std::size_t>(size));
            parallel_for(attempts, attempts + size, cfg.threads,
                         [&](long i) { recs[static_cast<std::size_t>(i - attempts)] = run_one(i); });
            for (long j = 0; j < size && static_cast<long>(kept.size()) < cfg.replications; ++j) {
                if (recs[static_cast<std::size_t>(j)].accepted) kept.push_back(recs[static_cast<std::size_t>(j)]);
                ++attempts;
            }
            batch = std::min<long>(batch * 2, 1L << 24);
        }
    }

    SimReport rep;
    rep.mode = SimMode::failure_exit;
    rep.rng = std::string(Philox4x32::kName);
    rep.seed = cfg.seed;
    rep.replications = cfg.replications;
    rep.attempts = attempts;
    Accumulator exit;
    std::map<int, long> origins;
    for (const auto& r : kept) {
        exit.add(r.exit_time);
        ++origins[r.origin];
    }
    rep.exit_time = exit.estimate();
    const double total = static_cast<double>(kept.size());
    for (int l = k + 2; l <= informed; ++l) {
        const double f = static_cast<double>(origins[l]) / total;
        rep.origin_freq[l] = {f, std::sqrt(f * (1.0 - f) / total)};
    }
    return rep;
}

SimReport simulate_race(const RaceConfig& cfg) {
    cfg.validate();
    const long give_up = give_up_deficit(cfg);

    std::vector<char> outcome(static_cast<std::size_t>(cfg.replications), 0);
    parallel_for(0, cfg.replications, cfg.threads, [&](long i) {
        if (cfg.q == 0.0) return;
        Philox4x32 rng(cfg.seed, static_cast<std::uint64_t>(i));
        long honest = 0;
        long malicious = 0;
        long steps = 0;
        // Phase 1: the attacker mines offline until the data item has m
        // honest confirmations.
        while (honest < cfg.confirmations) {
            if (steps++ >= cfg.step_cap) {
                outcome[static_cast<std::size_t>(i)] = 2;
                return;
            }
            if (rng.uniform() < cfg.p) ++honest; else ++malicious;
        }
        // Phase 2: the attacker must mine at least one block carrying the
        // modified item and then lead by one.
        bool included = false;
        char result = 2;
        while (steps++ < cfg.step_cap) {
            if (rng.uniform() < cfg.p) {
                ++honest;
            } else {
                ++malicious;
                included = true;
            }
            if (included && malicious - honest >= 1) {
                result = 1;
                break;
            }
            if (give_up >= 0 && honest - malicious + 1 >= give_up) {
                result = 0;
                break;
            }
        }
        outcome[static_cast<std::size_t>(i)] = result;
    });

    return walk_report(cfg, outcome);
}

SimReport simulate_catch_up(const RaceConfig& cfg, int deficit) {
    cfg.validate();
    if (deficit < 0) throw ParameterError("deficit must be non-negative");
    const long give_up = give_up_deficit(cfg);
    std::vector<char> outcome(static_cast<std::size_t>(cfg.replications), 0);
    parallel_for(0, cfg.replications, cfg.threads, [&](long i) {
        if (deficit == 0) {
            outcome[static_cast<std::size_t>(i)] = 1;
            return;
        }
        if (cfg.q == 0.0) return;
        Philox4x32 rng(cfg.seed, static_cast<std::uint64_t>(i));
        long behind = deficit;
        char result = 2;
        for (long step = 0; step < cfg.step_cap; ++step) {
            behind += rng.uniform() < cfg.p ? 1 : -1;
            if (behind == 0) {
                result = 1;
                break;
            }
            if (give_up >= 0 && behind >= give_up) {
                result = 0;
                break;
            }
        }
        outcome[static_cast<std::size_t>(i)] = result;
    });

    return walk_report(cfg, outcome);
}

SimReport simulate(const SimConfig& cfg) {
    switch (cfg.mode) {
        case SimMode::propagation: return simulate_propagation(cfg);
        case SimMode::forking: return simulate_forking(cfg);
        case SimMode::failure_exit: return simulate_failure_exit(cfg, cfg.failure_state);
        case SimMode::race: break;
    }
    throw ParameterError("race simulations take a RaceConfig");
}

}  // namespace blockprop
