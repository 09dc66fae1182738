#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <thread>
#include <utility>
#include <vector>

#include "blockprop/fork_security.hpp"
#include "blockprop/propagation.hpp"
#include "config.hpp"

namespace blockprop::report {

// Runs f(i) for i in [0, count) on up to `threads` workers (0 = hardware).
// Each f(i) writes only its own slot, so results keep grid order.
template <typename F>
void parallel_indices(std::size_t count, int threads, F&& f) {
    std::size_t workers = threads > 0 ? static_cast<std::size_t>(threads)
                                      : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) f(i);
        return;
    }
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([=, &f] {
            for (std::size_t i = w; i < count; i += workers) f(i);
        });
    }
    for (auto& t : pool) t.join();
}

/// Propagation models keyed by (n, k), built once and shared.
class ModelCache {
public:
    std::shared_ptr<const PropagationModel> get(const ChainParams& chain) {
        {
            std::lock_guard lock(mu_);
            auto it = models_.find(key(chain));
            if (it != models_.end()) return it->second;
        }
        auto model = std::make_shared<const PropagationModel>(chain);
        std::lock_guard lock(mu_);
        return models_.emplace(key(chain), std::move(model)).first->second;
    }

    void warm(const std::vector<ChainParams>& chains, int threads) {
        parallel_indices(chains.size(), threads, [&](std::size_t i) { get(chains[i]); });
    }

private:
    static std::pair<int, int> key(const ChainParams& c) { return {c.servers, c.fanout}; }

    std::mutex mu_;
    std::map<std::pair<int, int>, std::shared_ptr<const PropagationModel>> models_;
};

struct PointMetrics {
    PropagationProfile profile;
    TradeoffReport tradeoff;
};

inline PointMetrics evaluate_point(const PropagationModel& model, const GridPoint& point) {
    PointMetrics m;
    m.profile = model.profile(point.net);
    m.tradeoff = evaluate_tradeoff(m.profile, point.sec);
    return m;
}

}  // namespace blockprop::report
