#ifndef RUINLAB_MC_HPP
#define RUINLAB_MC_HPP

#include <atomic>
#include <cstdint>
#include <thread>
#include <vector>

#include "ruinlab/classical.hpp"
#include "ruinlab/coupling.hpp"
#include "ruinlab/discrete.hpp"
#include "ruinlab/rng.hpp"
#include "ruinlab/survival_table.hpp"

namespace ruinlab {

struct AndersenModel;

struct MCConfig {
    std::uint64_t paths = 100'000;
    std::int64_t horizon = 10'000;  // periods (discrete) or claim events (continuous)
    std::uint64_t seed = 1;
    unsigned chunks = 1;
};

struct MCEstimate {
    double p_hat = 0.0;
    double std_err = 0.0;
    std::uint64_t n = 0;
    double ci_lo = 0.0;  // 95% Wilson interval
    double ci_hi = 0.0;
};

MCEstimate make_estimate(std::uint64_t hits, std::uint64_t n);

// worker cap: min(hardware, RUIN_LAB_THREADS if set)
unsigned effective_threads();

// Runs fn(acc, stream, path) for every path index, partitioned into
// cfg.chunks contiguous ranges. Each path draws from the substream keyed by
// its global index, so merged integer accumulators are identical for any
// chunk or thread count. Accumulators are returned in chunk order.
template <class Acc, class PathFn>
std::vector<Acc> run_path_chunks(const MCConfig& cfg, PathFn&& fn) {
    const unsigned chunks = cfg.chunks > 0 ? cfg.chunks : 1;
    std::vector<Acc> accs(chunks);
    std::atomic<unsigned> next{0};
    auto work = [&]() {
        for (unsigned c = next.fetch_add(1); c < chunks; c = next.fetch_add(1)) {
            const std::uint64_t lo = cfg.paths * c / chunks;
            const std::uint64_t hi = cfg.paths * (c + 1) / chunks;
            for (std::uint64_t p = lo; p < hi; ++p) {
                RngStream stream = rng_substream(cfg.seed, p);
                fn(accs[c], stream, p);
            }
        }
    };
    const unsigned workers = std::min(effective_threads(), chunks);
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    return accs;
}

// Fraction of paths ruined before the horizon (early exit on ruin).
MCEstimate simulate_ruin(const SeasonalModel& model, std::int64_t u, const MCConfig& cfg,
                         RuinConvention convention = RuinConvention::Weak);
MCEstimate simulate_ruin(const ClassicalModel& model, double u, const MCConfig& cfg);
MCEstimate simulate_ruin(const AndersenModel& model, double u, const MCConfig& cfg);

struct CoupledProbe {
    std::int64_t horizon;
    MCEstimate psi_star;
    MCEstimate psi;
};

struct CoupledReport {
    std::uint64_t violations = 0;  // paths with sum x* > sum x; zero or the run throws
    MCEstimate psi_star;           // at the full horizon
    MCEstimate psi;
    std::vector<CoupledProbe> probes;
};

// Runs the coupled pair (starred, base) on shared randomness, verifies the
// pathwise dominance sum x* <= sum x at every step and reports the ruin
// estimates for both chains at the probe horizons. Any dominance violation
// raises CouplingBroken.
CoupledReport simulate_coupled(const SeasonalModel& base, const CouplingPmf& coupling,
                               int perturbed_season, std::int64_t u, const MCConfig& cfg,
                               std::vector<std::int64_t> probe_horizons = {});
CoupledReport simulate_coupled(const ClassicalModel& model, double u, const MCConfig& cfg,
                               std::vector<std::int64_t> probe_horizons = {});
CoupledReport simulate_coupled(const AndersenModel& model, double u, const MCConfig& cfg,
                               std::vector<std::int64_t> probe_horizons = {});

}  // namespace ruinlab

#endif
