#include "ruinlab/mc.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "ruinlab/andersen.hpp"
#include "ruinlab/errors.hpp"

namespace ruinlab {

MCEstimate make_estimate(std::uint64_t hits, std::uint64_t n) {
    MCEstimate est;
    est.n = n;
    if (n == 0) return est;
    const double nn = static_cast<double>(n);
    const double p = static_cast<double>(hits) / nn;
    est.p_hat = p;
    est.std_err = std::sqrt(p * (1.0 - p) / nn);
    const double z = 1.959963984540054;  // 97.5% normal quantile
    const double z2n = z * z / nn;
    const double denom = 1.0 + z2n;
    const double centre = (p + 0.5 * z2n) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / nn + 0.25 * z2n / nn) / denom;
    est.ci_lo = hits == 0 ? 0.0 : std::max(0.0, centre - half);
    est.ci_hi = hits == n ? 1.0 : std::min(1.0, centre + half);
    return est;
}

unsigned effective_threads() {
    unsigned cap = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("RUIN_LAB_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) cap = std::min<unsigned>(cap, static_cast<unsigned>(v));
    }
    return cap;
}

namespace {

struct HitAcc {
    std::uint64_t hits = 0;
};

std::uint64_t total_hits(const std::vector<HitAcc>& accs) {
    std::uint64_t h = 0;
    for (const auto& a : accs) h += a.hits;
    return h;
}

}  // namespace

MCEstimate simulate_ruin(const SeasonalModel& model, std::int64_t u, const MCConfig& cfg,
                         RuinConvention convention) {
    model.validate();
    if (u < 0) raise(Errc::invalid_argument, "initial surplus must be >= 0");
    if (cfg.horizon < 1) raise(Errc::invalid_argument, "horizon must be >= 1");
    const std::int64_t floor_state = convention == RuinConvention::Weak ? 0 : 1;
    const std::int64_t c = model.premium;

    auto accs = run_path_chunks<HitAcc>(cfg, [&](HitAcc& acc, RngStream& stream, std::uint64_t) {
        std::int64_t surplus = u;
        for (std::int64_t t = 1; t <= cfg.horizon; ++t) {
            surplus += c - model.season_pmf(t).sample(stream.next_u01());
            if (surplus < floor_state) {
                ++acc.hits;
                return;
            }
        }
    });
    return make_estimate(total_hits(accs), cfg.paths);
}

namespace {

MCEstimate simulate_ruin_continuous(double premium_rate, const Claim& claim,
                                    const ContinuousClaim& interarrival, double u,
                                    const MCConfig& cfg) {
    if (u < 0.0) raise(Errc::invalid_argument, "initial surplus must be >= 0");
    if (cfg.horizon < 1) raise(Errc::invalid_argument, "horizon must be >= 1");
    auto accs = run_path_chunks<HitAcc>(cfg, [&](HitAcc& acc, RngStream& stream, std::uint64_t) {
        // ruin can only happen at claim instants; check the surplus there
        double surplus = u;
        for (std::int64_t n = 1; n <= cfg.horizon; ++n) {
            surplus += premium_rate * interarrival.sample(stream);
            surplus -= claim_sample(claim, stream);
            if (surplus < 0.0) {
                ++acc.hits;
                return;
            }
        }
    });
    return make_estimate(total_hits(accs), cfg.paths);
}

}  // namespace

MCEstimate simulate_ruin(const ClassicalModel& model, double u, const MCConfig& cfg) {
    model.validate();
    const ContinuousClaim interarrival = ContinuousClaim::exponential_rate(model.lambda);
    return simulate_ruin_continuous(model.premium_rate, model.claim, interarrival, u, cfg);
}

MCEstimate simulate_ruin(const AndersenModel& model, double u, const MCConfig& cfg) {
    model.validate();
    return simulate_ruin_continuous(model.premium_rate, model.claim, model.interarrival, u, cfg);
}

namespace {

struct CoupledAcc {
    std::uint64_t violations = 0;
    std::vector<std::uint64_t> star_hits;  // per probe horizon
    std::vector<std::uint64_t> base_hits;
};

std::vector<std::int64_t> normalize_probes(std::vector<std::int64_t> probes,
                                           std::int64_t horizon) {
    probes.erase(std::remove_if(probes.begin(), probes.end(),
                                [&](std::int64_t t) { return t < 1 || t > horizon; }),
                 probes.end());
    std::sort(probes.begin(), probes.end());
    probes.erase(std::unique(probes.begin(), probes.end()), probes.end());
    if (probes.empty() || probes.back() != horizon) probes.push_back(horizon);
    return probes;
}

template <class StepFn>
CoupledReport run_coupled(const MCConfig& cfg, std::vector<std::int64_t> probe_horizons,
                          StepFn&& step) {
    const auto probes = normalize_probes(std::move(probe_horizons), cfg.horizon);
    auto accs = run_path_chunks<CoupledAcc>(
        cfg, [&](CoupledAcc& acc, RngStream& stream, std::uint64_t) {
            if (acc.star_hits.empty()) {
                acc.star_hits.assign(probes.size(), 0);
                acc.base_hits.assign(probes.size(), 0);
            }
            std::int64_t tau_star = cfg.horizon + 1;
            std::int64_t tau_base = cfg.horizon + 1;
            bool violated = false;
            step(stream, tau_star, tau_base, violated);
            if (violated) ++acc.violations;
            for (std::size_t i = 0; i < probes.size(); ++i) {
                if (tau_star <= probes[i]) ++acc.star_hits[i];
                if (tau_base <= probes[i]) ++acc.base_hits[i];
            }
        });

    CoupledReport report;
    std::vector<std::uint64_t> star(probes.size(), 0), base(probes.size(), 0);
    for (const auto& acc : accs) {
        report.violations += acc.violations;
        for (std::size_t i = 0; i < acc.star_hits.size(); ++i) {
            star[i] += acc.star_hits[i];
            base[i] += acc.base_hits[i];
        }
    }
    if (report.violations > 0)
        raise(Errc::coupling_broken, std::to_string(report.violations) +
                                         " coupled paths violated sum x* <= sum x");
    for (std::size_t i = 0; i < probes.size(); ++i)
        report.probes.push_back(
            {probes[i], make_estimate(star[i], cfg.paths), make_estimate(base[i], cfg.paths)});
    report.psi_star = report.probes.back().psi_star;
    report.psi = report.probes.back().psi;
    return report;
}

}  // namespace

CoupledReport simulate_coupled(const SeasonalModel& base, const CouplingPmf& coupling,
                               int perturbed_season, std::int64_t u, const MCConfig& cfg,
                               std::vector<std::int64_t> probe_horizons) {
    base.validate();
    if (u < 0) raise(Errc::invalid_argument, "initial surplus must be >= 0");
    if (perturbed_season < 0 || perturbed_season >= base.period())
        raise(Errc::invalid_argument, "perturbed season out of range");
    const std::int64_t c = base.premium;

    return run_coupled(
        cfg, std::move(probe_horizons),
        [&](RngStream& stream, std::int64_t& tau_star, std::int64_t& tau_base, bool& violated) {
            std::int64_t sum_star = 0, sum_base = 0;
            std::int64_t surplus_star = u, surplus_base = u;
            for (std::int64_t t = 1; t <= cfg.horizon; ++t) {
                const auto season = static_cast<int>((t - 1) % base.period());
                int x_star, x_base;
                if (season == perturbed_season) {
                    std::tie(x_star, x_base) = coupling.sample(stream.next_u01());
                } else {
                    x_star = x_base = base.pmfs[static_cast<std::size_t>(season)].sample(
                        stream.next_u01());
                }
                sum_star += x_star;
                sum_base += x_base;
                if (sum_star > sum_base) violated = true;
                surplus_star += c - x_star;
                surplus_base += c - x_base;
                if (surplus_star < 0 && tau_star > cfg.horizon) tau_star = t;
                if (surplus_base < 0 && tau_base > cfg.horizon) tau_base = t;
            }
        });
}

namespace {

CoupledReport simulate_coupled_continuous(double premium_rate, const PerturbedClaim& claim,
                                          const ContinuousClaim& interarrival, double u,
                                          const MCConfig& cfg,
                                          std::vector<std::int64_t> probe_horizons) {
    if (u < 0.0) raise(Errc::invalid_argument, "initial surplus must be >= 0");
    return run_coupled(
        cfg, std::move(probe_horizons),
        [&](RngStream& stream, std::int64_t& tau_star, std::int64_t& tau_base, bool& violated) {
            double sum_star = 0.0, sum_base = 0.0;
            double surplus_star = u, surplus_base = u;
            for (std::int64_t n = 1; n <= cfg.horizon; ++n) {
                const double income = premium_rate * interarrival.sample(stream);
                const auto [x_star, x_base] = claim.coupled_sample(stream);
                sum_star += x_star;
                sum_base += x_base;
                if (sum_star > sum_base) violated = true;
                surplus_star += income - x_star;
                surplus_base += income - x_base;
                if (surplus_star < 0.0 && tau_star > cfg.horizon) tau_star = n;
                if (surplus_base < 0.0 && tau_base > cfg.horizon) tau_base = n;
            }
        });
}

const PerturbedClaim& require_perturbed(const Claim& claim) {
    if (!std::holds_alternative<PerturbedClaim>(claim))
        raise(Errc::invalid_argument, "coupled simulation needs a perturbed claim");
    return std::get<PerturbedClaim>(claim);
}

}  // namespace

CoupledReport simulate_coupled(const ClassicalModel& model, double u, const MCConfig& cfg,
                               std::vector<std::int64_t> probe_horizons) {
    model.validate();
    const ContinuousClaim interarrival = ContinuousClaim::exponential_rate(model.lambda);
    return simulate_coupled_continuous(model.premium_rate, require_perturbed(model.claim),
                                       interarrival, u, cfg, std::move(probe_horizons));
}

CoupledReport simulate_coupled(const AndersenModel& model, double u, const MCConfig& cfg,
                               std::vector<std::int64_t> probe_horizons) {
    model.validate();
    return simulate_coupled_continuous(model.premium_rate, require_perturbed(model.claim),
                                       model.interarrival, u, cfg, std::move(probe_horizons));
}

}  // namespace ruinlab
