#include "ruinlab/andersen.hpp"

#include <algorithm>
#include <cmath>

#include "ruinlab/errors.hpp"

namespace ruinlab {

bool AndersenModel::neutral(double tol) const noexcept {
    return std::abs(drift()) <= tol;
}

void AndersenModel::validate() const {
    if (!(premium_rate > 0.0)) raise(Errc::invalid_argument, "premium rate must be > 0");
    if (!(interarrival.mean() > 0.0))
        raise(Errc::invalid_argument, "inter-occurrence times must not be degenerate at zero");
}

bool AndersenModel::degenerate_certain() const noexcept {
    // P(X = c theta) = 1 is possible only when both laws are degenerate
    if (interarrival.family() != ClaimFamily::ShiftedDiscrete ||
        interarrival.nodes().size() != 1)
        return false;
    const double target = premium_rate * interarrival.nodes().front().first;
    return std::visit(
        [&](const auto& c) {
            return c.tail(target * (1.0 - 1e-12)) >= 1.0 - 1e-15 &&
                   c.tail(target * (1.0 + 1e-12) + 1e-300) <= 1e-15;
        },
        claim);
}

namespace {

// per-path draw of one walk increment X - c*theta
double walk_increment(const AndersenModel& model, RngStream& stream) {
    const double theta = model.interarrival.sample(stream);
    const double x = claim_sample(model.claim, stream);
    return x - model.premium_rate * theta;
}

constexpr double kFixScale = 1048576.0;  // 2^20 fixed-point weight scale

struct SpitzerAcc {
    std::vector<std::uint64_t> hits;  // hits[n-1] = #paths with S_n > 0
    std::uint64_t sum_fix = 0;        // per-path sum of round(2^20 / n) over hit n
    unsigned __int128 sum_fix_sq = 0;
};

}  // namespace

SpitzerPartial spitzer_estimate(const AndersenModel& model,
                                const std::vector<std::int64_t>& n_list, const MCConfig& cfg) {
    model.validate();
    if (n_list.empty()) raise(Errc::invalid_argument, "empty n list");
    if (cfg.paths == 0) raise(Errc::invalid_argument, "paths must be >= 1");
    const std::int64_t n_max = *std::max_element(n_list.begin(), n_list.end());
    if (n_max < 1) raise(Errc::invalid_argument, "n values must be >= 1");

    // integer fixed-point weights keep the merged variance accumulator
    // bit-identical for any chunk count
    std::vector<std::uint64_t> weight_fix(static_cast<std::size_t>(n_max));
    for (std::int64_t n = 1; n <= n_max; ++n)
        weight_fix[static_cast<std::size_t>(n - 1)] =
            static_cast<std::uint64_t>(std::llround(kFixScale / static_cast<double>(n)));

    auto accs = run_path_chunks<SpitzerAcc>(
        cfg, [&](SpitzerAcc& acc, RngStream& stream, std::uint64_t) {
            if (acc.hits.empty()) acc.hits.assign(static_cast<std::size_t>(n_max), 0);
            double s = 0.0;
            std::uint64_t a_fix = 0;
            for (std::int64_t n = 1; n <= n_max; ++n) {
                s += walk_increment(model, stream);
                if (s > 0.0) {
                    ++acc.hits[static_cast<std::size_t>(n - 1)];
                    a_fix += weight_fix[static_cast<std::size_t>(n - 1)];
                }
            }
            acc.sum_fix += a_fix;
            acc.sum_fix_sq += static_cast<unsigned __int128>(a_fix) * a_fix;
        });

    std::vector<std::uint64_t> hits(static_cast<std::size_t>(n_max), 0);
    std::uint64_t sum_fix = 0;
    unsigned __int128 sum_fix_sq = 0;
    for (const auto& acc : accs) {
        if (acc.hits.empty()) continue;
        for (std::size_t i = 0; i < hits.size(); ++i) hits[i] += acc.hits[i];
        sum_fix += acc.sum_fix;
        sum_fix_sq += acc.sum_fix_sq;
    }

    SpitzerPartial out;
    out.n_list = n_list;
    out.n_max = n_max;
    out.paths = cfg.paths;
    const double paths = static_cast<double>(cfg.paths);

    std::sort(out.n_list.begin(), out.n_list.end());
    double a = 0.0;
    std::size_t report = 0;
    for (std::int64_t n = 1; n <= n_max; ++n) {
        const double p = static_cast<double>(hits[static_cast<std::size_t>(n - 1)]) / paths;
        a += p / static_cast<double>(n);
        while (report < out.n_list.size() && out.n_list[report] == n) {
            out.p_hat.push_back(p);
            out.p_stderr.push_back(std::sqrt(p * (1.0 - p) / paths));
            out.a_at_n.push_back(a);
            ++report;
        }
    }
    out.a_final = a;

    const double mean_fix = static_cast<double>(sum_fix) / paths;
    const double mean_sq_fix = static_cast<double>(sum_fix_sq) / paths;
    const double var_fix = std::max(0.0, mean_sq_fix - mean_fix * mean_fix);
    out.a_stderr = std::sqrt(var_fix / paths) / kFixScale;
    out.psi0_lower = -std::expm1(-a);
    return out;
}

Psi0Interval psi0_andersen(const SpitzerPartial& spitzer) {
    return {-std::expm1(-spitzer.a_final), 1.0};
}

namespace {

struct LadderAcc {
    std::vector<double> heights;
    std::uint64_t censored = 0;
};

}  // namespace

LadderSample ladder_sample(const AndersenModel& model, const SpitzerPartial& spitzer,
                           const MCConfig& cfg) {
    model.validate();
    if (cfg.paths == 0) raise(Errc::invalid_argument, "paths must be >= 1");
    if (cfg.horizon < 1) raise(Errc::invalid_argument, "horizon must be >= 1");

    auto accs =
        run_path_chunks<LadderAcc>(cfg, [&](LadderAcc& acc, RngStream& stream, std::uint64_t) {
            double s = 0.0;
            for (std::int64_t n = 1; n <= cfg.horizon; ++n) {
                s += walk_increment(model, stream);
                if (s > 0.0) {
                    acc.heights.push_back(s);
                    return;
                }
            }
            ++acc.censored;
        });

    LadderSample out;
    out.horizon = cfg.horizon;
    out.paths = cfg.paths;
    for (auto& acc : accs) {
        out.heights.insert(out.heights.end(), acc.heights.begin(), acc.heights.end());
        out.censored += acc.censored;
    }

    // horizon adequacy: the censored fraction should match exp(-A_N)
    const double paths = static_cast<double>(cfg.paths);
    const double cf = static_cast<double>(out.censored) / paths;
    const double expect = std::exp(-spitzer.a_final);
    const double sigma = std::sqrt(std::max(cf * (1.0 - cf), 1.0 / paths) / paths +
                                   std::pow(expect * spitzer.a_stderr, 2));
    if (std::abs(cf - expect) > 3.0 * sigma)
        raise(Errc::censoring_too_high,
              "censored fraction " + std::to_string(cf) + " vs exp(-A) = " +
                  std::to_string(expect) + " beyond 3 sigma; enlarge the horizon");
    return out;
}

std::size_t AndersenPK::index_of(double u) const {
    if (u < 0.0) raise(Errc::invalid_argument, "u must be >= 0");
    const auto k = static_cast<std::size_t>(std::llround(u / grid_step));
    if (k >= phi.size()) raise(Errc::invalid_argument, "u beyond the computed grid");
    return k;
}

AndersenPK pk_andersen_survival(const AndersenModel& model, const LadderSample& ladder,
                                const SpitzerPartial& spitzer, double u_max, double tol,
                                int lattice_pow2) {
    model.validate();
    if (!(model.drift() < -1e-12))
        raise(Errc::npc_violation,
              "ladder-height series diverges without the strict net profit condition");
    if (ladder.heights.empty()) raise(Errc::invalid_argument, "no ladder heights");
    if (lattice_pow2 < 1 || lattice_pow2 > 20)
        raise(Errc::invalid_argument, "lattice_pow2 out of range");

    AndersenPK out;
    out.a_used = spitzer.a_final;
    out.q = -std::expm1(-spitzer.a_final);
    out.grid_step = std::ldexp(1.0, -lattice_pow2);
    const auto nodes = static_cast<std::size_t>(std::ceil(u_max / out.grid_step)) + 1;

    const LatticePmfs lattice = discretize_samples(ladder.heights, out.grid_step, nodes);
    const CompoundGeometric cg = compound_geometric_survival(lattice, out.q, tol);
    out.phi_lower = cg.phi_lower;
    out.phi = cg.phi;
    out.phi_upper = cg.phi_upper;
    out.terms = cg.terms;
    out.tail_bound = cg.tail_bound;
    return out;
}

}  // namespace ruinlab
