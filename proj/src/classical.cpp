#include "ruinlab/classical.hpp"

#include <algorithm>
#include <cmath>

#include "ruinlab/errors.hpp"

namespace ruinlab {

double claim_mean(const Claim& claim) noexcept {
    return std::visit([](const auto& c) { return c.mean(); }, claim);
}

double claim_tail(const Claim& claim, double x) noexcept {
    return std::visit([&](const auto& c) { return c.tail(x); }, claim);
}

double claim_tail_integral(const Claim& claim, double x) noexcept {
    return std::visit([&](const auto& c) { return c.tail_integral(x); }, claim);
}

double claim_sample(const Claim& claim, RngStream& rng) noexcept {
    return std::visit([&](const auto& c) { return c.sample(rng); }, claim);
}

void ClassicalModel::validate() const {
    if (!(lambda > 0.0)) raise(Errc::invalid_argument, "claim intensity must be > 0");
    if (!(premium_rate > 0.0)) raise(Errc::invalid_argument, "premium rate must be > 0");
}

double pk_psi0(const ClassicalModel& model) {
    model.validate();
    const double load = model.load();
    if (load > 1.0 + 1e-12)
        raise(Errc::npc_violation, "lambda E X / c = " + std::to_string(load) + " exceeds 1");
    return std::min(load, 1.0);
}

std::size_t PKResult::index_of(double u) const {
    if (u < 0.0) raise(Errc::invalid_argument, "u must be >= 0");
    const auto k = static_cast<std::size_t>(std::llround(u / grid_step));
    if (k >= phi.size()) raise(Errc::invalid_argument, "u beyond the computed grid");
    return k;
}

double PKResult::bracket_width() const noexcept {
    double w = 0.0;
    for (std::size_t i = 0; i < phi.size(); ++i) w = std::max(w, phi_upper[i] - phi_lower[i]);
    return w;
}

PKResult pk_survival(const ClassicalModel& model, double u_max, double tol, double grid_step) {
    model.validate();
    if (!(u_max >= 0.0)) raise(Errc::invalid_argument, "u_max must be >= 0");
    if (!(tol > 0.0)) raise(Errc::invalid_argument, "tolerance must be > 0");
    const double psi0 = model.load();
    if (psi0 >= 1.0 - 1e-12)
        raise(Errc::npc_violation,
              "Pollaczek-Khinchine series diverges without the strict net profit condition");

    const double h = grid_step > 0.0 ? grid_step : 1.0 / 256.0;
    const auto nodes = std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil(u_max / h)) + 1);
    const double mean = claim_mean(model.claim);
    const auto f_i = [&](double x) { return claim_tail_integral(model.claim, x) / mean; };

    const LatticePmfs lattice = discretize_cdf(f_i, h, nodes);
    const CompoundGeometric cg = compound_geometric_survival(lattice, psi0, tol);

    PKResult result;
    result.grid_step = h;
    result.phi_lower = cg.phi_lower;
    result.phi = cg.phi;
    result.phi_upper = cg.phi_upper;
    result.series.psi0 = psi0;
    result.series.grid_step = h;
    result.series.terms = cg.terms;
    result.series.tail_bound = cg.tail_bound;
    result.series.f_i.resize(nodes);
    for (std::size_t k = 0; k < nodes; ++k)
        result.series.f_i[k] = std::min(1.0, f_i(h * static_cast<double>(k)));
    return result;
}

EpsilonSweep epsilon_sweep_classical(const ClassicalModel& base, double threshold_a,
                                     const std::vector<double>& eps_list,
                                     const std::vector<double>& u_list, double tol,
                                     double grid_step) {
    base.validate();
    if (std::holds_alternative<PerturbedClaim>(base.claim))
        raise(Errc::invalid_argument, "sweep expects an unperturbed base claim");
    if (eps_list.empty()) raise(Errc::invalid_argument, "empty epsilon list");

    const auto& claim = std::get<ContinuousClaim>(base.claim);
    EpsilonSweep sweep;
    sweep.neutral_base = std::abs(base.load() - 1.0) <= 1e-9;
    sweep.u_list = u_list;
    for (double eps : eps_list) {
        ClassicalModel perturbed{base.lambda, base.premium_rate,
                                 perturb_continuous(claim, threshold_a, eps)};
        EpsilonSweepRow row;
        row.epsilon = eps;
        row.psi0 = pk_psi0(perturbed);
        if (!u_list.empty()) {
            const double u_top = *std::max_element(u_list.begin(), u_list.end());
            const PKResult pk = pk_survival(perturbed, u_top, tol, grid_step);
            for (double u : u_list) {
                const std::size_t k = pk.index_of(u);
                row.phi_lower.push_back(pk.phi_lower[k]);
                row.phi.push_back(pk.phi[k]);
                row.phi_upper.push_back(pk.phi_upper[k]);
            }
        }
        sweep.rows.push_back(std::move(row));
    }
    return sweep;
}

}  // namespace ruinlab
