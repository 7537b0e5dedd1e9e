#ifndef RUINLAB_CLASSICAL_HPP
#define RUINLAB_CLASSICAL_HPP

#include <variant>
#include <vector>

#include "ruinlab/compound_geometric.hpp"
#include "ruinlab/continuous_claim.hpp"

namespace ruinlab {

using Claim = std::variant<ContinuousClaim, PerturbedClaim>;

double claim_mean(const Claim& claim) noexcept;
double claim_tail(const Claim& claim, double x) noexcept;
double claim_tail_integral(const Claim& claim, double x) noexcept;
double claim_sample(const Claim& claim, RngStream& rng) noexcept;  // X* for perturbed claims

// Compound Poisson surplus: claims at Poisson(lambda) epochs against premium
// income at rate c.
struct ClassicalModel {
    double lambda = 1.0;
    double premium_rate = 1.0;
    Claim claim = ContinuousClaim::exponential_mean(1.0);

    double load() const noexcept { return lambda * claim_mean(claim) / premium_rate; }
    void validate() const;
};

// psi(0) = lambda E X / c; rejects load > 1.
double pk_psi0(const ClassicalModel& model);

struct PKSeries {
    double psi0 = 0.0;
    double grid_step = 0.0;
    std::vector<double> f_i;   // integrated-tail CDF at the grid nodes
    int terms = 0;             // convolution powers kept
    double tail_bound = 0.0;   // psi0^{terms+1} / (1 - psi0)
};

struct PKResult {
    double grid_step = 0.0;
    std::vector<double> phi_lower, phi, phi_upper;  // at k*grid_step
    PKSeries series;

    std::size_t index_of(double u) const;
    double phi_at(double u) const { return phi[index_of(u)]; }
    double bracket_width() const noexcept;
};

// Survival probabilities on [0, u_max] from the compound-geometric sum of
// integrated-tail self-convolutions. tol controls the certified geometric
// truncation; grid_step = 0 picks 1/256 (integer surpluses stay on-grid).
PKResult pk_survival(const ClassicalModel& model, double u_max, double tol,
                     double grid_step = 0.0);

struct EpsilonSweepRow {
    double epsilon;
    double psi0;
    std::vector<double> phi_lower, phi, phi_upper;  // at the requested u values
};

struct EpsilonSweep {
    bool neutral_base = true;  // false => NotNeutral warning, sweep still ran
    std::vector<double> u_list;
    std::vector<EpsilonSweepRow> rows;
};

// For each epsilon, perturb the claim at threshold a and recompute psi0 and
// the survival table; demonstrates phi_eps -> 0 as epsilon -> 0 for a
// neutral base model.
EpsilonSweep epsilon_sweep_classical(const ClassicalModel& base, double threshold_a,
                                     const std::vector<double>& eps_list,
                                     const std::vector<double>& u_list, double tol = 1e-8,
                                     double grid_step = 0.0);

}  // namespace ruinlab

#endif
