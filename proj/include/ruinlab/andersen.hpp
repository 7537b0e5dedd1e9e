#ifndef RUINLAB_ANDERSEN_HPP
#define RUINLAB_ANDERSEN_HPP

#include <cstdint>
#include <vector>

#include "ruinlab/classical.hpp"
#include "ruinlab/continuous_claim.hpp"
#include "ruinlab/mc.hpp"

namespace ruinlab {

// Renewal risk model: claims X against premium income c per unit time, with
// general inter-occurrence law theta, P(theta = 0) < 1.
struct AndersenModel {
    double premium_rate = 1.0;
    Claim claim = ContinuousClaim::exponential_mean(1.0);
    ContinuousClaim interarrival = ContinuousClaim::exponential_mean(1.0);

    double drift() const noexcept {  // E(X - c theta), negative under the NPC
        return claim_mean(claim) - premium_rate * interarrival.mean();
    }
    bool neutral(double tol = 1e-9) const noexcept;
    // P(X = c theta) = 1: the excluded case in which the surplus never falls
    bool degenerate_certain() const noexcept;
    void validate() const;
};

// Monte Carlo estimates of p_n = P(S_n > 0) for the claim-surplus walk
// S_n = sum (X_i - c theta_i), with common random numbers across n: one set
// of paths walked to n_max serves every n at once.
struct SpitzerPartial {
    std::vector<std::int64_t> n_list;  // reporting points
    std::vector<double> p_hat;         // P(S_n > 0) at n_list
    std::vector<double> p_stderr;
    std::vector<double> a_at_n;        // A_n = sum_{m<=n} p_hat_m / m at n_list
    std::int64_t n_max = 0;
    double a_final = 0.0;      // A_{n_max}
    double a_stderr = 0.0;     // from the per-path variance of sum 1{S_n>0}/n
    double psi0_lower = 0.0;   // 1 - exp(-A_{n_max})
    std::uint64_t paths = 0;
};

SpitzerPartial spitzer_estimate(const AndersenModel& model,
                                const std::vector<std::int64_t>& n_list, const MCConfig& cfg);

struct Psi0Interval {
    double lower;  // 1 - exp(-A_N)
    double upper;  // 1 (open)
};

// Bracket for psi(0) at truncation level N: the partial Spitzer sum only ever
// grows, so 1 - exp(-A_N) is a certified lower bound.
Psi0Interval psi0_andersen(const SpitzerPartial& spitzer);

// First strictly positive level of the claim-surplus walk per path.
struct LadderSample {
    std::vector<double> heights;  // S at the first ladder epoch, > 0
    std::uint64_t censored = 0;   // paths with no ladder epoch before the horizon
    std::int64_t horizon = 0;
    std::uint64_t paths = 0;

    double raw_ladder_fraction() const noexcept {
        return paths == 0 ? 0.0
                          : static_cast<double>(heights.size()) / static_cast<double>(paths);
    }
};

// Samples ladder heights and cross-checks the censored fraction against
// exp(-A_N) from the Spitzer estimate; a discrepancy beyond 3 sigma means the
// horizon cut off paths that would still have laddered (CensoringTooHigh).
LadderSample ladder_sample(const AndersenModel& model, const SpitzerPartial& spitzer,
                           const MCConfig& cfg);

struct AndersenPK {
    double grid_step = 0.0;
    std::vector<double> phi_lower, phi, phi_upper;  // at k*grid_step
    double a_used = 0.0;       // Spitzer sum behind the geometric weight
    double q = 0.0;            // 1 - exp(-A)
    int terms = 0;
    double tail_bound = 0.0;

    std::size_t index_of(double u) const;
    double phi_at(double u) const { return phi[index_of(u)]; }
};

// phi(u) = exp(-A) (1 + sum (1 - exp(-A))^n H^{*n}(u)) with H the empirical
// ladder-height law on a value lattice of 2^lattice_pow2 nodes per unit.
AndersenPK pk_andersen_survival(const AndersenModel& model, const LadderSample& ladder,
                                const SpitzerPartial& spitzer, double u_max, double tol,
                                int lattice_pow2 = 9);

}  // namespace ruinlab

#endif
