#ifndef RUINLAB_DISCRETE_HPP
#define RUINLAB_DISCRETE_HPP

#include <complex>
#include <cstdint>
#include <vector>

#include "ruinlab/integer_pmf.hpp"
#include "ruinlab/survival_table.hpp"

namespace ruinlab {

// Discrete-time risk model: integer premium c per period and claims cycling
// through the N per-season laws X_1..X_N.
struct SeasonalModel {
    int premium = 1;
    std::vector<IntegerPmf> pmfs;

    int period() const noexcept { return static_cast<int>(pmfs.size()); }
    const IntegerPmf& season_pmf(std::int64_t t) const noexcept {  // t = 1,2,...
        return pmfs[static_cast<std::size_t>((t - 1) % period())];
    }
    IntegerPmf season_sum() const;       // law of S_N = X_1 + ... + X_N
    double season_mean() const noexcept;  // E S_N
    // E S_N == cN within tol
    bool neutral(double tol = 1e-12) const noexcept;
    // P(S_N = cN) = 1: the excluded case in which ruin never occurs
    bool degenerate_certain() const;
    void validate() const;
};

// phi(u) = (phi(u-1) - sum_{k=1..u} phi(u-k) h_k) / h_0 for the homogeneous
// c = 1 model, seeded with phi(0) = phi0. Weak convention.
SurvivalTable survival_recursion(const IntegerPmf& pmf, double phi0, int u_max);

// Multipliers alpha_u with survival_recursion(pmf, phi0)[u] = alpha_u * phi0.
std::vector<double> alpha_coefficients(const IntegerPmf& pmf, int u_max);

// Power-series coefficients of P(s) / (G(s) - s^c): the survival
// probabilities of the homogeneous model under the strict net profit
// condition E X < c. Weak convention.
SurvivalTable survival_pgf_coefficients(const IntegerPmf& pmf, int premium, int u_max);

struct RootSet {
    std::vector<std::complex<double>> roots;  // |s| <= 1 + 1e-9, with multiplicity
    std::vector<bool> on_boundary;
    double residual = 0.0;  // max |G(s) - s^{cN}| over the returned roots

    bool contains_one(double tol = 1e-8) const noexcept;
};

// All roots of G_{S_N}(s) = s^{cN} in the closed unit disk, found from the
// companion matrix of the polynomial and polished by Newton iteration.
RootSet find_unit_disk_roots(const SeasonalModel& model);

// Numerator polynomial P (coefficients, degree <= c-1) with P = 0 at every
// unit-disk root other than s = 1 (to full multiplicity) and
// P(1) = c - E X. Requires N = 1 and the strict net profit condition.
std::vector<double> solve_numerator(const SeasonalModel& model, const RootSet& roots);

struct SeasonalExtension {
    SurvivalTable table;
    double max_residual = 0.0;  // of the one-period balance relation
};

// Extend the initial block phi(0..cN-1) to phi(0..u_max) by solving the
// one-period balance relation for its highest term, then re-verify the
// relation at every u. Requires positive probability of an all-zero period.
SeasonalExtension seasonal_recurrence_step(const SeasonalModel& model,
                                           const std::vector<double>& phi_block, int u_max);

struct SeasonalPgfSample {
    std::complex<double> s;
    double residual;
};

struct SeasonalPgfReport {
    double max_residual = 0.0;
    double truncation_bound = 0.0;  // tail of the phi power series beyond the table
    std::vector<SeasonalPgfSample> samples;
};

// Diagnostic: residual of Phi(s) (G_{S_N}(s) - s^{cN}) = u(s)^T v(s) at fixed
// sample points |s| <= 1/2, with the numerator assembled from the supplied
// m-vector (cN entries, season-major).
SeasonalPgfReport seasonal_pgf_verify(const SeasonalModel& model,
                                      const std::vector<double>& m_vector,
                                      const SurvivalTable& phi);

struct FiniteHorizonRuin {
    std::vector<double> psi_by_t;  // psi(u, t) for t = 1..achieved_horizon
    std::int64_t achieved_horizon = 0;
    bool truncated = false;  // state budget hit before the requested horizon

    double psi() const { return psi_by_t.empty() ? 0.0 : psi_by_t.back(); }
};

// Exact finite-horizon ruin probability by forward dynamic programming over
// integer surplus states.
FiniteHorizonRuin dp_finite_horizon(const SeasonalModel& model, int u, std::int64_t horizon,
                                    RuinConvention convention = RuinConvention::Weak,
                                    std::size_t max_states = std::size_t{4} << 20);

// Strict-convention table from a Weak one: phi_hat(u) = phi(u-1) for u >= 1
// and phi_hat(0) = sum_{x < c} h_x phi(c-1-x). Homogeneous models only.
SurvivalTable strict_from_weak(const SurvivalTable& weak, const IntegerPmf& pmf, int premium);

}  // namespace ruinlab

#endif
