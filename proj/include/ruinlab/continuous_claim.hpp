#ifndef RUINLAB_CONTINUOUS_CLAIM_HPP
#define RUINLAB_CONTINUOUS_CLAIM_HPP

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ruinlab/rng.hpp"

namespace ruinlab {

enum class ClaimFamily { Exponential, Uniform, ShiftedDiscrete, Tabulated };

// Non-negative claim-size descriptor. All families expose the tail
// P(X > x), its exact integral over [0, x], the mean, a Laplace transform
// and an inverse-CDF sampler, so coupled sampling and common random numbers
// need one uniform per draw. Immutable after construction.
class ContinuousClaim {
  public:
    static ContinuousClaim exponential_mean(double mean);
    static ContinuousClaim exponential_rate(double rate);
    static ContinuousClaim uniform(double lo, double hi);
    // atoms: (value >= 0, probability); probabilities sum to 1 within 1e-12
    static ContinuousClaim shifted_discrete(std::vector<std::pair<double, double>> atoms);
    // points: (x, P(X > x)) with x_0 = 0, x increasing, tail non-increasing,
    // final tail value 0; the tail is linear between points
    static ContinuousClaim tabulated_tail(std::vector<std::pair<double, double>> points);

    ClaimFamily family() const noexcept { return family_; }
    const std::string& family_name() const noexcept;

    double mean() const noexcept { return mean_; }
    double tail(double x) const noexcept;           // P(X > x)
    double tail_integral(double x) const noexcept;  // integral of tail over [0, x]
    std::optional<double> laplace(double t) const;  // E exp(-tX), t >= 0
    double quantile(double u) const noexcept;       // inverse CDF, u in [0,1)
    double sample(RngStream& rng) const noexcept { return quantile(rng.next_u01()); }

    // parameters, exposed for serialization
    double exp_rate() const noexcept { return a_; }
    double uniform_lo() const noexcept { return a_; }
    double uniform_hi() const noexcept { return b_; }
    const std::vector<std::pair<double, double>>& nodes() const noexcept { return nodes_; }

  private:
    ContinuousClaim() = default;

    ClaimFamily family_ = ClaimFamily::Exponential;
    double a_ = 1.0;  // rate (exponential) or lo (uniform)
    double b_ = 0.0;  // hi (uniform)
    // ShiftedDiscrete: (value, prob) sorted by value.
    // Tabulated: (x, tail) nodes.
    std::vector<std::pair<double, double>> nodes_;
    std::vector<double> cum_;  // sampling cdf for ShiftedDiscrete
    double mean_ = 0.0;
};

// Pathwise perturbation X* = X - epsilon on {X > a}, X* = X otherwise.
// Coupled pairs satisfy x* <= x always, and E X* = E X - epsilon P(X > a).
class PerturbedClaim {
  public:
    PerturbedClaim(ContinuousClaim base, double threshold, double epsilon);

    const ContinuousClaim& base() const noexcept { return base_; }
    double threshold() const noexcept { return a_; }
    double epsilon() const noexcept { return eps_; }

    double mean() const noexcept { return mean_; }
    double tail(double x) const noexcept;
    double tail_integral(double x) const noexcept;

    std::pair<double, double> coupled_from_u01(double u) const noexcept;
    std::pair<double, double> coupled_sample(RngStream& rng) const noexcept {
        return coupled_from_u01(rng.next_u01());
    }
    double sample(RngStream& rng) const noexcept { return coupled_sample(rng).first; }

  private:
    ContinuousClaim base_;
    double a_;
    double eps_;
    double mean_;
};

PerturbedClaim perturb_continuous(const ContinuousClaim& claim, double a, double epsilon);

// F_I(u) = (1/EX) * integral of the tail over [0, u], by composite trapezoid
// with the given step; clamped to [0, 1].
double integrated_tail_cdf(const ContinuousClaim& claim, double u, double grid_step);
double integrated_tail_cdf(const PerturbedClaim& claim, double u, double grid_step);

struct TruncationBound {
    double x;
    double t;
    double q;      // E exp(-t eta)
    double bound;  // exp(t x) q / (1 - q)
};

// Upper bound for sum_{n>=1} P(eta_1 + ... + eta_n <= x) via exponential
// Markov bounds; requires t > 0 and q = E exp(-t eta) < 1.
TruncationBound truncation_bound(double x, double t, double laplace_value);

}  // namespace ruinlab

#endif
