#ifndef RUINLAB_COMPOUND_GEOMETRIC_HPP
#define RUINLAB_COMPOUND_GEOMETRIC_HPP

#include <functional>
#include <span>
#include <vector>

namespace ruinlab {

// Lattice discretizations of a ladder-height law on {0, h, 2h, ..., Mh}.
// lower rounds jumps up (stochastically larger, survival under-estimated),
// upper rounds jumps down (survival over-estimated), mid rounds to nearest.
// Jump mass beyond the grid is dropped for lower/mid and parked on the top
// node for upper, which keeps the ordering lower <= mid <= upper intact.
struct LatticePmfs {
    double step = 0.0;
    std::vector<double> lower, mid, upper;  // masses at k*step
};

// cdf must be a non-decreasing CDF on [0, inf) with cdf(0) = 0.
LatticePmfs discretize_cdf(const std::function<double(double)>& cdf, double step,
                           std::size_t nodes);

// Empirical variant from strictly positive samples; each sample carries equal
// weight and lower/mid rounding never lands on zero.
LatticePmfs discretize_samples(std::span<const double> samples, double step, std::size_t nodes);

struct CompoundGeometric {
    std::vector<double> phi_lower, phi, phi_upper;  // at k*step
    int terms = 0;                // convolution powers kept
    double tail_bound = 0.0;      // q^{terms+1} / (1-q), bound on the dropped series
};

// phi(u) = (1-q) (1 + sum_{n=1..terms} q^n F^{*n}(u)) with terms chosen so the
// geometric tail bound drops below tol; direct truncated accumulation of the
// lattice self-convolutions. phi_upper absorbs the truncation slack.
CompoundGeometric compound_geometric_survival(const LatticePmfs& lattice, double q, double tol);

}  // namespace ruinlab

#endif
