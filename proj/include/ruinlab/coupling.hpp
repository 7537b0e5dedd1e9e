#ifndef RUINLAB_COUPLING_HPP
#define RUINLAB_COUPLING_HPP

#include <utility>
#include <vector>

#include "ruinlab/integer_pmf.hpp"

namespace ruinlab {

struct CouplingEntry {
    int x_star;
    int x;
    double p;
};

// Joint law of (X*, X) for an integer claim: X* == X except that mass
// epsilon/(b-s) is moved from the pair (b,b) to (s,b). By construction
// X* <= X with probability one and E X* = E X - epsilon.
class CouplingPmf {
  public:
    CouplingPmf(std::vector<CouplingEntry> entries, double epsilon, int site_from, int site_to);

    const std::vector<CouplingEntry>& entries() const noexcept { return entries_; }
    double epsilon() const noexcept { return epsilon_; }
    int site_from() const noexcept { return site_from_; }  // b, mass reduced
    int site_to() const noexcept { return site_to_; }      // s < b, mass enlarged

    IntegerPmf x_marginal() const;
    IntegerPmf x_star_marginal() const;

    // total joint mass with x_star > x; zero for a valid coupling
    double mass_above_diagonal() const noexcept;

    // inverse-CDF draw of the pair (x_star, x) from a uniform in [0,1)
    std::pair<int, int> sample(double u01) const noexcept;

  private:
    std::vector<CouplingEntry> entries_;
    std::vector<double> cum_;
    double epsilon_;
    int site_from_;
    int site_to_;
};

// Move mass epsilon/(from_value - to_value) from (from_value, from_value) to
// (to_value, from_value). Requires to_value < from_value, positive mass at
// from_value and 0 < epsilon < (from_value - to_value) * P(X = from_value).
CouplingPmf perturb_discrete(const IntegerPmf& pmf, int from_value, int to_value, double epsilon);

struct PerturbSite {
    int from;  // b
    int to;    // s
};

// Pick the perturbation site for a claim facing premium c per period: the
// target s is the smallest value in {0..c-1} and the source b is the smallest
// support point >= c carrying mass (guaranteed to exist for neutral models),
// falling back to the largest support point above s otherwise. Rejects the
// degenerate case P(X = c) = 1, where ruin never occurs.
PerturbSite choose_site(const IntegerPmf& pmf, int premium);

}  // namespace ruinlab

#endif
