#ifndef RUINLAB_INTEGER_PMF_HPP
#define RUINLAB_INTEGER_PMF_HPP

#include <complex>
#include <map>
#include <vector>

namespace ruinlab {

// Finite-support distribution of a non-negative integer claim. Immutable
// after construction; safe to share across threads.
class IntegerPmf {
  public:
    // probs: value -> probability. Probabilities must be non-negative and sum
    // to 1 within 1e-12; the residual is folded into the largest atom so the
    // stored masses sum to 1 exactly.
    explicit IntegerPmf(const std::map<int, double>& probs);

    static IntegerPmf from_dense(std::vector<double> probs);
    static IntegerPmf point_mass(int k);

    // dense()[k] = P(X = k), k = 0..max_value()
    const std::vector<double>& dense() const noexcept { return probs_; }
    double prob(int k) const noexcept {
        return (k >= 0 && k <= max_value()) ? probs_[static_cast<std::size_t>(k)] : 0.0;
    }
    int max_value() const noexcept { return static_cast<int>(probs_.size()) - 1; }
    int min_value() const noexcept;  // smallest k with positive mass

    double mean() const noexcept;
    double variance() const noexcept;
    double cdf(int k) const noexcept;  // P(X <= k)
    bool degenerate_at(int k) const noexcept;

    // G(s) = sum_k h_k s^k by Horner's scheme; requires |s| <= 1.
    std::complex<double> pgf(std::complex<double> s) const;

    // inverse-CDF draw from a uniform in [0,1)
    int sample(double u01) const noexcept;

    // distribution of X - m (requires mass below m to be zero)
    IntegerPmf shifted_down(int m) const;

  private:
    IntegerPmf() = default;
    void finalize();  // validates, folds residual, builds sampling cdf

    std::vector<double> probs_;
    std::vector<double> cum_;
};

// distribution of the independent sum
IntegerPmf convolve(const IntegerPmf& p, const IntegerPmf& q);

}  // namespace ruinlab

#endif
