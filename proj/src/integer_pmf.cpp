#include "ruinlab/integer_pmf.hpp"

#include <algorithm>
#include <cmath>

#include "ruinlab/errors.hpp"

namespace ruinlab {

namespace {
constexpr double kMassTol = 1e-12;
}

IntegerPmf::IntegerPmf(const std::map<int, double>& probs) {
    if (probs.empty()) raise(Errc::invalid_distribution, "empty probability map");
    int max_k = 0;
    for (const auto& [k, p] : probs) {
        if (k < 0) raise(Errc::invalid_distribution, "negative support value " + std::to_string(k));
        if (!(p >= 0.0))
            raise(Errc::invalid_distribution,
                  "probability at " + std::to_string(k) + " must be >= 0");
        max_k = std::max(max_k, k);
    }
    probs_.assign(static_cast<std::size_t>(max_k) + 1, 0.0);
    for (const auto& [k, p] : probs) probs_[static_cast<std::size_t>(k)] += p;
    finalize();
}

IntegerPmf IntegerPmf::from_dense(std::vector<double> probs) {
    if (probs.empty()) raise(Errc::invalid_distribution, "empty probability vector");
    for (double p : probs)
        if (!(p >= 0.0)) raise(Errc::invalid_distribution, "probability must be >= 0");
    IntegerPmf pmf;
    pmf.probs_ = std::move(probs);
    pmf.finalize();
    return pmf;
}

IntegerPmf IntegerPmf::point_mass(int k) {
    if (k < 0) raise(Errc::invalid_distribution, "negative support value");
    std::vector<double> dense(static_cast<std::size_t>(k) + 1, 0.0);
    dense.back() = 1.0;
    return from_dense(std::move(dense));
}

void IntegerPmf::finalize() {
    while (probs_.size() > 1 && probs_.back() == 0.0) probs_.pop_back();
    double sum = 0.0;
    for (double p : probs_) sum += p;
    if (std::abs(sum - 1.0) > kMassTol)
        raise(Errc::invalid_distribution,
              "probabilities sum to " + std::to_string(sum) + ", not 1 within 1e-12");
    probs_.back() += 1.0 - sum;  // fold residual into the largest kept atom
    cum_.resize(probs_.size());
    double acc = 0.0;
    for (std::size_t k = 0; k < probs_.size(); ++k) {
        acc += probs_[k];
        cum_[k] = acc;
    }
    cum_.back() = 1.0;
}

int IntegerPmf::min_value() const noexcept {
    for (std::size_t k = 0; k < probs_.size(); ++k)
        if (probs_[k] > 0.0) return static_cast<int>(k);
    return max_value();
}

double IntegerPmf::mean() const noexcept {
    double m = 0.0;
    for (std::size_t k = 1; k < probs_.size(); ++k) m += static_cast<double>(k) * probs_[k];
    return m;
}

double IntegerPmf::variance() const noexcept {
    const double m = mean();
    double v = 0.0;
    for (std::size_t k = 0; k < probs_.size(); ++k) {
        const double d = static_cast<double>(k) - m;
        v += d * d * probs_[k];
    }
    return v;
}

double IntegerPmf::cdf(int k) const noexcept {
    if (k < 0) return 0.0;
    if (k >= max_value()) return 1.0;
    return cum_[static_cast<std::size_t>(k)];
}

bool IntegerPmf::degenerate_at(int k) const noexcept {
    return k >= 0 && k <= max_value() && probs_[static_cast<std::size_t>(k)] == 1.0;
}

std::complex<double> IntegerPmf::pgf(std::complex<double> s) const {
    if (std::abs(s) > 1.0 + 1e-12)
        raise(Errc::invalid_argument, "pgf requires |s| <= 1");
    std::complex<double> acc = 0.0;
    for (std::size_t k = probs_.size(); k-- > 0;) acc = acc * s + probs_[k];
    return acc;
}

int IntegerPmf::sample(double u01) const noexcept {
    // small supports throughout; linear scan beats binary search here
    for (std::size_t k = 0; k + 1 < cum_.size(); ++k)
        if (u01 < cum_[k]) return static_cast<int>(k);
    return max_value();
}

IntegerPmf IntegerPmf::shifted_down(int m) const {
    if (m < 0 || m > max_value() || min_value() < m)
        raise(Errc::invalid_argument, "cannot shift support below zero");
    std::vector<double> dense(probs_.begin() + m, probs_.end());
    return from_dense(std::move(dense));
}

IntegerPmf convolve(const IntegerPmf& p, const IntegerPmf& q) {
    const auto& a = p.dense();
    const auto& b = q.dense();
    std::vector<double> out(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0.0) continue;
        for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    }
    return IntegerPmf::from_dense(std::move(out));
}

}  // namespace ruinlab
