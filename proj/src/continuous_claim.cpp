#include "ruinlab/continuous_claim.hpp"

#include <algorithm>
#include <cmath>

#include "ruinlab/errors.hpp"

namespace ruinlab {

namespace {
const std::string kFamilyNames[] = {"exponential", "uniform", "shifted-discrete", "tabulated"};
}

const std::string& ContinuousClaim::family_name() const noexcept {
    return kFamilyNames[static_cast<int>(family_)];
}

ContinuousClaim ContinuousClaim::exponential_mean(double mean) {
    if (!(mean > 0.0)) raise(Errc::invalid_distribution, "exponential mean must be > 0");
    return exponential_rate(1.0 / mean);
}

ContinuousClaim ContinuousClaim::exponential_rate(double rate) {
    if (!(rate > 0.0)) raise(Errc::invalid_distribution, "exponential rate must be > 0");
    ContinuousClaim c;
    c.family_ = ClaimFamily::Exponential;
    c.a_ = rate;
    c.mean_ = 1.0 / rate;
    return c;
}

ContinuousClaim ContinuousClaim::uniform(double lo, double hi) {
    if (!(lo >= 0.0) || !(hi > lo))
        raise(Errc::invalid_distribution, "uniform requires 0 <= lo < hi");
    ContinuousClaim c;
    c.family_ = ClaimFamily::Uniform;
    c.a_ = lo;
    c.b_ = hi;
    c.mean_ = 0.5 * (lo + hi);
    return c;
}

ContinuousClaim ContinuousClaim::shifted_discrete(std::vector<std::pair<double, double>> atoms) {
    if (atoms.empty()) raise(Errc::invalid_distribution, "no atoms");
    std::sort(atoms.begin(), atoms.end());
    double sum = 0.0, mean = 0.0;
    for (auto& [v, p] : atoms) {
        if (!(v >= 0.0)) raise(Errc::invalid_distribution, "atom value must be >= 0");
        if (!(p >= 0.0)) raise(Errc::invalid_distribution, "atom probability must be >= 0");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-12)
        raise(Errc::invalid_distribution, "atom probabilities must sum to 1");
    atoms.back().second += 1.0 - sum;
    ContinuousClaim c;
    c.family_ = ClaimFamily::ShiftedDiscrete;
    c.nodes_ = std::move(atoms);
    c.cum_.resize(c.nodes_.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < c.nodes_.size(); ++i) {
        acc += c.nodes_[i].second;
        c.cum_[i] = acc;
        mean += c.nodes_[i].first * c.nodes_[i].second;
    }
    c.cum_.back() = 1.0;
    c.mean_ = mean;
    return c;
}

ContinuousClaim ContinuousClaim::tabulated_tail(std::vector<std::pair<double, double>> points) {
    if (points.size() < 2) raise(Errc::invalid_distribution, "need at least two tail points");
    if (points.front().first != 0.0)
        raise(Errc::invalid_distribution, "tabulated tail must start at x = 0");
    for (std::size_t i = 0; i < points.size(); ++i) {
        auto [x, t] = points[i];
        if (!(t >= 0.0) || !(t <= 1.0))
            raise(Errc::invalid_distribution, "tail values must lie in [0,1]");
        if (i > 0) {
            if (!(x > points[i - 1].first))
                raise(Errc::invalid_distribution, "tail abscissae must be increasing");
            if (t > points[i - 1].second + 1e-15)
                raise(Errc::invalid_distribution, "tail must be non-increasing");
        }
    }
    if (points.back().second != 0.0)
        raise(Errc::invalid_distribution, "tabulated tail must end at 0");
    ContinuousClaim c;
    c.family_ = ClaimFamily::Tabulated;
    c.nodes_ = std::move(points);
    // mean = exact integral of the piecewise-linear tail
    double m = 0.0;
    for (std::size_t i = 0; i + 1 < c.nodes_.size(); ++i) {
        const auto& [x0, t0] = c.nodes_[i];
        const auto& [x1, t1] = c.nodes_[i + 1];
        m += 0.5 * (t0 + t1) * (x1 - x0);
    }
    c.mean_ = m;
    return c;
}

double ContinuousClaim::tail(double x) const noexcept {
    if (x < 0.0) return 1.0;
    switch (family_) {
        case ClaimFamily::Exponential:
            return std::exp(-a_ * x);
        case ClaimFamily::Uniform:
            if (x < a_) return 1.0;
            if (x >= b_) return 0.0;
            return (b_ - x) / (b_ - a_);
        case ClaimFamily::ShiftedDiscrete: {
            double t = 0.0;
            for (const auto& [v, p] : nodes_)
                if (v > x) t += p;
            return t;
        }
        case ClaimFamily::Tabulated: {
            if (x >= nodes_.back().first) return 0.0;
            auto it = std::upper_bound(nodes_.begin(), nodes_.end(), x,
                                       [](double v, const auto& n) { return v < n.first; });
            const auto& [x1, t1] = *it;
            const auto& [x0, t0] = *(it - 1);
            return t0 + (t1 - t0) * (x - x0) / (x1 - x0);
        }
    }
    return 0.0;
}

double ContinuousClaim::tail_integral(double x) const noexcept {
    if (x <= 0.0) return 0.0;
    switch (family_) {
        case ClaimFamily::Exponential:
            return -std::expm1(-a_ * x) / a_;
        case ClaimFamily::Uniform: {
            if (x <= a_) return x;
            const double w = b_ - a_;
            if (x >= b_) return a_ + 0.5 * w;
            const double r = b_ - x;
            return a_ + 0.5 * (w * w - r * r) / w;
        }
        case ClaimFamily::ShiftedDiscrete: {
            // integral of sum_i p_i 1{v_i > t} over [0,x]
            double acc = 0.0;
            for (const auto& [v, p] : nodes_) acc += p * std::min(x, v);
            return acc;
        }
        case ClaimFamily::Tabulated: {
            double acc = 0.0;
            for (std::size_t i = 0; i + 1 < nodes_.size(); ++i) {
                const auto& [x0, t0] = nodes_[i];
                const auto& [x1, t1] = nodes_[i + 1];
                if (x <= x0) break;
                const double xe = std::min(x, x1);
                const double te = t0 + (t1 - t0) * (xe - x0) / (x1 - x0);
                acc += 0.5 * (t0 + te) * (xe - x0);
            }
            return acc;
        }
    }
    return 0.0;
}

std::optional<double> ContinuousClaim::laplace(double t) const {
    if (t < 0.0) raise(Errc::invalid_argument, "laplace transform requires t >= 0");
    if (t == 0.0) return 1.0;
    switch (family_) {
        case ClaimFamily::Exponential:
            return a_ / (a_ + t);
        case ClaimFamily::Uniform:
            return (std::exp(-t * a_) - std::exp(-t * b_)) / (t * (b_ - a_));
        case ClaimFamily::ShiftedDiscrete: {
            double acc = 0.0;
            for (const auto& [v, p] : nodes_) acc += p * std::exp(-t * v);
            return acc;
        }
        case ClaimFamily::Tabulated: {
            // piecewise-constant density (t0 - t1)/(x1 - x0), plus an atom of
            // size 1 - tail(0) at zero
            double acc = 1.0 - nodes_.front().second;
            for (std::size_t i = 0; i + 1 < nodes_.size(); ++i) {
                const auto& [x0, t0] = nodes_[i];
                const auto& [x1, t1] = nodes_[i + 1];
                const double dens = (t0 - t1) / (x1 - x0);
                if (dens > 0.0) acc += dens * (std::exp(-t * x0) - std::exp(-t * x1)) / t;
            }
            return acc;
        }
    }
    return std::nullopt;
}

double ContinuousClaim::quantile(double u) const noexcept {
    switch (family_) {
        case ClaimFamily::Exponential:
            return -std::log1p(-u) / a_;
        case ClaimFamily::Uniform:
            return a_ + (b_ - a_) * u;
        case ClaimFamily::ShiftedDiscrete: {
            for (std::size_t i = 0; i + 1 < cum_.size(); ++i)
                if (u < cum_[i]) return nodes_[i].first;
            return nodes_.back().first;
        }
        case ClaimFamily::Tabulated: {
            // cdf F = 1 - tail, piecewise linear; invert segment-by-segment
            for (std::size_t i = 0; i + 1 < nodes_.size(); ++i) {
                const double f0 = 1.0 - nodes_[i].second;
                const double f1 = 1.0 - nodes_[i + 1].second;
                if (u < f1 || i + 2 == nodes_.size()) {
                    if (f1 <= f0) return nodes_[i].first;  // flat segment
                    const double w = std::clamp((u - f0) / (f1 - f0), 0.0, 1.0);
                    return nodes_[i].first + w * (nodes_[i + 1].first - nodes_[i].first);
                }
            }
            return nodes_.back().first;
        }
    }
    return 0.0;
}

PerturbedClaim::PerturbedClaim(ContinuousClaim base, double threshold, double epsilon)
    : base_(std::move(base)), a_(threshold), eps_(epsilon) {
    if (!(a_ > 0.0)) raise(Errc::invalid_argument, "threshold must be > 0");
    if (base_.tail(a_) <= 0.0)
        raise(Errc::empty_tail, "P(X > a) = 0; nothing to perturb");
    if (!(eps_ > 0.0) || !(eps_ < a_))
        raise(Errc::invalid_perturbation, "epsilon must lie in (0, a)");
    mean_ = base_.mean() - eps_ * base_.tail(a_);
}

double PerturbedClaim::tail(double x) const noexcept {
    // P(X* > x) = P(x < X <= a) + P(X > max(x + eps, a))
    const double above = base_.tail(std::max(x + eps_, a_));
    if (x <= a_) return base_.tail(x) - base_.tail(a_) + above;
    return above;
}

double PerturbedClaim::tail_integral(double x) const noexcept {
    if (x <= 0.0) return 0.0;
    const double ta = base_.tail(a_);
    double acc = base_.tail_integral(std::min(x, a_)) - ta * std::min(x, a_) +
                 ta * std::min(x, a_ - eps_);
    if (x > a_ - eps_)
        acc += base_.tail_integral(x + eps_) - base_.tail_integral(a_);
    return acc;
}

std::pair<double, double> PerturbedClaim::coupled_from_u01(double u) const noexcept {
    const double x = base_.quantile(u);
    return {x > a_ ? x - eps_ : x, x};
}

PerturbedClaim perturb_continuous(const ContinuousClaim& claim, double a, double epsilon) {
    return PerturbedClaim(claim, a, epsilon);
}

namespace {

template <class TailFn>
double trapezoid_tail_cdf(const TailFn& tail, double mean, double u, double grid_step) {
    if (!(grid_step > 0.0)) raise(Errc::invalid_argument, "grid_step must be > 0");
    if (u < 0.0) raise(Errc::invalid_argument, "u must be >= 0");
    if (!(mean > 0.0)) raise(Errc::invalid_argument, "claim mean must be > 0");
    if (u == 0.0) return 0.0;
    const auto n = static_cast<std::size_t>(std::ceil(u / grid_step));
    const double h = u / static_cast<double>(n);
    double acc = 0.5 * (tail(0.0) + tail(u));
    for (std::size_t k = 1; k < n; ++k) acc += tail(h * static_cast<double>(k));
    return std::clamp(acc * h / mean, 0.0, 1.0);
}

}  // namespace

double integrated_tail_cdf(const ContinuousClaim& claim, double u, double grid_step) {
    return trapezoid_tail_cdf([&](double x) { return claim.tail(x); }, claim.mean(), u,
                              grid_step);
}

double integrated_tail_cdf(const PerturbedClaim& claim, double u, double grid_step) {
    return trapezoid_tail_cdf([&](double x) { return claim.tail(x); }, claim.mean(), u,
                              grid_step);
}

TruncationBound truncation_bound(double x, double t, double laplace_value) {
    if (!(x >= 0.0)) raise(Errc::invalid_argument, "x must be >= 0");
    if (!(t > 0.0)) raise(Errc::invalid_argument, "t must be > 0");
    if (!(laplace_value > 0.0)) raise(Errc::invalid_argument, "laplace value must be > 0");
    if (laplace_value >= 1.0)
        raise(Errc::degenerate_at_zero,
              "E exp(-t eta) >= 1 requires eta degenerate at zero; bound undefined");
    const double bound = std::exp(t * x) * laplace_value / (1.0 - laplace_value);
    return {x, t, laplace_value, bound};
}

}  // namespace ruinlab
