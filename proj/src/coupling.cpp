#include "ruinlab/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "ruinlab/errors.hpp"

namespace ruinlab {

CouplingPmf::CouplingPmf(std::vector<CouplingEntry> entries, double epsilon, int site_from,
                         int site_to)
    : entries_(std::move(entries)), epsilon_(epsilon), site_from_(site_from), site_to_(site_to) {
    if (entries_.empty()) raise(Errc::invalid_distribution, "empty coupling");
    double sum = 0.0;
    for (const auto& e : entries_) {
        if (!(e.p >= 0.0)) raise(Errc::invalid_distribution, "negative joint probability");
        if (e.x < 0 || e.x_star < 0)
            raise(Errc::invalid_distribution, "negative support value in coupling");
        sum += e.p;
    }
    if (std::abs(sum - 1.0) > 1e-12)
        raise(Errc::invalid_distribution, "joint probabilities must sum to 1");
    cum_.resize(entries_.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        acc += entries_[i].p;
        cum_[i] = acc;
    }
    cum_.back() = 1.0;
}

IntegerPmf CouplingPmf::x_marginal() const {
    std::map<int, double> m;
    for (const auto& e : entries_) m[e.x] += e.p;
    return IntegerPmf(m);
}

IntegerPmf CouplingPmf::x_star_marginal() const {
    std::map<int, double> m;
    for (const auto& e : entries_) m[e.x_star] += e.p;
    return IntegerPmf(m);
}

double CouplingPmf::mass_above_diagonal() const noexcept {
    double m = 0.0;
    for (const auto& e : entries_)
        if (e.x_star > e.x) m += e.p;
    return m;
}

std::pair<int, int> CouplingPmf::sample(double u01) const noexcept {
    for (std::size_t i = 0; i + 1 < cum_.size(); ++i)
        if (u01 < cum_[i]) return {entries_[i].x_star, entries_[i].x};
    return {entries_.back().x_star, entries_.back().x};
}

CouplingPmf perturb_discrete(const IntegerPmf& pmf, int from_value, int to_value, double epsilon) {
    if (to_value < 0 || to_value >= from_value)
        raise(Errc::invalid_argument, "target site must satisfy 0 <= s < b");
    const double h_b = pmf.prob(from_value);
    if (h_b <= 0.0)
        raise(Errc::empty_site, "no mass at source value " + std::to_string(from_value));
    const double gap = static_cast<double>(from_value - to_value);
    if (!(epsilon > 0.0) || !(epsilon < gap * h_b))
        raise(Errc::invalid_perturbation,
              "epsilon must lie in (0, " + std::to_string(gap * h_b) + ")");

    const double delta = epsilon / gap;  // joint mass moved off the diagonal
    std::vector<CouplingEntry> entries;
    for (int k = 0; k <= pmf.max_value(); ++k) {
        const double p = pmf.prob(k);
        if (p == 0.0) continue;
        if (k == from_value) {
            entries.push_back({k, k, p - delta});
            entries.push_back({to_value, k, delta});
        } else {
            entries.push_back({k, k, p});
        }
    }
    return CouplingPmf(std::move(entries), epsilon, from_value, to_value);
}

PerturbSite choose_site(const IntegerPmf& pmf, int premium) {
    if (premium < 1) raise(Errc::invalid_argument, "premium per period must be >= 1");
    if (pmf.degenerate_at(premium))
        raise(Errc::degenerate_model,
              "claim equals the premium with probability 1; ruin never occurs");

    const int s = 0;  // smallest admissible target
    for (int b = premium; b <= pmf.max_value(); ++b)
        if (pmf.prob(b) > 0.0 && b > s) return {b, s};
    for (int b = pmf.max_value(); b > s; --b)
        if (pmf.prob(b) > 0.0) return {b, s};
    raise(Errc::degenerate_model, "all mass at zero; no perturbation site exists");
}

}  // namespace ruinlab
