#include "ruinlab/compound_geometric.hpp"

#include <algorithm>
#include <cmath>

#include "ruinlab/errors.hpp"

namespace ruinlab {

LatticePmfs discretize_cdf(const std::function<double(double)>& cdf, double step,
                           std::size_t nodes) {
    if (!(step > 0.0)) raise(Errc::invalid_argument, "lattice step must be > 0");
    if (nodes < 2) raise(Errc::invalid_argument, "lattice needs at least two nodes");
    LatticePmfs out;
    out.step = step;
    out.lower.assign(nodes, 0.0);
    out.mid.assign(nodes, 0.0);
    out.upper.assign(nodes, 0.0);
    const auto at = [&](double x) { return std::clamp(cdf(x), 0.0, 1.0); };
    const std::size_t top = nodes - 1;
    for (std::size_t k = 1; k < nodes; ++k) {
        const double x = step * static_cast<double>(k);
        out.lower[k] = at(x) - at(x - step);
        out.mid[k] = at(x + 0.5 * step) - at(x - 0.5 * step);
    }
    out.mid[0] = at(0.5 * step);
    out.upper[0] = at(step);
    for (std::size_t k = 1; k < top; ++k) {
        const double x = step * static_cast<double>(k);
        out.upper[k] = at(x + step) - at(x);
    }
    out.upper[top] = 1.0 - at(step * static_cast<double>(top));
    return out;
}

LatticePmfs discretize_samples(std::span<const double> samples, double step, std::size_t nodes) {
    if (!(step > 0.0)) raise(Errc::invalid_argument, "lattice step must be > 0");
    if (nodes < 2) raise(Errc::invalid_argument, "lattice needs at least two nodes");
    if (samples.empty()) raise(Errc::invalid_argument, "no samples to discretize");
    LatticePmfs out;
    out.step = step;
    out.lower.assign(nodes, 0.0);
    out.mid.assign(nodes, 0.0);
    out.upper.assign(nodes, 0.0);
    const double w = 1.0 / static_cast<double>(samples.size());
    const auto top = static_cast<long>(nodes) - 1;
    for (double x : samples) {
        if (!(x > 0.0)) raise(Errc::invalid_argument, "samples must be strictly positive");
        const double r = x / step;
        const auto up = static_cast<long>(std::ceil(r));
        if (up <= top) out.lower[static_cast<std::size_t>(up)] += w;
        const auto near = std::max<long>(1, std::lround(r));
        if (near <= top) out.mid[static_cast<std::size_t>(near)] += w;
        out.upper[static_cast<std::size_t>(std::min<long>(static_cast<long>(r), top))] += w;
    }
    return out;
}

namespace {

// one accumulation pass: acc += weight * conv, conv = conv (*) f truncated
void accumulate_power(std::vector<double>& acc, std::vector<double>& conv,
                      const std::vector<double>& f, double weight) {
    const std::size_t m = acc.size();
    for (std::size_t i = 0; i < m; ++i) acc[i] += weight * conv[i];
    std::vector<double> next(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        const double ci = conv[i];
        if (ci == 0.0) continue;
        const std::size_t j_max = m - i;
        for (std::size_t j = 0; j < j_max; ++j) next[i + j] += ci * f[j];
    }
    conv.swap(next);
}

// centre = true applies the half-cell continuity correction: the CDF of a
// nearest-node-rounded lattice sum evaluated at node k tracks the true CDF at
// kh + h/2, so averaging consecutive lattice values re-centres the estimate
std::vector<double> finish_phi(const std::vector<double>& acc, double q, double slack,
                               bool centre) {
    std::vector<double> phi(acc.size());
    double prev = 0.0, cum = 0.0;
    for (std::size_t i = 0; i < acc.size(); ++i) {
        prev = cum;
        cum += acc[i];
        const double value = centre && i > 0 ? 0.5 * (prev + cum) : cum;
        phi[i] = std::min(1.0, (1.0 - q) * (1.0 + value) + slack);
    }
    return phi;
}

}  // namespace

CompoundGeometric compound_geometric_survival(const LatticePmfs& lattice, double q, double tol) {
    if (!(q >= 0.0) || !(q < 1.0))
        raise(Errc::npc_violation, "compound-geometric parameter must satisfy 0 <= q < 1");
    if (!(tol > 0.0)) raise(Errc::invalid_argument, "tolerance must be > 0");

    int terms = 0;
    double tail = q / (1.0 - q);
    while (tail >= tol && terms < 2'000'000) {
        ++terms;
        tail *= q;
    }

    const std::size_t m = lattice.mid.size();
    CompoundGeometric out;
    out.terms = terms;
    out.tail_bound = tail;

    std::vector<double> acc_lo(m, 0.0), acc_mi(m, 0.0), acc_up(m, 0.0);
    std::vector<double> conv_lo = lattice.lower, conv_mi = lattice.mid, conv_up = lattice.upper;
    double weight = 1.0;
    for (int n = 1; n <= terms; ++n) {
        weight *= q;
        accumulate_power(acc_lo, conv_lo, lattice.lower, weight);
        accumulate_power(acc_mi, conv_mi, lattice.mid, weight);
        accumulate_power(acc_up, conv_up, lattice.upper, weight);
    }
    out.phi_lower = finish_phi(acc_lo, q, 0.0, false);
    // the dropped terms contribute at most sum_{n>terms} q^n = q^{terms+1}/(1-q)
    // to the series, i.e. (1-q) * that = q^{terms+1} to phi
    out.phi_upper = finish_phi(acc_up, q, (1.0 - q) * tail, false);
    out.phi = finish_phi(acc_mi, q, 0.0, true);
    // the jump law lives on (0, inf), so phi(0) = 1 - q identically; lattice
    // mass at node zero is rounding, not probability at zero
    out.phi[0] = 1.0 - q;
    for (std::size_t i = 0; i < m; ++i)
        out.phi[i] = std::clamp(out.phi[i], out.phi_lower[i], out.phi_upper[i]);
    return out;
}

}  // namespace ruinlab
