#include "ruinlab/discrete.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "ruinlab/errors.hpp"

namespace ruinlab {

namespace {

constexpr double kNpcTol = 1e-12;

using Complex = std::complex<double>;

// p(s) and p'(s) by Horner
std::pair<Complex, Complex> poly_eval(const std::vector<double>& coeffs, Complex s) {
    Complex v = 0.0, d = 0.0;
    for (std::size_t k = coeffs.size(); k-- > 0;) {
        d = d * s + v;
        v = v * s + coeffs[k];
    }
    return {v, d};
}

std::vector<double> poly_derivative(const std::vector<double>& coeffs) {
    if (coeffs.size() <= 1) return {0.0};
    std::vector<double> out(coeffs.size() - 1);
    for (std::size_t k = 1; k < coeffs.size(); ++k)
        out[k - 1] = static_cast<double>(k) * coeffs[k];
    return out;
}

Complex cpow_int(Complex base, int e) {
    Complex acc = 1.0;
    for (int i = 0; i < e; ++i) acc *= base;
    return acc;
}

}  // namespace

IntegerPmf SeasonalModel::season_sum() const {
    validate();
    IntegerPmf acc = pmfs.front();
    for (std::size_t j = 1; j < pmfs.size(); ++j) acc = convolve(acc, pmfs[j]);
    return acc;
}

double SeasonalModel::season_mean() const noexcept {
    double m = 0.0;
    for (const auto& pmf : pmfs) m += pmf.mean();
    return m;
}

bool SeasonalModel::neutral(double tol) const noexcept {
    return std::abs(season_mean() - static_cast<double>(premium) * period()) <= tol;
}

bool SeasonalModel::degenerate_certain() const {
    // P(S_N = cN) = 1 forces every season degenerate
    int total = 0;
    for (const auto& pmf : pmfs) {
        if (!pmf.degenerate_at(pmf.min_value())) return false;
        total += pmf.min_value();
    }
    return total == premium * period();
}

void SeasonalModel::validate() const {
    if (premium < 1) raise(Errc::invalid_argument, "premium per period must be >= 1");
    if (pmfs.empty()) raise(Errc::invalid_argument, "model needs at least one season");
}

SurvivalTable survival_recursion(const IntegerPmf& pmf, double phi0, int u_max) {
    if (u_max < 0) raise(Errc::invalid_argument, "u_max must be >= 0");
    if (!(phi0 >= 0.0) || !(phi0 <= 1.0))
        raise(Errc::invalid_argument, "phi0 must lie in [0,1]");
    const double h0 = pmf.prob(0);
    if (h0 == 0.0)
        raise(Errc::needs_shift, "recursion needs P(X=0) > 0; shift the support first");

    SurvivalTable table{RuinConvention::Weak, std::vector<double>(u_max + 1)};
    table.phi[0] = phi0;
    for (int u = 1; u <= u_max; ++u) {
        double acc = table.phi[u - 1];
        const int k_max = std::min(u, pmf.max_value());
        for (int k = 1; k <= k_max; ++k) acc -= table.phi[u - k] * pmf.prob(k);
        table.phi[u] = acc / h0;
    }
    return table;
}

std::vector<double> alpha_coefficients(const IntegerPmf& pmf, int u_max) {
    if (u_max < 0) raise(Errc::invalid_argument, "u_max must be >= 0");
    const double h0 = pmf.prob(0);
    if (h0 == 0.0)
        raise(Errc::needs_shift, "coefficients need P(X=0) > 0; shift the support first");
    std::vector<double> alpha(u_max + 1);
    alpha[0] = 1.0;
    for (int u = 1; u <= u_max; ++u) {
        double acc = alpha[u - 1];
        const int k_max = std::min(u, pmf.max_value());
        for (int k = 1; k <= k_max; ++k) acc -= alpha[u - k] * pmf.prob(k);
        alpha[u] = acc / h0;
    }
    return alpha;
}

bool RootSet::contains_one(double tol) const noexcept {
    for (const auto& r : roots)
        if (std::abs(r - 1.0) <= tol) return true;
    return false;
}

RootSet find_unit_disk_roots(const SeasonalModel& model) {
    model.validate();
    if (model.degenerate_certain())
        raise(Errc::degenerate_model,
              "S_N equals cN with probability 1; G - s^{cN} vanishes identically");

    const IntegerPmf sum = model.season_sum();
    const int cn = model.premium * model.period();
    std::vector<double> coeffs(static_cast<std::size_t>(std::max(sum.max_value(), cn)) + 1, 0.0);
    for (int k = 0; k <= sum.max_value(); ++k) coeffs[static_cast<std::size_t>(k)] = sum.prob(k);
    coeffs[static_cast<std::size_t>(cn)] -= 1.0;
    while (coeffs.size() > 1 && coeffs.back() == 0.0) coeffs.pop_back();
    const std::size_t degree = coeffs.size() - 1;
    if (degree == 0) raise(Errc::root_failure, "polynomial degenerated to a constant");

    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(degree, degree);
    for (std::size_t i = 1; i < degree; ++i) companion(i, i - 1) = 1.0;
    for (std::size_t i = 0; i < degree; ++i) companion(i, degree - 1) = -coeffs[i] / coeffs[degree];
    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success)
        raise(Errc::root_failure, "companion-matrix eigenvalue iteration failed");

    // Cluster eigenvalue estimates to recover multiplicities, then polish each
    // cluster centre by Newton on the (m-1)-th derivative; a root of p with
    // multiplicity m is a simple root of p^{(m-1)}, so the iteration regains
    // quadratic convergence where plain Newton would stall in rounding noise.
    std::vector<std::pair<Complex, int>> clusters;
    for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
        const Complex s = solver.eigenvalues()(i);
        bool merged = false;
        for (auto& [centre, mult] : clusters) {
            if (std::abs(s - centre) <= 5e-5) {
                centre = (centre * static_cast<double>(mult) + s) / static_cast<double>(mult + 1);
                ++mult;
                merged = true;
                break;
            }
        }
        if (!merged) clusters.push_back({s, 1});
    }

    RootSet set;
    for (auto& [centre, mult] : clusters) {
        std::vector<double> target = coeffs;
        for (int j = 1; j < mult; ++j) target = poly_derivative(target);
        Complex s = centre;
        for (int it = 0; it < 60; ++it) {
            auto [v, d] = poly_eval(target, s);
            if (std::abs(d) == 0.0) break;
            const Complex step = v / d;
            s -= step;
            if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(s))) break;
        }
        if (std::abs(s) > 1.0 + 1e-9) continue;
        const double res = std::abs(poly_eval(coeffs, s).first);
        if (res > 1e-10)
            raise(Errc::root_failure,
                  "Newton polishing stalled at residual " + std::to_string(res));
        for (int j = 0; j < mult; ++j) set.roots.push_back(s);
        set.residual = std::max(set.residual, res);
    }
    std::sort(set.roots.begin(), set.roots.end(), [](const Complex& a, const Complex& b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    set.on_boundary.reserve(set.roots.size());
    for (const auto& r : set.roots)
        set.on_boundary.push_back(std::abs(std::abs(r) - 1.0) <= 1e-9);
    return set;
}

std::vector<double> solve_numerator(const SeasonalModel& model, const RootSet& roots) {
    model.validate();
    if (model.period() != 1)
        raise(Errc::invalid_argument, "closed-form numerator requires N = 1");
    const int c = model.premium;
    const double mean = model.season_mean();
    if (!(mean < c - kNpcTol))
        raise(Errc::npc_violation, "numerator requires the strict net profit condition E X < c");

    // roots to cancel: everything in the disk except s = 1
    std::vector<Complex> cancel;
    for (const auto& r : roots.roots)
        if (std::abs(r - 1.0) > 1e-8) cancel.push_back(r);
    if (static_cast<int>(cancel.size()) != c - 1)
        raise(Errc::root_failure,
              "expected " + std::to_string(c - 1) + " cancellation roots, found " +
                  std::to_string(cancel.size()));

    // cluster repeated roots; impose derivative conditions to full order
    std::vector<std::pair<Complex, int>> clusters;
    for (const auto& r : cancel) {
        bool merged = false;
        for (auto& [centre, mult] : clusters) {
            if (std::abs(r - centre) <= 1e-6) {
                centre = (centre * static_cast<double>(mult) + r) / static_cast<double>(mult + 1);
                ++mult;
                merged = true;
                break;
            }
        }
        if (!merged) clusters.push_back({r, 1});
    }

    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(c, c);
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(c);
    int row = 0;
    for (const auto& [centre, mult] : clusters) {
        for (int j = 0; j < mult; ++j, ++row) {
            for (int k = j; k < c; ++k) {
                double falling = 1.0;
                for (int t = 0; t < j; ++t) falling *= static_cast<double>(k - t);
                a(row, k) = falling * cpow_int(centre, k - j);
            }
        }
    }
    for (int k = 0; k < c; ++k) a(row, k) = 1.0;
    rhs(row) = static_cast<double>(c) - mean;

    const Eigen::VectorXcd sol = a.colPivHouseholderQr().solve(rhs);
    if ((a * sol - rhs).norm() > 1e-9)
        raise(Errc::root_failure, "numerator system is numerically singular");
    std::vector<double> poly(static_cast<std::size_t>(c));
    for (int k = 0; k < c; ++k) {
        if (std::abs(sol(k).imag()) > 1e-8)
            raise(Errc::root_failure, "numerator coefficients are not real");
        poly[static_cast<std::size_t>(k)] = sol(k).real();
    }
    return poly;
}

namespace {

// coefficients of numer(s) / denom(s) up to s^{u_max}; denom[0] != 0
std::vector<double> divide_series(const std::vector<double>& numer,
                                  const std::vector<double>& denom, int u_max) {
    std::vector<double> out(static_cast<std::size_t>(u_max) + 1, 0.0);
    for (int u = 0; u <= u_max; ++u) {
        double acc = u < static_cast<int>(numer.size()) ? numer[static_cast<std::size_t>(u)] : 0.0;
        const int j_max = std::min<int>(u, static_cast<int>(denom.size()) - 1);
        for (int j = 1; j <= j_max; ++j) acc -= denom[static_cast<std::size_t>(j)] * out[u - j];
        out[static_cast<std::size_t>(u)] = acc / denom[0];
    }
    return out;
}

}  // namespace

SurvivalTable survival_pgf_coefficients(const IntegerPmf& pmf, int premium, int u_max) {
    if (premium < 1) raise(Errc::invalid_argument, "premium must be >= 1");
    if (u_max < 0) raise(Errc::invalid_argument, "u_max must be >= 0");
    if (!(pmf.mean() < premium - kNpcTol))
        raise(Errc::npc_violation,
              "series solution requires the strict net profit condition E X < c");

    // P(X=0) = 0 blocks the division; work with X - m and premium c - m,
    // which generates the identical surplus paths
    IntegerPmf work = pmf;
    int c = premium;
    const int m = pmf.min_value();
    if (m > 0) {
        work = pmf.shifted_down(m);
        c = premium - m;
    }

    std::vector<double> denom(static_cast<std::size_t>(std::max(work.max_value(), c)) + 1, 0.0);
    for (int k = 0; k <= work.max_value(); ++k) denom[static_cast<std::size_t>(k)] = work.prob(k);
    denom[static_cast<std::size_t>(c)] -= 1.0;

    std::vector<double> numer;
    if (c == 1) {
        numer = {static_cast<double>(c) - work.mean()};
    } else {
        const SeasonalModel shifted{c, {work}};
        numer = solve_numerator(shifted, find_unit_disk_roots(shifted));
    }
    return {RuinConvention::Weak, divide_series(numer, denom, u_max)};
}

namespace {

// distribution of the end-of-period surplus over alive paths started at u,
// pruning any intermediate dip below zero; kernel[w] for w = 0..u+cN
std::vector<double> one_period_kernel(const SeasonalModel& model, int u) {
    const int c = model.premium;
    std::vector<double> dist(static_cast<std::size_t>(u) + 1, 0.0);
    dist[static_cast<std::size_t>(u)] = 1.0;
    for (int j = 0; j < model.period(); ++j) {
        const auto& pmf = model.pmfs[static_cast<std::size_t>(j)];
        std::vector<double> next(dist.size() + static_cast<std::size_t>(c), 0.0);
        for (std::size_t w = 0; w < dist.size(); ++w) {
            if (dist[w] == 0.0) continue;
            const int gain = static_cast<int>(w) + c;
            const int x_max = std::min(gain, pmf.max_value());
            for (int x = 0; x <= x_max; ++x)
                next[static_cast<std::size_t>(gain - x)] += dist[w] * pmf.prob(x);
        }
        dist.swap(next);
    }
    return dist;
}

}  // namespace

SeasonalExtension seasonal_recurrence_step(const SeasonalModel& model,
                                           const std::vector<double>& phi_block, int u_max) {
    model.validate();
    const int cn = model.premium * model.period();
    if (static_cast<int>(phi_block.size()) != cn)
        raise(Errc::invalid_argument,
              "initial block must carry exactly cN = " + std::to_string(cn) + " values");
    double all_zero = 1.0;
    for (const auto& pmf : model.pmfs) all_zero *= pmf.prob(0);
    if (all_zero == 0.0)
        raise(Errc::cannot_invert,
              "an all-zero-claims period has probability 0; the top term cannot be isolated");
    if (u_max < cn - 1) raise(Errc::invalid_argument, "u_max must cover the initial block");

    SeasonalExtension ext;
    ext.table.convention = RuinConvention::Weak;
    ext.table.phi = phi_block;
    ext.table.phi.resize(static_cast<std::size_t>(u_max) + 1, 0.0);

    for (int u = 0; u + cn <= u_max; ++u) {
        const auto kernel = one_period_kernel(model, u);
        double acc = ext.table.phi[static_cast<std::size_t>(u)];
        for (int w = 0; w + 1 < static_cast<int>(kernel.size()); ++w)
            acc -= kernel[static_cast<std::size_t>(w)] * ext.table.phi[static_cast<std::size_t>(w)];
        const double next = acc / kernel.back();
        // survival values live in [0,1]; inconsistencies in the block get
        // amplified by 1/P(all-zero period) per step and surface here
        if (next < -0.05 || next > 1.05)
            raise(Errc::inconsistent_block,
                  "extension produced phi(" + std::to_string(u + cn) + ") = " +
                      std::to_string(next) + "; the initial block contradicts the relation");
        ext.table.phi[static_cast<std::size_t>(u + cn)] = next;
    }

    for (int u = 0; u + cn <= u_max; ++u) {
        const auto kernel = one_period_kernel(model, u);
        double balance = 0.0;
        for (std::size_t w = 0; w < kernel.size(); ++w) balance += kernel[w] * ext.table.phi[w];
        ext.max_residual =
            std::max(ext.max_residual, std::abs(ext.table.phi[static_cast<std::size_t>(u)] - balance));
    }
    if (ext.max_residual > 1e-8)
        raise(Errc::inconsistent_block, "one-period balance residual " +
                                            std::to_string(ext.max_residual) + " exceeds 1e-8");
    return ext;
}

SeasonalPgfReport seasonal_pgf_verify(const SeasonalModel& model,
                                      const std::vector<double>& m_vector,
                                      const SurvivalTable& phi) {
    model.validate();
    const int c = model.premium;
    const int n = model.period();
    if (static_cast<int>(m_vector.size()) != c * n)
        raise(Errc::invalid_argument, "m-vector must carry cN entries");
    if (phi.phi.empty()) raise(Errc::invalid_argument, "empty survival table");

    static const Complex kSamples[] = {{0.1, 0.0},   {-0.3, 0.0},  {0.45, 0.0},
                                       {0.2, 0.2},   {-0.15, -0.35}, {0.0, 0.4}};
    SeasonalPgfReport report;
    const std::size_t terms = phi.phi.size();
    for (const Complex s : kSamples) {
        // truncated survival generating function
        Complex big_phi = 0.0;
        for (std::size_t u = terms; u-- > 0;) big_phi = big_phi * s + phi.phi[u];

        Complex g_sn = 1.0;
        for (const auto& pmf : model.pmfs) g_sn *= pmf.pgf(s);
        const Complex lhs = big_phi * (g_sn - cpow_int(s, c * n));

        Complex numer = 0.0;
        Complex g_prefix = 1.0;  // G_{S_{t-1}}
        for (int t = 1; t <= n; ++t) {
            const Complex u_t = cpow_int(s, c * (n - t)) * g_prefix;
            const int block = (t == n) ? 0 : t;
            const IntegerPmf& pmf_t = model.pmfs[static_cast<std::size_t>(t - 1)];
            Complex v_t = 0.0;
            for (int i = 0; i < c; ++i) {
                Complex inner = 0.0;
                for (int k = i; k < c; ++k)
                    inner += cpow_int(s, k) * pmf_t.cdf(k - i);
                v_t += m_vector[static_cast<std::size_t>(block * c + i)] * inner;
            }
            numer += u_t * v_t;
            g_prefix *= pmf_t.pgf(s);
        }

        const double tail =
            std::pow(std::abs(s), static_cast<double>(terms)) / (1.0 - std::abs(s));
        report.truncation_bound = std::max(report.truncation_bound, tail);
        report.samples.push_back({s, std::abs(lhs - numer)});
        report.max_residual = std::max(report.max_residual, report.samples.back().residual);
    }
    return report;
}

FiniteHorizonRuin dp_finite_horizon(const SeasonalModel& model, int u, std::int64_t horizon,
                                    RuinConvention convention, std::size_t max_states) {
    model.validate();
    if (u < 0) raise(Errc::invalid_argument, "initial surplus must be >= 0");
    if (horizon < 1) raise(Errc::invalid_argument, "horizon must be >= 1");

    const int c = model.premium;
    const int floor_state = convention == RuinConvention::Weak ? 0 : 1;
    std::vector<double> alive(static_cast<std::size_t>(u) + 1, 0.0);
    alive[static_cast<std::size_t>(u)] = 1.0;

    // ruin mass accumulates, so psi(u, t) is nondecreasing by construction
    double ruined = 0.0;
    FiniteHorizonRuin result;
    result.psi_by_t.reserve(static_cast<std::size_t>(horizon));
    for (std::int64_t t = 1; t <= horizon; ++t) {
        const auto& pmf = model.season_pmf(t);
        const std::size_t next_size = alive.size() + static_cast<std::size_t>(c);
        if (next_size > max_states) {
            result.truncated = true;
            break;
        }
        std::vector<double> next(next_size, 0.0);
        for (std::size_t w = 0; w < alive.size(); ++w) {
            if (alive[w] == 0.0) continue;
            const int gain = static_cast<int>(w) + c;
            const int x_max = std::min(gain - floor_state, pmf.max_value());
            for (int x = 0; x <= x_max; ++x)
                next[static_cast<std::size_t>(gain - x)] += alive[w] * pmf.prob(x);
            ruined += alive[w] * (1.0 - pmf.cdf(gain - floor_state));
        }
        alive.swap(next);
        result.psi_by_t.push_back(std::min(ruined, 1.0));
        result.achieved_horizon = t;
    }
    return result;
}

SurvivalTable strict_from_weak(const SurvivalTable& weak, const IntegerPmf& pmf, int premium) {
    if (weak.convention != RuinConvention::Weak)
        raise(Errc::invalid_argument, "input table must use the Weak convention");
    if (premium < 1) raise(Errc::invalid_argument, "premium must be >= 1");
    if (static_cast<int>(weak.phi.size()) < premium)
        raise(Errc::invalid_argument, "table too short for the convention shift");

    SurvivalTable strict{RuinConvention::Strict, std::vector<double>(weak.phi.size())};
    double phi0 = 0.0;
    for (int x = 0; x < premium; ++x)
        phi0 += pmf.prob(x) * weak.phi[static_cast<std::size_t>(premium - 1 - x)];
    strict.phi[0] = phi0;
    for (std::size_t v = 1; v < strict.phi.size(); ++v) strict.phi[v] = weak.phi[v - 1];
    return strict;
}

}  // namespace ruinlab
