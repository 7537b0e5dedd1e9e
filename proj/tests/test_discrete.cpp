#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>
#include <map>
#include <vector>

#include "ruinlab/coupling.hpp"
#include "ruinlab/discrete.hpp"
#include "ruinlab/errors.hpp"
#include "ruinlab/rng.hpp"

using namespace ruinlab;

namespace {

IntegerPmf pmf_55_45() { return IntegerPmf({{0, 0.55}, {2, 0.45}}); }
IntegerPmf pmf_half() { return IntegerPmf({{0, 0.5}, {2, 0.5}}); }

// first-passage oracle for claims on {0, 2} with c = 1: the claim-surplus walk
// steps +1 w.p. p = h_2 and -1 w.p. 1-p, so psi(u) = (p/(1-p))^{u+1} and
// phi(u) = 1 - r^{u+1}
double first_passage_phi(double h2, int u) {
    const double r = h2 / (1.0 - h2);
    return 1.0 - std::pow(r, u + 1);
}

// exhaustive ruin probability by path enumeration (Weak or Strict)
double enumerate_ruin(const SeasonalModel& model, int u, int horizon, RuinConvention conv) {
    const int floor_state = conv == RuinConvention::Weak ? 0 : 1;
    double ruined = 0.0;
    std::function<void(int, int, double)> walk = [&](int t, int surplus, double prob) {
        if (t > horizon) return;
        const IntegerPmf& pmf = model.season_pmf(t);
        for (int x = 0; x <= pmf.max_value(); ++x) {
            const double p = pmf.prob(x);
            if (p == 0.0) continue;
            const int next = surplus + model.premium - x;
            if (next < floor_state)
                ruined += prob * p;
            else
                walk(t + 1, next, prob * p);
        }
    };
    walk(1, u, 1.0);
    return ruined;
}

IntegerPmf random_subcritical_pmf(RngStream& rng) {
    for (;;) {
        std::map<int, double> m;
        double total = 0.0;
        const int top = 2 + static_cast<int>(rng.next_u01() * 4.0);  // support max 2..5
        for (int k = 0; k <= top; ++k) {
            const double w = (k == 0 ? 1.0 : 0.02) + rng.next_u01();
            m[k] = w;
            total += w;
        }
        for (auto& [k, p] : m) p /= total;
        const IntegerPmf pmf(m);
        if (pmf.mean() < 0.95 && pmf.prob(0) >= 0.3) return pmf;
    }
}

}  // namespace

TEST_CASE("survival recursion") {
    const double phi0 = 2.0 / 11.0;
    const SurvivalTable table = survival_recursion(pmf_55_45(), phi0, 10);
    CHECK(table.phi[1] == doctest::Approx(40.0 / 121.0).epsilon(1e-14));

    const SurvivalTable zeros = survival_recursion(pmf_55_45(), 0.0, 10);
    for (double v : zeros.phi) CHECK(v == 0.0);
    const SurvivalTable neutral = survival_recursion(pmf_half(), 0.0, 10);
    for (double v : neutral.phi) CHECK(v == 0.0);

    try {
        survival_recursion(IntegerPmf({{1, 0.6}, {2, 0.4}}), 0.1, 5);
        FAIL("expected NeedsShift");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::needs_shift);
    }
}

TEST_CASE("alpha coefficients") {
    const auto alpha = alpha_coefficients(pmf_55_45(), 30);
    CHECK(alpha[0] == 1.0);
    CHECK(alpha[1] == doctest::Approx(20.0 / 11.0).epsilon(1e-14));

    // factorization phi(u) = alpha_u phi(0) for random subcritical laws
    RngStream rng(201, 0);
    for (int trial = 0; trial < 10; ++trial) {
        const IntegerPmf pmf = random_subcritical_pmf(rng);
        const double phi0 = 0.3;
        const SurvivalTable table = survival_recursion(pmf, phi0, 40);
        const auto a = alpha_coefficients(pmf, 40);
        for (int u = 0; u <= 40; ++u)
            CHECK(table.phi[static_cast<std::size_t>(u)] ==
                  doctest::Approx(a[static_cast<std::size_t>(u)] * phi0).epsilon(1e-12));
    }
}

TEST_CASE("series division matches the first-passage oracle") {
    const SurvivalTable table = survival_pgf_coefficients(pmf_55_45(), 1, 30);
    CHECK(table.phi[0] == doctest::Approx(2.0 / 11.0).epsilon(1e-13));
    CHECK(table.phi[1] == doctest::Approx(40.0 / 121.0).epsilon(1e-13));
    for (int u = 0; u <= 30; ++u)
        CHECK(table.phi[static_cast<std::size_t>(u)] ==
              doctest::Approx(first_passage_phi(0.45, u)).epsilon(1e-12));

    try {
        survival_pgf_coefficients(pmf_half(), 1, 5);
        FAIL("expected NPCViolation");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::npc_violation);
    }
}

TEST_CASE("series division handles P(X=0) = 0 by shifting") {
    // X in {2,3,4} against premium 3 is the same surplus process as
    // X-2 in {0,1,2} against premium 1
    const IntegerPmf raw({{2, 0.7}, {3, 0.1}, {4, 0.2}});
    const IntegerPmf shifted({{0, 0.7}, {1, 0.1}, {2, 0.2}});
    const SurvivalTable a = survival_pgf_coefficients(raw, 3, 25);
    const SurvivalTable b = survival_pgf_coefficients(shifted, 1, 25);
    for (std::size_t u = 0; u < a.phi.size(); ++u)
        CHECK(a.phi[u] == doctest::Approx(b.phi[u]).epsilon(1e-14));
    // and both agree with the long-horizon DP oracle
    const SeasonalModel model{3, {raw}};
    for (int u : {0, 2, 5}) {
        const FiniteHorizonRuin dp = dp_finite_horizon(model, u, 4000);
        CHECK(a.phi[static_cast<std::size_t>(u)] ==
              doctest::Approx(1.0 - dp.psi()).epsilon(1e-6));
    }
}

TEST_CASE("unit-disk roots: subcritical, neutral, and lattice cases") {
    {
        // 0.45 s^2 - s + 0.55 = 0 has roots 1 and 11/9 (quadratic formula);
        // only s = 1 lies in the closed disk
        const RootSet set = find_unit_disk_roots({1, {pmf_55_45()}});
        const double disc = std::sqrt(1.0 - 4.0 * 0.45 * 0.55);
        const double outside = (1.0 + disc) / 0.9;
        CHECK(outside == doctest::Approx(11.0 / 9.0).epsilon(1e-12));
        REQUIRE(set.roots.size() == 1);
        CHECK(std::abs(set.roots[0] - 1.0) < 1e-9);
        CHECK(set.residual < 1e-10);
        CHECK(set.contains_one());
        CHECK(set.on_boundary[0]);
    }
    {
        // neutral: 0.5 s^2 - s + 0.5 = 0.5 (s-1)^2, a double root on the boundary
        const RootSet set = find_unit_disk_roots({1, {pmf_half()}});
        REQUIRE(set.roots.size() == 2);
        CHECK(std::abs(set.roots[0] - 1.0) < 1e-7);
        CHECK(std::abs(set.roots[1] - 1.0) < 1e-7);
    }
    {
        // 0.25 s^2 - 0.5 s + 0.25 = 0.25 (s-1)^2
        const RootSet set =
            find_unit_disk_roots({1, {IntegerPmf({{0, 0.25}, {1, 0.5}, {2, 0.25}})}});
        REQUIRE(set.roots.size() == 2);
        CHECK(std::abs(set.roots[0] - 1.0) < 1e-7);
    }
    {
        // X = 0 surely, c = 2: 1 - s^2 has roots -1 and 1
        const RootSet set = find_unit_disk_roots({2, {IntegerPmf::point_mass(0)}});
        REQUIRE(set.roots.size() == 2);
        CHECK(std::abs(set.roots[0] + 1.0) < 1e-12);
        CHECK(std::abs(set.roots[1] - 1.0) < 1e-12);
    }
    try {
        find_unit_disk_roots({1, {IntegerPmf::point_mass(1)}});
        FAIL("expected DegenerateModel");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::degenerate_model);
    }
}

TEST_CASE("numerator polynomial") {
    {
        const SeasonalModel model{1, {pmf_55_45()}};
        const auto poly = solve_numerator(model, find_unit_disk_roots(model));
        REQUIRE(poly.size() == 1);
        CHECK(poly[0] == doctest::Approx(0.1).epsilon(1e-12));
    }
    {
        // sure survival: X = 0, c = 2 forces P(s) = 1 + s and phi = 1
        const SeasonalModel model{2, {IntegerPmf::point_mass(0)}};
        const auto poly = solve_numerator(model, find_unit_disk_roots(model));
        REQUIRE(poly.size() == 2);
        CHECK(poly[0] == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(poly[1] == doctest::Approx(1.0).epsilon(1e-12));
        const SurvivalTable table = survival_pgf_coefficients(IntegerPmf::point_mass(0), 2, 10);
        for (double v : table.phi) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
    }
    {
        // repeated root at s = 0 (support starts at 2, premium 3):
        // derivative conditions give P(s) = (c - EX) s^2
        const SeasonalModel model{3, {IntegerPmf({{2, 0.7}, {3, 0.1}, {4, 0.2}})}};
        const auto poly = solve_numerator(model, find_unit_disk_roots(model));
        REQUIRE(poly.size() == 3);
        CHECK(poly[0] == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(poly[1] == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(poly[2] == doctest::Approx(0.5).epsilon(1e-12));
    }
    {
        // a neutral root set (double root at 1) is flagged, never inverted
        const SeasonalModel neutral{1, {pmf_half()}};
        const RootSet roots = find_unit_disk_roots(neutral);
        try {
            solve_numerator(neutral, roots);
            FAIL("expected NPCViolation");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::npc_violation);
        }
    }
    {
        // c = 2 with claims in {0,3}: series division vs the DP oracle
        const IntegerPmf pmf({{0, 0.5}, {3, 0.5}});
        const SurvivalTable table = survival_pgf_coefficients(pmf, 2, 12);
        const SeasonalModel model{2, {pmf}};
        for (int u : {0, 1, 3, 6}) {
            const FiniteHorizonRuin dp = dp_finite_horizon(model, u, 3000);
            CHECK(table.phi[static_cast<std::size_t>(u)] ==
                  doctest::Approx(1.0 - dp.psi()).epsilon(1e-6));
        }
    }
}

TEST_CASE("finite-horizon DP") {
    const SeasonalModel half{1, {pmf_half()}};
    CHECK(dp_finite_horizon(half, 0, 1).psi_by_t[0] == doctest::Approx(0.5).epsilon(1e-15));
    // by enumeration of the 4 two-step paths, ruin by T = 2 still needs X_1 = 2
    CHECK(dp_finite_horizon(half, 0, 2).psi() == doctest::Approx(0.5).epsilon(1e-15));

    // exhaustive cross-check on both conventions
    RngStream rng(202, 0);
    for (int trial = 0; trial < 6; ++trial) {
        std::map<int, double> m;
        double total = 0.0;
        for (int k = 0; k <= 3; ++k) {
            const double w = 0.1 + rng.next_u01();
            m[k] = w;
            total += w;
        }
        for (auto& [k, p] : m) p /= total;
        const SeasonalModel model{1, {IntegerPmf(m)}};
        for (const auto conv : {RuinConvention::Weak, RuinConvention::Strict}) {
            const FiniteHorizonRuin dp = dp_finite_horizon(model, 1, 8, conv);
            for (int t = 1; t <= 8; ++t)
                CHECK(dp.psi_by_t[static_cast<std::size_t>(t - 1)] ==
                      doctest::Approx(enumerate_ruin(model, 1, t, conv)).epsilon(1e-12));
        }
    }

    // seasonal enumeration, N = 2
    const SeasonalModel seasonal{
        1, {IntegerPmf({{0, 0.6}, {1, 0.4}}), IntegerPmf({{0, 0.3}, {2, 0.7}})}};
    const FiniteHorizonRuin dp = dp_finite_horizon(seasonal, 0, 9);
    for (int t = 1; t <= 9; ++t)
        CHECK(dp.psi_by_t[static_cast<std::size_t>(t - 1)] ==
              doctest::Approx(enumerate_ruin(seasonal, 0, t, RuinConvention::Weak))
                  .epsilon(1e-12));

    // psi(u, T) converges to 1 - phi(u) under the strict NPC
    const SurvivalTable table = survival_pgf_coefficients(pmf_55_45(), 1, 3);
    const SeasonalModel model{1, {pmf_55_45()}};
    for (int u : {0, 1, 3}) {
        const FiniteHorizonRuin long_dp = dp_finite_horizon(model, u, 10'000);
        CHECK(std::abs(long_dp.psi() - (1.0 - table.phi[static_cast<std::size_t>(u)])) < 1e-3);
        // nondecreasing in T
        for (std::size_t t = 1; t < long_dp.psi_by_t.size(); ++t)
            REQUIRE(long_dp.psi_by_t[t] >= long_dp.psi_by_t[t - 1] - 1e-15);
    }

    // monotone coupling: the perturbed marginal is dominated at every horizon
    const CouplingPmf coupling = perturb_discrete(pmf_half(), 2, 0, 0.3);
    const SeasonalModel starred{1, {coupling.x_star_marginal()}};
    const FiniteHorizonRuin dp_base = dp_finite_horizon(half, 0, 400);
    const FiniteHorizonRuin dp_star = dp_finite_horizon(starred, 0, 400);
    for (std::size_t t = 0; t < 400; ++t)
        REQUIRE(dp_star.psi_by_t[t] <= dp_base.psi_by_t[t] + 1e-14);

    // state budget reporting
    const FiniteHorizonRuin capped = dp_finite_horizon(half, 0, 1'000'000, RuinConvention::Weak,
                                                       /*max_states=*/5000);
    CHECK(capped.truncated);
    CHECK(capped.achieved_horizon < 1'000'000);
    CHECK(capped.achieved_horizon > 0);
}

TEST_CASE("strict convention shift") {
    const SurvivalTable weak = survival_pgf_coefficients(pmf_55_45(), 1, 12);
    const SurvivalTable strict = strict_from_weak(weak, pmf_55_45(), 1);
    // phi_hat(0) = h_0 phi(0) = 1 - EX for the c = 1 neutral-adjacent identity
    CHECK(strict.phi[0] == doctest::Approx(0.1).epsilon(1e-13));
    for (std::size_t u = 1; u < strict.phi.size(); ++u)
        CHECK(strict.phi[u] == weak.phi[u - 1]);

    // and the DP oracle sees the same identity at finite horizons:
    // strict ruin from u+1 is weak ruin from u, path by path
    const SeasonalModel model{1, {pmf_55_45()}};
    const FiniteHorizonRuin weak_dp = dp_finite_horizon(model, 2, 50, RuinConvention::Weak);
    const FiniteHorizonRuin strict_dp = dp_finite_horizon(model, 3, 50, RuinConvention::Strict);
    for (std::size_t t = 0; t < 50; ++t)
        CHECK(weak_dp.psi_by_t[t] == doctest::Approx(strict_dp.psi_by_t[t]).epsilon(1e-14));
}

TEST_CASE("seasonal recurrence extension") {
    // N = 1 reduction reproduces the plain recursion
    {
        const SeasonalModel model{1, {pmf_55_45()}};
        const double phi0 = 2.0 / 11.0;
        const SeasonalExtension ext = seasonal_recurrence_step(model, {phi0}, 20);
        const SurvivalTable rec = survival_recursion(pmf_55_45(), phi0, 20);
        for (std::size_t u = 0; u < rec.phi.size(); ++u)
            CHECK(ext.table.phi[u] == doctest::Approx(rec.phi[u]).epsilon(1e-14));
        CHECK(ext.max_residual < 1e-12);
    }
    // neutral model with an all-zero block stays identically zero
    {
        const SeasonalModel model{1, {pmf_half()}};
        const SeasonalExtension ext = seasonal_recurrence_step(model, {0.0}, 15);
        for (double v : ext.table.phi) CHECK(v == 0.0);
        CHECK(ext.max_residual == 0.0);
    }
    // N = 2 with a DP-seeded block: the balance relation holds after extension
    {
        const SeasonalModel model{
            1, {IntegerPmf::point_mass(0), IntegerPmf({{0, 0.55}, {4, 0.45}})}};
        std::vector<double> block;
        for (int u = 0; u < 2; ++u)
            block.push_back(1.0 - dp_finite_horizon(model, u, 6000).psi());
        const SeasonalExtension ext = seasonal_recurrence_step(model, block, 8);
        CHECK(ext.max_residual < 1e-8);
        for (int u = 2; u <= 8; ++u) {
            const double dp_phi = 1.0 - dp_finite_horizon(model, u, 6000).psi();
            CHECK(ext.table.phi[static_cast<std::size_t>(u)] ==
                  doctest::Approx(dp_phi).epsilon(1e-5));
        }
    }
    // a season that can never produce zero claims cannot be inverted
    {
        const SeasonalModel model{1, {IntegerPmf::point_mass(1), pmf_half()}};
        try {
            seasonal_recurrence_step(model, {0.1, 0.1}, 6);
            FAIL("expected CannotInvert");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::cannot_invert);
        }
    }
    // a corrupted block breaks the balance relation
    {
        const SeasonalModel model{
            1, {IntegerPmf::point_mass(0), IntegerPmf({{0, 0.55}, {4, 0.45}})}};
        try {
            seasonal_recurrence_step(model, {0.9, 0.1}, 8);
            FAIL("expected InconsistentBlock");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::inconsistent_block);
        }
    }
}

TEST_CASE("seasonal pgf verifier") {
    const IntegerPmf pmf = pmf_55_45();
    const SeasonalModel model{1, {pmf}};
    const SurvivalTable table = survival_pgf_coefficients(pmf, 1, 80);
    // for N = 1, c = 1 the numerator collapses to m_0 F(0) with m_0 = phi(0)
    const SeasonalPgfReport good = seasonal_pgf_verify(model, {table.phi[0]}, table);
    CHECK(good.max_residual < 1e-10);

    // zero m-vector leaves the residual equal to |Phi (G - s^c)|
    const SeasonalPgfReport zero = seasonal_pgf_verify(model, {0.0}, table);
    for (std::size_t i = 0; i < zero.samples.size(); ++i) {
        const std::complex<double> s = zero.samples[i].s;
        std::complex<double> big_phi = 0.0;
        for (std::size_t u = table.phi.size(); u-- > 0;) big_phi = big_phi * s + table.phi[u];
        const double expect = std::abs(big_phi * (pmf.pgf(s) - s));
        CHECK(zero.samples[i].residual == doctest::Approx(expect).epsilon(1e-12));
    }

    // neutral model, all-zero table: the residual is exactly |u^T v|
    const SeasonalModel neutral{1, {pmf_half()}};
    SurvivalTable zeros{RuinConvention::Weak, std::vector<double>(40, 0.0)};
    const SeasonalPgfReport diag = seasonal_pgf_verify(neutral, {0.25}, zeros);
    for (const auto& sample : diag.samples)
        CHECK(sample.residual == doctest::Approx(0.25 * 0.5).epsilon(1e-12));  // |m_0 h_0|
}
