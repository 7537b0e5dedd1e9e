#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "ruinlab/andersen.hpp"
#include "ruinlab/errors.hpp"

using namespace ruinlab;

namespace {

AndersenModel neutral_exp_exp() {
    return {1.0, ContinuousClaim::exponential_mean(1.0), ContinuousClaim::exponential_mean(1.0)};
}

AndersenModel subcritical_exp_exp() {
    return {1.25, ContinuousClaim::exponential_mean(1.0), ContinuousClaim::exponential_mean(1.0)};
}

}  // namespace

TEST_CASE("spitzer estimates for the symmetric neutral walk") {
    // X - theta is symmetric and continuous, so P(S_n > 0) = 1/2 for every n
    const std::vector<std::int64_t> ns{1, 10, 100, 1000, 2000};
    const SpitzerPartial sp = spitzer_estimate(neutral_exp_exp(), ns, {20'000, 0, 31, 2});
    REQUIRE(sp.n_list == ns);
    for (std::size_t i = 0; i < ns.size(); ++i) {
        CHECK(std::abs(sp.p_hat[i] - 0.5) <= 3.5 * sp.p_stderr[i]);
        CHECK(sp.p_stderr[i] == doctest::Approx(std::sqrt(0.25 / 20'000.0)).epsilon(0.1));
    }
    // A_N tracks the half harmonic sum (ln N + gamma)/2
    const double harmonic = (std::log(2000.0) + 0.5772156649) / 2.0;
    CHECK(sp.a_final == doctest::Approx(harmonic).epsilon(0.05));
    CHECK(sp.psi0_lower == doctest::Approx(-std::expm1(-sp.a_final)).epsilon(1e-14));
    CHECK(sp.a_stderr > 0.0);
    CHECK(sp.a_stderr < 0.1);

    // A_n is nondecreasing along the report points
    for (std::size_t i = 1; i < sp.a_at_n.size(); ++i) REQUIRE(sp.a_at_n[i] >= sp.a_at_n[i - 1]);
}

TEST_CASE("spitzer sum converges under the strict NPC") {
    const SpitzerPartial sp =
        spitzer_estimate(subcritical_exp_exp(), {1000, 2000}, {20'000, 0, 32, 2});
    CHECK(sp.a_at_n[1] - sp.a_at_n[0] < 0.02);
    // the limit is -ln(1 - psi0) = -ln(0.2) for exponential claims
    CHECK(sp.a_final == doctest::Approx(-std::log(0.2)).epsilon(0.03));
}

TEST_CASE("psi0 interval") {
    SpitzerPartial sp;
    sp.a_final = 0.0;
    const Psi0Interval zero = psi0_andersen(sp);
    CHECK(zero.lower == 0.0);
    CHECK(zero.upper == 1.0);
    sp.a_final = 4.8938;
    CHECK(psi0_andersen(sp).lower == doctest::Approx(0.99251).epsilon(1e-4));
}

TEST_CASE("ladder sampling and censoring control") {
    const AndersenModel model = subcritical_exp_exp();
    const SpitzerPartial sp = spitzer_estimate(model, {2000}, {20'000, 0, 33, 2});
    const LadderSample ladder = ladder_sample(model, sp, {20'000, 2000, 34, 2});
    CHECK(ladder.paths == 20'000);
    for (double h : ladder.heights) REQUIRE(h > 0.0);
    // about psi0 = 0.8 of the paths ladder
    CHECK(ladder.raw_ladder_fraction() == doctest::Approx(0.8).epsilon(0.02));
    // three psi0 estimators agree: ladder censoring, 1 - exp(-A_N), direct MC
    CHECK(ladder.raw_ladder_fraction() ==
          doctest::Approx(-std::expm1(-sp.a_final)).epsilon(0.02));
    const MCEstimate direct = simulate_ruin(model, 0.0, {20'000, 2000, 44, 2});
    CHECK(direct.p_hat == doctest::Approx(ladder.raw_ladder_fraction()).epsilon(0.02));

    // a horizon of 2 censors far more paths than exp(-A) explains
    try {
        ladder_sample(model, sp, {20'000, 2, 35, 2});
        FAIL("expected CensoringTooHigh");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::censoring_too_high);
    }
}

TEST_CASE("ladder heights reproduce the integrated tail in the classical case") {
    // theta ~ Exp(1): the ladder-height law is F_I, here Exp(1) itself
    const AndersenModel model = subcritical_exp_exp();
    const SpitzerPartial sp = spitzer_estimate(model, {1500}, {15'000, 0, 36, 2});
    const LadderSample ladder = ladder_sample(model, sp, {30'000, 1500, 37, 2});

    std::vector<double> sorted = ladder.heights;
    std::sort(sorted.begin(), sorted.end());
    const double scale = -std::expm1(-sp.a_final);
    double ks = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double h_emp_hi = (i + 1.0) / static_cast<double>(ladder.paths) / scale;
        const double h_emp_lo = static_cast<double>(i) / static_cast<double>(ladder.paths) / scale;
        const double f_i = 1.0 - std::exp(-sorted[i]);
        ks = std::max(ks, std::abs(std::min(h_emp_hi, 1.0) - f_i));
        ks = std::max(ks, std::abs(std::min(h_emp_lo, 1.0) - f_i));
    }
    CHECK(ks < 0.02);
}

TEST_CASE("andersen survival matches the classical series") {
    const AndersenModel model = subcritical_exp_exp();
    const SpitzerPartial sp = spitzer_estimate(model, {2000}, {40'000, 0, 38, 2});
    const LadderSample ladder = ladder_sample(model, sp, {40'000, 2000, 39, 2});
    const AndersenPK pk = pk_andersen_survival(model, ladder, sp, 5.0, 1e-6);

    // phi(0) = exp(-A) by construction of the geometric weight
    CHECK(pk.phi_at(0.0) == doctest::Approx(std::exp(-sp.a_final)).epsilon(1e-12));
    CHECK(pk.q == doctest::Approx(-std::expm1(-sp.a_final)).epsilon(1e-14));

    const ClassicalModel classical{1.0, 1.25, ContinuousClaim::exponential_mean(1.0)};
    const PKResult reference = pk_survival(classical, 5.0, 1e-6);
    for (double u : {0.0, 1.0, 2.0, 3.0, 5.0})
        CHECK(pk.phi_at(u) == doctest::Approx(reference.phi_at(u)).epsilon(0.02));

    for (std::size_t k = 1; k < pk.phi.size(); ++k) {
        REQUIRE(pk.phi[k] >= pk.phi[k - 1] - 1e-12);
        REQUIRE(pk.phi[k] <= 1.0);
        REQUIRE(pk.phi_lower[k] <= pk.phi[k]);
        REQUIRE(pk.phi[k] <= pk.phi_upper[k]);
    }

    try {
        pk_andersen_survival(neutral_exp_exp(), ladder, sp, 2.0, 1e-6);
        FAIL("expected NPCViolation");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::npc_violation);
    }
}

TEST_CASE("degenerate renewal model never ruins") {
    const AndersenModel model{1.0, ContinuousClaim::shifted_discrete({{1.0, 1.0}}),
                              ContinuousClaim::shifted_discrete({{1.0, 1.0}})};
    CHECK(model.degenerate_certain());
    CHECK(model.neutral());
    const MCEstimate est = simulate_ruin(model, 0.0, {5000, 200, 40, 1});
    CHECK(est.p_hat == 0.0);
    // and the Spitzer sum stays at zero: psi0_lower = 0, as the excluded case demands
    const SpitzerPartial sp = spitzer_estimate(model, {50}, {2000, 0, 41, 1});
    CHECK(sp.a_final == 0.0);
    CHECK(sp.psi0_lower == 0.0);
}

TEST_CASE("epsilon sweep drives andersen survival to zero") {
    // neutral base; perturbing the claim restores the NPC and phi(u) ~ eps
    const ContinuousClaim base_claim = ContinuousClaim::exponential_mean(1.0);
    double prev_phi1 = 1.0;
    for (double eps : {0.4, 0.2, 0.1}) {
        const AndersenModel model{1.0, perturb_continuous(base_claim, std::log(2.0), eps),
                                  ContinuousClaim::exponential_mean(1.0)};
        const SpitzerPartial sp = spitzer_estimate(model, {4000}, {25'000, 0, 42, 2});
        const LadderSample ladder = ladder_sample(model, sp, {25'000, 4000, 43, 2});
        const AndersenPK pk = pk_andersen_survival(model, ladder, sp, 1.0, 1e-6);
        const double phi1 = pk.phi_at(1.0);
        CHECK(phi1 < prev_phi1);
        prev_phi1 = phi1;
    }
    CHECK(prev_phi1 < 0.12);
}
