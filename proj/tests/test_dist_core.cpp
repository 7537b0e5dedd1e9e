#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "ruinlab/continuous_claim.hpp"
#include "ruinlab/coupling.hpp"
#include "ruinlab/errors.hpp"
#include "ruinlab/integer_pmf.hpp"
#include "ruinlab/rng.hpp"

using namespace ruinlab;

namespace {

IntegerPmf pmf_55_45() { return IntegerPmf({{0, 0.55}, {2, 0.45}}); }
IntegerPmf pmf_half() { return IntegerPmf({{0, 0.5}, {2, 0.5}}); }

// fixed-seed random pmf on {0..max_k} with all atoms positive
IntegerPmf random_pmf(RngStream& rng, int max_k) {
    std::map<int, double> m;
    double total = 0.0;
    for (int k = 0; k <= max_k; ++k) {
        const double w = 0.05 + rng.next_u01();
        m[k] = w;
        total += w;
    }
    for (auto& [k, p] : m) p /= total;
    return IntegerPmf(m);
}

}  // namespace

TEST_CASE("pmf mean") {
    CHECK(pmf_half().mean() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(IntegerPmf({{1, 1.0}}).mean() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(pmf_55_45().mean() == doctest::Approx(0.9).epsilon(1e-14));
}

TEST_CASE("pmf validation") {
    CHECK_THROWS_AS(IntegerPmf({{0, -0.1}, {2, 1.1}}), Error);
    CHECK_THROWS_AS(IntegerPmf({{0, 0.5}, {2, 0.4}}), Error);  // mass 0.9
    CHECK_THROWS_AS(IntegerPmf({{-1, 1.0}}), Error);
    // residual within 1e-12 folds into the largest atom, keeping the sum 1
    const IntegerPmf pmf({{0, 0.5}, {2, 0.5 - 5e-13}});
    double sum = 0.0;
    for (double p : pmf.dense()) sum += p;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("pgf values and domain") {
    const IntegerPmf pmf = pmf_half();
    CHECK(pmf.pgf(1.0).real() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(pmf.pgf(0.0).real() == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(pmf.pgf(-1.0).real() == doctest::Approx(1.0).epsilon(1e-15));  // 0.5 + 0.5 (-1)^2
    CHECK_THROWS_AS(pmf.pgf(1.0 + 1e-6), Error);

    // |G(s)| <= 1 on the closed unit disk, G(1) = 1 exactly
    RngStream rng(101, 0);
    for (int trial = 0; trial < 50; ++trial) {
        const IntegerPmf p = random_pmf(rng, 1 + static_cast<int>(rng.next_u01() * 5));
        CHECK(p.pgf(1.0).real() == doctest::Approx(1.0).epsilon(1e-13));
        for (int j = 0; j < 20; ++j) {
            const double r = rng.next_u01();
            const double th = 2.0 * 3.14159265358979323846 * rng.next_u01();
            const std::complex<double> s{r * std::cos(th), r * std::sin(th)};
            CHECK(std::abs(p.pgf(s)) <= 1.0 + 1e-12);
        }
    }
}

TEST_CASE("convolution") {
    const IntegerPmf delta0 = IntegerPmf::point_mass(0);
    const IntegerPmf p = pmf_half();
    const IntegerPmf self = convolve(p, p);
    CHECK(convolve(delta0, p).dense() == p.dense());
    CHECK(self.prob(0) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(self.prob(2) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(self.prob(4) == doctest::Approx(0.25).epsilon(1e-14));

    RngStream rng(102, 0);
    for (int trial = 0; trial < 20; ++trial) {
        const IntegerPmf a = random_pmf(rng, 3), b = random_pmf(rng, 4), c = random_pmf(rng, 2);
        CHECK(convolve(a, b).mean() ==
              doctest::Approx(a.mean() + b.mean()).epsilon(1e-12));
        const IntegerPmf ab_c = convolve(convolve(a, b), c);
        const IntegerPmf a_bc = convolve(a, convolve(b, c));
        const IntegerPmf ba = convolve(b, a);
        REQUIRE(ab_c.max_value() == a_bc.max_value());
        for (int k = 0; k <= ab_c.max_value(); ++k)
            CHECK(ab_c.prob(k) == doctest::Approx(a_bc.prob(k)).epsilon(1e-12));
        for (int k = 0; k <= ba.max_value(); ++k)
            CHECK(ba.prob(k) == doctest::Approx(convolve(a, b).prob(k)).epsilon(1e-12));
    }
}

TEST_CASE("discrete perturbation: mass moves off the diagonal") {
    const CouplingPmf coupling = perturb_discrete(pmf_half(), 2, 0, 0.1);
    std::map<std::pair<int, int>, double> joint;
    for (const auto& e : coupling.entries()) joint[{e.x_star, e.x}] += e.p;
    CHECK(joint[{0, 0}] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(joint[{2, 2}] == doctest::Approx(0.45).epsilon(1e-14));
    CHECK(joint[{0, 2}] == doctest::Approx(0.05).epsilon(1e-14));
    CHECK(coupling.mass_above_diagonal() == 0.0);

    const IntegerPmf star = coupling.x_star_marginal();
    CHECK(star.prob(0) == doctest::Approx(0.55).epsilon(1e-14));
    CHECK(star.prob(2) == doctest::Approx(0.45).epsilon(1e-14));
    CHECK(star.mean() == doctest::Approx(0.9).epsilon(1e-13));
    CHECK(star.mean() ==
          doctest::Approx(coupling.x_marginal().mean() - coupling.epsilon()).epsilon(1e-13));

    // the x-marginal reproduces the source law exactly
    const IntegerPmf source = pmf_half();
    const IntegerPmf marg = coupling.x_marginal();
    for (int k = 0; k <= source.max_value(); ++k) CHECK(marg.prob(k) == source.prob(k));
}

TEST_CASE("discrete perturbation: general site") {
    const double h0 = 0.3, h1 = 0.5, h3 = 0.2;
    const CouplingPmf coupling =
        perturb_discrete(IntegerPmf({{0, h0}, {1, h1}, {3, h3}}), 3, 0, 1.5 * h3);
    const IntegerPmf star = coupling.x_star_marginal();
    CHECK(star.prob(0) == doctest::Approx(h0 + 0.5 * h3).epsilon(1e-14));
    CHECK(star.prob(1) == doctest::Approx(h1).epsilon(1e-14));
    CHECK(star.prob(3) == doctest::Approx(0.5 * h3).epsilon(1e-14));
}

TEST_CASE("discrete perturbation: rejects bad sites and epsilons") {
    CHECK_THROWS_AS(perturb_discrete(pmf_half(), 2, 0, 1.0), Error);  // eps = (b-s) h_b
    CHECK_THROWS_AS(perturb_discrete(pmf_half(), 2, 0, 0.0), Error);
    CHECK_THROWS_AS(perturb_discrete(pmf_half(), 1, 0, 0.1), Error);  // h_1 = 0
    CHECK_THROWS_AS(perturb_discrete(pmf_half(), 0, 2, 0.1), Error);  // s >= b
    try {
        perturb_discrete(pmf_half(), 1, 0, 0.1);
        FAIL("expected EmptySite");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::empty_site);
    }
    try {
        perturb_discrete(pmf_half(), 2, 0, 2.0);
        FAIL("expected InvalidPerturbation");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::invalid_perturbation);
    }
}

TEST_CASE("coupled partial sums never cross") {
    const CouplingPmf coupling = perturb_discrete(pmf_55_45(), 2, 0, 0.2);
    RngStream rng(103, 0);
    for (int path = 0; path < 5000; ++path) {
        long sum_star = 0, sum_base = 0;
        for (int n = 0; n < 30; ++n) {
            const auto [xs, xb] = coupling.sample(rng.next_u01());
            CHECK(xs <= xb);
            sum_star += xs;
            sum_base += xb;
            REQUIRE(sum_star <= sum_base);
        }
    }
}

TEST_CASE("choose_site") {
    const PerturbSite a = choose_site(pmf_half(), 1);
    CHECK(a.from == 2);
    CHECK(a.to == 0);
    const PerturbSite b =
        choose_site(IntegerPmf({{0, 0.25}, {1, 0.25}, {2, 0.25}, {3, 0.25}}), 2);
    CHECK(b.from == 2);
    CHECK(b.to == 0);
    try {
        choose_site(IntegerPmf({{1, 1.0}}), 1);
        FAIL("expected DegenerateModel");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::degenerate_model);
    }
}

TEST_CASE("continuous claims: mean equals the integral of the tail") {
    const std::vector<ContinuousClaim> claims = {
        ContinuousClaim::exponential_mean(1.0),
        ContinuousClaim::uniform(0.5, 2.5),
        ContinuousClaim::shifted_discrete({{0.5, 0.25}, {1.0, 0.5}, {3.0, 0.25}}),
        ContinuousClaim::tabulated_tail({{0.0, 1.0}, {1.0, 0.4}, {2.0, 0.1}, {4.0, 0.0}}),
    };
    for (const auto& claim : claims) {
        const double far = claim.family() == ClaimFamily::Exponential ? 22.0 : 5.0;
        const int n = 2'000'000;
        const double h = far / n;
        // certified Riemann bracket: the tail is nonincreasing, so the
        // left/right sums bound the integral on any family, jumps included
        double upper_sum = 0.0, lower_sum = 0.0, trapezoid = 0.0;
        for (int k = 0; k < n; ++k) {
            const double left = claim.tail(h * k), right = claim.tail(h * (k + 1));
            upper_sum += left;
            lower_sum += right;
            trapezoid += 0.5 * (left + right);
        }
        upper_sum *= h;
        lower_sum *= h;
        trapezoid *= h;
        REQUIRE(claim.mean() >= lower_sum - 1e-10);
        REQUIRE(claim.mean() <= upper_sum + 1e-10);
        REQUIRE(claim.tail_integral(far) >= lower_sum - 1e-10);
        REQUIRE(claim.tail_integral(far) <= upper_sum + 1e-10);
        // away from jumps the trapezoid rule converges to the mean
        if (claim.family() != ClaimFamily::ShiftedDiscrete) {
            CHECK(claim.mean() == doctest::Approx(trapezoid).epsilon(1e-8));
            CHECK(claim.tail_integral(far) == doctest::Approx(trapezoid).epsilon(1e-8));
        }

        // tail shape
        CHECK(claim.tail(-1e-9) == 1.0);
        CHECK(claim.tail(1e9) == 0.0);
        double prev = 1.0 + 1e-15;
        for (double x = 0.0; x <= far; x += far / 997.0) {
            CHECK(claim.tail(x) <= prev + 1e-15);
            prev = claim.tail(x);
        }
    }
}

TEST_CASE("continuous claims: quantile inverts the cdf") {
    RngStream rng(104, 0);
    const auto claims = {ContinuousClaim::exponential_mean(2.0),
                         ContinuousClaim::uniform(1.0, 3.0),
                         ContinuousClaim::tabulated_tail({{0.0, 0.8}, {2.0, 0.3}, {5.0, 0.0}})};
    for (const auto& claim : claims) {
        for (int i = 0; i < 2000; ++i) {
            const double u = rng.next_u01();
            const double x = claim.quantile(u);
            // P(X <= x) >= u and P(X < x - h) <= u
            CHECK(1.0 - claim.tail(x) >= u - 1e-9);
            CHECK(1.0 - claim.tail(x - 1e-6) <= u + 1e-3);
        }
    }
}

TEST_CASE("laplace transforms") {
    CHECK(*ContinuousClaim::exponential_mean(1.0).laplace(1.0) ==
          doctest::Approx(0.5).epsilon(1e-14));
    CHECK(*ContinuousClaim::uniform(0.0, 2.0).laplace(0.0) == doctest::Approx(1.0));
    // numeric check against quadrature for the tabulated family
    const auto claim = ContinuousClaim::tabulated_tail({{0.0, 0.9}, {1.0, 0.4}, {3.0, 0.0}});
    const double t = 0.7;
    double quad = 0.1;  // atom at zero
    const int n = 400000;
    for (int k = 0; k < n; ++k) {
        const double x0 = 3.0 * k / n, x1 = 3.0 * (k + 1) / n;
        const double dens = (claim.tail(x0) - claim.tail(x1)) / (x1 - x0);
        quad += dens * 0.5 * (std::exp(-t * x0) + std::exp(-t * x1)) * (x1 - x0);
    }
    CHECK(*claim.laplace(t) == doctest::Approx(quad).epsilon(1e-7));
}

TEST_CASE("continuous perturbation: mean drop and coupling") {
    const auto exp1 = ContinuousClaim::exponential_mean(1.0);
    const double a = std::log(2.0);
    const PerturbedClaim star = perturb_continuous(exp1, a, 0.2);
    CHECK(star.mean() == doctest::Approx(1.0 - 0.2 * 0.5).epsilon(1e-14));
    CHECK(perturb_continuous(exp1, a, 1e-9).mean() == doctest::Approx(1.0).epsilon(1e-8));

    RngStream rng(105, 0);
    for (int i = 0; i < 200000; ++i) {
        const auto [xs, xb] = star.coupled_sample(rng);
        REQUIRE(xs <= xb);
        if (xb <= a) REQUIRE(xs == xb);
    }

    try {
        perturb_continuous(ContinuousClaim::uniform(0.0, 1.0), 2.0, 0.1);
        FAIL("expected EmptyTail");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::empty_tail);
    }
    try {
        perturb_continuous(exp1, 0.5, 0.7);
        FAIL("expected InvalidPerturbation");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::invalid_perturbation);
    }
}

TEST_CASE("perturbed tail matches the coupled sampler (KS)") {
    const PerturbedClaim star =
        perturb_continuous(ContinuousClaim::exponential_mean(1.0), std::log(2.0), 0.2);
    constexpr int n = 1'000'000;
    std::vector<double> draws;
    draws.reserve(n);
    RngStream rng(106, 0);
    for (int i = 0; i < n; ++i) draws.push_back(star.coupled_sample(rng).first);
    std::sort(draws.begin(), draws.end());
    double ks = 0.0;
    for (int i = 0; i < n; ++i) {
        const double f = 1.0 - star.tail(draws[static_cast<std::size_t>(i)]);
        ks = std::max(ks, std::abs(f - (i + 1.0) / n));
        ks = std::max(ks, std::abs(f - static_cast<double>(i) / n));
    }
    CHECK(ks < 0.005);

    // mean(X*) from the sample within a generous CI
    double sum = 0.0;
    for (double d : draws) sum += d;
    CHECK(sum / n == doctest::Approx(star.mean()).epsilon(5e-3));

    // tail integral consistent with the piecewise tail
    for (double x : {0.1, 0.4, 0.6, 0.9, 2.0}) {
        double quad = 0.0;
        const int m = 20000;
        for (int k = 0; k < m; ++k) quad += star.tail(x * (k + 0.5) / m) * (x / m);
        CHECK(star.tail_integral(x) == doctest::Approx(quad).epsilon(1e-6));
    }

    // integrated-tail op on the perturbed descriptor
    CHECK(integrated_tail_cdf(star, 1.0, 1e-4) ==
          doctest::Approx(star.tail_integral(1.0) / star.mean()).epsilon(1e-6));
}

TEST_CASE("integrated tail cdf") {
    const auto exp1 = ContinuousClaim::exponential_mean(1.0);
    // for exponential claims F_I = F
    CHECK(integrated_tail_cdf(exp1, 1.0, 1e-4) ==
          doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-7));
    CHECK(integrated_tail_cdf(exp1, 0.0, 1e-3) == 0.0);
    CHECK(integrated_tail_cdf(exp1, 60.0, 1e-2) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK_THROWS_AS(integrated_tail_cdf(exp1, 1.0, 0.0), Error);

    double prev = 0.0;
    for (double u = 0.0; u <= 6.0; u += 0.25) {
        const double v = integrated_tail_cdf(exp1, u, 1e-3);
        CHECK(v >= prev - 1e-12);
        CHECK(v <= 1.0);
        prev = v;
    }
}

TEST_CASE("truncation bound") {
    const TruncationBound tb = truncation_bound(1.0, 1.0, 0.5);
    CHECK(tb.bound == doctest::Approx(std::exp(1.0)).epsilon(1e-12));
    CHECK(truncation_bound(0.0, 1.0, 0.5).bound == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(truncation_bound(0.0, 1.0, 1.0 - 1e-9).bound > 1e8);
    try {
        truncation_bound(1.0, 1.0, 1.0);
        FAIL("expected DegenerateAtZero");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::degenerate_at_zero);
    }

    // renewal oracle: for eta ~ Exp(1), sum_n P(eta_1+..+eta_n <= 1) is the
    // expected number of unit-rate Poisson points in [0,1], namely 1
    double exact = 0.0;
    {
        double poisson_cdf = 0.0, term = std::exp(-1.0);
        for (int n = 1; n <= 200; ++n) {
            poisson_cdf += term;           // P(N = n-1)
            exact += 1.0 - poisson_cdf;    // P(N >= n) = P(Gamma(n) <= 1)
            term /= static_cast<double>(n);
        }
    }
    CHECK(exact == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(tb.bound >= exact);

    // and the bound dominates a Monte Carlo partial sum at any level
    RngStream rng(107, 0);
    double mc_sum = 0.0;
    const int paths = 20000, n_max = 60;
    for (int p = 0; p < paths; ++p) {
        double s = 0.0;
        for (int n = 1; n <= n_max; ++n) {
            s += rng.next_exp(1.0);
            if (s <= 1.0)
                mc_sum += 1.0;
            else
                break;  // nonnegative increments keep the sum above 1 forever
        }
    }
    CHECK(tb.bound >= mc_sum / paths);
}
