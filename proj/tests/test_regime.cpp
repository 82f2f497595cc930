#include <cmath>
#include <random>

#include "doctest.h"
#include "evfp/regime.hpp"
#include "quadrature.hpp"

using namespace evfp;

TEST_CASE("erfc basics and reflection") {
    CHECK(erfc(0.0) == doctest::Approx(1.0).epsilon(1e-15));
    for (double x : {0.3, 1.7, 4.0})
        CHECK(erfc(x) + erfc(-x) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(erfc(1.0) == doctest::Approx(0.15729920705028513).epsilon(1e-13));
}

TEST_CASE("erfc matches the quadrature oracle to 1e-12 on [-6, 6]") {
    for (int i = 0; i <= 20; ++i) {
        const double x = -6.0 + 12.0 * i / 20.0;
        CHECK(std::abs(erfc(x) - oracle::erfc_by_quadrature(x)) < 1e-12);
    }
}

TEST_CASE("erfcx is finite, accurate, consistent across its branches") {
    // identity erfcx(x) e^{-x^2} = erfc(x) in the moderate range
    for (double x : {0.5, 2.0, 5.0, 9.0})
        CHECK(erfcx(x) * std::exp(-x * x) == doctest::Approx(erfc(x)).epsilon(1e-12));
    // continuity across the series switch at x = 10
    CHECK(erfcx(9.9999) == doctest::Approx(erfcx(10.0001)).epsilon(1e-10));
    // large argument: asymptote 1/(x sqrt(pi))
    const double x = 1.59e4;
    CHECK(std::isfinite(erfcx(x)));
    CHECK(erfcx(x) == doctest::Approx(1.0 / (x * std::sqrt(M_PI))).epsilon(1e-4));
    // negative side grows like 2 e^{x^2}
    CHECK(erfcx(-2.0) == doctest::Approx(2.0 * std::exp(4.0) - erfcx(2.0)).epsilon(1e-13));
}

TEST_CASE("blowup threshold formulas") {
    CHECK(blowup_threshold(0.0, 1.0, 1.0, 1.0, 0) == 0.0);
    CHECK(blowup_threshold(0.1, 1.0, 1.0, 1.0, 0) == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(blowup_threshold(0.1, 1.0, 1.0, 1.0, -1) == doctest::Approx(0.1).epsilon(1e-15));
    // closed universe: frozen from the erfc oracle evaluation
    CHECK(blowup_threshold(1.0, 1.0, 1.0, 1.0, 1) ==
          doctest::Approx(0.86658365429647790).epsilon(1e-12));
}

TEST_CASE("blowup threshold scaling in H0 and a0^3 (k <= 0)") {
    const double base = blowup_threshold(0.7, 2.0, 1.3, 1.1, 0);
    for (double lam : {2.0, 10.0}) {
        CHECK(blowup_threshold(0.7, 2.0, lam * 1.3, 1.1, 0) ==
              doctest::Approx(base / lam).epsilon(1e-13));
        CHECK(blowup_threshold(0.7, 2.0, 1.3, std::cbrt(lam) * 1.1, 0) ==
              doctest::Approx(base / lam).epsilon(1e-13));
    }
}

TEST_CASE("erfcx keeps the closed-universe threshold finite at H0 N = 1e4") {
    const double thr = blowup_threshold(1.0, 1.0, 1e4, 1.0, 1);
    CHECK(std::isfinite(thr));
    CHECK(thr > 0.0);
    // the naive erfc * e^{x^2} route would be 0 * inf here
    const double x = 9.0 * 1e4 / (4.0 * std::sqrt(2.0));
    CHECK(thr == doctest::Approx(9.0 / 4.0 * std::sqrt(M_PI / 2.0) / (x * std::sqrt(M_PI)))
                     .epsilon(1e-3));
}

TEST_CASE("classify: the three flat-space textbook cases") {
    // phi0 below the diffusion threshold
    auto v1 = classify(1.0, 2.95, 1.0, 1.0, 0.05, 0.1, 0);
    CHECK(v1.verdict == Verdict::BlowupGuaranteed);
    REQUIRE(v1.fired.size() >= 1);
    CHECK(v1.fired[0].name == "blowup-threshold-flat");
    CHECK(v1.fired[0].threshold == doctest::Approx(0.1));

    // comfortably above three times it
    auto v2 = classify(1.0, 2.5, 1.0, 1.0, 0.5, 0.1, 0);
    CHECK(v2.verdict == Verdict::GlobalGuaranteed);
    REQUIRE(v2.fired.size() >= 1);
    CHECK(v2.fired[0].name == "global-diffusion-margin");

    // the gap between the two: undetermined, nothing fires
    auto v3 = classify(1.0, 2.8, 1.0, 1.0, 0.2, 0.1, 0);
    CHECK(v3.verdict == Verdict::Undetermined);
    CHECK(v3.fired.empty());
    // the curvature-energy threshold is ~0.587 here, indeed not met
    CHECK(9.0 * std::pow(0.1 / 6.0, 2.0 / 3.0) == doctest::Approx(0.58698).epsilon(1e-4));
}

TEST_CASE("classify: closed-universe criteria") {
    // G3 fires with k = 1 (a0 = 3, phi0 above 3[k+ + 3(sigma N/6)^(2/3)]/a0^2)
    {
        const double a0 = 3.0, H0 = 1.0, phi0 = 0.5, sigma = 0.1, N = 1.0;
        const double rho0 = 3.0 * (H0 * H0 + 1.0 / (a0 * a0)) - phi0;
        auto v = classify(N, rho0, a0, H0, phi0, sigma, 1);
        CHECK(v.verdict == Verdict::GlobalGuaranteed);
        bool has_g3 = false;
        for (const auto& c : v.fired) has_g3 |= c.name == "global-curvature-energy";
        CHECK(has_g3);
    }
    // small density branch (3 sigma <= H0)
    {
        const double a0 = 1.0, H0 = 1.0, phi0 = 2.9, sigma = 0.1;
        const double rho0 = 3.0 * (H0 * H0 + 1.0) - phi0;  // = 3.1, rho0 a0^2 > 3/2
        auto v = classify(1.0, rho0, a0, H0, phi0, sigma, 1);
        // dense closed universe, neither branch: candidate only
        CHECK(v.verdict == Verdict::Undetermined);
    }
    {
        // vacuum closed universe is global by the small-density branch
        const double a0 = 1.0, H0 = 1.0, phi0 = 3.0 * (1.0 + 1.0);
        auto v = classify(0.0, 0.0, a0, H0, phi0, 0.5, 1);
        CHECK(v.verdict == Verdict::GlobalGuaranteed);
    }
}

TEST_CASE("classify: closed-universe phi floor is a candidate, not a verdict") {
    const double a0 = 3.0, H0 = 1.0, phi0 = 0.3, sigma = 0.1, N = 1.0;
    const double rho0 = 3.0 * (H0 * H0 + 1.0 / (a0 * a0)) - phi0;  // 3.03
    auto v = classify(N, rho0, a0, H0, phi0, sigma, 1);
    CHECK(v.verdict == Verdict::Undetermined);
    bool has_candidate = false;
    for (const auto& c : v.fired) has_candidate |= c.name == "closed-phi-floor-candidate";
    CHECK(has_candidate);
    CHECK(v.phi_m == doctest::Approx(std::min(4.0, 9.0 / (4.0 * rho0 * 81.0))).epsilon(1e-13));
}

TEST_CASE("classify rejects unconstrained and invalid data") {
    CHECK_THROWS_AS(classify(1.0, 1.0, 1.0, 1.0, 0.5, 0.1, 0), std::invalid_argument);
    CHECK_THROWS_AS(classify(1.0, 2.5, 1.0, 1.0, 0.5, 0.1, 2), std::invalid_argument);
    CHECK_THROWS_AS(classify(1.0, 2.5, 1.0, -1.0, 0.5, 0.1, 0), std::invalid_argument);
}

TEST_CASE("classify is pure") {
    auto a = classify(1.0, 2.5, 1.0, 1.0, 0.5, 0.1, 0);
    auto b = classify(1.0, 2.5, 1.0, 1.0, 0.5, 0.1, 0);
    CHECK(a.verdict == b.verdict);
    CHECK(a.fired.size() == b.fired.size());
    CHECK(a.Sigma0 == b.Sigma0);
    CHECK(a.Phi0 == b.Phi0);
}

TEST_CASE("random constrained sweep never fires both criterion families") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int kept = 0;
    while (kept < 1000) {
        const double a0 = std::exp(std::log(0.3) + u(rng) * std::log(10.0));
        const double H0 = std::exp(std::log(0.05) + u(rng) * std::log(100.0));
        const double sigma = u(rng) < 0.1 ? 0.0 : 3.0 * u(rng);
        const int k = int(3.0 * u(rng)) - 1;
        const double N = u(rng) < 0.1 ? 0.0 : 5.0 * u(rng);
        const double rho0 = N / (a0 * a0 * a0) * (1.0 + 3.0 * u(rng));
        const double phi0 = 3.0 * (H0 * H0 + k / (a0 * a0)) - rho0;
        if (!(phi0 > 0.0)) continue;
        ++kept;
        CHECK_NOTHROW(classify(N, rho0, a0, H0, phi0, sigma, k));
    }
}

TEST_CASE("corollary window") {
    CHECK(corollary_window(0.05, 0.3, 0));
    CHECK_FALSE(corollary_window(0.2, 0.3, 0));
    CHECK_FALSE(corollary_window(0.05, 0.6, -1));
    CHECK_THROWS_AS(corollary_window(0.05, 0.3, 1), std::invalid_argument);
}
