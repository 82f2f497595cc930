#include <cmath>

#include "doctest.h"
#include "evfp/cosmo.hpp"
#include "test_helpers.hpp"

using namespace evfp;

namespace {

InitialData vacuum_data(double t_end, ModelParams& p) {
    p = ModelParams{};
    p.sigma = 0.0;
    p.k = 0;
    p.t_end = t_end;
    return initial_data(Profile::zero(), build_grid(8, 1.0), 1.0, 1.0, 0.0, p,
                        ClosureMode::SolvePhi0);
}

}  // namespace

TEST_CASE("ode_rhs substitution cases") {
    auto F0 = sample_profile(Profile::zero(), build_grid(8, 1.0));

    ModelParams p;
    p.k = 0;
    MomentSet m = compute_moments(F0, 1.0, 3.0, 1.0);
    OdeRates r = ode_rhs(CosmoState{0.0, 1.0, 1.0, 3.0}, m, p);
    CHECK(r.da == doctest::Approx(1.0));
    CHECK(r.dH == 0.0);
    CHECK(r.dphi == 0.0);

    p.k = 1;
    m = compute_moments(F0, 2.0, 0.0, 0.0);
    r = ode_rhs(CosmoState{0.0, 2.0, 0.0, 0.0}, m, p);
    CHECK(r.dH == doctest::Approx(0.25));

    p.k = 0;
    p.sigma = 1.0;
    MomentSet ball = compute_moments(sample_profile(Profile::ball(1.0, 1.0), build_grid(100, 2.0)),
                                     1.0, 0.0, 0.0);
    r = ode_rhs(CosmoState{0.0, 1.0, 0.0, 0.0}, ball, p);
    CHECK(r.dphi == doctest::Approx(-4.0 * M_PI).epsilon(2e-4));
}

TEST_CASE("constraint residual on exact and off-shell states") {
    auto F0 = sample_profile(Profile::zero(), build_grid(8, 1.0));
    const MomentSet m = compute_moments(F0, 1.0, 3.0, 1.0);
    CHECK(constraint_residual_raw(CosmoState{0.0, 1.0, 1.0, 3.0}, m, 0) == 0.0);
    CHECK(constraint_residual(CosmoState{0.0, 1.0, 1.0, 3.0}, m, 0) == 0.0);

    const MomentSet m2 = compute_moments(F0, 1.0, 0.0, 1.0);
    CHECK(constraint_residual_raw(CosmoState{0.0, 1.0, 1.0, 0.0}, m2, 0) == doctest::Approx(1.0));
}

TEST_CASE("initial_data closure modes") {
    ModelParams p;
    p.k = 0;

    SUBCASE("solve phi0 for vacuum gives the de Sitter field") {
        auto init = initial_data(Profile::zero(), build_grid(8, 1.0), 1.0, 1.0, 0.0, p,
                                 ClosureMode::SolvePhi0);
        CHECK(init.state.phi == doctest::Approx(3.0).epsilon(1e-14));
        CHECK(init.state.a == 1.0);
        CHECK(init.state.H == 1.0);
    }

    SUBCASE("solve H0 matches the constraint algebra") {
        auto grid = build_grid(200, 20.0);
        auto init = initial_data(Profile::gaussian(1.0, 1.0), grid, 1.0, 0.0, 0.5, p,
                                 ClosureMode::SolveH0);
        const double rho0 =
            compute_moments(sample_profile(Profile::gaussian(1.0, 1.0), grid), 1.0, 0.0, 0.0).rho;
        CHECK(init.state.H == doctest::Approx(std::sqrt((rho0 + 0.5) / 3.0)).epsilon(1e-14));
    }

    SUBCASE("check mode rejects off-shell quadruples") {
        CHECK_THROWS_AS(initial_data(Profile::zero(), build_grid(8, 1.0), 1.0, 1.0, 3.003, p,
                                     ClosureMode::Check),
                        std::invalid_argument);
        CHECK_NOTHROW(initial_data(Profile::zero(), build_grid(8, 1.0), 1.0, 1.0, 3.0, p,
                                   ClosureMode::Check));
    }

    SUBCASE("solved phi0 must be positive") {
        // heavy gaussian pushes rho0 above 3 H0^2
        auto grid = build_grid(200, 20.0);
        CHECK_THROWS_AS(initial_data(Profile::gaussian(1.0, 1.0), grid, 1.0, 1.0, 0.0, p,
                                     ClosureMode::SolvePhi0),
                        std::invalid_argument);
    }

    SUBCASE("negative discriminant is rejected for the closed universe") {
        ModelParams pc;
        pc.k = 1;
        CHECK_THROWS_AS(initial_data(Profile::zero(), build_grid(8, 1.0), 1.0, 0.0, 0.1, pc,
                                     ClosureMode::SolveH0),
                        std::invalid_argument);
    }

    SUBCASE("gaussian tail beyond r_max is rejected at setup") {
        CHECK_THROWS_AS(initial_data(Profile::gaussian(1.0, 5.0), build_grid(100, 20.0), 1.0, 1.0,
                                     0.0, p, ClosureMode::SolvePhi0),
                        std::invalid_argument);
    }
}

TEST_CASE("one Strang step reproduces de Sitter to high order") {
    ModelParams p;
    auto init = vacuum_data(1.0, p);
    const double dt = 1e-2;
    auto [s1, F1] = step(init.state, init.F, p, dt);
    CHECK(s1.t == doctest::Approx(dt));
    CHECK(s1.H == 1.0);    // dH = 0 exactly in vacuum with k = 0
    CHECK(s1.phi == 3.0);  // dphi = 0 exactly when N = 0
    CHECK(std::abs(s1.a - std::exp(dt)) < 1e-10 * std::exp(dt));
}

TEST_CASE("sigma = 0 leaves F untouched and N is conserved per step") {
    auto grid = build_grid(128, 30.0);
    ModelParams p;
    p.sigma = 0.0;
    p.k = 0;
    p.t_end = 1.0;
    auto init = initial_data(Profile::gaussian(0.05, 2.0), grid, 1.0, 1.0, 0.0, p,
                             ClosureMode::SolvePhi0);
    auto [s1, F1] = step(init.state, init.F, p, 1e-2);
    for (int i = 0; i < grid->n_cells; ++i) CHECK(F1.values[i] == init.F.values[i]);

    p.sigma = 1.0;
    const double N0 = compute_moments(init.F, 1.0, 0.0, 0.0).N;
    auto [s2, F2] = step(init.state, init.F, p, 1e-2);
    const double N1 = compute_moments(F2, 1.0, 0.0, 0.0).N;
    CHECK(std::abs(N1 - N0) <= 1e-12 * N0);
}

TEST_CASE("adapt_dt formula") {
    auto F0 = sample_profile(Profile::zero(), build_grid(8, 1.0));
    ModelParams p;
    p.eta = 1e-3;
    p.dt_max = 1.0;
    p.t_end = 100.0;

    // vacuum de Sitter: the binding term is eta / sqrt(rho + |phi|)
    MomentSet m = compute_moments(F0, 1.0, 3.0, 1.0);
    CHECK(adapt_dt(CosmoState{0.0, 1.0, 1.0, 3.0}, m, p) ==
          doctest::Approx(1e-3 / std::sqrt(3.0)).epsilon(1e-12));

    // |H| = 1e6 forces dt <= 1e-9
    m = compute_moments(F0, 1.0, 0.0, 1e6);
    CHECK(adapt_dt(CosmoState{0.0, 1.0, 1e6, 0.0}, m, p) <= 1e-9);

    // near t_end the step clips exactly
    p.t_end = 0.5;
    m = compute_moments(F0, 1.0, 0.0, 0.0);
    CHECK(adapt_dt(CosmoState{0.49999, 1.0, 0.0, 0.0}, m, p) ==
          doctest::Approx(0.5 - 0.49999).epsilon(1e-9));
}

TEST_CASE("simulate: vacuum de Sitter run") {
    ModelParams p;
    auto init = vacuum_data(5.0, p);
    const RunRecord rec = simulate(init, p, SamplingOptions{0.05, 1.01});
    CHECK(rec.termination == Termination::ReachedTEnd);
    REQUIRE(rec.samples.size() > 10);
    for (const auto& s : rec.samples) {
        CHECK(std::abs(s.state.a - std::exp(s.state.t)) <= 1e-6 * std::exp(s.state.t));
        CHECK(std::abs(s.state.H - 1.0) <= 1e-7);
        CHECK(std::abs(s.state.phi - 3.0) <= 1e-12);
    }
    CHECK(rec.samples.back().state.t == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(rec.max_constraint_residual < 1e-12);
    for (const auto& r : rho_a3_budget(rec)) CHECK(r == 0.0);
}

TEST_CASE("simulate: t_end = 0 yields an empty record") {
    ModelParams p;
    auto init = vacuum_data(0.0, p);
    const RunRecord rec = simulate(init, p);
    CHECK(rec.samples.empty());
    CHECK(rec.termination == Termination::ReachedTEnd);
}

TEST_CASE("simulate: samples strictly increase in t and keep a positive") {
    auto grid = build_grid(200, 30.0);
    ModelParams p;
    p.sigma = 0.5;
    p.t_end = 2.0;
    auto init = initial_data(Profile::gaussian(0.05, 2.0), grid, 1.0, 1.0, 0.0, p,
                             ClosureMode::SolvePhi0);
    const RunRecord rec = simulate(init, p, SamplingOptions{0.02, 1.01});
    REQUIRE(rec.samples.size() > 5);
    for (size_t i = 1; i < rec.samples.size(); ++i) {
        CHECK(rec.samples[i].state.t > rec.samples[i - 1].state.t);
        CHECK(rec.samples[i].state.a > 0.0);
        // phi strictly decreasing while sigma N > 0
        CHECK(rec.samples[i].state.phi < rec.samples[i - 1].state.phi);
        // global-regime inequality for k <= 0 with phi > 0
        if (rec.samples[i].state.phi > 0.0)
            CHECK(rec.samples[i].state.H >= std::sqrt(rec.samples[i].state.phi / 3.0) - 1e-8);
    }
    CHECK(rec.n_drift < 1e-10);
}

TEST_CASE("simulate: corrupted initial state fails the step") {
    ModelParams p;
    auto init = vacuum_data(1.0, p);
    init.F.values[2] = std::numeric_limits<double>::quiet_NaN();
    p.sigma = 1.0;  // route through fp_step so the corruption is seen
    const RunRecord rec = simulate(init, p);
    CHECK(rec.termination == Termination::StepFailure);
}

TEST_CASE("rho_a3_budget: sigma = 0 transport budget closes") {
    auto grid = build_grid(256, 30.0);
    ModelParams p;
    p.sigma = 0.0;
    p.t_end = 3.0;
    auto init = initial_data(Profile::gaussian(0.05, 2.0), grid, 1.0, 1.0, 0.0, p,
                             ClosureMode::SolvePhi0);
    const RunRecord rec = simulate(init, p, SamplingOptions{0.01, 1.01});
    CHECK(rec.termination == Termination::ReachedTEnd);
    for (double r : rho_a3_budget(rec)) CHECK(std::abs(r) < 1e-4);
}
