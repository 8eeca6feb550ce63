#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "fastdiff/errors.hpp"
#include "fastdiff/params.hpp"
#include "fastdiff/pde.hpp"
#include "fastdiff/profiles.hpp"

using namespace fastdiff;

namespace {

const ParamSet kRef{3, 0.2, 1.0, 5.0, 1.0};

SelfSimilarSolution make_reference(const ParamSet& p, double r_max, bool regular) {
    const double s_hi = std::log(r_max) + 0.1;
    const SGrid grid{-8.0, s_hi, std::size_t((s_hi + 8.0) / 0.005) + 2};
    RadialProfile prof =
        regular ? solve_regular(p, grid, 1e-10) : solve_singular(p, 0.0, grid, 1e-10, 8);
    return SelfSimilarSolution(ProfileInterpolant(std::move(prof)), 1.0);
}

} // namespace

TEST_CASE("radial grids carry exact cell measures") {
    const RadialGrid g = make_ball_grid(3, 1e-2, 10.0, 120);
    CHECK(sphere_area(3) == doctest::Approx(4.0 * std::numbers::pi).epsilon(1e-14));
    double total = 0.0;
    for (double w : g.weights) total += w;
    CHECK(total == doctest::Approx(4.0 * std::numbers::pi * 1000.0 / 3.0).epsilon(1e-12));
    CHECK(g.faces.front() == 0.0);
    CHECK(g.face_area.front() == 0.0);

    const RadialGrid a = make_annulus_grid(3, 1.0, 2.0, 400);
    double atotal = 0.0;
    for (double w : a.weights) atotal += w;
    CHECK(atotal == doctest::Approx(4.0 * std::numbers::pi * 7.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("l1_distance: exactness and the closed-form cylinder integral") {
    const RadialGrid g = make_annulus_grid(3, 1.0, 2.0, 4000);
    std::vector<double> a(g.cells()), zero(g.cells(), 0.0);
    for (std::size_t i = 0; i < g.cells(); ++i) {
        a[i] = std::pow(0.2 / (g.centers[i] * g.centers[i]), 1.25);
    }
    CHECK(l1_distance(a, a, g) == 0.0);
    // integral of 4 pi r^2 (0.2/r^2)^{1.25} over [1,2] = 4 pi 0.2^{1.25} 2(sqrt2 - 1)
    const double exact = 4.0 * std::numbers::pi * std::pow(0.2, 1.25) * 2.0 *
                         (std::sqrt(2.0) - 1.0);
    CHECK(l1_distance(a, zero, g) == doctest::Approx(exact).epsilon(1e-5));

    // a unit bump confined to one cell integrates to that cell's weight
    std::vector<double> bump(g.cells(), 0.0);
    bump[123] = 1.0;
    CHECK(l1_distance(bump, zero, g) == doctest::Approx(g.weights[123]).epsilon(1e-15));

    CHECK_THROWS_AS(l1_distance(a, std::vector<double>(10, 0.0), g), GridMismatch);
}

TEST_CASE("make_initial samples the references and enforces the sandwich") {
    const double r_max = 50.0;
    const RadialGrid ball = make_ball_grid(3, 1e-3, r_max, 200);
    const SelfSimilarSolution psi = make_reference(kRef, r_max, true);

    const PdeState exact = make_initial(InitialKind::psi, kRef, 1.0, ball, psi);
    for (std::size_t i = 0; i < ball.cells(); ++i) {
        CHECK(exact.u[i] == doctest::Approx(psi(ball.centers[i], 0.0)).epsilon(1e-14));
    }

    // V kind: r^{alpha/beta} u0 -> 1 near the puncture for lambda = 1
    const RadialGrid ann = make_annulus_grid(3, 1e-6, r_max, 300);
    const SelfSimilarSolution V = make_reference(kRef, r_max, false);
    const PdeState v0 = make_initial(InitialKind::V, kRef, 1.0, ann, V);
    const double head = std::pow(ann.centers[0], 13.75 / 5.0) * v0.u[0];
    CHECK(head == doctest::Approx(1.0).epsilon(2e-2));

    // bump mass equals the weighted integral of the bump
    PerturbationSpec spec{0.1, 1.0, 2.0, 0};
    const PdeState pert = make_initial(InitialKind::perturbed_psi, kRef, 1.0, ball, psi, spec);
    double mass = 0.0, expected = 0.0;
    for (std::size_t i = 0; i < ball.cells(); ++i) {
        mass += ball.weights[i] * std::abs(pert.u[i] - exact.u[i]);
        if (ball.centers[i] >= 1.0 && ball.centers[i] <= 2.0)
            expected += ball.weights[i] * 0.1 * exact.u[i];
    }
    CHECK(mass == doctest::Approx(expected).epsilon(1e-13));

    // sandwich violation: 12% bump does not fit under v_{lambda=4}
    ParamSet p4 = kRef;
    p4.lambda = 4.0;
    const SelfSimilarSolution hi = make_reference(p4, r_max, true);
    PerturbationSpec big{0.12, 1.0, 2.0, 0};
    CHECK_THROWS_AS(
        make_initial(InitialKind::perturbed_psi, kRef, 1.0, ball, psi, big, nullptr, &hi),
        SandwichViolation);
    // ... while 10% under v_{lambda=8} does
    ParamSet p8 = kRef;
    p8.lambda = 8.0;
    const SelfSimilarSolution hi8 = make_reference(p8, r_max, true);
    CHECK_NOTHROW(
        make_initial(InitialKind::perturbed_psi, kRef, 1.0, ball, psi, spec, &psi, &hi8));
}

TEST_CASE("spatially constant state with no-flux boundary is a fixed point") {
    const RadialGrid g = make_ball_grid(3, 0.1, 5.0, 60);
    PdeState st;
    st.t = 0;
    st.T = 1;
    st.params = kRef;
    st.u.assign(g.cells(), 0.7);
    step(st, 0.01, g, BoundaryMode::no_flux, {});
    for (double u : st.u) CHECK(u == doctest::Approx(0.7).epsilon(1e-13));
}

TEST_CASE("no-flux steps conserve mass; Dirichlet steps account boundary fluxes") {
    const RadialGrid g = make_annulus_grid(3, 0.5, 4.0, 80);
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> uni(0.5, 1.5);
    PdeState st;
    st.t = 0;
    st.T = 1;
    st.params = kRef;
    st.u.resize(g.cells());
    for (auto& u : st.u) u = uni(rng);

    auto mass_of = [&](const PdeState& s) {
        double acc = 0.0;
        for (std::size_t i = 0; i < g.cells(); ++i) acc += g.weights[i] * s.u[i];
        return acc;
    };

    PdeState nf = st;
    const double m0 = mass_of(nf);
    for (int k = 0; k < 5; ++k) step(nf, 0.01, g, BoundaryMode::no_flux, {});
    CHECK(mass_of(nf) == doctest::Approx(m0).epsilon(1e-9));

    PdeState di = st;
    auto bc = [](double, double) { return 0.9; };
    double flux_total = 0.0;
    const double d0 = mass_of(di);
    for (int k = 0; k < 5; ++k) {
        const StepReport rep = step(di, 0.01, g, BoundaryMode::dirichlet, bc);
        flux_total += rep.mass_in_inner + rep.mass_in_outer;
    }
    CHECK(mass_of(di) - d0 == doctest::Approx(flux_total).epsilon(1e-10));
}

TEST_CASE("ordered initial data stay ordered (discrete comparison principle)") {
    const RadialGrid g = make_ball_grid(3, 0.05, 8.0, 100);
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int trial = 0; trial < 3; ++trial) {
        PdeState lo, hi;
        lo.t = hi.t = 0;
        lo.T = hi.T = 1;
        lo.params = hi.params = kRef;
        lo.u.resize(g.cells());
        hi.u.resize(g.cells());
        for (std::size_t i = 0; i < g.cells(); ++i) {
            lo.u[i] = 0.2 + uni(rng);
            hi.u[i] = lo.u[i] + 0.5 * uni(rng);
        }
        auto bc = [](double, double t) { return 1.0 + 0.1 * t; };
        for (int k = 0; k < 4; ++k) {
            step(lo, 0.02, g, BoundaryMode::dirichlet, bc);
            step(hi, 0.02, g, BoundaryMode::dirichlet, bc);
            for (std::size_t i = 0; i < g.cells(); ++i) {
                CHECK(lo.u[i] <= hi.u[i] * (1.0 + 1e-11));
            }
        }
    }
}

TEST_CASE("a single implicit step tracks the exact self-similar solution") {
    const double r_max = 100.0;
    const RadialGrid g = make_ball_grid(3, 1e-3, r_max, 300);
    const SelfSimilarSolution psi = make_reference(kRef, r_max, true);
    PdeState st = make_initial(InitialKind::psi, kRef, 1.0, g, psi);
    auto bc = [&](double r, double t) { return psi(r, t); };
    const double dt = 1e-3;
    for (int k = 0; k < 10; ++k) step(st, dt, g, BoundaryMode::dirichlet, bc);
    double worst = 0.0;
    for (std::size_t i = 0; i < g.cells(); ++i) {
        const double ref = psi(g.centers[i], st.t);
        worst = std::max(worst, std::abs(st.u[i] - ref) / psi(0.0, st.t));
    }
    CHECK(worst < 2e-3);
}

TEST_CASE("Newton reports divergence instead of silently degrading") {
    const RadialGrid g = make_ball_grid(3, 0.05, 8.0, 100);
    PdeState st;
    st.t = 0;
    st.T = 1e9;
    st.params = kRef;
    st.u.assign(g.cells(), 1.0);
    StepControls ctl;
    ctl.max_newton = 2;
    auto bc = [](double, double) { return 2.0; };
    CHECK_THROWS_AS(step(st, 5e3, g, BoundaryMode::dirichlet, bc, ctl), NewtonDivergence);
}

TEST_CASE("rescale maps the exact references to their profiles") {
    const double r_max = 200.0;
    const RadialGrid g = make_ball_grid(3, 1e-3, r_max, 400);
    const SelfSimilarSolution psi = make_reference(kRef, r_max, true);
    PdeState st = make_initial(InitialKind::psi, kRef, 1.0, g, psi);
    auto bc = [&](double r, double t) { return psi(r, t); };
    for (int k = 0; k < 50; ++k) step(st, 2e-3 * (st.T - st.t), g, BoundaryMode::dirichlet, bc);

    std::vector<double> y;
    for (double yy = 0.2; yy <= 2.0; yy += 0.1) y.push_back(yy);
    const std::vector<double> resc = rescale(st, g, y);
    double worst = 0.0;
    for (std::size_t j = 0; j < y.size(); ++j) {
        worst = std::max(worst, std::abs(resc[j] - psi.profile()(y[j])));
    }
    CHECK(worst < 5e-3);

    PdeState dead = st;
    dead.t = dead.T;
    CHECK_THROWS_AS(rescale(dead, g, y), PastExtinction);
}

TEST_CASE("extinction time estimation from the exact power law") {
    const double alpha = 13.75;
    std::vector<double> t, mx;
    for (double tt = 0.0; tt <= 0.5; tt += 0.01) {
        t.push_back(tt);
        mx.push_back(1.7 * std::pow(1.0 - tt, alpha)); // T = 1, partial data only
    }
    CHECK(extinction_time_estimate(t, mx, alpha) == doctest::Approx(1.0).epsilon(1e-12));

    std::vector<double> flat(t.size(), 0.4);
    CHECK_THROWS_AS(extinction_time_estimate(t, flat, alpha), NotExtincting);
}

TEST_CASE("short exact-psi simulation stays stationary in rescaled variables") {
    SimulationConfig cfg;
    cfg.params = kRef;
    cfg.kind = InitialKind::psi;
    cfg.r_core = 1e-3;
    cfg.r_max = 300.0;
    cfg.cells = 250;
    cfg.dt_factor = 0.002;
    cfg.s_end = 0.5;
    cfg.y_lo = 0.05;
    cfg.y_hi = 2.0;
    cfg.y_cells = 150;
    Simulation sim(cfg);
    const RescaledTrajectory traj = sim.run();
    REQUIRE(traj.s_values.size() >= 5);
    for (double sup : traj.sup_history) CHECK(sup < 0.05);
    const ConvergenceReport conv = convergence_diagnostics(traj);
    CHECK(conv.sup_floor < 0.05);
}

TEST_CASE("perturbed punctured run obeys the rescaled L1 decay bound") {
    SimulationConfig cfg;
    cfg.params = kRef;
    cfg.kind = InitialKind::V;
    cfg.r_min = 1e-5;
    cfg.r_max = 1.0e6;
    cfg.cells = 500;
    cfg.dt_factor = 0.002;
    cfg.s_end = 2.0;
    cfg.y_lo = 3e-5;
    cfg.y_hi = 3.0;
    cfg.y_cells = 300;
    Simulation exact(cfg);
    const RescaledTrajectory te = exact.run();

    cfg.kind = InitialKind::perturbed_V;
    cfg.perturbation = PerturbationSpec{0.1, 1.0, 2.0, 0};
    cfg.sandwich_lambda_lo = 0.35; // for the singular family smaller lambda bounds above
    cfg.sandwich_lambda_hi = 1.0;
    Simulation pert(cfg);
    const RescaledTrajectory tp = pert.run();

    // || u~_p - g || <= e^{-(n beta - alpha)(s - s0)} ||bump|| + || u~_e - g ||,
    // the second term being the numerical floor of the companion run.
    const double rate = 1.25;
    const double init = tp.l1_history.front();
    for (std::size_t k = 1; k < tp.s_values.size(); ++k) {
        const double bound = 1.05 * init *
                                 std::exp(-rate * (tp.s_values[k] - tp.s_values.front())) +
                             1.5 * te.l1_history[k] + 1e-6;
        CHECK(tp.l1_history[k] <= bound);
    }
    // and the pair satisfies the contraction rate
    const ContractionReport rep = contraction_check(tp, te, derive(kRef));
    CHECK(rep.phys_nonincreasing);
    CHECK(rep.rate_rel_dev <= 0.15);
}

TEST_CASE("short punctured V simulation tracks the singular profile") {
    SimulationConfig cfg;
    cfg.params = kRef;
    cfg.kind = InitialKind::V;
    cfg.r_min = 1e-4;
    cfg.r_max = 300.0;
    cfg.cells = 250;
    cfg.dt_factor = 0.002;
    cfg.s_end = 0.5;
    cfg.y_lo = 2e-4;
    cfg.y_hi = 2.0;
    cfg.y_cells = 150;
    Simulation sim(cfg);
    const RescaledTrajectory traj = sim.run();
    for (double sup : traj.sup_history) CHECK(sup < 0.05);
}
