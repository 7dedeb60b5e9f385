#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "spinpipe/engineer.hpp"
#include "spinpipe/fidelity.hpp"
#include "spinpipe/rng.hpp"

using namespace spinpipe;

namespace {

const double h = constants().h;
const double mev = 1e-3 * constants().e;

GateTarget base_target(GateKind kind, double angle, double g_i, double g_j) {
    GateTarget t;
    t.kind = kind;
    t.angle = angle;
    t.tau2q = 1e-6;
    t.b0 = 1.0;
    t.dk = mev;
    t.eps = 0.0;
    t.g_i = g_i;
    t.g_j = g_j;
    return t;
}

}  // namespace

TEST(TijForExchange, RoundTripAndErrors) {
    std::mt19937_64 gen(61);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        const double j = h * 100e6 * unif(gen);
        const double dk = mev * (0.5 + unif(gen));
        const double eps = 0.8 * dk * (2.0 * unif(gen) - 1.0);
        ExchangeParams p;
        p.t_ij = tij_for_exchange(j, dk, eps);
        p.dk = dk;
        p.eps = eps;
        p.e_z = h * 28e9;
        p.de_z = 0.0;
        if (j == 0.0) {
            ASSERT_EQ(p.t_ij, 0.0);
        } else {
            ASSERT_NEAR(exchange_strength(p), j, 1e-12 * j);
        }
    }
    EXPECT_EQ(tij_for_exchange(0.0, mev, 0.0), 0.0);
    EXPECT_THROW(tij_for_exchange(-1e-30, mev, 0.0), error);
    EXPECT_THROW(tij_for_exchange(1e-26, mev, mev), error);
}

TEST(Solver, GivensEngineeringExample) {
    // chi = pi/4 sets the exchange equal to the Zeeman difference.
    const NativeGateSolve s =
        solve_givens_like(base_target(GateKind::givens_like, 0.25 * pi, 1.5e-3, -0.75e-4));
    const double dez = s.params.de_z;
    EXPECT_NEAR(s.x, 1.0, 1e-12);
    EXPECT_NEAR(s.j_ij, std::abs(dez), 1e-3 * std::abs(dez));
    EXPECT_LE(std::abs(s.delta_g), 1e-4);
    EXPECT_GT(s.delta_tau, 0.0);
    EXPECT_LT(s.delta_tau, 0.5e-9);

    const CompositeResult r = composite_for_solve(s);
    EXPECT_GT(process_fidelity(r.u, r.target), 1.0 - 1e-9);

    // The shortcut objective is met exactly, so the residual time error is
    // the skew correction tau * J / dK to leading order.
    const double predicted = s.tau_realized * s.j_ij / mev;
    EXPECT_NEAR(s.delta_tau, predicted, 0.05 * predicted);
}

TEST(Solver, ClosedLoopFidelityRandomTargets) {
    CounterRng rng{mix_key(20260819, {7, 1}), 0};
    for (int i = 0; i < 300; ++i) {
        const int pick = static_cast<int>(rng.uniform() * 3.0);
        const double g_i = 2e-3 * rng.normal();
        const double g_j = 2e-3 * rng.normal();
        GateTarget t;
        if (pick == 0) {
            t = base_target(GateKind::cphase, 0.1 + 6.0 * rng.uniform(), g_i, g_j);
        } else if (pick == 1) {
            double a = 0.1 + 6.0 * rng.uniform();
            if (std::abs(a - pi) < 0.1) a += 0.25;
            t = base_target(GateKind::ising, a, g_i, g_j);
        } else {
            const double chi = 0.05 + 0.4 * pi * rng.uniform();
            t = base_target(GateKind::givens_like, chi, g_i, g_j);
        }
        t.eps = (rng.uniform() - 0.5) * 0.4 * mev;
        const NativeGateSolve s = solve_native_gate(t);
        ASSERT_LE(std::abs(s.delta_g), t.delta_g_max + 1e-18);
        ASSERT_GE(s.n, 0);

        const CompositeResult r = composite_for_solve(s);
        ASSERT_GT(process_fidelity(r.u, r.target), 1.0 - 1e-9);
        if (t.kind == GateKind::cphase) {
            ASSERT_GT(process_fidelity(r.u, reference_cphase(-t.angle)), 1.0 - 1e-9);
        } else if (t.kind == GateKind::ising) {
            ASSERT_GT(process_fidelity(r.u, reference_ising(t.angle)), 1.0 - 1e-9);
        } else {
            ASSERT_NEAR(std::abs(s.chi), t.angle, 1e-12);
        }
    }
}

TEST(Solver, EnsembleStatistics) {
    // 1000 g-factor pairs at sigma_G = 1e-3 g_Si, chi = pi/4, tau2q = 1 us.
    CounterRng rng{mix_key(20260819, {7, 2}), 0};
    const double sigma_g = 1e-3 * constants().g_si;
    double sum_j = 0.0;
    double sum_n = 0.0;
    double sum_dt = 0.0;
    const int pairs = 1000;
    for (int i = 0; i < pairs; ++i) {
        const double g_i = sigma_g * rng.normal();
        const double g_j = sigma_g * rng.normal();
        const NativeGateSolve s =
            solve_givens_like(base_target(GateKind::givens_like, 0.25 * pi, g_i, g_j));
        sum_j += s.j_ij;
        sum_n += s.n;
        sum_dt += std::abs(s.delta_tau);
    }
    const double mean_j_hz = sum_j / pairs / h;
    const double mean_n = sum_n / pairs;
    const double mean_dt = sum_dt / pairs;
    EXPECT_NEAR(mean_j_hz, 32e6, 3e6);
    EXPECT_NEAR(mean_n, 45.0, 5.0);
    EXPECT_GE(mean_dt, 0.05e-9);
    EXPECT_LE(mean_dt, 0.15e-9);
}

TEST(Solver, SlotTimeTrackingAndMonotoneWinding) {
    int last_n = -1;
    for (int i = 0; i < 27; ++i) {
        GateTarget t = base_target(GateKind::givens_like, 0.25 * pi, 1.2e-3, -1.1e-3);
        t.tau2q = 0.4e-6 + i * 0.1e-6;
        const NativeGateSolve s = solve_givens_like(t);
        ASSERT_LT(std::abs(s.delta_tau), 1e-9);
        ASSERT_GE(s.n, last_n);
        last_n = s.n;
    }
}

TEST(Solver, MatchedZeemanIsingBranch) {
    // Ising 2pi with identical g-factors sits on the x = 0 branch: the slot
    // time is met exactly with J = phi hbar / tau.
    const NativeGateSolve s = solve_phase_gate(base_target(GateKind::ising, 2.0 * pi, 0.0, 0.0));
    EXPECT_EQ(s.n, 0);
    EXPECT_EQ(s.x, 0.0);
    EXPECT_EQ(s.delta_tau, 0.0);
    EXPECT_NEAR(s.j_ij, pi * constants().hbar / 1e-6, 1e-12 * s.j_ij);
    const CompositeResult r = composite_for_solve(s);
    EXPECT_GT(process_fidelity(r.u, r.target), 1.0 - 1e-12);
    EXPECT_GT(process_fidelity(r.u, Mat4(Mat4::Identity())), 1.0 - 1e-12);

    // A small Zeeman difference within the tuneability bound is nulled.
    const NativeGateSolve s2 =
        solve_phase_gate(base_target(GateKind::ising, 2.0 * pi, 3e-5, -2e-5));
    EXPECT_EQ(s2.n, 0);
    EXPECT_NEAR(s2.delta_g, 5e-5, 1e-18);
    EXPECT_EQ(s2.params.de_z, 0.0);

    // Beyond the bound the x = 0 branch is skipped and logged as a fallback.
    const NativeGateSolve s3 =
        solve_phase_gate(base_target(GateKind::ising, 2.0 * pi, 2e-3, -2e-3));
    EXPECT_GE(s3.fallbacks, 1);
    EXPECT_GT(s3.n, 0);
    const CompositeResult r3 = composite_for_solve(s3);
    EXPECT_GT(process_fidelity(r3.u, r3.target), 1.0 - 1e-9);
}

TEST(Solver, IsingLowAngleFallbacks) {
    // For alpha < pi the k = 0 branches have c <= 0 and are skipped.
    const NativeGateSolve s = solve_phase_gate(base_target(GateKind::ising, 0.5 * pi, 2e-3, -1e-3));
    EXPECT_GE(s.fallbacks, 2);
    const CompositeResult r = composite_for_solve(s);
    EXPECT_GT(process_fidelity(r.u, reference_ising(0.5 * pi)), 1.0 - 1e-9);
}

TEST(Solver, ChiSignFollowsZeemanDifference) {
    const NativeGateSolve s =
        solve_givens_like(base_target(GateKind::givens_like, 0.6, -1.4e-3, 0.9e-3));
    EXPECT_LT(s.x, 0.0);
    EXPECT_NEAR(s.chi, -0.6, 1e-12);
    const CompositeResult r = composite_for_solve(s);
    EXPECT_GT(process_fidelity(r.u, r.target), 1.0 - 1e-9);
}

TEST(Solver, DegenerateTargetsThrow) {
    EXPECT_THROW(solve_native_gate(base_target(GateKind::cphase, 0.0, 1e-3, 0.0)), error);
    EXPECT_THROW(solve_native_gate(base_target(GateKind::cphase, 2.0 * pi, 1e-3, 0.0)), error);
    EXPECT_THROW(solve_native_gate(base_target(GateKind::ising, pi, 1e-3, 0.0)), error);
    EXPECT_THROW(solve_native_gate(base_target(GateKind::givens_like, 0.0, 1e-3, 0.0)), error);
    EXPECT_THROW(solve_native_gate(base_target(GateKind::givens_like, 0.5 * pi, 1e-3, 0.0)), error);
    EXPECT_THROW(solve_native_gate(base_target(GateKind::givens_like, 2.0, 1e-3, 0.0)), error);
    EXPECT_THROW(solve_native_gate(base_target(GateKind::givens_like, 0.25 * pi, 1e-3, 1e-3)),
                 error);

    GateTarget bad = base_target(GateKind::cphase, pi, 1e-3, 0.0);
    bad.tau2q = -1.0;
    EXPECT_THROW(solve_native_gate(bad), error);
    bad = base_target(GateKind::cphase, pi, 1e-3, 0.0);
    bad.eps = 2.0 * mev;
    EXPECT_THROW(solve_native_gate(bad), error);

    // Slot time too short for the tuneability bound to reach.
    GateTarget fast = base_target(GateKind::givens_like, 0.25 * pi, 1.2e-3, -1.1e-3);
    fast.tau2q = 1e-9;
    EXPECT_THROW(solve_native_gate(fast), error);
}

TEST(Solver, KindGuards) {
    EXPECT_THROW(solve_phase_gate(base_target(GateKind::givens_like, 0.25 * pi, 1e-3, 0.0)),
                 error);
    EXPECT_THROW(solve_givens_like(base_target(GateKind::cphase, pi, 1e-3, 0.0)), error);
}
