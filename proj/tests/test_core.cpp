#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "spinpipe/axis_angle.hpp"
#include "spinpipe/constants.hpp"
#include "spinpipe/fidelity.hpp"
#include "spinpipe/linalg.hpp"
#include "spinpipe/rng.hpp"
#include "spinpipe/version.hpp"
#include "support/oracles.hpp"

using namespace spinpipe;

TEST(Constants, DefaultsAreConsistent) {
    EXPECT_NO_THROW(constants().validate());
    EXPECT_NEAR(constants().h / (2.0 * pi * constants().hbar), 1.0, 1e-9);
}

TEST(Constants, ValidateRejectsBadValues) {
    PhysConstants c;
    c.g_si = 0.0;
    EXPECT_THROW(c.validate(), error);
    c = PhysConstants{};
    c.hbar = 1e-34;
    EXPECT_THROW(c.validate(), error);
}

TEST(Linalg, RotationMatrices) {
    // Z(pi) = diag(-i, i); X(pi/2) = (1/sqrt2) [[1, -i], [-i, 1]].
    const Mat2 zpi = rot_z(pi);
    EXPECT_NEAR(std::abs(zpi(0, 0) - c64(0, -1)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(zpi(1, 1) - c64(0, 1)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(zpi(0, 1)), 0.0, 1e-15);

    const double r = 1.0 / std::sqrt(2.0);
    const Mat2 x90 = rot_x(pi / 2);
    EXPECT_NEAR(std::abs(x90(0, 0) - c64(r, 0)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(x90(0, 1) - c64(0, -r)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(x90(1, 0) - c64(0, -r)), 0.0, 1e-15);
}

TEST(Linalg, KronOrdering) {
    // Left factor is the first qubit: basis {uu, ud, du, dd}.
    const Mat4 zz = kron(sigma_z(), Mat2::Identity());
    EXPECT_NEAR(zz(0, 0).real(), 1.0, 1e-15);
    EXPECT_NEAR(zz(1, 1).real(), 1.0, 1e-15);
    EXPECT_NEAR(zz(2, 2).real(), -1.0, 1e-15);
    EXPECT_NEAR(zz(3, 3).real(), -1.0, 1e-15);
}

TEST(Linalg, UnitarityAndPhaseComparison) {
    EXPECT_TRUE(approx_unitary(rot_x(0.7)));
    Mat2 notu;
    notu << 1, 0, 0, 2;
    EXPECT_FALSE(approx_unitary(notu, 1e-9));
    EXPECT_TRUE(approx_equal_up_to_phase(std::polar(1.0, 1.3) * rot_x(0.7), rot_x(0.7)));
    EXPECT_FALSE(approx_equal_up_to_phase(rot_x(0.7), rot_x(0.8), 1e-10));
}

TEST(Rng, ReproducibleAndOrderIndependent) {
    const std::uint64_t key = mix_key(42, {1, 2, 3});
    CounterRng a{key, 0};
    CounterRng b{key, 0};
    for (int i = 0; i < 100; ++i) EXPECT_EQ(a.uniform(), b.uniform());

    // Directly addressing a counter gives the same value as streaming to it.
    CounterRng c{key, 57};
    CounterRng d{key, 0};
    double via_stream = 0.0;
    for (int i = 0; i <= 57; ++i) via_stream = d.uniform();
    EXPECT_EQ(c.uniform(), via_stream);

    CounterRng e{mix_key(42, {1, 2, 4}), 0};
    EXPECT_NE(a.uniform(), e.uniform());
}

TEST(Rng, UniformBoundsAndNormalMoments) {
    CounterRng rng{mix_key(7, {0}), 0};
    double mean = 0.0, var = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform();
        ASSERT_GT(u, 0.0);
        ASSERT_LT(u, 1.0);
    }
    for (int i = 0; i < n; ++i) {
        const double z = rng.normal();
        mean += z;
        var += z * z;
    }
    mean /= n;
    var = var / n - mean * mean;
    EXPECT_NEAR(mean, 0.0, 0.01);
    EXPECT_NEAR(var, 1.0, 0.02);
}

TEST(Rng, ClampCountsTruncations) {
    CounterRng rng{mix_key(7, {1}), 0};
    long long truncations = 0;
    for (int i = 0; i < 1000; ++i) {
        const double z = rng.normal_clamped(2.0, 0.5, &truncations);
        ASSERT_LE(std::abs(z), 2.0 * 0.5 + 1e-12);
    }
    EXPECT_GT(truncations, 0);
    rng = CounterRng{mix_key(7, {1}), 0};
    long long none = 0;
    for (int i = 0; i < 1000; ++i) rng.normal_clamped(1.0, 6.0, &none);
    EXPECT_LT(none, 5);
}

TEST(Fidelity, KnownValues) {
    const Mat2 id = Mat2::Identity();
    EXPECT_NEAR(process_fidelity(id, id), 1.0, 1e-15);
    EXPECT_NEAR(process_fidelity(id, rot_z(pi)), 0.0, 1e-15);
    EXPECT_NEAR(process_fidelity(id, rot_z(pi / 2)), 0.5, 1e-12);
    EXPECT_NEAR(average_gate_fidelity(id, id), 1.0, 1e-15);
    EXPECT_NEAR(average_gate_fidelity(id, rot_z(pi)), 1.0 / 3.0, 1e-12);
}

TEST(Fidelity, GlobalPhaseInvarianceAndMismatch) {
    std::mt19937_64 gen(2026);
    for (int i = 0; i < 200; ++i) {
        const Mat2 u = oracle::random_u2(gen);
        const Mat2 v = oracle::random_u2(gen);
        const double f = process_fidelity(u, v);
        const double fp = process_fidelity(u, Mat2(std::polar(1.0, 2.1) * v));
        EXPECT_NEAR(f, fp, 1e-12);
        EXPECT_GE(f, 0.0);
        EXPECT_LE(f, 1.0 + 1e-12);
    }
    const MatX a = MatX::Identity(2, 2);
    const MatX b = MatX::Identity(4, 4);
    EXPECT_THROW(process_fidelity(a, b), error);
}

TEST(AxisAngle, KnownDecompositions) {
    // X(pi/2): quarter turn about -x, no global phase.
    const AxisAngle ax = axis_angle(rot_x(pi / 2));
    EXPECT_NEAR(ax.theta, pi / 2, 1e-12);
    EXPECT_NEAR(ax.nx, -1.0, 1e-12);
    EXPECT_NEAR(ax.ny, 0.0, 1e-12);
    EXPECT_NEAR(ax.nz, 0.0, 1e-12);
    EXPECT_NEAR(ax.global_phase, 0.0, 1e-12);

    // Z(pi): half turn about -z, no global phase.
    const AxisAngle az = axis_angle(rot_z(pi));
    EXPECT_NEAR(az.theta, pi, 1e-12);
    EXPECT_NEAR(az.nz, -1.0, 1e-12);
    EXPECT_NEAR(az.global_phase, 0.0, 1e-12);

    // Identity: zero angle, conventional z axis.
    const AxisAngle ai = axis_angle(Mat2::Identity());
    EXPECT_NEAR(ai.theta, 0.0, 1e-12);
    EXPECT_NEAR(ai.nz, 1.0, 1e-12);

    // Pure global phase is reported in phi_g alone.
    const AxisAngle ap = axis_angle(Mat2(std::polar(1.0, 0.9) * Mat2::Identity()));
    EXPECT_NEAR(ap.theta, 0.0, 1e-9);
    EXPECT_NEAR(ap.global_phase, 0.9, 1e-9);
}

TEST(AxisAngle, RoundTripRandomUnitaries) {
    std::mt19937_64 gen(77);
    for (int i = 0; i < 1000; ++i) {
        const Mat2 u = oracle::random_u2(gen);
        const AxisAngle a = axis_angle(u);
        EXPECT_GE(a.theta, 0.0);
        EXPECT_LE(a.theta, pi + 1e-12);
        EXPECT_NEAR(a.nx * a.nx + a.ny * a.ny + a.nz * a.nz, 1.0, 1e-9);
        EXPECT_GT(a.global_phase, -pi - 1e-12);
        EXPECT_LE(a.global_phase, pi + 1e-12);
        EXPECT_LT(max_abs_diff(from_axis_angle(a), u), 1e-10);
    }
}

TEST(AxisAngle, RejectsNonUnitary) {
    Mat2 notu;
    notu << 1, 0, 0, 1.5;
    EXPECT_THROW(axis_angle(notu), error);
}

TEST(Version, FingerprintIsStable) {
    EXPECT_EQ(fnv1a64("spinpipe"), fnv1a64("spinpipe"));
    EXPECT_NE(fnv1a64("spinpipe"), fnv1a64("spinpipf"));
    EXPECT_EQ(hex64(0).size(), 16u);
    EXPECT_EQ(hex64(0xabcULL), "0000000000000abc");
}
