#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "spinpipe/fidelity.hpp"
#include "spinpipe/twoqubit.hpp"
#include "support/oracles.hpp"

using namespace spinpipe;

namespace {

const double h = constants().h;
const double mev = 1e-3 * constants().e;

ExchangeParams random_params(std::mt19937_64& gen) {
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    ExchangeParams p;
    p.t_ij = h * 0.5e9 * std::abs(unif(gen));
    p.dk = mev * (0.5 + std::abs(unif(gen)));
    p.eps = 0.4 * p.dk * unif(gen);
    p.e_z = h * 5e9 * std::abs(unif(gen));
    p.de_z = h * 50e6 * unif(gen);
    return p;
}

// Tune de_z so that the exact mixing ratio Delta_ij / J_ij equals x_target.
ExchangeParams with_mixing_ratio(ExchangeParams p, double x_target) {
    for (int k = 0; k < 60; ++k) {
        const double j = exchange_strength(p);
        const double skew = 0.5 * (exchange_j_i(p) - exchange_j_j(p));
        p.de_z = x_target * j - skew;
    }
    return p;
}

}  // namespace

TEST(Exchange, HamiltonianStructure) {
    std::mt19937_64 gen(41);
    for (int i = 0; i < 100; ++i) {
        const ExchangeParams p = random_params(gen);
        const Mat4 hmat = exchange_hamiltonian(p);
        ASSERT_LT(max_abs_diff(hmat, hmat.adjoint()), 1e-30);
        // m_z conservation: only the inner block couples.
        for (int a = 0; a < 4; ++a) {
            for (int b = 0; b < 4; ++b) {
                if (a != b && !((a == 1 && b == 2) || (a == 2 && b == 1))) {
                    ASSERT_EQ(hmat(a, b), c64(0.0, 0.0));
                }
            }
        }
        ASSERT_NEAR(hmat(0, 0).real(), p.de_z + p.e_z, 1e-40);
        ASSERT_NEAR(hmat(3, 3).real(), -p.de_z - p.e_z, 1e-40);
        ASSERT_NEAR(hmat(1, 2).real(), exchange_strength(p), 1e-40);
    }
}

TEST(Exchange, TermIdentities) {
    std::mt19937_64 gen(42);
    for (int i = 0; i < 200; ++i) {
        const ExchangeParams p = random_params(gen);
        const double ji = exchange_j_i(p);
        const double jj = exchange_j_j(p);
        const double j = exchange_strength(p);
        ASSERT_NEAR(ji + jj, 2.0 * j, 1e-12 * std::abs(j));
    }

    // Symmetric point: J = 2 t^2 dk / (dk^2 - eps^2) exactly when de_z = 0.
    ExchangeParams p;
    p.t_ij = h * 1e8;
    p.dk = mev;
    p.eps = 0.3 * mev;
    p.e_z = h * 28e9;
    p.de_z = 0.0;
    const double expected = 2.0 * p.t_ij * p.t_ij * p.dk / (p.dk * p.dk - p.eps * p.eps);
    EXPECT_NEAR(exchange_strength(p), expected, 1e-14 * expected);
}

TEST(Exchange, ReferenceCouplingValue) {
    // t/h = 1.954 GHz at dk = 1 meV, eps = 0, matched Zeeman: J/h = 31.58 MHz.
    ExchangeParams p;
    p.t_ij = h * 1.954e9;
    p.dk = mev;
    p.eps = 0.0;
    p.e_z = h * 28e9;
    p.de_z = 0.0;
    EXPECT_NEAR(exchange_strength(p) / h, 31.581e6, 2e4);
}

TEST(Exchange, ChargeResonanceGuard) {
    ExchangeParams p;
    p.t_ij = h * 1e8;
    p.dk = mev;
    p.eps = -mev + 1e-9 * mev;  // s2 dk + s3 eps ~ 0 for (+, +)
    p.e_z = h * 28e9;
    p.de_z = 0.0;
    EXPECT_THROW(exchange_strength(p), error);
    p.eps = 0.0;
    p.dk = 0.0;
    EXPECT_THROW(exchange_strength(p), error);
}

TEST(Native, MatchesMatrixExponentialOracle) {
    std::mt19937_64 gen(43);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        const ExchangeParams p = random_params(gen);
        const double t = 1e-6 * unif(gen);
        const Mat4 u = native_unitary(p, t);
        ASSERT_TRUE(approx_unitary(u, 1e-12));
        const Mat4 ref = oracle::evolve<Mat4>(exchange_hamiltonian(p), t, constants().hbar);
        ASSERT_LT(max_abs_diff(u, ref), 1e-10);
    }
}

TEST(Native, BlockStructureAndSpecialPoints) {
    std::mt19937_64 gen(44);
    const ExchangeParams p = random_params(gen);
    const Mat4 u = native_unitary(p, 3e-7);
    for (int a = 0; a < 4; ++a) {
        for (int b = 0; b < 4; ++b) {
            if (a != b && !((a == 1 && b == 2) || (a == 2 && b == 1))) {
                ASSERT_EQ(u(a, b), c64(0.0, 0.0));
            }
        }
    }

    // det U = e^{2 i alpha}.
    const NativeAngles ang = native_angles(p, 3e-7);
    EXPECT_NEAR(std::abs(u.determinant() - std::polar(1.0, 2.0 * ang.alpha)), 0.0, 1e-12);

    // Zero tunneling: purely Zeeman phases, chi = +-pi/2.
    ExchangeParams zt = p;
    zt.t_ij = 0.0;
    const NativeAngles za = native_angles(zt, 3e-7);
    EXPECT_NEAR(std::abs(za.chi), 0.5 * pi, 1e-12);
    const Mat4 uz = native_unitary(zt, 3e-7);
    const double zeeman = zt.de_z * 3e-7 / constants().hbar;
    EXPECT_NEAR(std::abs(uz(1, 1) - std::polar(1.0, zeeman)), 0.0, 1e-9);
    EXPECT_NEAR(std::abs(uz(1, 2)), 0.0, 1e-12);

    // Matched Zeeman: chi = 0 and the half turn is -i sigma_x in the block.
    ExchangeParams sym = with_mixing_ratio(p, 0.0);
    const double t_half = time_for_phi(sym, 0.5 * pi);
    const NativeAngles sa = native_angles(sym, t_half);
    EXPECT_NEAR(sa.chi, 0.0, 1e-12);
    const Mat4 us = native_unitary(sym, t_half);
    const c64 ea = std::polar(1.0, sa.alpha);
    EXPECT_NEAR(std::abs(us(1, 2) - ea * c64(0.0, -1.0)), 0.0, 1e-9);
    EXPECT_NEAR(std::abs(us(1, 1)), 0.0, 1e-9);
}

TEST(ReferenceGates, PrintedForms) {
    EXPECT_LT(max_abs_diff(Mat4(reference_sqrt_swap() * reference_sqrt_swap()), reference_swap()),
              1e-15);
    EXPECT_LT(max_abs_diff(reference_swap_theta(0.0), Mat4(Mat4::Identity())), 1e-15);
    EXPECT_TRUE(approx_equal_up_to_phase(reference_swap_theta(0.5 * pi), reference_swap(), 1e-12));
    EXPECT_NEAR(std::abs(reference_cphase(pi)(3, 3) + 1.0), 0.0, 1e-15);
    EXPECT_LT(max_abs_diff(reference_givens(0.5 * pi), Mat4(Mat4::Identity())), 1e-15);

    // Sine-diagonal Givens at the complementary angle equals the
    // cosine-diagonal convention.
    const double chi = 0.3;
    Mat4 cos_conv = Mat4::Identity();
    cos_conv(1, 1) = cos_conv(2, 2) = std::cos(chi);
    cos_conv(1, 2) = -std::sin(chi);
    cos_conv(2, 1) = std::sin(chi);
    EXPECT_LT(max_abs_diff(reference_givens(0.5 * pi - chi), cos_conv), 1e-15);
}

TEST(Composites, CPhaseIdentity) {
    std::mt19937_64 gen(45);
    std::uniform_int_distribution<int> ns(0, 5);
    for (int i = 0; i < 200; ++i) {
        const ExchangeParams p = random_params(gen);
        const CompositeResult r = compose_cphase(p, ns(gen));
        ASSERT_LT(max_abs_diff(r.u, r.target), 1e-9);
        ASSERT_GT(process_fidelity(r.u, r.target), 1.0 - 1e-12);
    }
}

TEST(Composites, IsingIdentity) {
    std::mt19937_64 gen(46);
    std::uniform_int_distribution<int> ns(0, 5);
    for (int i = 0; i < 200; ++i) {
        const ExchangeParams p = random_params(gen);
        const CompositeResult r = compose_ising(p, ns(gen));
        ASSERT_LT(max_abs_diff(r.u, r.target), 1e-9);
        ASSERT_GT(process_fidelity(r.u, r.target), 1.0 - 1e-12);
    }
}

TEST(Composites, GivensSwapIdentity) {
    std::mt19937_64 gen(47);
    std::uniform_int_distribution<int> ns(0, 5);
    for (int i = 0; i < 200; ++i) {
        const ExchangeParams p = random_params(gen);
        const CompositeResult r = compose_givens_swap(p, ns(gen));
        ASSERT_LT(max_abs_diff(r.u, r.target), 1e-9);
        ASSERT_GT(process_fidelity(r.u, r.target), 1.0 - 1e-12);
    }
}

TEST(Composites, SwapRotationIdentity) {
    std::mt19937_64 gen(48);
    std::uniform_int_distribution<int> ns(0, 3);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        const double sign = unif(gen) > 0.0 ? 1.0 : -1.0;
        const ExchangeParams p = with_mixing_ratio(random_params(gen), sign);
        const double theta = pi * unif(gen);
        const CompositeResult r = compose_swap_rotation(p, theta, ns(gen));
        // Equality holds up to a global phase; process fidelity is exact.
        ASSERT_TRUE(approx_equal_up_to_phase(r.u, r.target, 1e-9));
        ASSERT_GT(process_fidelity(r.u, r.target), 1.0 - 1e-12);
    }
}

TEST(Composites, SwapRotationRequiresUnitMixing) {
    std::mt19937_64 gen(49);
    const ExchangeParams p = with_mixing_ratio(random_params(gen), 0.35);
    EXPECT_THROW(compose_swap_rotation(p, 0.7, 0), error);
    EXPECT_THROW(compose_cphase(p, -1), error);
}
