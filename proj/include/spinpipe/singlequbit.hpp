#pragma once
// Single-qubit control: the always-on-drive propagator, Stark-shift phase
// solves, frequency-bin assignment for multi-tone driving, and the drive
// amplitude / thermal initialization estimates.
//
// Phases are always relative to the reference frame rotating at the g = g_si
// Larmor frequency; g-factor deviations are additive (g = g_si + G).

#include <cmath>
#include <cstdlib>
#include <utility>
#include <vector>

#include "spinpipe/constants.hpp"
#include "spinpipe/linalg.hpp"

namespace spinpipe {

// Drive Hamiltonian, lab frame:
//   H = (hbar/2) omega0 sigma_z
//     + (hbar/2) omega1 [sigma_x cos(nu t + varphi) + sigma_y sin(nu t + varphi)].
// All rates are angular [rad/s]. `frame` selects the observation frame: the
// propagator is reported in the frame rotating at `frame` about z.
struct RabiParams {
    double omega0 = 0.0;  // qubit Larmor rate
    double omega1 = 0.0;  // transverse rotation rate
    double nu = 0.0;      // drive tone rate
    double varphi = 0.0;  // drive phase [rad]
    double frame = 0.0;   // observation frame rate
};

inline Mat2 rabi_unitary(const RabiParams& p, double t) {
    if (!(t >= 0.0)) throw error("rabi_unitary: time must be non-negative");
    const double delta = p.omega0 - p.nu;  // detuning, frame invariant
    const double nu_eff = p.nu - p.frame;
    const double omega_r = std::hypot(delta, p.omega1);
    const double half = 0.5 * t;
    const double c = std::cos(omega_r * half);
    const double s = (omega_r == 0.0) ? half : std::sin(omega_r * half) / omega_r;
    const c64 em = std::polar(1.0, -nu_eff * half);
    const c64 ep = std::polar(1.0, +nu_eff * half);
    Mat2 u;
    u(0, 0) = em * (c - iu * delta * s);
    u(0, 1) = -iu * p.omega1 * s * em * std::polar(1.0, -p.varphi);
    u(1, 0) = -iu * p.omega1 * s * ep * std::polar(1.0, +p.varphi);
    u(1, 1) = ep * (c + iu * delta * s);
    return u;
}

// Decomposition of a resonant lab-frame pulse as Z(phi_z) * X(pi/2).
// Requires zero detuning, zero drive phase, and a pulse area of pi/2.
inline double lab_frame_as_z_then_x90(const RabiParams& p, double t) {
    if (p.frame != 0.0) throw error("lab_frame_as_z_then_x90: expects the lab frame");
    if (std::abs(p.omega0 - p.nu) > 1e-9 * std::max(1.0, std::abs(p.omega0)))
        throw error("lab_frame_as_z_then_x90: drive is not resonant");
    if (std::abs(p.varphi) > 1e-12) throw error("lab_frame_as_z_then_x90: expects zero drive phase");
    if (std::abs(p.omega1 * t - 0.5 * pi) > 1e-9)
        throw error("lab_frame_as_z_then_x90: pulse area is not pi/2");
    return p.nu * t;
}

// Solution of a Stark phase request: the additive g shift, its gate-voltage
// realization, and the whole/fractional turns the qubit had before the shift.
struct StarkSolve {
    double delta_g = 0.0;
    double dV_q = 0.0;
    double dV_mu = 0.0;
    double r_q = 0.0;
    long long n_q = 0;
};

// Voltage pair realizing an additive g shift: dV_q on the plunger at
// k_volts_per_g, and the compensating dV_mu = -alpha_ratio * dV_q on the
// screening gate (alpha_ratio = alpha_qq / alpha_q-mu).
inline std::pair<double, double> gate_voltage_for_shift(double delta_g, double k_volts_per_g,
                                                        double alpha_ratio) {
    if (!std::isfinite(k_volts_per_g) || k_volts_per_g <= 0.0)
        throw error("gate_voltage_for_shift: voltage-per-g scale must be positive");
    if (!std::isfinite(alpha_ratio) || alpha_ratio == 0.0)
        throw error("gate_voltage_for_shift: lever-arm ratio must be finite and nonzero");
    const double dvq = k_volts_per_g * delta_g;
    return {dvq, -alpha_ratio * dvq};
}

// Smallest additive g shift making the frame-relative phase accrued over tau
// equal phi_q (mod 2 pi), given the qubit's g deviation G_q.
inline StarkSolve stark_shift_for_phase(double phi_q, double G_q, double B0, double tau,
                                        double k_volts_per_g = 615.0, double alpha_ratio = 1.0,
                                        const PhysConstants& pc = constants()) {
    if (!(B0 > 0.0)) throw error("stark_shift_for_phase: B0 must be positive");
    if (!(tau > 0.0)) throw error("stark_shift_for_phase: tau must be positive");
    double phi = std::fmod(phi_q, 2.0 * pi);
    if (phi < 0.0) phi += 2.0 * pi;

    const double zeta = G_q * pc.mu_B * B0 * tau / pc.hbar;
    const double turns = zeta / (2.0 * pi);
    const double n = std::floor(turns);

    StarkSolve s;
    s.n_q = static_cast<long long>(n);
    s.r_q = turns - n;
    s.delta_g = (phi - 2.0 * pi * s.r_q) * pc.hbar / (pc.mu_B * B0 * tau);
    std::tie(s.dV_q, s.dV_mu) = gate_voltage_for_shift(s.delta_g, k_volts_per_g, alpha_ratio);
    return s;
}

// Half period of the phase lattice: the |delta g| realizing a pi phase over tau.
inline double delta_g_pi(double B0, double tau, const PhysConstants& pc = constants()) {
    if (!(B0 > 0.0) || !(tau > 0.0)) throw error("delta_g_pi: B0 and tau must be positive");
    return pi * pc.hbar / (pc.mu_B * B0 * tau);
}

// Multi-tone drive plan: tones sit on a lattice of g-factor bins of width
// g_bin = 2 delta_g_pi, indexed -n_half..+n_half around g_si. Each qubit is
// Stark-shifted to its nearest bin, after which its detuning from that tone
// is exactly zero.
struct BinPlan {
    double g_bin = 0.0;
    double bin_spacing_hz = 0.0;
    int n_half = 0;
    std::vector<double> tone_hz;
    struct Assignment {
        int bin = 0;
        double delta_g = 0.0;
        double residual_hz = 0.0;
    };
    std::vector<Assignment> assignments;
};

inline BinPlan binning_plan(const std::vector<double>& g_deviation, double B0, double dg_pi,
                            int n_half, const PhysConstants& pc = constants()) {
    if (!(B0 > 0.0)) throw error("binning_plan: B0 must be positive");
    if (!(dg_pi > 0.0)) throw error("binning_plan: delta_g_pi must be positive");
    if (n_half < 0) throw error("binning_plan: bin count must be non-negative");

    BinPlan plan;
    plan.g_bin = 2.0 * dg_pi;
    plan.n_half = n_half;
    plan.bin_spacing_hz = plan.g_bin * pc.mu_B * B0 / pc.h;
    plan.tone_hz.reserve(2 * n_half + 1);
    for (int i = -n_half; i <= n_half; ++i)
        plan.tone_hz.push_back((pc.g_si + i * plan.g_bin) * pc.mu_B * B0 / pc.h);

    const double reach = (n_half + 0.5) * plan.g_bin;
    plan.assignments.reserve(g_deviation.size());
    for (std::size_t q = 0; q < g_deviation.size(); ++q) {
        const double g = g_deviation[q];
        const long long idx = std::llround(g / plan.g_bin);
        if (std::abs(g) > reach || std::llabs(idx) > n_half)
            throw error("binning_plan: qubit " + std::to_string(q) +
                        " g deviation is outside the bin lattice coverage");
        BinPlan::Assignment a;
        a.bin = static_cast<int>(idx);
        a.delta_g = idx * plan.g_bin - g;
        a.residual_hz = 0.0;
        plan.assignments.push_back(a);
    }
    return plan;
}

// Which amplitude convention converts a B1 field to the transverse rotation
// rate omega1. rwa_half halves the lab amplitude (rotating-wave average);
// full uses the bare coupling g mu_B B1 / hbar.
enum class RabiAmplitudeConvention { rwa_half, full };

inline double omega1_from_b1(double b1, RabiAmplitudeConvention conv,
                             const PhysConstants& pc = constants()) {
    const double bare = pc.g_si * pc.mu_B * b1 / pc.hbar;
    return conv == RabiAmplitudeConvention::rwa_half ? 0.5 * bare : bare;
}

// B1 amplitude for which a pi rotation takes exactly tau.
inline double b1_for_gate_time(double tau, RabiAmplitudeConvention conv = RabiAmplitudeConvention::rwa_half,
                               const PhysConstants& pc = constants()) {
    if (!(tau > 0.0)) throw error("b1_for_gate_time: tau must be positive");
    return conv == RabiAmplitudeConvention::rwa_half ? pc.h / (pc.g_si * pc.mu_B * tau)
                                                     : pc.h / (2.0 * pc.g_si * pc.mu_B * tau);
}

// Thermal initialization fidelity at field B0 and temperature T.
enum class InitFidelityConvention { half_zeeman, full_zeeman };

inline double init_fidelity(double temperature, double B0,
                            InitFidelityConvention conv = InitFidelityConvention::half_zeeman,
                            const PhysConstants& pc = constants()) {
    if (!(B0 > 0.0)) throw error("init_fidelity: B0 must be positive");
    if (temperature < 0.0) throw error("init_fidelity: temperature must be non-negative");
    if (temperature == 0.0) return 1.0;
    const double e_z = pc.g_si * pc.mu_B * B0;
    const double denom = conv == InitFidelityConvention::half_zeeman ? 2.0 : 1.0;
    return 1.0 - std::exp(-e_z / (denom * pc.k_B * temperature));
}

// Total multi-tone drive power relative to a single strong tone:
// n_tones * (B1_bin / B1_single)^2.
inline double power_scaling_check(double b1_single, double b1_bin, int n_tones) {
    if (!(b1_single > 0.0) || !(b1_bin > 0.0))
        throw error("power_scaling_check: amplitudes must be positive");
    if (n_tones <= 0) throw error("power_scaling_check: tone count must be positive");
    const double ratio = b1_bin / b1_single;
    return n_tones * ratio * ratio;
}

}  // namespace spinpipe
