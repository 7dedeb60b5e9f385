#pragma once
// Monte Carlo fidelity maps for the noise-sensitivity studies: Z phase gates
// under timing and gate-voltage noise, engineered two-qubit composites under
// tunnel-coupling drift, and binned X(pi/2) pulses under drive-amplitude and
// timing noise. Maps are deterministic for a fixed seed: every sample draws
// from a counter RNG keyed by (map, cell, sample), so values do not depend on
// evaluation order or parallel scheduling. Gaussian draws are truncated at
// +-6 sigma; clamps are counted. Solver failures are counted per cell and
// excluded from the mean, never silently dropped.

#include <array>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "spinpipe/constants.hpp"
#include "spinpipe/engineer.hpp"
#include "spinpipe/fidelity.hpp"
#include "spinpipe/rng.hpp"
#include "spinpipe/singlequbit.hpp"

namespace spinpipe {

// Noise magnitudes plus the device working point the maps evaluate at. Each
// map sweeps two sigmas over its grid arguments; the remaining fields supply
// the static scatter and the operating parameters.
struct NoiseModel {
    double sigma_g = 1e-3 * constants().g_si;  // g-factor scatter (std dev)
    double sigma_tau = 0.0;                    // gate-time jitter, s
    double sigma_v = 0.0;                      // gate-voltage noise, V
    double sigma_tij_rel = 0.0;                // relative tunnel-coupling drift
    double sigma_b1 = 0.0;                     // drive-amplitude noise, T
    int n_samples = 1000;
    std::uint64_t seed = 1;

    double b0 = 1.0;                   // T
    double tau_1q = 1e-6;              // single-qubit slot, s
    double tau_2q = 1e-6;              // two-qubit slot, s
    double dk = 1e-3 * constants().e;  // charge splitting, J
    double volt_per_g = 615.0;         // plunger volts per unit delta g
    double delta_g_max = 1e-4;         // g-factor tuneability bound

    void validate() const {
        const double sigmas[] = {sigma_g, sigma_tau, sigma_v, sigma_tij_rel, sigma_b1};
        for (double s : sigmas) {
            if (!std::isfinite(s) || s < 0.0)
                throw error("NoiseModel: sigmas must be finite and non-negative");
        }
        if (n_samples < 1) throw error("NoiseModel: n_samples must be at least 1");
        if (!(b0 > 0.0) || !(tau_1q > 0.0) || !(tau_2q > 0.0) || !(dk > 0.0))
            throw error("NoiseModel: b0, tau_1q, tau_2q, dk must be positive");
        if (!(volt_per_g > 0.0)) throw error("NoiseModel: volt_per_g must be positive");
        if (!(delta_g_max > 0.0)) throw error("NoiseModel: delta_g_max must be positive");
    }
};

// Mean process fidelity and its standard error on a labeled 2D grid, stored
// row-major as [axis1][axis2]. `failed[i][j]` counts samples whose gate solve
// threw (those are excluded from the cell mean; a cell with every sample
// failed reports mean = 0, sem = 0). Means are clamped to [0, 1].
struct FidelityMap {
    std::string axis1_label;
    std::string axis2_label;
    std::vector<double> axis1;
    std::vector<double> axis2;
    std::vector<std::vector<double>> mean;
    std::vector<std::vector<double>> sem;
    std::vector<std::vector<long long>> failed;
    long long truncations = 0;    // +-6 sigma clamps across all draws
    long long solver_errors = 0;  // total failed samples
    int n_samples = 0;
    std::uint64_t seed = 0;
};

inline std::string map_to_csv(const FidelityMap& m) {
    std::ostringstream os;
    os << std::setprecision(17);
    os << "axis1,axis2,mean,stderr\n";
    for (std::size_t i = 0; i < m.axis1.size(); ++i) {
        for (std::size_t j = 0; j < m.axis2.size(); ++j) {
            os << m.axis1[i] << ',' << m.axis2[j] << ',' << m.mean[i][j] << ',' << m.sem[i][j]
               << '\n';
        }
    }
    return os.str();
}

inline nlohmann::json map_to_json(const FidelityMap& m) {
    return nlohmann::json{{"axis1_label", m.axis1_label}, {"axis1", m.axis1},
                          {"axis2_label", m.axis2_label}, {"axis2", m.axis2},
                          {"mean", m.mean},               {"stderr", m.sem},
                          {"failed", m.failed},           {"truncations", m.truncations},
                          {"solver_errors", m.solver_errors}, {"n_samples", m.n_samples},
                          {"seed", m.seed}};
}

namespace detail {

// Key tags keeping the per-map RNG streams disjoint.
inline constexpr std::uint64_t kZMapTag = 1;
inline constexpr std::uint64_t kTwoQubitPairTag = 2;
inline constexpr std::uint64_t kTwoQubitDriftTag = 3;
inline constexpr std::uint64_t kX90Tag = 4;

inline void check_sigma_grid(const char* name, const std::vector<double>& g) {
    if (g.empty()) throw error(std::string(name) + ": grid must be non-empty");
    for (double v : g) {
        if (!std::isfinite(v) || v < 0.0)
            throw error(std::string(name) + ": grid sigmas must be finite and non-negative");
    }
}

// Streaming mean / standard error of the mean (Welford).
struct RunningStats {
    long long n = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x) {
        ++n;
        const double d = x - mean;
        mean += d / double(n);
        m2 += d * (x - mean);
    }
    double sem() const {
        if (n < 2) return 0.0;
        const double var = m2 / double(n - 1);
        return std::sqrt((var > 0.0 ? var : 0.0) / double(n));
    }
};

inline FidelityMap blank_map(const char* l1, const char* l2, const std::vector<double>& a1,
                             const std::vector<double>& a2, const NoiseModel& nm) {
    FidelityMap m;
    m.axis1_label = l1;
    m.axis2_label = l2;
    m.axis1 = a1;
    m.axis2 = a2;
    m.mean.assign(a1.size(), std::vector<double>(a2.size(), 0.0));
    m.sem.assign(a1.size(), std::vector<double>(a2.size(), 0.0));
    m.failed.assign(a1.size(), std::vector<long long>(a2.size(), 0));
    m.n_samples = nm.n_samples;
    m.seed = nm.seed;
    return m;
}

inline double clamp_fidelity(double f) { return f < 0.0 ? 0.0 : (f > 1.0 ? 1.0 : f); }

}  // namespace detail

// Fidelity of a Stark Z(pi) against gate-time jitter (axis 1, seconds) and
// gate-voltage noise (axis 2, volts). Each sample draws a qubit g deviation,
// solves the pi phase exactly, then perturbs the duration and the plunger
// voltage; the realized phase keeps the full winding accrued over the slot,
// so timing jitter is amplified by the qubit's total turn count.
inline FidelityMap z_gate_fidelity_map(const std::vector<double>& grid_sigma_tau,
                                       const std::vector<double>& grid_sigma_v,
                                       const NoiseModel& nm,
                                       const PhysConstants& pc = constants()) {
    nm.validate();
    detail::check_sigma_grid("z_gate_fidelity_map: sigma_tau", grid_sigma_tau);
    detail::check_sigma_grid("z_gate_fidelity_map: sigma_v", grid_sigma_v);

    FidelityMap m = detail::blank_map("sigma_tau_s", "sigma_v_volt", grid_sigma_tau, grid_sigma_v, nm);
    const double rate = pc.mu_B * nm.b0 / pc.hbar;  // phase rate per unit g
    const Mat2 target = rot_z(pi);

    for (std::size_t i = 0; i < grid_sigma_tau.size(); ++i) {
        for (std::size_t j = 0; j < grid_sigma_v.size(); ++j) {
            detail::RunningStats st;
            for (int s = 0; s < nm.n_samples; ++s) {
                CounterRng rng{mix_key(nm.seed, {detail::kZMapTag, i, j, std::uint64_t(s)}), 0};
                const double g = rng.normal_clamped(nm.sigma_g, 6.0, &m.truncations);
                const StarkSolve sol =
                    stark_shift_for_phase(pi, g, nm.b0, nm.tau_1q, nm.volt_per_g, 1.0, pc);
                const double dtau = rng.normal_clamped(grid_sigma_tau[i], 6.0, &m.truncations);
                const double dv = rng.normal_clamped(grid_sigma_v[j], 6.0, &m.truncations);
                const double phase =
                    (g + sol.delta_g + dv / nm.volt_per_g) * rate * (nm.tau_1q + dtau);
                st.add(detail::clamp_fidelity(process_fidelity(target, rot_z(phase))));
            }
            m.mean[i][j] = st.mean;
            m.sem[i][j] = st.sem();
        }
    }
    return m;
}

enum class TwoQubitMapKind { ising = 0, givens_swap = 1, swap_rotation = 2 };

namespace detail {

struct TwoQubitSample {
    bool ok = false;
    NativeGateSolve solve;
    CompositeResult comp;
};

// Rebuild a composite with the engineered control settings (wrapper angles,
// prefactor, pulse duration) held at their nominal values while the native
// evolutions run under drifted tunnel couplings. The hardware cannot track
// the drift, so the duration is NOT re-synchronized to the perturbed J.
inline Mat4 drifted_composite(TwoQubitMapKind kind, const CompositeResult& nom, double theta,
                              const ExchangeParams& base, double f_first, double f_second,
                              const PhysConstants& pc) {
    ExchangeParams first = base;
    first.t_ij *= f_first;
    if (kind == TwoQubitMapKind::swap_rotation) {
        ExchangeParams second = base;
        second.t_ij *= f_second;
        const double s = nom.angles.x > 0.0 ? 1.0 : -1.0;
        const Mat4 interior = kron(rot_z(s * theta), rot_z(-s * theta));
        return nom.prefactor *
               (zz_wrapper(nom.wrapper_z) * reference_ising(nom.wrapper_ising) *
                native_unitary(second, nom.t, pc) * interior * native_unitary(first, nom.t, pc));
    }
    return zz_wrapper(nom.wrapper_z) * (nom.prefactor * native_unitary(first, nom.t, pc));
}

}  // namespace detail

// Fidelity of an engineered two-qubit composite against multiplicative tunnel
// coupling drift. Axis 1 is the target angle (chi for GIVENS_SWAP, alpha for
// ISING, theta for SWAP_ROTATION), axis 2 the relative drift sigma. Common
// random numbers across the grid: qubit pairs are keyed per (kind, sample)
// and drift shapes per (kind, sample, pulse) as unit normals scaled by each
// cell's sigma, so every cell sees the same ensemble and the monotone-in-
// sigma and angle-spread trends are not masked by sampling scatter. The two
// pulses of a swap rotation drift independently. Gates are solved at the
// symmetric point; pairs whose Zeeman difference cannot reach the target
// branch within the delta-g budget are counted in `failed`, not dropped.
inline FidelityMap two_qubit_fidelity_map(TwoQubitMapKind kind,
                                          const std::vector<double>& grid_angle,
                                          const std::vector<double>& grid_sigma_tij,
                                          const NoiseModel& nm,
                                          const PhysConstants& pc = constants()) {
    nm.validate();
    if (grid_angle.empty()) throw error("two_qubit_fidelity_map: angle grid must be non-empty");
    for (double a : grid_angle) {
        if (!std::isfinite(a)) throw error("two_qubit_fidelity_map: angles must be finite");
    }
    detail::check_sigma_grid("two_qubit_fidelity_map: sigma_tij", grid_sigma_tij);

    FidelityMap m =
        detail::blank_map("angle_rad", "sigma_tij_rel", grid_angle, grid_sigma_tij, nm);
    const std::uint64_t kind_id = std::uint64_t(kind);
    const int pulses = kind == TwoQubitMapKind::swap_rotation ? 2 : 1;

    // Unit drift shapes shared by every cell.
    std::vector<std::array<double, 2>> xi(std::size_t(nm.n_samples), {0.0, 0.0});
    for (int s = 0; s < nm.n_samples; ++s) {
        for (int k = 0; k < pulses; ++k) {
            CounterRng rng{mix_key(nm.seed, {detail::kTwoQubitDriftTag, kind_id,
                                             std::uint64_t(s), std::uint64_t(k)}),
                           0};
            xi[std::size_t(s)][std::size_t(k)] = rng.normal_clamped(1.0, 6.0, &m.truncations);
        }
    }

    for (std::size_t a = 0; a < grid_angle.size(); ++a) {
        const double angle = grid_angle[a];

        // One solve per sample, reused across the whole sigma axis. The pair
        // stream does not depend on the angle; clamps are counted once.
        long long discard = 0;
        long long* pair_trunc = a == 0 ? &m.truncations : &discard;
        std::vector<detail::TwoQubitSample> samples(std::size_t(nm.n_samples));
        for (int s = 0; s < nm.n_samples; ++s) {
            CounterRng rng{mix_key(nm.seed, {detail::kTwoQubitPairTag, kind_id,
                                             std::uint64_t(s)}),
                           0};
            GateTarget t;
            t.g_i = rng.normal_clamped(nm.sigma_g, 6.0, pair_trunc);
            t.g_j = rng.normal_clamped(nm.sigma_g, 6.0, pair_trunc);
            t.tau2q = nm.tau_2q;
            t.b0 = nm.b0;
            t.dk = nm.dk;
            t.eps = 0.0;
            t.delta_g_max = nm.delta_g_max;
            switch (kind) {
                case TwoQubitMapKind::ising:
                    t.kind = GateKind::ising;
                    t.angle = angle;
                    break;
                case TwoQubitMapKind::givens_swap:
                    t.kind = GateKind::givens_like;
                    t.angle = angle;
                    break;
                case TwoQubitMapKind::swap_rotation:
                    t.kind = GateKind::givens_like;
                    t.angle = 0.25 * pi;  // |x| = 1 branch; theta lives in the wrappers
                    break;
            }
            detail::TwoQubitSample& smp = samples[std::size_t(s)];
            try {
                smp.solve = solve_native_gate(t);
                smp.comp = kind == TwoQubitMapKind::swap_rotation
                               ? compose_swap_rotation(smp.solve.params, angle, smp.solve.n, pc)
                               : composite_for_solve(smp.solve);
                smp.ok = true;
            } catch (const error&) {
                smp.ok = false;
            }
        }

        for (std::size_t g = 0; g < grid_sigma_tij.size(); ++g) {
            const double sigma = grid_sigma_tij[g];
            detail::RunningStats st;
            for (int s = 0; s < nm.n_samples; ++s) {
                const detail::TwoQubitSample& smp = samples[std::size_t(s)];
                if (!smp.ok) {
                    ++m.failed[a][g];
                    ++m.solver_errors;
                    continue;
                }
                const double f0 = 1.0 + sigma * xi[std::size_t(s)][0];
                const double f1 = 1.0 + sigma * xi[std::size_t(s)][1];
                const Mat4 noisy = detail::drifted_composite(kind, smp.comp, angle,
                                                             smp.solve.params, f0, f1, pc);
                st.add(detail::clamp_fidelity(process_fidelity(smp.comp.target, noisy)));
            }
            m.mean[a][g] = st.n > 0 ? st.mean : 0.0;
            m.sem[a][g] = st.sem();
        }
    }
    return m;
}

// Fidelity of a binned X(pi/2) pulse against drive-amplitude noise (axis 1,
// tesla) and timing jitter (axis 2, seconds). The qubit sits exactly on the
// tone of bin `bin_index`; the propagator is evaluated in the frame of the
// central tone and compared against Z(dnu * t) X(pi/2) with the deterministic
// frame phase absorbed at the realized duration, so the residual error is the
// pulse-area error and the map is bin-independent up to sampling noise.
inline FidelityMap x90_fidelity_map(const std::vector<double>& grid_sigma_b1,
                                    const std::vector<double>& grid_sigma_tau, int bin_index,
                                    const NoiseModel& nm, const PhysConstants& pc = constants()) {
    nm.validate();
    detail::check_sigma_grid("x90_fidelity_map: sigma_b1", grid_sigma_b1);
    detail::check_sigma_grid("x90_fidelity_map: sigma_tau", grid_sigma_tau);

    FidelityMap m =
        detail::blank_map("sigma_b1_tesla", "sigma_tau_s", grid_sigma_b1, grid_sigma_tau, nm);
    const double g_bin = 2.0 * delta_g_pi(nm.b0, nm.tau_1q, pc);
    const double omega_frame = pc.g_si * pc.mu_B * nm.b0 / pc.hbar;
    const double omega0 = (pc.g_si + bin_index * g_bin) * pc.mu_B * nm.b0 / pc.hbar;
    const double dnu = omega0 - omega_frame;
    const double b1 = b1_for_gate_time(nm.tau_1q, RabiAmplitudeConvention::rwa_half, pc);
    const double w1 = omega1_from_b1(b1, RabiAmplitudeConvention::rwa_half, pc);
    const double t0 = 0.5 * nm.tau_1q;  // pi/2 area at the pi-pulse rate
    const Mat2 x90 = rot_x(0.5 * pi);

    for (std::size_t i = 0; i < grid_sigma_b1.size(); ++i) {
        for (std::size_t j = 0; j < grid_sigma_tau.size(); ++j) {
            detail::RunningStats st;
            for (int s = 0; s < nm.n_samples; ++s) {
                CounterRng rng{mix_key(nm.seed, {detail::kX90Tag, std::uint64_t(bin_index), i, j,
                                                 std::uint64_t(s)}),
                               0};
                const double db1 = rng.normal_clamped(grid_sigma_b1[i], 6.0, &m.truncations);
                const double dt = rng.normal_clamped(grid_sigma_tau[j], 6.0, &m.truncations);
                const double t = std::max(t0 + dt, 0.0);
                RabiParams rp;
                rp.omega0 = omega0;
                rp.omega1 = w1 * (b1 + db1) / b1;
                rp.nu = omega0;
                rp.varphi = 0.0;
                rp.frame = omega_frame;
                const Mat2 noisy = rabi_unitary(rp, t);
                const Mat2 target = rot_z(dnu * t) * x90;
                st.add(detail::clamp_fidelity(process_fidelity(target, noisy)));
            }
            m.mean[i][j] = st.mean;
            m.sem[i][j] = st.sem();
        }
    }
    return m;
}

}  // namespace spinpipe
