#pragma once
// Landau-Zener adiabaticity of the single-passage interdot ramp and the
// global shuttling schedule. The drive ramps the detuning across the charge
// anticrossing at rate set by omega; one column advance costs one full drive
// period 2 pi / omega. Columns carry two wiring labels: the drive phase
// (column mod 3, the three-waveform conveyor) and the ac-combining group
// (column mod 5, the shared-bias wiring). A period is replayed as 3 or 5
// sub-steps, one hop per electron per period either way, and the two pictures
// agree at every period boundary; maximal filling keeps at least three empty
// sites between electrons at rest and at least two mid-period.

#include <cmath>
#include <iomanip>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "spinpipe/constants.hpp"

namespace spinpipe {

struct ShuttleSpec {
    double t_ij = 0.0;         // tunnel coupling at the anticrossing, J
    double a = 0.0;            // ramp amplitude A = e alpha dV, J
    double omega = 0.0;        // drive rate, rad/s
    double alpha_lever = 0.0;  // lever arm of the driven gate
    double dv_range = 0.0;     // drive voltage range, V

    void validate(const PhysConstants& pc = constants()) const {
        if (!std::isfinite(t_ij) || t_ij < 0.0)
            throw error("ShuttleSpec: t_ij must be finite and non-negative");
        if (!(a > 0.0) || !(omega > 0.0) || !(alpha_lever > 0.0) || !(dv_range > 0.0))
            throw error("ShuttleSpec: a, omega, alpha_lever, dv_range must be positive");
        const double expected = pc.e * alpha_lever * dv_range;
        if (std::abs(a - expected) > 1e-6 * expected)
            throw error("ShuttleSpec: ramp amplitude inconsistent with e * alpha * dV");
    }
};

inline double ramp_amplitude(double alpha_lever, double dv_range,
                             const PhysConstants& pc = constants()) {
    if (!(alpha_lever > 0.0) || !(dv_range > 0.0))
        throw error("ramp_amplitude: alpha_lever and dv_range must be positive");
    return pc.e * alpha_lever * dv_range;
}

inline ShuttleSpec make_shuttle_spec(double t_ij, double alpha_lever, double dv_range,
                                     double omega, const PhysConstants& pc = constants()) {
    ShuttleSpec s;
    s.t_ij = t_ij;
    s.alpha_lever = alpha_lever;
    s.dv_range = dv_range;
    s.omega = omega;
    s.a = ramp_amplitude(alpha_lever, dv_range, pc);
    s.validate(pc);
    return s;
}

// Single-passage transition probability P = exp(-2 pi delta) with the
// adiabaticity parameter delta = t_ij^2 / (4 A hbar omega).
inline double lz_probability(const ShuttleSpec& s, const PhysConstants& pc = constants()) {
    s.validate(pc);
    const double delta = s.t_ij * s.t_ij / (4.0 * s.a * pc.hbar * s.omega);
    return std::exp(-2.0 * pi * delta);
}

// Largest drive rate keeping the single-passage transition probability at or
// below p_max. `forbidden_omega` lists open (lo, hi) valley-orbit resonance
// windows; a solution inside a window is slowed to the window's lower edge.
inline double omega_for_probability(double t_ij, double a, double p_max,
                                    const std::vector<std::pair<double, double>>&
                                        forbidden_omega = {},
                                    const PhysConstants& pc = constants()) {
    if (!(t_ij > 0.0)) throw error("omega_for_probability: t_ij must be positive");
    if (!(a > 0.0)) throw error("omega_for_probability: ramp amplitude must be positive");
    if (!(p_max > 0.0) || !(p_max < 1.0))
        throw error("omega_for_probability: p_max must lie in (0, 1)");
    for (const auto& [lo, hi] : forbidden_omega) {
        if (!(lo > 0.0) || !(hi > lo))
            throw error("omega_for_probability: forbidden windows need 0 < lo < hi");
    }
    const double delta = -std::log(p_max) / (2.0 * pi);
    double omega = t_ij * t_ij / (4.0 * a * pc.hbar * delta);
    // Lowering omega only lowers the probability, so dropping to a window's
    // lower edge stays admissible; iterate in case the edge lands in another.
    for (std::size_t pass = 0; pass <= forbidden_omega.size(); ++pass) {
        bool moved = false;
        for (const auto& [lo, hi] : forbidden_omega) {
            if (omega > lo && omega < hi) {
                omega = lo;
                moved = true;
            }
        }
        if (!moved) return omega;
    }
    return omega;
}

// Shortest column-advance time (one drive period) meeting p_max.
inline double min_shuttle_time(double t_ij, double a, double p_max,
                               const std::vector<std::pair<double, double>>& forbidden_omega = {},
                               const PhysConstants& pc = constants()) {
    return 2.0 * pi / omega_for_probability(t_ij, a, p_max, forbidden_omega, pc);
}

// Electron spacing in columns: maximal filling is one electron per five
// physical gate columns. Spacings below three put electrons on adjacent
// sites mid-period, so they are rejected at construction.
struct Filling {
    int period = 5;
    static Filling maximal() { return {5}; }
    static Filling custom(int k) { return {k}; }
};

namespace detail {
inline long long floor_mod(long long x, long long m) { return ((x % m) + m) % m; }
}  // namespace detail

// Per-column wiring labels plus the sliding occupancy pattern. Columns index
// from the input end; electrons advance one column per period, so column c is
// occupied at period t iff (c - t) is a multiple of the fill period (the
// pattern extends beyond the window, electrons enter and leave it).
struct WaveformSchedule {
    int n_columns = 0;
    double tau_s = 0.0;  // one drive period, s
    int fill_period = 5;
    std::vector<int> phase;     // column mod 3 drive waveform
    std::vector<int> ac_group;  // column mod 5 combining group

    bool occupied(long long period, int column) const {
        return detail::floor_mod(column - period, fill_period) == 0;
    }
    std::vector<int> occupied_columns(long long period) const {
        std::vector<int> occ;
        for (int c = 0; c < n_columns; ++c) {
            if (occupied(period, c)) occ.push_back(c);
        }
        return occ;
    }
};

inline WaveformSchedule waveform_schedule(int n_columns, double tau_s,
                                          Filling filling = Filling::maximal()) {
    if (n_columns < 1) throw error("waveform_schedule: need at least one column");
    if (!(tau_s > 0.0)) throw error("waveform_schedule: tau_s must be positive");
    if (filling.period < 3)
        throw error("waveform_schedule: filling below every third column puts electrons on "
                    "adjacent sites mid-period");
    WaveformSchedule w;
    w.n_columns = n_columns;
    w.tau_s = tau_s;
    w.fill_period = filling.period;
    w.phase.resize(std::size_t(n_columns));
    w.ac_group.resize(std::size_t(n_columns));
    for (int c = 0; c < n_columns; ++c) {
        w.phase[std::size_t(c)] = c % 3;
        w.ac_group[std::size_t(c)] = c % 5;
    }
    return w;
}

namespace detail {
inline void check_not_adjacent(const std::vector<int>& occ) {
    for (std::size_t i = 1; i < occ.size(); ++i) {
        if (occ[i] - occ[i - 1] < 2) throw error("shuttle schedule: adjacent occupied columns");
    }
}
}  // namespace detail

// Occupancy frames at period resolution, adjacency-checked.
inline std::vector<std::vector<int>> period_timeline(const WaveformSchedule& w,
                                                     long long n_periods) {
    if (n_periods < 1) throw error("period_timeline: need at least one period");
    std::vector<std::vector<int>> frames;
    frames.reserve(std::size_t(n_periods));
    for (long long t = 0; t < n_periods; ++t) {
        frames.push_back(w.occupied_columns(t));
        detail::check_not_adjacent(frames.back());
    }
    return frames;
}

// Occupancy frames within each period under one of the two wiring pictures:
// `substeps` = 3 replays the drive-phase attribution (an electron hops into
// column c at sub-step c mod 3), `substeps` = 5 the ac-group attribution
// (hop at sub-step c mod 5). Each electron hops exactly once per period, so
// both pictures reproduce the period timeline at every period boundary.
// Frame (t, u) is the state after sub-step u; frames are adjacency-checked.
inline std::vector<std::vector<int>> substep_timeline(const WaveformSchedule& w,
                                                      long long n_periods, int substeps) {
    if (substeps != 3 && substeps != 5)
        throw error("substep_timeline: substeps must be 3 (drive phases) or 5 (ac groups)");
    if (n_periods < 1) throw error("substep_timeline: need at least one period");
    const long long k = w.fill_period;
    std::vector<std::vector<int>> frames;
    frames.reserve(std::size_t(n_periods * substeps));
    for (long long t = 0; t < n_periods; ++t) {
        for (int u = 0; u < substeps; ++u) {
            std::vector<int> occ;
            for (int c = 0; c < w.n_columns; ++c) {
                const bool resting = detail::floor_mod(c - t, k) == 0 &&
                                     detail::floor_mod(c + 1, substeps) > u;
                const bool hopped = detail::floor_mod(c - 1 - t, k) == 0 &&
                                    detail::floor_mod(c, substeps) <= u;
                if (resting || hopped) occ.push_back(c);
            }
            detail::check_not_adjacent(occ);
            frames.push_back(std::move(occ));
        }
    }
    return frames;
}

// CSV timeline at period resolution: one row per (timestep, column).
inline std::string schedule_to_csv(const WaveformSchedule& w, long long n_periods) {
    if (n_periods < 1) throw error("schedule_to_csv: need at least one period");
    std::ostringstream os;
    os << "timestep,column,phase,occupied\n";
    for (long long t = 0; t < n_periods; ++t) {
        for (int c = 0; c < w.n_columns; ++c) {
            os << t << ',' << c << ',' << w.phase[std::size_t(c)] << ','
               << (w.occupied(t, c) ? 1 : 0) << '\n';
        }
    }
    return os.str();
}

}  // namespace spinpipe
