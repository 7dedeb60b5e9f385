#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

#include "spinpipe/constants.hpp"
#include "spinpipe/twoqubit.hpp"

namespace spinpipe {

enum class GateKind { cphase, ising, givens_like };

// Target for the native-gate parameter solver. `angle` is the phase angle
// alpha for cphase/ising and the mixing angle chi for givens_like. g_i and
// g_j are the two qubits' g-factor deviations from the silicon bulk value.
struct GateTarget {
    GateKind kind = GateKind::cphase;
    double angle = pi;
    double tau2q = 1e-6;                  // synchronized two-qubit slot, s
    double b0 = 1.0;                      // T
    double dk = 1e-3 * constants().e;     // splitting of the charge states, J
    double eps = 0.0;                     // detuning from the symmetric point, J
    double g_i = 0.0;
    double g_j = 0.0;
    double delta_g_max = 1e-4;            // g-factor tuneability bound

    void validate() const {
        if (!std::isfinite(angle) || !std::isfinite(g_i) || !std::isfinite(g_j)) {
            throw error("GateTarget: non-finite input");
        }
        if (!(tau2q > 0.0) || !std::isfinite(tau2q)) {
            throw error("GateTarget: tau2q must be positive");
        }
        if (!(b0 > 0.0)) throw error("GateTarget: b0 must be positive");
        if (!(dk > 0.0)) throw error("GateTarget: dk must be positive");
        if (!(std::abs(eps) < dk)) throw error("GateTarget: requires |eps| < dk");
        if (!(delta_g_max > 0.0)) throw error("GateTarget: delta_g_max must be positive");
        constexpr double tol = 1e-12;
        if (kind == GateKind::cphase) {
            if (std::abs(std::remainder(angle, 2.0 * pi)) < tol) {
                throw error("GateTarget: cphase angle on the 2pi lattice is degenerate");
            }
        } else if (kind == GateKind::ising) {
            if (std::abs(std::abs(std::remainder(angle, 2.0 * pi)) - pi) < tol) {
                throw error("GateTarget: ising angle pi is degenerate");
            }
        } else {
            if (!(std::abs(angle) < 0.5 * pi) || std::abs(angle) < tol) {
                throw error("GateTarget: givens-like angle must lie strictly inside (0, pi/2)");
            }
        }
    }
};

struct NativeGateSolve {
    GateKind kind = GateKind::cphase;
    double x = 0.0;             // signed mixing ratio Delta_ij / J_ij
    int n = 0;                  // winding index of the lattice phase
    double j_ij = 0.0;          // exchange strength, J
    double t_ij = 0.0;          // tunnel coupling, J
    double delta_g = 0.0;       // fine-tune applied to qubit j
    double tau_realized = 0.0;  // s
    double delta_tau = 0.0;     // tau_realized - tau2q, s
    double chi = 0.0;           // realized mixing angle
    double phi = 0.0;           // lattice phase
    long long fallbacks = 0;    // inadmissible branches skipped in the n scan
    ExchangeParams params;      // exact device parameters of the native gate
};

// Inverse of the symmetric-point exchange strength J = 2 t^2 dK / (dK^2 - eps^2).
inline double tij_for_exchange(double j, double dk, double eps) {
    if (!(j >= 0.0)) throw error("tij_for_exchange: J must be non-negative");
    if (!(dk > 0.0) || !(std::abs(eps) < dk)) {
        throw error("tij_for_exchange: requires |eps| < dK");
    }
    return std::sqrt(j * (dk * dk - eps * eps) / (2.0 * dk));
}

namespace detail {

struct GateBranch {
    bool admissible = false;
    double phi = 0.0;
    double c = 0.0;      // phi cos(chi) = J t / hbar
    double abs_x = 0.0;  // |tan(chi)|; zero on the matched-Zeeman branch
};

inline GateBranch gate_branch(GateKind kind, double angle, int n) {
    GateBranch b;
    const double base = kind == GateKind::givens_like ? 0.5 * pi : pi;
    b.phi = base + 2.0 * pi * n;
    if (kind == GateKind::givens_like) {
        b.c = b.phi * std::cos(angle);
        b.abs_x = std::tan(angle);
        b.admissible = true;
        return b;
    }
    if (kind == GateKind::cphase) {
        b.c = 0.5 * angle;
    } else {
        const int k = n / 2;
        b.c = (2.0 * k - 1.0) * pi + angle;
    }
    if (!(b.c > 0.0) || b.c > b.phi) return b;
    b.abs_x = std::sqrt(std::max(b.phi * b.phi - b.c * b.c, 0.0)) / b.c;
    b.admissible = true;
    return b;
}

}  // namespace detail

// Solves the preconfiguration (x, n, J, t_ij, delta_g) realizing the target
// gate with the composite closest to the synchronized slot time. The branch
// scan and the delta_g fine-tune both use the shortcut J = |dE_Z| / |x|; the
// final tunnel coupling is then re-solved in closed form so the mixing ratio
// is exact, which leaves a small residual gate-time error delta_tau.
inline NativeGateSolve solve_native_gate(const GateTarget& t) {
    t.validate();
    const PhysConstants& pc = constants();
    const double mu_b0 = pc.mu_B * t.b0;

    double angle = t.angle;
    if (t.kind == GateKind::givens_like) {
        angle = std::abs(angle);
    } else {
        angle = std::fmod(angle, 2.0 * pi);
        if (angle < 0.0) angle += 2.0 * pi;
        if (angle == 0.0 && t.angle != 0.0) angle = 2.0 * pi;
    }

    const double dez0 = (t.g_i - t.g_j) * mu_b0;
    if (t.kind == GateKind::givens_like && dez0 == 0.0) {
        throw error("solve_native_gate: givens-like target needs a Zeeman difference");
    }
    const double dez_cap = t.delta_g_max * mu_b0;

    // Scan winding numbers until the shortcut time reaches tau2q; keep the
    // straddling candidates and pick the closer one (ties to smaller n).
    constexpr int n_max = 10000000;
    constexpr double x_floor = 1e-12;
    long long fallbacks = 0;
    int n_lo = -1;
    int n_hi = -1;
    double tau_lo = 0.0;
    double tau_hi = 0.0;
    for (int n = 0; n <= n_max; ++n) {
        const detail::GateBranch b = detail::gate_branch(t.kind, angle, n);
        if (!b.admissible) {
            ++fallbacks;
            continue;
        }
        double tau;
        if (b.abs_x < x_floor) {
            // Matched-Zeeman branch: J alone sets the time, so the slot time
            // is met exactly, provided delta_g can null the Zeeman difference.
            if (std::abs(dez0) > dez_cap) {
                ++fallbacks;
                continue;
            }
            tau = t.tau2q;
        } else {
            if (dez0 == 0.0) {
                ++fallbacks;
                continue;
            }
            tau = pc.hbar * std::sqrt(b.phi * b.phi - b.c * b.c) / std::abs(dez0);
        }
        if (tau >= t.tau2q) {
            n_hi = n;
            tau_hi = tau;
            break;
        }
        n_lo = n;
        tau_lo = tau;
    }
    if (n_hi < 0 && n_lo < 0) {
        throw error("solve_native_gate: no admissible winding number for this target");
    }
    int n_star;
    if (n_hi < 0) {
        n_star = n_lo;
    } else if (n_lo < 0) {
        n_star = n_hi;
    } else {
        n_star = std::abs(tau_lo - t.tau2q) <= std::abs(tau_hi - t.tau2q) ? n_lo : n_hi;
    }
    const detail::GateBranch b = detail::gate_branch(t.kind, angle, n_star);

    NativeGateSolve s;
    s.kind = t.kind;
    s.n = n_star;
    s.phi = b.phi;
    s.fallbacks = fallbacks;

    double delta_g = 0.0;
    double dez1 = dez0;
    double tij = 0.0;
    if (b.abs_x < x_floor) {
        delta_g = t.g_i - t.g_j;  // nulls the Zeeman difference exactly
        dez1 = 0.0;
        const double j = b.phi * pc.hbar / t.tau2q;
        tij = tij_for_exchange(j, t.dk, t.eps);
    } else {
        // Fine-tune delta_g on qubit j to put the shortcut time on the slot:
        // dense grid, then golden-section refinement around the best point.
        const double root = std::sqrt(b.phi * b.phi - b.c * b.c);
        const auto objective = [&](double dg) {
            const double dez = dez0 - dg * mu_b0;
            if (dez == 0.0) return std::numeric_limits<double>::infinity();
            return std::abs(pc.hbar * root / std::abs(dez) - t.tau2q);
        };
        constexpr int grid_points = 10001;
        const double step = 2.0 * t.delta_g_max / (grid_points - 1);
        double best = -t.delta_g_max;
        double best_f = objective(best);
        for (int i = 1; i < grid_points; ++i) {
            const double dg = -t.delta_g_max + i * step;
            const double f = objective(dg);
            if (f < best_f) {
                best = dg;
                best_f = f;
            }
        }
        double lo = std::max(-t.delta_g_max, best - step);
        double hi = std::min(t.delta_g_max, best + step);
        const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
        double c1 = hi - gr * (hi - lo);
        double d1 = lo + gr * (hi - lo);
        double fc = objective(c1);
        double fd = objective(d1);
        for (int it = 0; it < 200; ++it) {
            if (fc < fd) {
                hi = d1;
                d1 = c1;
                fd = fc;
                c1 = hi - gr * (hi - lo);
                fc = objective(c1);
            } else {
                lo = c1;
                c1 = d1;
                fc = fd;
                d1 = lo + gr * (hi - lo);
                fd = objective(d1);
            }
        }
        delta_g = 0.5 * (lo + hi);
        if (objective(delta_g) > best_f) delta_g = best;
        if (objective(delta_g) > 1e-6 * t.tau2q) {
            throw error("solve_native_gate: delta_g range exhausted before reaching the slot time");
        }
        dez1 = dez0 - delta_g * mu_b0;

        // Closed-form coupling solve holding the branch mixing ratio exactly.
        // With exchange rates quadratic in t_ij, t^2 = dE_Z' / (x J1 - skew1)
        // at unit-scale coupling values J1, skew1.
        const double x = (dez1 >= 0.0 ? 1.0 : -1.0) * b.abs_x;
        ExchangeParams unit;
        unit.t_ij = t.dk;
        unit.dk = t.dk;
        unit.eps = t.eps;
        unit.e_z = 0.0;
        unit.de_z = dez1;
        const double jij1 = exchange_strength(unit);
        const double skew1 = 0.5 * (exchange_j_i(unit) - exchange_j_j(unit));
        const double denom = x * jij1 - skew1;
        const double ratio = denom == 0.0 ? -1.0 : dez1 / denom;
        if (!(ratio > 0.0)) {
            throw error("solve_native_gate: coupling inversion failed for this branch");
        }
        tij = t.dk * std::sqrt(ratio);
    }

    ExchangeParams p;
    p.t_ij = tij;
    p.dk = t.dk;
    p.eps = t.eps;
    p.de_z = dez1;
    p.e_z = 0.5 * (2.0 * pc.g_si + t.g_i + t.g_j + delta_g) * mu_b0;

    const double j_exact = exchange_strength(p);
    const double delta = p.de_z + 0.5 * (exchange_j_i(p) - exchange_j_j(p));
    s.params = p;
    s.j_ij = j_exact;
    s.t_ij = tij;
    s.delta_g = delta_g;
    s.x = delta / j_exact;
    s.chi = std::atan2(delta, j_exact);
    s.tau_realized = b.phi * pc.hbar / std::hypot(delta, j_exact);
    s.delta_tau = s.tau_realized - t.tau2q;
    return s;
}

inline NativeGateSolve solve_phase_gate(const GateTarget& t) {
    if (t.kind == GateKind::givens_like) {
        throw error("solve_phase_gate: kind must be cphase or ising");
    }
    return solve_native_gate(t);
}

inline NativeGateSolve solve_givens_like(const GateTarget& t) {
    if (t.kind != GateKind::givens_like) {
        throw error("solve_givens_like: kind must be givens_like");
    }
    return solve_native_gate(t);
}

inline CompositeResult composite_for_solve(const NativeGateSolve& s) {
    switch (s.kind) {
        case GateKind::cphase:
            return compose_cphase(s.params, s.n);
        case GateKind::ising:
            return compose_ising(s.params, s.n);
        case GateKind::givens_like:
            return compose_givens_swap(s.params, s.n);
    }
    throw error("composite_for_solve: unknown gate kind");
}

}  // namespace spinpipe
