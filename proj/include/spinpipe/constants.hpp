#pragma once
// SI constants (2019 exact values where defined) and the shared error type.
// Internal unit policy: energies in joules, times in seconds, fields in tesla;
// frequencies cross to Hz only at reporting boundaries, via h.

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace spinpipe {

inline constexpr double pi = std::numbers::pi;

struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PhysConstants {
    double h    = 6.62607015e-34;    // Planck constant [J s]
    double hbar = 1.054571817e-34;   // reduced Planck constant [J s]
    double mu_B = 9.2740100783e-24;  // Bohr magneton [J/T]
    double k_B  = 1.380649e-23;      // Boltzmann constant [J/K]
    double e    = 1.602176634e-19;   // elementary charge [C]
    double eps0 = 8.8541878128e-12;  // vacuum permittivity [F/m]
    double g_si = 2.0;               // reference electron g-factor in silicon

    void validate() const {
        if (!(h > 0.0) || !(hbar > 0.0) || !(mu_B > 0.0) || !(k_B > 0.0) ||
            !(e > 0.0) || !(eps0 > 0.0) || !(g_si > 0.0))
            throw error("constants: all physical constants must be positive");
        if (std::abs(h / (2.0 * pi * hbar) - 1.0) > 1e-9)
            throw error("constants: h and hbar are inconsistent");
    }
};

inline const PhysConstants& constants() {
    static const PhysConstants c;
    return c;
}

}  // namespace spinpipe
