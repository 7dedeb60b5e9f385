#pragma once
// Two-qubit exchange physics for a nearest-neighbour dot pair, in the basis
// {up-up, up-down, down-up, down-down}. Qubit i is the left (first) factor and
// provides the Zeeman reference e_z; de_z = E_Z,j - E_Z,i. All energies are
// joules. The total-spin projection m_z is conserved: the Hamiltonian and the
// native unitary are block diagonal with an inner {up-down, down-up} block.

#include <cmath>
#include <complex>

#include "spinpipe/constants.hpp"
#include "spinpipe/fidelity.hpp"
#include "spinpipe/linalg.hpp"

namespace spinpipe {

struct ExchangeParams {
    double t_ij = 0.0;  // tunnel coupling [J]
    double dk = 0.0;    // splitting to the nearest excited charge state [J]
    double eps = 0.0;   // detuning from the charge-symmetry point [J]
    double e_z = 0.0;   // Zeeman energy of dot i [J]
    double de_z = 0.0;  // Zeeman difference between the dots [J]
};

// One perturbative exchange term t^2 / (s1 de_z + s2 dk + s3 eps).
inline double exchange_term(const ExchangeParams& p, int s1, int s2, int s3) {
    if (!(p.dk > 0.0)) throw error("exchange_term: dk must be positive");
    const double denom = s1 * p.de_z + s2 * p.dk + s3 * p.eps;
    if (std::abs(denom) < 1e-6 * p.dk)
        throw error("exchange_term: denominator within 1e-6 dk of the charge resonance");
    return p.t_ij * p.t_ij / denom;
}

// Exchange strength J_ij coupling the m_z = 0 states.
inline double exchange_strength(const ExchangeParams& p) {
    return 0.5 * (exchange_term(p, 1, 1, 1) + exchange_term(p, 1, 1, -1) +
                  exchange_term(p, -1, 1, 1) + exchange_term(p, -1, 1, -1));
}

// Level repulsions of the up-down / down-up states. j_i + j_j = 2 J_ij.
inline double exchange_j_i(const ExchangeParams& p) {
    return -exchange_term(p, -1, -1, -1) - exchange_term(p, -1, -1, 1);
}

inline double exchange_j_j(const ExchangeParams& p) {
    return -exchange_term(p, 1, -1, -1) - exchange_term(p, 1, -1, 1);
}

inline Mat4 exchange_hamiltonian(const ExchangeParams& p) {
    const double j_ij = exchange_strength(p);
    Mat4 h = Mat4::Zero();
    h(0, 0) = p.de_z + p.e_z;
    h(1, 1) = -p.de_z - exchange_j_i(p);
    h(2, 2) = p.de_z - exchange_j_j(p);
    h(3, 3) = -p.de_z - p.e_z;
    h(1, 2) = j_ij;
    h(2, 1) = j_ij;
    return h;
}

// Native-evolution angles. With Delta_ij = de_z + (j_i - j_j)/2 and
// hbar Omega_ij = sqrt(Delta_ij^2 + J_ij^2):
//   phi   = Omega_ij t      (rotation angle in the m_z = 0 block)
//   chi   = atan2(Delta, J) (mixing angle; x = tan chi = Delta / J)
//   alpha = J_ij t / hbar   (= phi cos chi)
//   phi_z = (e_z + de_z) t / hbar (outer Zeeman phase)
struct NativeAngles {
    double phi = 0.0;
    double chi = 0.0;
    double x = 0.0;
    double alpha = 0.0;
    double phi_z = 0.0;
    double j_ij = 0.0;
    double delta_ij = 0.0;
    double omega_ij = 0.0;  // [rad/s]
};

inline NativeAngles native_angles(const ExchangeParams& p, double t,
                                  const PhysConstants& pc = constants()) {
    NativeAngles a;
    a.j_ij = exchange_strength(p);
    a.delta_ij = p.de_z + 0.5 * (exchange_j_i(p) - exchange_j_j(p));
    const double hbar_omega = std::hypot(a.delta_ij, a.j_ij);
    a.omega_ij = hbar_omega / pc.hbar;
    a.phi = a.omega_ij * t;
    a.chi = std::atan2(a.delta_ij, a.j_ij);
    a.x = a.delta_ij / a.j_ij;
    a.alpha = a.j_ij * t / pc.hbar;
    a.phi_z = (p.e_z + p.de_z) * t / pc.hbar;
    return a;
}

// Interaction time realizing a given m_z = 0 rotation angle phi.
inline double time_for_phi(const ExchangeParams& p, double phi,
                           const PhysConstants& pc = constants()) {
    if (!(phi >= 0.0)) throw error("time_for_phi: phi must be non-negative");
    const NativeAngles a = native_angles(p, 1.0, pc);
    if (!(a.omega_ij > 0.0)) throw error("time_for_phi: zero-frequency evolution");
    return phi / a.omega_ij;
}

inline Mat4 native_from_angles(const NativeAngles& a) {
    const double c = std::cos(a.phi);
    const double s = std::sin(a.phi);
    const double cc = std::cos(a.chi);
    const double sc = std::sin(a.chi);
    const c64 ea = std::polar(1.0, a.alpha);
    Mat4 u = Mat4::Zero();
    u(0, 0) = std::polar(1.0, -a.phi_z);
    u(3, 3) = std::polar(1.0, +a.phi_z);
    u(1, 1) = ea * (c + iu * sc * s);
    u(2, 2) = ea * (c - iu * sc * s);
    u(1, 2) = ea * (-iu * cc * s);
    u(2, 1) = u(1, 2);
    return u;
}

inline Mat4 native_unitary(const ExchangeParams& p, double t,
                           const PhysConstants& pc = constants()) {
    if (!(t >= 0.0)) throw error("native_unitary: time must be non-negative");
    return native_from_angles(native_angles(p, t, pc));
}

// ---- Reference gates ----

inline Mat4 reference_swap() {
    Mat4 m = Mat4::Identity();
    m(1, 1) = m(2, 2) = 0.0;
    m(1, 2) = m(2, 1) = 1.0;
    return m;
}

inline Mat4 reference_sqrt_swap() {
    Mat4 m = Mat4::Identity();
    m(1, 1) = m(2, 2) = c64(0.5, 0.5);
    m(1, 2) = m(2, 1) = c64(0.5, -0.5);
    return m;
}

inline Mat4 reference_swap_theta(double theta) {
    Mat4 m = Mat4::Zero();
    m(0, 0) = m(3, 3) = std::polar(1.0, theta);
    m(1, 1) = m(2, 2) = std::cos(theta);
    m(1, 2) = m(2, 1) = iu * std::sin(theta);
    return m;
}

// Givens rotation with sine on the diagonal of the m_z = 0 block.
// reference_givens(pi/2 - chi) equals the cosine-diagonal convention's
// Givens(chi).
inline Mat4 reference_givens(double phi) {
    Mat4 m = Mat4::Identity();
    m(1, 1) = m(2, 2) = std::sin(phi);
    m(1, 2) = -std::cos(phi);
    m(2, 1) = std::cos(phi);
    return m;
}

inline Mat4 reference_cphase(double phi) {
    Mat4 m = Mat4::Identity();
    m(3, 3) = std::polar(1.0, phi);
    return m;
}

inline Mat4 reference_ising(double phi) {
    Mat4 m = Mat4::Identity();
    m(1, 1) = m(2, 2) = std::polar(1.0, phi);
    return m;
}

// ---- Composite constructions ----
// Each composite wraps one or two native evolutions with single-qubit Z
// rotations (equal angle on both qubits) and a scalar prefactor, and equals
// `target` exactly (swap_rotation: up to a global phase).

struct CompositeResult {
    Mat4 u;                    // assembled composite
    Mat4 target;               // reference gate it realizes
    double wrapper_z = 0.0;    // Z angle applied to each qubit after the native
    double wrapper_ising = 0.0;  // Ising wrapper angle (swap_rotation only)
    c64 prefactor{1.0, 0.0};
    double t = 0.0;            // native interaction time [s]
    int n = 0;                 // lattice index of phi
    NativeAngles angles;
};

namespace detail {
inline Mat4 zz_wrapper(double w) { return kron(rot_z(w), rot_z(w)); }

inline double lattice_phi(int n, double base) {
    if (n < 0) throw error("composite: lattice index n must be non-negative");
    return base + 2.0 * pi * n;
}
}  // namespace detail

// Diagonal native at phi = pi + 2 pi n wrapped into CPhase(-2 alpha).
inline CompositeResult compose_cphase(const ExchangeParams& p, int n,
                                      const PhysConstants& pc = constants()) {
    const double phi = detail::lattice_phi(n, pi);
    CompositeResult r;
    r.n = n;
    r.t = time_for_phi(p, phi, pc);
    r.angles = native_angles(p, r.t, pc);
    r.wrapper_z = -r.angles.phi_z - r.angles.alpha + pi;
    r.prefactor = std::polar(1.0, -r.angles.alpha - phi);
    r.u = detail::zz_wrapper(r.wrapper_z) * (r.prefactor * native_from_angles(r.angles));
    r.target = reference_cphase(-2.0 * r.angles.alpha);
    return r;
}

// Diagonal native at phi = pi + 2 pi n wrapped into Ising(alpha + pi).
inline CompositeResult compose_ising(const ExchangeParams& p, int n,
                                     const PhysConstants& pc = constants()) {
    const double phi = detail::lattice_phi(n, pi);
    CompositeResult r;
    r.n = n;
    r.t = time_for_phi(p, phi, pc);
    r.angles = native_angles(p, r.t, pc);
    r.wrapper_z = -r.angles.phi_z;
    r.prefactor = 1.0;
    r.u = detail::zz_wrapper(r.wrapper_z) * native_from_angles(r.angles);
    r.target = reference_ising(r.angles.alpha + pi);
    return r;
}

// Half-turn native at phi = pi/2 + 2 pi n wrapped into
// CPhase(-2 alpha + pi) * Givens(pi/2 - chi) * SWAP.
inline CompositeResult compose_givens_swap(const ExchangeParams& p, int n,
                                           const PhysConstants& pc = constants()) {
    const double phi = detail::lattice_phi(n, 0.5 * pi);
    CompositeResult r;
    r.n = n;
    r.t = time_for_phi(p, phi, pc);
    r.angles = native_angles(p, r.t, pc);
    r.wrapper_z = -r.angles.phi_z - r.angles.alpha + 0.5 * pi;
    r.prefactor = std::polar(1.0, -r.angles.alpha + phi);
    r.u = detail::zz_wrapper(r.wrapper_z) * (r.prefactor * native_from_angles(r.angles));
    r.target = Mat4(reference_cphase(-2.0 * r.angles.alpha + pi) *
                    reference_givens(0.5 * pi - r.angles.chi) * reference_swap());
    return r;
}

// Swap rotation SWAP(theta) from two chi = +-pi/4 natives, interior
// counter-rotating Z(+-theta), and one Ising wrapper. Equals the target up to
// a global phase. Requires |x| = 1 (chi = +-pi/4) within 1e-9.
inline CompositeResult compose_swap_rotation(const ExchangeParams& p, double theta, int n = 0,
                                             const PhysConstants& pc = constants()) {
    const double phi = detail::lattice_phi(n, 0.5 * pi);
    CompositeResult r;
    r.n = n;
    r.t = time_for_phi(p, phi, pc);
    r.angles = native_angles(p, r.t, pc);
    if (std::abs(std::abs(r.angles.x) - 1.0) > 1e-9)
        throw error("compose_swap_rotation: requires |Delta_ij| = J_ij (chi = +-pi/4)");
    const double s = r.angles.x > 0.0 ? 1.0 : -1.0;
    const Mat4 nat = native_from_angles(r.angles);
    const Mat4 interior = kron(rot_z(s * theta), rot_z(-s * theta));
    r.wrapper_z = -2.0 * r.angles.phi_z;
    r.wrapper_ising = -theta - 2.0 * r.angles.alpha - 2.0 * phi;
    r.prefactor = -std::polar(1.0, -theta + s * pi);
    r.u = r.prefactor *
          (detail::zz_wrapper(r.wrapper_z) * reference_ising(r.wrapper_ising) * nat * interior * nat);
    r.target = reference_swap_theta(theta);
    return r;
}

}  // namespace spinpipe
