#pragma once
// Axis-angle decomposition of a single-qubit unitary:
//   U = e^{i phi_g} (cos(theta/2) I + i sin(theta/2) n.sigma),
// with theta in [0, pi], |n| = 1 and phi_g in (-pi, pi].
// theta ~ 0 reports the conventional axis (0, 0, 1).

#include <cmath>

#include "spinpipe/linalg.hpp"

namespace spinpipe {

struct AxisAngle {
    double theta = 0.0;
    double nx = 0.0, ny = 0.0, nz = 1.0;
    double global_phase = 0.0;
};

inline Mat2 from_axis_angle(const AxisAngle& a) {
    const double c = std::cos(0.5 * a.theta);
    const double s = std::sin(0.5 * a.theta);
    Mat2 n_dot_sigma = a.nx * sigma_x() + a.ny * sigma_y() + a.nz * sigma_z();
    Mat2 u = c * Mat2::Identity() + iu * s * n_dot_sigma;
    return std::polar(1.0, a.global_phase) * u;
}

inline AxisAngle axis_angle(const Mat2& u) {
    if (!approx_unitary(u, 1e-9)) throw error("axis_angle: input is not unitary");

    // Split off the global phase via the principal branch of sqrt(det U),
    // then read V = e^{-i phi_g} U = a0 I + i a.sigma.
    double phi_g = 0.5 * std::arg(u.determinant());
    const Mat2 v = std::polar(1.0, -phi_g) * u;
    double a0 = 0.5 * (v(0, 0).real() + v(1, 1).real());
    double ax = 0.5 * (v(0, 1).imag() + v(1, 0).imag());
    double ay = 0.5 * (v(0, 1).real() - v(1, 0).real());
    double az = 0.5 * (v(0, 0).imag() - v(1, 1).imag());
    if (a0 < 0.0) {
        a0 = -a0;
        ax = -ax;
        ay = -ay;
        az = -az;
        phi_g += pi;
    }
    if (phi_g > pi) phi_g -= 2.0 * pi;
    if (phi_g <= -pi) phi_g += 2.0 * pi;

    AxisAngle out;
    out.global_phase = phi_g;
    const double r = std::sqrt(ax * ax + ay * ay + az * az);
    out.theta = 2.0 * std::atan2(r, a0);
    if (r > 1e-15) {
        out.nx = ax / r;
        out.ny = ay / r;
        out.nz = az / r;
    }
    return out;
}

}  // namespace spinpipe
