#pragma once
// Dense complex matrix helpers shared by all gate math.
// Basis conventions: single qubit row 0 = |up> (excited state);
// two qubits ordered {up-up, up-down, down-up, down-down}.

#include <cmath>
#include <complex>

#include <Eigen/Dense>

#include "spinpipe/constants.hpp"

namespace spinpipe {

using c64  = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;
using Mat4 = Eigen::Matrix4cd;
using MatX = Eigen::MatrixXcd;
using VecX = Eigen::VectorXcd;

inline constexpr c64 iu{0.0, 1.0};

inline Mat2 sigma_x() {
    Mat2 m;
    m << 0, 1, 1, 0;
    return m;
}

inline Mat2 sigma_y() {
    Mat2 m;
    m << 0, -iu, iu, 0;
    return m;
}

inline Mat2 sigma_z() {
    Mat2 m;
    m << 1, 0, 0, -1;
    return m;
}

// Z(theta) = exp(-i theta sigma_z / 2).
inline Mat2 rot_z(double theta) {
    Mat2 m = Mat2::Zero();
    m(0, 0) = std::polar(1.0, -0.5 * theta);
    m(1, 1) = std::polar(1.0, 0.5 * theta);
    return m;
}

// X(theta) = exp(-i theta sigma_x / 2).
inline Mat2 rot_x(double theta) {
    Mat2 m;
    const double c = std::cos(0.5 * theta);
    const c64 s = -iu * std::sin(0.5 * theta);
    m << c, s, s, c;
    return m;
}

inline Mat4 kron(const Mat2& a, const Mat2& b) {
    Mat4 m;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            m.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
    return m;
}

template <typename A, typename B>
double max_abs_diff(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
    return (a - b).cwiseAbs().maxCoeff();
}

template <typename A>
bool approx_unitary(const Eigen::MatrixBase<A>& u, double tol = 1e-12) {
    if (u.rows() != u.cols()) return false;
    const auto gram = (u.adjoint() * u).eval();
    return (gram - decltype(gram)::Identity(u.cols(), u.cols())).cwiseAbs().maxCoeff() <= tol;
}

// True when a == e^{i phase} b for some phase. Aligns on the largest entry of a.
template <typename A, typename B>
bool approx_equal_up_to_phase(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b,
                              double tol = 1e-10) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
    Eigen::Index r = 0, c = 0;
    a.cwiseAbs().maxCoeff(&r, &c);
    if (std::abs(a(r, c)) < tol || std::abs(b(r, c)) < tol) return false;
    const c64 phase = a(r, c) / b(r, c);
    if (std::abs(std::abs(phase) - 1.0) > tol) return false;
    return ((phase * b.derived()) - a.derived()).cwiseAbs().maxCoeff() <= tol;
}

}  // namespace spinpipe
