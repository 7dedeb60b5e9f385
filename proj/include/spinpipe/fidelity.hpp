#pragma once
// Unitary-vs-unitary figures of merit. process_fidelity is insensitive to
// global phase; it is 1 iff the two gates agree up to phase.

#include <complex>

#include "spinpipe/linalg.hpp"

namespace spinpipe {

// |Tr(U^dag V)|^2 / d^2.
template <typename A, typename B>
double process_fidelity(const Eigen::MatrixBase<A>& u, const Eigen::MatrixBase<B>& v) {
    if (u.rows() != v.rows() || u.cols() != v.cols() || u.rows() != u.cols())
        throw error("process_fidelity: dimension mismatch");
    const double d = double(u.rows());
    const c64 tr = (u.adjoint() * v.derived()).trace();
    return std::norm(tr) / (d * d);
}

// (|Tr(U^dag V)|^2 + d) / (d^2 + d).
template <typename A, typename B>
double average_gate_fidelity(const Eigen::MatrixBase<A>& u, const Eigen::MatrixBase<B>& v) {
    if (u.rows() != v.rows() || u.cols() != v.cols() || u.rows() != u.cols())
        throw error("average_gate_fidelity: dimension mismatch");
    const double d = double(u.rows());
    const c64 tr = (u.adjoint() * v.derived()).trace();
    return (std::norm(tr) + d) / (d * d + d);
}

}  // namespace spinpipe
