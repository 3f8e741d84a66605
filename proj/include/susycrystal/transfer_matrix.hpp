#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>

#include "params.hpp"

namespace susycrystal {

/// 2x2 complex transfer matrix in the basis of right/left-moving plane waves
/// at the exterior momentum, amplitudes referenced to the local edge of the
/// propagated region. Unimodular for any potential, complex ones included.
struct TransferMatrix {
    complexd m11{1.0, 0.0};
    complexd m12{0.0, 0.0};
    complexd m21{0.0, 0.0};
    complexd m22{1.0, 0.0};

    complexd determinant() const { return m11 * m22 - m12 * m21; }
};

inline TransferMatrix operator*(const TransferMatrix& a, const TransferMatrix& b) {
    return {a.m11 * b.m11 + a.m12 * b.m21, a.m11 * b.m12 + a.m12 * b.m22,
            a.m21 * b.m11 + a.m22 * b.m21, a.m21 * b.m12 + a.m22 * b.m22};
}

/// Non-negative integer power by repeated squaring.
inline TransferMatrix matrix_power(TransferMatrix base, long exponent) {
    if (exponent < 0) throw std::invalid_argument("matrix exponent must be >= 0");
    TransferMatrix result;
    while (exponent > 0) {
        if (exponent & 1) result = base * result;
        base = base * base;
        exponent >>= 1;
    }
    return result;
}

/// Exact propagation across one constant-potential slice of width h,
/// expressed in the exterior plane-wave basis at momentum p. The local
/// wavevector is q = sqrt(p^2 - V), principal branch with Re(q) >= 0 and
/// ties broken toward Im(q) >= 0; both exponentials appear in the matrix, so
/// any consistent branch is equivalent, and this one bounds the entries.
/// The removable q -> 0 singularity of sin(qh)/q is replaced by its series
/// through the h^3 term for |qh| < 1e-4.
inline TransferMatrix slice_matrix(complexd v_mid, double p, double h) {
    if (!(p > 0.0)) throw std::domain_error("momentum p must be positive");
    if (!(h > 0.0)) throw std::domain_error("slice width h must be positive");

    complexd q = std::sqrt(complexd(p * p, 0.0) - v_mid);
    if (q.real() < 0.0 || (q.real() == 0.0 && q.imag() < 0.0)) q = -q;

    const complexd z = q * h;
    const complexd cos_z = std::cos(z);
    const complexd sin_over_q = (std::abs(z) < 1e-4) ? h * (1.0 - z * z / 6.0) : std::sin(z) / q;
    const complexd q_sin = q * q * sin_over_q;  // sin(qh) * q

    const complexd splus = 0.5 * (p * sin_over_q + q_sin / p);
    const complexd sminus = 0.5 * (q_sin / p - p * sin_over_q);
    const complexd i{0.0, 1.0};
    return {cos_z + i * splus, i * sminus, -i * sminus, cos_z - i * splus};
}

}  // namespace susycrystal
