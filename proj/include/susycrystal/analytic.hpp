#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <utility>

#include "params.hpp"

namespace susycrystal {

/// Complex scattering amplitudes at one incident momentum. Incident waves
/// are normalized to unit amplitude for both incidence sides.
struct ScatteringCoefficients {
    double p = 0.0;                 ///< incident momentum
    complexd transmission;          ///< t (equal for both sides)
    complexd reflection_left;       ///< r for incidence from the left
    complexd reflection_right;      ///< r for incidence from the right

    double transmittance() const { return std::norm(transmission); }
    double reflectance_left() const { return std::norm(reflection_left); }
    double reflectance_right() const { return std::norm(reflection_right); }
};

/// Half-width of the momentum window around k1 inside which the crystal
/// reflection is evaluated from its stable factored form instead of the raw
/// quotient (which is 0/0 at p = k1).
inline double degenerate_half_width(const CrystalParams& cp) { return 1e-6 * cp.k0; }

/// Closed-form square-well scattering: transmission and reflection amplitudes
/// built from the interior wavevector q = sqrt(p^2 + epsilon). The right
/// reflection differs from the left one by the pure phase exp(-2ipL), so both
/// reflectances coincide.
inline ScatteringCoefficients square_well_coefficients(double p, const CrystalParams& cp) {
    if (!(p > 0.0)) throw std::domain_error("momentum p must be positive");
    const double q = std::sqrt(p * p + cp.epsilon);
    const double ql = q * cp.length;
    const complexd denom =
        2.0 * p * q * std::cos(ql) - complexd(0.0, p * p + q * q) * std::sin(ql);

    ScatteringCoefficients c;
    c.p = p;
    c.transmission = 2.0 * p * q * std::polar(1.0, -p * cp.length) / denom;
    c.reflection_left = complexd(0.0, cp.epsilon) * std::sin(ql) / denom;
    c.reflection_right = c.reflection_left * std::polar(1.0, -2.0 * p * cp.length);
    return c;
}

/// Square-well reflectance in purely real arithmetic,
/// eps^2 sin^2(qL) / [(2p^2+eps)^2 - eps^2 cos^2(qL)].
inline double square_well_reflectance(double p, const CrystalParams& cp) {
    if (!(p > 0.0)) throw std::domain_error("momentum p must be positive");
    const double q = std::sqrt(p * p + cp.epsilon);
    const double s = std::sin(q * cp.length);
    const double c = std::cos(q * cp.length);
    const double e = cp.epsilon;
    const double d = 2.0 * p * p + e;
    return e * e * s * s / (d * d - e * e * c * c);
}

/// L-independent envelope of the square-well reflectance,
/// eps^2 / [4 p^2 (p^2 + eps)].
inline double square_well_reflectance_bound(double p, const CrystalParams& cp) {
    return cp.epsilon * cp.epsilon / (4.0 * p * p * (p * p + cp.epsilon));
}

/// Amplitudes of exp(+iqx) and exp(-iqx) inside the well for the
/// left-incidence scattering solution at momentum p.
struct InteriorWave {
    complexd forward;
    complexd backward;
};

inline InteriorWave square_well_interior(double p, const CrystalParams& cp) {
    const ScatteringCoefficients c = square_well_coefficients(p, cp);
    const double q = std::sqrt(p * p + cp.epsilon);
    const complexd edge = c.transmission * std::polar(1.0, p * cp.length);
    return {edge * std::polar(1.0, -q * cp.length) * ((q + p) / (2.0 * q)),
            edge * std::polar(1.0, q * cp.length) * ((q - p) / (2.0 * q))};
}

/// Scattering amplitudes of the partner crystal. The transmission is the
/// square-well one (same code path); the reflections pick up the reciprocal
/// factors (k1+p)/(k1-p) and (k1-p)/(k1+p). Inside the degenerate window
/// around p = k1 both reflections are evaluated from the factored form
///
///   r_left  = -i eps L sinc(s) (k1+p)^2 / [(q+k0) D],
///   r_right = -i eps L sinc(s) (p-k1)^2 exp(-2ipL) / [(q+k0) D],
///   s = L (p^2-k1^2)/(q+k0),  D = 2pq cos(s) - i(p^2+q^2) sin(s),
///
/// which is algebraically identical to the raw quotient but carries no
/// cancellation; at p = k1 it reduces to r_left = -i eps L k1 / k0^2 and
/// r_right = 0.
inline ScatteringCoefficients crystal_coefficients(double p, const CrystalParams& cp) {
    const ScatteringCoefficients well = square_well_coefficients(p, cp);

    ScatteringCoefficients c;
    c.p = p;
    c.transmission = well.transmission;

    const double k1 = cp.k1;
    if (std::abs(p - k1) >= degenerate_half_width(cp)) {
        c.reflection_left = well.reflection_left * ((k1 + p) / (k1 - p));
        c.reflection_right = well.reflection_right * ((k1 - p) / (k1 + p));
        return c;
    }

    const double q = std::sqrt(p * p + cp.epsilon);
    const double k0 = cp.k0;
    const double s = cp.length * (p - k1) * (p + k1) / (q + k0);
    const double sinc = (std::abs(s) < 1e-8) ? 1.0 - s * s / 6.0 : std::sin(s) / s;
    const complexd d = 2.0 * p * q * std::cos(s) - complexd(0.0, p * p + q * q) * std::sin(s);
    const complexd common = complexd(0.0, -cp.epsilon * cp.length) * sinc / ((q + k0) * d);
    c.reflection_left = common * ((k1 + p) * (k1 + p));
    c.reflection_right = common * ((p - k1) * (p - k1)) * std::polar(1.0, -2.0 * p * cp.length);
    return c;
}

/// Left/right reflectances of the crystal from the square-well reflectance
/// and the reciprocal rational factors, so the product identity
/// R_left * R_right = R1^2 holds by construction. Inside the degenerate
/// window the values come from the stable amplitudes.
inline std::pair<double, double> crystal_reflectances(double p, const CrystalParams& cp) {
    if (std::abs(p - cp.k1) < degenerate_half_width(cp)) {
        const ScatteringCoefficients c = crystal_coefficients(p, cp);
        return {c.reflectance_left(), c.reflectance_right()};
    }
    const double r1 = square_well_reflectance(p, cp);
    const double f = (cp.k1 + p) / (cp.k1 - p);
    return {r1 * f * f, r1 / (f * f)};
}

/// Height of the left-reflectance peak at p = k1: (eps L k1 / k0^2)^2,
/// which grows with the square of the crystal length.
inline double peak_left_reflectance(const CrystalParams& cp) {
    const double amplitude = cp.epsilon * cp.length * cp.k1 / (cp.k0 * cp.k0);
    return amplitude * amplitude;
}

/// Deviation from the PT scattering relation |T - 1| = sqrt(R_left R_right);
/// zero in exact arithmetic for the crystal.
inline double unitarity_defect(const ScatteringCoefficients& c) {
    return std::abs(std::abs(c.transmittance() - 1.0) -
                    std::sqrt(c.reflectance_left() * c.reflectance_right()));
}

}  // namespace susycrystal
