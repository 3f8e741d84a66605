#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

namespace susycrystal {

using complexd = std::complex<double>;

/// Parameter set of the supersymmetric crystal construction: a square well of
/// depth `epsilon` spanning `cells` Bragg periods, plus every derived quantity
/// the synthesis and scattering formulas need. Units are dimensionless
/// (hbar^2/2m = 1), so energies scale as inverse length squared.
///
/// `epsilon == 0` is the exact free-space limit: `rho` is +infinity and
/// `mu` is zero there, and every potential kind evaluates to zero.
struct CrystalParams {
    double epsilon = 0.0;               ///< well depth, 0 <= epsilon < k0^2
    double k0 = 1.0;                    ///< Bragg wavenumber pi / period
    int cells = 1;                      ///< unit-cell count N >= 1
    double period = 0.0;                ///< lattice period pi / k0
    double length = 0.0;                ///< crystal length cells * period
    double factorization_energy = 0.0;  ///< E1 = k0^2 - epsilon (> 0)
    double k1 = 0.0;                    ///< sqrt(E1), momentum of the auxiliary solution
    double rho = 0.0;                   ///< atanh(sqrt(1 - epsilon/k0^2))
    double mu = 0.0;                    ///< sqrt(epsilon)/k0, interior amplitude of the auxiliary solution
};

/// Builds the full parameter record from (epsilon, k0, N).
///
/// rho is evaluated as log1p(y) + 0.5*log(k0^2/epsilon) with
/// y = sqrt(1 - epsilon/k0^2), which is the exact rewrite of
/// 0.5*log((1+y)/(1-y)); the naive 1-y loses all digits for shallow wells.
///
/// Throws std::domain_error when epsilon < 0, epsilon >= k0^2, k0 <= 0,
/// or N < 1.
inline CrystalParams derive_params(double epsilon, double k0, int cells) {
    if (!(k0 > 0.0)) throw std::domain_error("k0 must be positive");
    if (!(epsilon >= 0.0)) throw std::domain_error("epsilon must be >= 0");
    if (!(epsilon < k0 * k0)) throw std::domain_error("epsilon must be < k0^2");
    if (cells < 1) throw std::domain_error("N must be >= 1");

    CrystalParams cp;
    cp.epsilon = epsilon;
    cp.k0 = k0;
    cp.cells = cells;
    cp.period = std::numbers::pi / k0;
    cp.length = cells * cp.period;
    cp.factorization_energy = k0 * k0 - epsilon;
    cp.k1 = std::sqrt(cp.factorization_energy);
    const double y = std::sqrt(1.0 - epsilon / (k0 * k0));
    cp.rho = std::log1p(y) + 0.5 * std::log(k0 * k0 / epsilon);
    cp.mu = std::sqrt(epsilon) / k0;
    return cp;
}

}  // namespace susycrystal
