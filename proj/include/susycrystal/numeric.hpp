#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <span>
#include <stdexcept>
#include <string>

#include "analytic.hpp"
#include "potential.hpp"
#include "transfer_matrix.hpp"

namespace susycrystal {

/// Discretization control for the transfer-matrix engine.
struct SlicingSpec {
    int slices_per_period = 64;      ///< slices per unit cell (>= 4)
    bool use_monodromy_power = true; ///< one-period matrix raised to the cell count
    double convergence_tol = 1e-6;   ///< relative tolerance of the doubling loop
    int max_doublings = 8;           ///< refinement budget; 0 = fixed resolution
};

struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConvergenceError : NumericError {
    using NumericError::NumericError;
};

namespace detail {

inline TransferMatrix compose_slices(const PotentialProfile& profile, double p, double x0,
                                     double width, long slices) {
    const double h = width / static_cast<double>(slices);
    TransferMatrix m;
    for (long j = 0; j < slices; ++j) {
        const double mid = x0 + (static_cast<double>(j) + 0.5) * h;
        m = slice_matrix(profile(mid), p, h) * m;
    }
    return m;
}

inline void check_unimodular(const TransferMatrix& m) {
    const double drift = std::abs(m.determinant() - complexd(1.0, 0.0));
    if (!(drift < 1e-8)) {
        throw NumericError("transfer-matrix determinant drifted from 1 by " + std::to_string(drift));
    }
}

}  // namespace detail

/// Total transfer matrix of the profile at momentum p. With
/// `use_monodromy_power` the single-period matrix is composed once and raised
/// to the cell count by repeated squaring (powering, not eigendecomposition:
/// the matrix can be defective at exceptional parameter points); profiles
/// without a whole number of periods are rejected on that path. Otherwise all
/// slices are composed directly.
inline TransferMatrix monodromy(const PotentialProfile& profile, double p, const SlicingSpec& spec) {
    if (!(p > 0.0)) throw std::domain_error("momentum p must be positive");
    if (spec.slices_per_period < 4) throw std::invalid_argument("slices_per_period must be >= 4");

    TransferMatrix total;
    if (spec.use_monodromy_power) {
        if (profile.full_periods() < 1) {
            throw std::invalid_argument(
                "monodromy powering requires a support of a whole number of periods");
        }
        const TransferMatrix cell =
            detail::compose_slices(profile, p, 0.0, profile.period(), spec.slices_per_period);
        total = matrix_power(cell, profile.full_periods());
    } else {
        const long cells = std::max(1, profile.full_periods());
        total = detail::compose_slices(profile, p, 0.0, profile.support_length(),
                                       cells * static_cast<long>(spec.slices_per_period));
    }
    detail::check_unimodular(total);
    return total;
}

/// Converts a total transfer matrix over a support of the given width to
/// scattering amplitudes with unit-amplitude incident waves.
inline ScatteringCoefficients scattering_from_matrix(const TransferMatrix& m, double p, double width) {
    ScatteringCoefficients c;
    c.p = p;
    c.transmission = std::polar(1.0, -p * width) / m.m22;
    c.reflection_left = -m.m21 / m.m22;
    c.reflection_right = m.m12 * std::polar(1.0, -2.0 * p * width) / m.m22;
    return c;
}

/// Numeric scattering result together with the resolution that met the
/// convergence tolerance.
struct NumericScattering {
    ScatteringCoefficients coefficients;
    int slices_per_period = 0;
    int doublings = 0;
};

namespace detail {

inline double spectral_change(const ScatteringCoefficients& a, const ScatteringCoefficients& b) {
    const auto rel = [](double prev, double next) {
        return std::abs(next - prev) / std::max(std::abs(next), 1.0);
    };
    return std::max({rel(a.transmittance(), b.transmittance()),
                     rel(a.reflectance_left(), b.reflectance_left()),
                     rel(a.reflectance_right(), b.reflectance_right())});
}

}  // namespace detail

/// Scatters a plane wave off the profile, doubling slices_per_period until
/// successive spectral values (T, R_left, R_right) change by less than the
/// convergence tolerance, each measured relative to max(value, 1). With
/// max_doublings == 0 the requested resolution is used as-is. Throws
/// ConvergenceError with the last two transmittance iterates when the
/// refinement budget is exhausted.
inline NumericScattering scatter_numeric(const PotentialProfile& profile, double p,
                                         const SlicingSpec& spec = {}) {
    const auto solve = [&](int spp) {
        SlicingSpec pass = spec;
        pass.slices_per_period = spp;
        return scattering_from_matrix(monodromy(profile, p, pass), p, profile.support_length());
    };

    ScatteringCoefficients prev = solve(spec.slices_per_period);
    if (spec.max_doublings == 0) return {prev, spec.slices_per_period, 0};

    for (int i = 1; i <= spec.max_doublings; ++i) {
        const int spp = spec.slices_per_period << i;
        const ScatteringCoefficients next = solve(spp);
        if (detail::spectral_change(prev, next) < spec.convergence_tol) return {next, spp, i};
        if (i == spec.max_doublings) {
            char msg[160];
            std::snprintf(msg, sizeof msg,
                          "no convergence after %d slice doublings (last transmittances %.17g, %.17g)",
                          spec.max_doublings, prev.transmittance(), next.transmittance());
            throw ConvergenceError(msg);
        }
        prev = next;
    }
    return {prev, spec.slices_per_period, 0};  // unreachable
}

/// Max norm of the discretized residual xi'' + (E - V) xi over the interior
/// of a uniform grid, with xi'' by central differences. Needs at least three
/// points; x must be uniformly spaced.
inline double schrodinger_residual(std::span<const double> x, std::span<const complexd> xi,
                                   const PotentialProfile& profile, double energy) {
    if (x.size() != xi.size()) throw std::invalid_argument("grid and values must have equal length");
    if (x.size() < 3) throw std::invalid_argument("grid too coarse: need at least 3 points");
    const double h = x[1] - x[0];
    if (!(h > 0.0)) throw std::invalid_argument("grid must be increasing");
    for (std::size_t i = 1; i + 1 < x.size(); ++i) {
        if (std::abs((x[i + 1] - x[i]) - h) > 1e-9) {
            throw std::invalid_argument("grid must be uniform");
        }
    }

    double worst = 0.0;
    for (std::size_t i = 1; i + 1 < x.size(); ++i) {
        const complexd second = (xi[i + 1] - 2.0 * xi[i] + xi[i - 1]) / (h * h);
        const double residual = std::abs(second + (energy - profile(x[i])) * xi[i]);
        worst = std::max(worst, residual);
    }
    return worst;
}

}  // namespace susycrystal
