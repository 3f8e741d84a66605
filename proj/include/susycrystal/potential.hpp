#pragma once

#include <cmath>
#include <complex>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "params.hpp"

namespace susycrystal {

/// The auxiliary solution of the square-well problem at the factorization
/// energy: a plane wave outside the well, mu*cos(k0*x - i*rho) inside.
/// Continuous with continuous first derivative at both edges; boundary
/// points x in {0, L} take the interior branch.
inline complexd phi(double x, const CrystalParams& cp) {
    if (x < 0.0) return std::polar(1.0, cp.k1 * x);
    if (x > cp.length) {
        const double sign = (cp.cells % 2 == 0) ? 1.0 : -1.0;
        return sign * std::polar(1.0, cp.k1 * (x - cp.length));
    }
    if (cp.epsilon == 0.0) return std::polar(1.0, cp.k1 * x);
    return cp.mu * std::cos(complexd(cp.k0 * x, -cp.rho));
}

/// Logarithmic derivative of phi: i*k1 outside the well,
/// -k0*tan(k0*x - i*rho) inside. The tan argument never hits a pole for
/// rho > 0, and the two branches agree at the edges.
inline complexd superpotential(double x, const CrystalParams& cp) {
    if (x < 0.0 || x > cp.length || cp.epsilon == 0.0) return complexd(0.0, cp.k1);
    return -cp.k0 * std::tan(complexd(cp.k0 * x, -cp.rho));
}

/// The PT-symmetric partner potential, 2*k0^2/cos^2(k0*x - i*rho) - epsilon
/// on (0, L) and exactly zero outside. Locally periodic with the Bragg
/// period; the denominator is bounded away from zero because rho > 0
/// (epsilon >= k0^2 is rejected at parameter derivation).
inline complexd partner_potential(double x, const CrystalParams& cp) {
    if (x < 0.0 || x > cp.length) return complexd(0.0, 0.0);
    if (cp.epsilon == 0.0) return complexd(0.0, 0.0);
    const complexd c = std::cos(complexd(cp.k0 * x, -cp.rho));
    return 2.0 * cp.k0 * cp.k0 / (c * c) - cp.epsilon;
}

/// Shallow-well limit of the partner potential: the biased complex
/// sinusoid 2*epsilon*exp(-2i*k0*x) - epsilon on (0, L), zero outside.
inline complexd shallow_limit_potential(double x, const CrystalParams& cp) {
    if (x < 0.0 || x > cp.length) return complexd(0.0, 0.0);
    return 2.0 * cp.epsilon * std::polar(1.0, -2.0 * cp.k0 * x) - cp.epsilon;
}

/// Maps a solution of the seed problem to a solution of the partner
/// problem: xi = -psi' + W*psi.
inline complexd apply_intertwiner(complexd psi, complexd dpsi, complexd w) {
    return -dpsi + w * psi;
}

enum class ProfileKind {
    square_well,
    susy_crystal,
    sinusoidal,
    shifted_sinusoidal,
    custom_sampled,
};

/// A scattering potential supported on (0, L): one of the closed-form kinds
/// driven by CrystalParams, or a piecewise-constant sampled profile.
/// Evaluation strictly outside [0, L] is exactly zero; the boundary points
/// take the interior value. Sampled profiles hold midpoint values of equal
/// slices and evaluate as step functions, matching the numeric engine's
/// slicing rule.
class PotentialProfile {
public:
    static PotentialProfile square_well(const CrystalParams& cp) {
        return PotentialProfile(ProfileKind::square_well, cp);
    }
    static PotentialProfile susy_crystal(const CrystalParams& cp) {
        return PotentialProfile(ProfileKind::susy_crystal, cp);
    }
    static PotentialProfile sinusoidal(const CrystalParams& cp) {
        return PotentialProfile(ProfileKind::sinusoidal, cp);
    }
    static PotentialProfile shifted_sinusoidal(const CrystalParams& cp) {
        return PotentialProfile(ProfileKind::shifted_sinusoidal, cp);
    }

    /// Periodic sampled profile: `cell_samples` are slice-midpoint values over
    /// one period, repeated over all cells of `cp`.
    static PotentialProfile sampled_cells(std::vector<complexd> cell_samples, const CrystalParams& cp) {
        if (cell_samples.empty()) throw std::invalid_argument("sampled profile needs at least one sample");
        PotentialProfile prof(ProfileKind::custom_sampled, cp);
        prof.samples_ = std::move(cell_samples);
        return prof;
    }

    /// Aperiodic sampled profile over a support of the given length.
    static PotentialProfile sampled(std::vector<complexd> samples, double support_length) {
        if (samples.empty()) throw std::invalid_argument("sampled profile needs at least one sample");
        if (!(support_length > 0.0)) throw std::invalid_argument("support length must be positive");
        PotentialProfile prof;
        prof.kind_ = ProfileKind::custom_sampled;
        prof.samples_ = std::move(samples);
        prof.support_ = support_length;
        return prof;
    }

    ProfileKind kind() const { return kind_; }
    const std::optional<CrystalParams>& params() const { return params_; }
    double support_length() const { return support_; }

    /// Lattice period, or 0 for profiles without one.
    double period() const { return params_ ? params_->period : 0.0; }

    /// Number of whole periods in the support, or 0 when aperiodic.
    int full_periods() const { return params_ ? params_->cells : 0; }

    complexd operator()(double x) const {
        if (x < 0.0 || x > support_) return complexd(0.0, 0.0);
        switch (kind_) {
            case ProfileKind::square_well:
                return complexd(-params_->epsilon, 0.0);
            case ProfileKind::susy_crystal:
                return partner_potential(x, *params_);
            case ProfileKind::sinusoidal:
                return 2.0 * params_->epsilon * std::polar(1.0, -2.0 * params_->k0 * x);
            case ProfileKind::shifted_sinusoidal:
                return shallow_limit_potential(x, *params_);
            case ProfileKind::custom_sampled:
                return sample_at(x);
        }
        return complexd(0.0, 0.0);
    }

private:
    PotentialProfile() = default;
    PotentialProfile(ProfileKind kind, const CrystalParams& cp)
        : kind_(kind), params_(cp), support_(cp.length) {}

    complexd sample_at(double x) const {
        const double cell = params_ ? params_->period : support_;
        double local = params_ ? std::fmod(x, cell) : x;
        if (local < 0.0) local = 0.0;
        auto idx = static_cast<std::size_t>(local / cell * static_cast<double>(samples_.size()));
        if (idx >= samples_.size()) idx = samples_.size() - 1;
        return samples_[idx];
    }

    ProfileKind kind_ = ProfileKind::square_well;
    std::optional<CrystalParams> params_;
    std::vector<complexd> samples_;
    double support_ = 0.0;
};

}  // namespace susycrystal
