#include "maglev/params.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace maglev {

namespace {

void require_positive(double value, const char* name) {
    if (!(value > 0.0) || !std::isfinite(value)) {
        throw Error(ErrorCode::NonPositiveInput,
                    std::string(name) + " must be finite and > 0 (got " + std::to_string(value) + ")");
    }
}

void require_finite(double value, const char* name) {
    if (!std::isfinite(value)) {
        throw Error(ErrorCode::NonPositiveInput, std::string(name) + " must be finite");
    }
}

}  // namespace

void PhysicalConstants::validate() const {
    require_positive(hbar, "hbar");
    require_positive(mu_B, "mu_B");
    require_positive(amu, "amu");
    require_positive(gamma0, "gamma0");
    require_positive(g_grav, "g_grav");
}

void SystemParams::validate() const {
    require_positive(rho_M, "rho_M");
    require_positive(rho_mu, "rho_mu");
    require_positive(k_a, "k_a");
    require_positive(R, "R");
    require_positive(B0, "B0");
    require_finite(Bp, "Bp");
    if (Bp < 0.0) {
        throw Error(ErrorCode::NonPositiveInput, "Bp must be >= 0");
    }
    require_finite(Bpp, "Bpp");
    require_finite(omega_S, "omega_S");
}

SystemParams reference_params(double R, double B0, const PhysicalConstants& c) {
    SystemParams p;
    p.rho_M = 1e4;
    p.rho_mu = p.rho_M * c.mu_B / (50.0 * c.amu);
    p.k_a = 1e4;
    p.R = R;
    p.B0 = B0;
    p.Bp = 1e4;
    p.Bpp = 1e6;
    p.omega_S = 0.0;
    return p;
}

double omega_D_closed_form(const PhysicalConstants& c, const SystemParams& p) {
    return p.k_a * c.gamma0 / p.rho_mu;
}

DerivedQuantities derive_quantities(const PhysicalConstants& c, const SystemParams& p) {
    c.validate();
    p.validate();

    DerivedQuantities d;
    const double hbar = c.hbar;
    d.V = 4.0 / 3.0 * std::numbers::pi * p.R * p.R * p.R;
    d.M = p.rho_M * d.V;
    d.I = 0.4 * d.M * p.R * p.R;
    d.mu = p.rho_mu * d.V;
    d.S = d.mu / (hbar * c.gamma0);

    const double spin_of_rotation = d.I * p.omega_S / hbar;
    d.J = spin_of_rotation + d.S;
    if (!(d.J > 0.0)) {
        throw Error(ErrorCode::NegativeJ, "I*omega_S/hbar + S must be > 0 (omega_S too negative)");
    }
    d.eta = std::sqrt(d.S / d.J);

    const double transverse_curvature = p.Bp * p.Bp - 0.5 * p.B0 * p.Bpp;
    if (!(transverse_curvature > 0.0)) {
        throw Error(ErrorCode::TransverseTrapUndefined,
                    "B'^2 - B0*B''/2 must be > 0 for a real transverse trap frequency");
    }

    d.omega_S = p.omega_S;
    d.omega_L = c.gamma0 * p.B0;
    d.D = 4.0 * std::numbers::pi * p.R * p.R * p.R * p.k_a / (3.0 * hbar * hbar * d.S * d.S);
    d.omega_D = hbar * d.D * d.S;
    d.omega_I = hbar * d.S / d.I;

    d.z_confining = p.Bpp > 0.0;
    d.omega_Z_sq = hbar * c.gamma0 * p.Bpp * d.S / d.M;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    d.omega_Z = d.z_confining ? std::sqrt(d.omega_Z_sq) : nan;
    d.omega_T = std::sqrt(hbar * c.gamma0 * d.S * transverse_curvature / (d.M * p.B0));

    // The fixed-moment transverse curvature is -B''/4, i.e. half the axial one,
    // hence omega_Z^2 / (2 omega_T) here.
    const double anti_trap = d.omega_Z_sq / (2.0 * d.omega_T);
    d.omega_plus = 0.5 * (d.omega_T + anti_trap);
    d.omega_minus = 0.5 * (d.omega_T - anti_trap);

    const double eta2 = d.eta * d.eta;
    d.omega_k = d.omega_I + d.omega_S - d.omega_L * eta2;
    d.omega_mu = d.omega_I + 2.0 * d.omega_D - d.omega_L;

    d.z0 = d.z_confining ? std::sqrt(hbar / (2.0 * d.M * d.omega_Z)) : nan;
    d.r0 = std::sqrt(hbar / (2.0 * d.M * d.omega_T));
    d.sigma_T = std::sqrt(d.S) * d.r0;
    d.g_coupling = d.omega_L * p.Bp * d.sigma_T / p.B0;
    return d;
}

RegimeReport validate_regime(const PhysicalConstants& c, const SystemParams& p,
                             const DerivedQuantities& d) {
    RegimeReport r;
    const double inf = std::numeric_limits<double>::infinity();

    if (p.Bpp > 0.0) {
        const double sag = d.M * c.g_grav / (d.mu * p.Bpp);
        const double length = std::min(std::sqrt(p.B0 / p.Bpp), p.Bp / p.Bpp);
        r.gravity_ratio = length > 0.0 ? sag / length : inf;
    } else {
        r.gravity_ratio = inf;
    }
    r.gravity_ok = r.gravity_ratio < kGravityThreshold;

    r.slow_rotation_ratio = std::abs(d.I * p.omega_S / c.hbar) / d.S;
    r.slow_rotation_ok = r.slow_rotation_ratio < kSlowRotationThreshold;
    r.macrospin_ok = d.S >= 1.0;
    r.macrospin_comfortable = d.S >= 100.0;
    r.omega_T_real = std::isfinite(d.omega_T) && d.omega_T > 0.0;
    r.trap_z_confining = p.Bpp > 0.0;
    return r;
}

}  // namespace maglev
