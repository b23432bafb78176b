#pragma once

// Physical inputs of a levitated single-domain nanomagnet in a Ioffe-Pritchard
// trap, and every derived frequency the linearized model needs. All values SI.

#include "maglev/error.hpp"

namespace maglev {

struct PhysicalConstants {
    double hbar = 1.054571817e-34;      // J s
    double mu_B = 9.2740100783e-24;     // J/T
    double amu = 1.66053906660e-27;     // kg
    double gamma0 = 1.760859630e11;     // rad s^-1 T^-1, free electron
    double g_grav = 9.81;               // m/s^2

    /// Throws NonPositiveInput naming the first non-positive constant.
    void validate() const;
};

struct SystemParams {
    double rho_M = 0.0;    // mass density, kg/m^3
    double rho_mu = 0.0;   // magnetization, J T^-1 m^-3 (= A/m)
    double k_a = 0.0;      // uniaxial anisotropy constant, J/m^3
    double R = 0.0;        // sphere radius, m
    double B0 = 0.0;       // bias field, T
    double Bp = 0.0;       // gradient B', T/m
    double Bpp = 0.0;      // curvature B'', T/m^2
    double omega_S = 0.0;  // rotation about the anisotropy axis, rad/s

    /// Throws NonPositiveInput naming the violated field.
    void validate() const;
};

/// Material and trap values of the two-phase stability diagram: rho_M = 1e4,
/// one Bohr magneton per 50 amu, k_a = 1e4, B' = 1e4, B'' = 1e6.
SystemParams reference_params(double R, double B0, const PhysicalConstants& c = {});

struct DerivedQuantities {
    double V = 0;        // volume, m^3
    double M = 0;        // mass, kg
    double I = 0;        // moment of inertia of the sphere, kg m^2
    double mu = 0;       // total magnetic moment, J/T
    double S = 0;        // macrospin
    double J = 0;        // total angular momentum scale
    double eta = 0;      // sqrt(S/J)
    double D = 0;        // anisotropy parameter, J^-1 s^-2
    double omega_L = 0;  // Larmor
    double omega_D = 0;  // anisotropy
    double omega_I = 0;  // Einstein-de Haas
    double omega_Z_sq = 0;  // signed square of the axial trap frequency
    double omega_Z = 0;     // NaN when B'' <= 0
    double omega_T = 0;
    double omega_plus = 0;
    double omega_minus = 0;
    double omega_k = 0;
    double omega_mu = 0;
    double omega_S = 0;
    double g_coupling = 0;
    double sigma_T = 0;  // transverse length entering g, sqrt(S) * r0
    double z0 = 0;       // NaN when B'' <= 0
    double r0 = 0;
    bool z_confining = false;  // B'' > 0
};

/// Throws NonPositiveInput, TransverseTrapUndefined (B'^2 <= B0 B''/2) or
/// NegativeJ (I omega_S / hbar <= -S).
DerivedQuantities derive_quantities(const PhysicalConstants& c, const SystemParams& p);

/// k_a gamma0 / rho_mu: the anisotropy frequency without going through D and S.
double omega_D_closed_form(const PhysicalConstants& c, const SystemParams& p);

struct RegimeReport {
    double gravity_ratio = 0;  // [M g/(mu B'')] / min{sqrt(B0/B''), B'/B''}
    bool gravity_ok = false;
    double slow_rotation_ratio = 0;  // |I omega_S / hbar| / S
    bool slow_rotation_ok = false;
    bool macrospin_ok = false;  // S >= 1
    bool macrospin_comfortable = false;  // S >= 100
    bool omega_T_real = false;
    bool trap_z_confining = false;
};

inline constexpr double kGravityThreshold = 0.1;
inline constexpr double kSlowRotationThreshold = 0.1;

/// Never throws. Ratios that are undefined for the given trap (B'' <= 0) are
/// reported as +inf with the corresponding flag false.
RegimeReport validate_regime(const PhysicalConstants& c, const SystemParams& p,
                             const DerivedQuantities& d);

}  // namespace maglev
