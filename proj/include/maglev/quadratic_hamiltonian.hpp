#pragma once

// Coefficient matrices of the quadratic fluctuation Hamiltonian.
//
// Basis conventions used everywhere downstream:
//   psi = (b_R^dag, k^dag, b_L, m, s)                    index of C
//   Psi = (b_R, b_R^dag, b_L, b_L^dag, m, m^dag,
//          k, k^dag, s, s^dag)                           index of M_T, G, K_T
// so mode pair p of Psi occupies slots (2p, 2p+1) with mode order
// (b_R, b_L, m, k, s).

#include <array>
#include <complex>

#include <Eigen/Core>

#include "maglev/params.hpp"

namespace maglev {

inline constexpr int kPsiDim = 5;
inline constexpr int kModeCount = 5;
inline constexpr int kPhaseSpaceDim = 10;

using Complex = std::complex<double>;
using Mat5 = Eigen::Matrix<double, kPsiDim, kPsiDim>;
using Mat10c = Eigen::Matrix<Complex, kPhaseSpaceDim, kPhaseSpaceDim>;
using Vec10c = Eigen::Matrix<Complex, kPhaseSpaceDim, 1>;
using Mat2c = Eigen::Matrix<Complex, 2, 2>;

enum class Mode { bR = 0, bL = 1, m = 2, k = 3, s = 4 };

inline constexpr std::array<const char*, kModeCount> kModeNames = {"b_R", "b_L", "m", "k", "s"};

struct CouplingMatrixC {
    Mat5 entries = Mat5::Zero();  // rad/s, indexed by psi
};

struct QuadraticModel {
    Mat2c MZ = Mat2c::Zero();
    Mat2c KZ = Mat2c::Zero();
    Mat10c MT = Mat10c::Zero();
    Mat10c G = Mat10c::Zero();
    Mat10c KT = Mat10c::Zero();

    /// Largest absolute entry of MT; the unit used to nondimensionalize eigensolves.
    double omega_scale() const;
};

CouplingMatrixC build_C(const DerivedQuantities& d);

/// Expands hbar/2 (psi^dag C psi + h.c.) into hbar/2 Psi^dag M_T Psi, dropping
/// c-numbers. Throws AsymmetricInput if C is not symmetric.
Mat10c build_MT(const CouplingMatrixC& C);

QuadraticModel build_model(const DerivedQuantities& d);

/// Assembles the model pieces that follow from an arbitrary M_T (G, K_T) and
/// an axial frequency (complex when the axial trap is anti-confining).
QuadraticModel model_from_MT(const Mat10c& MT, Complex omega_Z = {0.0, 0.0});

/// diag(+1, -1, ...)
Mat10c metric_G();

/// Slot in Psi holding psi_i (0-based).
int psi_slot(int i);

/// Pairwise (a, a^dag) slot swap of a phase-space vector: Sigma x.
Vec10c swap_pairs(const Vec10c& x);

/// Sigma X Sigma for a phase-space matrix.
Mat10c swap_pairs(const Mat10c& X);

/// Particle-hole conjugate of an eigenvector: Sigma v*.
Vec10c particle_hole_conjugate(const Vec10c& v);

double hermiticity_residual(const Mat10c& MT);
double particle_hole_residual(const Mat10c& MT);

}  // namespace maglev
