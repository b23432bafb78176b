#pragma once

// Normal-mode vacuum of the quadratic Hamiltonian at a stable point:
// Bogoliubov transformation, ladder-basis covariance matrix and the derived
// purity, entanglement and squeezing figures.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "maglev/quadratic_hamiltonian.hpp"
#include "maglev/stability.hpp"

namespace maglev {

struct BogoliubovTransform {
    Mat10c T = Mat10c::Identity();  // columns (v_1, u_1, ..., v_5, u_5)
    /// Diagonal entries of T^dag M_T T (rad/s), ascending. Signed: M_T is
    /// indefinite, so one normal mode always carries negative energy.
    std::array<double, kModeCount> omegas{};
};

/// Throws NotStable when K_T has complex eigenvalues or a degeneracy inside
/// one invariant block, ZeroNormVector when an eigenvector's G-norm is below
/// tol (in scale units).
BogoliubovTransform bogoliubov_transform(const QuadraticModel& model, double tol = kDefaultTolerance);

struct CovarianceMatrix {
    Mat10c theta = 0.5 * Mat10c::Identity();
};

/// Theta = T T^dag / 2.
CovarianceMatrix covariance(const BogoliubovTransform& transform);

struct StateMetrics {
    std::array<double, kModeCount> purities{};  // order b_R, b_L, m, k, s
    double entanglement = 0;  // 5 - sum of purities
    double squeezing = 1;     // 1 / sqrt(2 min eig Theta)
};

/// Throws NonPositiveBlockDeterminant when a 2x2 mode block has det <= 0.
StateMetrics mode_metrics(const CovarianceMatrix& cov);

/// max |T^dag G T - G|.
double symplectic_residual(const BogoliubovTransform& t, const Mat10c& G);

/// Largest off-diagonal |T^dag M_T T| relative to omega_scale, together with
/// the largest mismatch between the paired diagonal entries.
struct DiagonalizationResidual {
    double off_diagonal = 0;
    double pairing = 0;
};
DiagonalizationResidual diagonalization_residual(const BogoliubovTransform& t, const QuadraticModel& model);

struct StateRow {
    double B0 = 0;
    Phase phase = Phase::Unstable;
    std::optional<StateMetrics> metrics;  // empty for gap rows
    std::string note;
};

/// One row per requested B0, in input order; non-stable points are gap rows.
std::vector<StateRow> state_scan(const PhysicalConstants& c, const SystemParams& p_template, double R_fixed,
                                 const std::vector<double>& B0_list, double tol = kDefaultTolerance,
                                 unsigned threads = 1);

}  // namespace maglev
