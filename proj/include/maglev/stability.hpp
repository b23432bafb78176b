#pragma once

// Linear stability of the relative equilibrium.
//
// Two independent routes are kept: the closed-form characteristic polynomial
// P_T(lambda) of one 5x5 block of i K_T, and the eigenvalues of K_T itself.
// Classification uses the polynomial (companion-matrix roots, with an exact
// Sturm count alongside); crosscheck_spectrum compares the two.

#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "maglev/params.hpp"
#include "maglev/quadratic_hamiltonian.hpp"

namespace maglev {

inline constexpr double kDefaultTolerance = 1e-8;

/// P_T(lambda) = sum a_k lambda^k and q(nu) = P_T(i nu) = sum q_k nu^k.
/// The a_k carry units of (rad/s)^(5-k); q has real coefficients and q_5 = 1.
struct CharPolyT {
    std::array<Complex, 6> a{};
    std::array<double, 6> q{};
};

CharPolyT pt_coefficients(const DerivedQuantities& d);

/// q(nu) rebuilt from a_k; exposed so a corrupted or externally supplied
/// a can be turned into a consistent CharPolyT.
CharPolyT from_a_coefficients(const std::array<Complex, 6>& a);

enum class Phase : std::uint8_t { Unstable = 0, StableEdH = 1, StableA = 2, Marginal = 3 };

std::string_view to_string(Phase phase);

inline bool is_stable(Phase p) { return p == Phase::StableEdH || p == Phase::StableA; }

struct StabilityVerdict {
    bool z_stable = false;
    std::array<Complex, 5> roots_nu{};  // rad/s, sorted by real part
    bool t_stable = false;
    Phase classification = Phase::Unstable;
    double max_offaxis = 0;        // max |Im nu| / max(1, |nu|), nondimensional
    double min_separation = 0;     // smallest relative gap in {nu} u {-nu}
    int companion_real_count = 0;  // roots with offaxis <= tol
    int sturm_real_count = 0;      // exact count of distinct real roots of q
    double omega_scale = 0;        // rad/s
};

/// tol in (0, 1e-4). Throws RootSolverFailure if the companion eigensolve
/// does not converge, InvalidArgument for a bad tolerance.
StabilityVerdict classify_point(const DerivedQuantities& d, const QuadraticModel& model,
                                double tol = kDefaultTolerance);

/// Convenience: derive, build and classify one parameter point.
StabilityVerdict classify_params(const PhysicalConstants& c, const SystemParams& p,
                                 double tol = kDefaultTolerance);

/// Roots nu of q(nu) / omega_scale^5 as a function of nu / omega_scale, i.e. in
/// units of omega_scale.
std::array<Complex, 5> companion_roots(const std::array<double, 6>& q, double omega_scale);

struct Borders {
    double B_c1 = 0;  // T
    double B_c2 = 0;  // T
    double R_c_prefactor = 0;  // R_c(B0) = prefactor / sqrt(B0)
    double R_c(double B0) const;
};

Borders analytic_borders(const PhysicalConstants& c, const SystemParams& p);

struct SweepSpec {
    double B0_min = 1e-5;
    double B0_max = 1e-1;
    double R_min = 5e-10;
    double R_max = 1e-8;
    int n_B0 = 200;
    int n_R = 200;
    bool log_spacing = true;
    double tol = kDefaultTolerance;
    unsigned threads = 1;
};

struct SweepCell {
    Phase classification = Phase::Unstable;
    double max_offaxis = 0;
    double omega_L = 0;
    double omega_D = 0;
    double omega_I = 0;
    int companion_real_count = 0;
    int sturm_real_count = 0;
    std::string error;  // empty unless the cell failed and was recorded unstable
};

struct PhaseDiagram {
    std::vector<double> B0_axis;
    std::vector<double> R_axis;
    std::vector<SweepCell> cells;  // row-major: index = iR * n_B0 + iB
    Borders borders;

    const SweepCell& at(std::size_t iR, std::size_t iB) const { return cells[iR * B0_axis.size() + iB]; }
};

std::vector<double> make_axis(double lo, double hi, int n, bool log_spacing);

/// Each cell is independent; the result does not depend on spec.threads.
PhaseDiagram sweep_grid(const PhysicalConstants& c, const SystemParams& p_template,
                        const SweepSpec& spec);

/// Number of 4-connected components of cells for which pred holds.
int count_components(const PhaseDiagram& pd, const std::function<bool(const SweepCell&)>& pred);

/// Bisection on a classification change along one parameter. The bracket
/// endpoints must classify differently; the bracket is shrunk (geometrically)
/// to relative width rel_width and its midpoint returned.
double refine_boundary(const std::function<Phase(double)>& classify, double lo, double hi,
                       double rel_width = 1e-6);

/// B0 boundary at fixed R. Throws NoSignChange when the endpoints agree.
double refine_boundary(const PhysicalConstants& c, const SystemParams& p_template, double fixed_R,
                       double B0_lo, double B0_hi, double tol = kDefaultTolerance);

/// R boundary at fixed B0.
double refine_boundary_R(const PhysicalConstants& c, const SystemParams& p_template,
                         double fixed_B0, double R_lo, double R_hi, double tol = kDefaultTolerance);

/// Largest distance (in units of omega_scale) between the multiset of i K_T
/// eigenvalues and {roots of P_T} u {their conjugates}, under a one-to-one
/// nearest matching.
double crosscheck_spectrum(const QuadraticModel& model, const CharPolyT& poly);

}  // namespace maglev
