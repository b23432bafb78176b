#include "maglev/stability.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

#include <Eigen/Eigenvalues>

#include "maglev/sturm.hpp"

namespace maglev {

std::string_view to_string(Phase phase) {
    switch (phase) {
        case Phase::Unstable: return "UNSTABLE";
        case Phase::StableEdH: return "STABLE_EDH";
        case Phase::StableA: return "STABLE_A";
        case Phase::Marginal: return "MARGINAL";
    }
    return "UNKNOWN";
}

CharPolyT from_a_coefficients(const std::array<Complex, 6>& a) {
    CharPolyT poly;
    poly.a = a;
    // i^k: 1, i, -1, -i, 1, i
    static const std::array<Complex, 6> ipow = {Complex(1, 0), Complex(0, 1), Complex(-1, 0),
                                                Complex(0, -1), Complex(1, 0), Complex(0, 1)};
    for (std::size_t k = 0; k < 6; ++k) {
        poly.q[k] = (a[k] * ipow[k]).real();
    }
    return poly;
}

CharPolyT pt_coefficients(const DerivedQuantities& d) {
    const double wD = d.omega_D;
    const double wI = d.omega_I;
    const double wL = d.omega_L;
    const double wS = d.omega_S;
    const double wT2 = d.omega_T * d.omega_T;
    const double wZ2 = d.omega_Z_sq;
    const Complex i(0.0, 1.0);

    std::array<Complex, 6> a;
    a[0] = -2.0 * wD * wI * wL * wT2;
    a[1] = i * (wD * wZ2 * (wS + wI) + wS * wL * wT2);
    a[2] = -2.0 * wD * wI * wL - 0.5 * (2.0 * wD - wS) * wZ2 - wL * wT2;
    a[3] = i * (-2.0 * wD * (wS + wI) + wS * wL + 0.5 * wZ2);
    a[4] = 2.0 * wD - wS - wL;
    a[5] = -i;
    return from_a_coefficients(a);
}

std::array<Complex, 5> companion_roots(const std::array<double, 6>& q, double omega_scale) {
    // Monic in x = nu / omega_scale: x^5 + sum_{k<5} q_k s^(k-5) x^k.
    const double lead = q[5];
    Eigen::Matrix<double, 5, 5> companion = Eigen::Matrix<double, 5, 5>::Zero();
    for (int k = 0; k < 5; ++k) {
        const double coeff = q[k] / lead * std::pow(omega_scale, k - 5);
        companion(k, 4) = -coeff;
        if (k > 0) {
            companion(k, k - 1) = 1.0;
        }
    }
    Eigen::EigenSolver<Eigen::Matrix<double, 5, 5>> solver(companion, false);
    if (solver.info() != Eigen::Success) {
        throw Error(ErrorCode::RootSolverFailure, "companion eigensolve did not converge");
    }
    // The unbalanced companion matrix loses digits when the coefficients
    // span many decades; a few Newton steps in long double recover them.
    using LComplex = std::complex<long double>;
    std::array<long double, 6> c;
    for (int k = 0; k < 5; ++k) {
        c[k] = -static_cast<long double>(companion(k, 4));
    }
    c[5] = 1.0L;
    auto eval = [&](LComplex x, LComplex& deriv) {
        LComplex p = c[5];
        deriv = 0.0L;
        for (int k = 4; k >= 0; --k) {
            deriv = deriv * x + p;
            p = p * x + c[k];
        }
        return p;
    };
    std::array<Complex, 5> roots;
    for (int k = 0; k < 5; ++k) {
        LComplex x(solver.eigenvalues()(k).real(), solver.eigenvalues()(k).imag());
        if (!std::isfinite(static_cast<double>(x.real())) || !std::isfinite(static_cast<double>(x.imag()))) {
            throw Error(ErrorCode::RootSolverFailure, "companion eigensolve returned non-finite roots");
        }
        LComplex dp;
        long double best = std::abs(eval(x, dp));
        for (int it = 0; it < 4 && best > 0.0L; ++it) {
            if (dp == LComplex(0.0L)) {
                break;
            }
            const LComplex step = x - eval(x, dp) / dp;
            LComplex dstep;
            const long double r = std::abs(eval(step, dstep));
            if (!(r < best)) {
                break;
            }
            x = step;
            best = r;
            eval(x, dp);
        }
        roots[k] = Complex(static_cast<double>(x.real()), static_cast<double>(x.imag()));
    }
    std::sort(roots.begin(), roots.end(), [](Complex x, Complex y) {
        return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
    });
    return roots;
}

namespace {

// Smallest relative gap among {x_i} u {-x_i}; a root at the origin collides
// with its own mirror, so |x_i| itself (in scale units) also counts.
double min_separation(const std::array<Complex, 5>& x) {
    std::array<Complex, 10> all;
    for (int k = 0; k < 5; ++k) {
        all[k] = x[k];
        all[k + 5] = -x[k];
    }
    double sep = std::numeric_limits<double>::infinity();
    for (const auto& r : x) {
        sep = std::min(sep, std::abs(r));
    }
    for (int a = 0; a < 10; ++a) {
        for (int b = a + 1; b < 10; ++b) {
            if (b == a + 5) {
                continue;
            }
            const double denom = std::max(std::abs(all[a]), std::abs(all[b]));
            if (denom > 0.0) {
                sep = std::min(sep, std::abs(all[a] - all[b]) / denom);
            }
        }
    }
    return sep;
}

}  // namespace

StabilityVerdict classify_point(const DerivedQuantities& d, const QuadraticModel& model, double tol) {
    if (!(tol > 0.0 && tol < 1e-4)) {
        throw Error(ErrorCode::InvalidArgument, "tolerance must lie in (0, 1e-4)");
    }
    StabilityVerdict v;
    v.omega_scale = model.omega_scale();
    v.z_stable = d.z_confining;

    const CharPolyT poly = pt_coefficients(d);
    const auto x = companion_roots(poly.q, v.omega_scale);

    v.max_offaxis = 0.0;
    bool near_real_complex = false;
    for (int k = 0; k < 5; ++k) {
        v.roots_nu[k] = x[k] * v.omega_scale;
        const double offaxis = std::abs(x[k].imag()) / std::max(1.0, std::abs(x[k]));
        v.max_offaxis = std::max(v.max_offaxis, offaxis);
        if (offaxis <= tol) {
            ++v.companion_real_count;
        } else if (offaxis <= 10.0 * tol) {
            near_real_complex = true;
        }
    }
    v.min_separation = min_separation(x);
    v.t_stable = v.companion_real_count == 5 && v.min_separation > tol;

    std::array<double, 6> q_scaled;
    for (int k = 0; k < 6; ++k) {
        q_scaled[k] = poly.q[k] * std::pow(v.omega_scale, k - 5);
    }
    v.sturm_real_count = sturm_real_root_count(q_scaled);

    if (!v.z_stable) {
        v.classification = Phase::Unstable;
    } else if (near_real_complex || v.min_separation <= 10.0 * tol) {
        v.classification = Phase::Marginal;
    } else if (v.t_stable) {
        v.classification = d.omega_D > d.omega_L ? Phase::StableEdH : Phase::StableA;
    } else {
        v.classification = Phase::Unstable;
    }
    return v;
}

StabilityVerdict classify_params(const PhysicalConstants& c, const SystemParams& p, double tol) {
    const auto d = derive_quantities(c, p);
    return classify_point(d, build_model(d), tol);
}

double Borders::R_c(double B0) const { return R_c_prefactor / std::sqrt(B0); }

Borders analytic_borders(const PhysicalConstants& c, const SystemParams& p) {
    Borders b;
    b.B_c1 = 3.0 * std::cbrt(c.hbar * p.rho_mu * p.Bp * p.Bp / (4.0 * c.mu_B * c.gamma0 * p.rho_M));
    b.B_c2 = 2.0 * p.k_a * c.mu_B / (c.hbar * c.gamma0 * p.rho_mu);
    b.R_c_prefactor = std::sqrt(5.0 * p.rho_mu / (8.0 * c.gamma0 * c.gamma0 * p.rho_M));
    return b;
}

std::vector<double> make_axis(double lo, double hi, int n, bool log_spacing) {
    if (n < 1 || !(lo > 0.0) || !(hi >= lo) || (n > 1 && !(hi > lo))) {
        throw Error(ErrorCode::InvalidArgument, "axis needs 0 < lo < hi and n >= 1 (lo == hi only for n == 1)");
    }
    std::vector<double> axis(static_cast<std::size_t>(n));
    if (n == 1) {
        axis[0] = lo;
        return axis;
    }
    for (int k = 0; k < n; ++k) {
        const double t = static_cast<double>(k) / (n - 1);
        axis[k] = log_spacing ? std::exp(std::log(lo) + t * (std::log(hi) - std::log(lo)))
                              : lo + t * (hi - lo);
    }
    axis.front() = lo;
    axis.back() = hi;
    return axis;
}

namespace {

SweepCell classify_cell(const PhysicalConstants& c, SystemParams p, double tol) {
    SweepCell cell;
    try {
        const auto d = derive_quantities(c, p);
        cell.omega_L = d.omega_L;
        cell.omega_D = d.omega_D;
        cell.omega_I = d.omega_I;
        const auto v = classify_point(d, build_model(d), tol);
        cell.classification = v.classification;
        cell.max_offaxis = v.max_offaxis;
        cell.companion_real_count = v.companion_real_count;
        cell.sturm_real_count = v.sturm_real_count;
    } catch (const std::exception& e) {
        cell.classification = Phase::Unstable;
        cell.max_offaxis = std::numeric_limits<double>::quiet_NaN();
        cell.error = e.what();
    }
    return cell;
}

}  // namespace

PhaseDiagram sweep_grid(const PhysicalConstants& c, const SystemParams& p_template, const SweepSpec& spec) {
    if (spec.n_B0 < 2 || spec.n_R < 2) {
        throw Error(ErrorCode::InvalidArgument, "sweep grids need at least 2 points per axis");
    }
    PhaseDiagram pd;
    pd.B0_axis = make_axis(spec.B0_min, spec.B0_max, spec.n_B0, spec.log_spacing);
    pd.R_axis = make_axis(spec.R_min, spec.R_max, spec.n_R, spec.log_spacing);
    pd.borders = analytic_borders(c, p_template);
    const std::size_t nB = pd.B0_axis.size();
    const std::size_t total = nB * pd.R_axis.size();
    pd.cells.resize(total);

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t idx = next++; idx < total; idx = next++) {
            SystemParams p = p_template;
            p.R = pd.R_axis[idx / nB];
            p.B0 = pd.B0_axis[idx % nB];
            pd.cells[idx] = classify_cell(c, p, spec.tol);
        }
    };
    const unsigned threads = std::max(1u, std::min<unsigned>(spec.threads, static_cast<unsigned>(total)));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < threads; ++t) {
        pool.emplace_back(worker);
    }
    worker();
    for (auto& th : pool) {
        th.join();
    }
    return pd;
}

int count_components(const PhaseDiagram& pd, const std::function<bool(const SweepCell&)>& pred) {
    const std::size_t nB = pd.B0_axis.size();
    const std::size_t nR = pd.R_axis.size();
    std::vector<int> label(nB * nR, -1);
    int components = 0;
    std::vector<std::size_t> stack;
    for (std::size_t start = 0; start < label.size(); ++start) {
        if (label[start] >= 0 || !pred(pd.cells[start])) {
            continue;
        }
        stack.push_back(start);
        label[start] = components;
        while (!stack.empty()) {
            const std::size_t idx = stack.back();
            stack.pop_back();
            const std::size_t iR = idx / nB;
            const std::size_t iB = idx % nB;
            auto visit = [&](std::size_t j) {
                if (label[j] < 0 && pred(pd.cells[j])) {
                    label[j] = components;
                    stack.push_back(j);
                }
            };
            if (iB > 0) visit(idx - 1);
            if (iB + 1 < nB) visit(idx + 1);
            if (iR > 0) visit(idx - nB);
            if (iR + 1 < nR) visit(idx + nB);
        }
        ++components;
    }
    return components;
}

double refine_boundary(const std::function<Phase(double)>& classify, double lo, double hi, double rel_width) {
    if (!(lo > 0.0 && hi > lo)) {
        throw Error(ErrorCode::InvalidArgument, "bracket needs 0 < lo < hi");
    }
    const Phase at_lo = classify(lo);
    if (classify(hi) == at_lo) {
        throw Error(ErrorCode::NoSignChange, "bracket endpoints classify identically");
    }
    while (hi / lo - 1.0 > rel_width) {
        const double mid = std::sqrt(lo * hi);
        if (classify(mid) == at_lo) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double refine_boundary(const PhysicalConstants& c, const SystemParams& p_template, double fixed_R,
                       double B0_lo, double B0_hi, double tol) {
    SystemParams p = p_template;
    p.R = fixed_R;
    return refine_boundary(
        [&](double B0) {
            p.B0 = B0;
            return classify_params(c, p, tol).classification;
        },
        B0_lo, B0_hi);
}

double refine_boundary_R(const PhysicalConstants& c, const SystemParams& p_template, double fixed_B0,
                         double R_lo, double R_hi, double tol) {
    SystemParams p = p_template;
    p.B0 = fixed_B0;
    return refine_boundary(
        [&](double R) {
            p.R = R;
            return classify_params(c, p, tol).classification;
        },
        R_lo, R_hi);
}

double crosscheck_spectrum(const QuadraticModel& model, const CharPolyT& poly) {
    const double scale = model.omega_scale();
    const Complex i(0.0, 1.0);
    Mat10c iK = i * model.KT / scale;
    Eigen::ComplexEigenSolver<Mat10c> solver(iK, false);
    if (solver.info() != Eigen::Success) {
        throw Error(ErrorCode::RootSolverFailure, "eigensolve of i K_T did not converge");
    }

    // Roots of P_T in lambda are i nu.
    const auto x = companion_roots(poly.q, scale);
    std::array<Complex, 10> expected;
    for (int k = 0; k < 5; ++k) {
        expected[k] = i * x[k];
        expected[k + 5] = std::conj(expected[k]);
    }

    struct Pair {
        double dist;
        int e;
        int r;
    };
    std::vector<Pair> pairs;
    pairs.reserve(100);
    for (int e = 0; e < 10; ++e) {
        for (int r = 0; r < 10; ++r) {
            pairs.push_back({std::abs(solver.eigenvalues()(e) - expected[r]), e, r});
        }
    }
    std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
        return a.dist != b.dist ? a.dist < b.dist : (a.e != b.e ? a.e < b.e : a.r < b.r);
    });
    std::array<bool, 10> used_e{}, used_r{};
    double worst = 0.0;
    int matched = 0;
    for (const auto& pr : pairs) {
        if (used_e[pr.e] || used_r[pr.r]) {
            continue;
        }
        used_e[pr.e] = used_r[pr.r] = true;
        worst = std::max(worst, pr.dist);
        if (++matched == 10) {
            break;
        }
    }
    return worst;
}

}  // namespace maglev
