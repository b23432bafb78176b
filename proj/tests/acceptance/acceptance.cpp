// Acceptance run: one PASS/FAIL line per criterion, details indented below.
// Exit status is nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include <Eigen/LU>

#include "maglev/gaussian_state.hpp"
#include "maglev/stability.hpp"

using namespace maglev;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

void verdict(const char* id, bool ok, const std::string& summary) {
    std::printf("%s %s  %s\n", id, ok ? "PASS" : "FAIL", summary.c_str());
    if (!ok) {
        ++failures;
    }
}

void detail(const char* fmt, auto... args) {
    std::printf("    ");
    std::printf(fmt, args...);
    std::printf("\n");
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof(buf), f, args...);
    return buf;
}

const PhysicalConstants kC{};

// ---------------------------------------------------------------------------

void a1_spectrum_oracle() {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(20240601);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double omegas[3] = {0.0, 1e3, -1e3};
    const int draws = 600;
    double worst[3] = {0, 0, 0};
    int bad[3] = {0, 0, 0};
    int count[3] = {0, 0, 0};
    for (int n = 0; n < draws; ++n) {
        const double R = std::exp(std::log(5e-10) + u(rng) * (std::log(2e-8) - std::log(5e-10)));
        const double B0 = std::exp(std::log(1e-5) + u(rng) * (std::log(1e-1) - std::log(1e-5)));
        const int g = n % 3;
        auto p = reference_params(R, B0);
        p.omega_S = omegas[g];
        const auto d = derive_quantities(kC, p);
        const double r = crosscheck_spectrum(build_model(d), pt_coefficients(d));
        worst[g] = std::max(worst[g], r);
        bad[g] += r < 1e-7 ? 0 : 1;
        ++count[g];
    }
    const double elapsed = seconds_since(t0);
    const int total_bad = bad[0] + bad[1] + bad[2];
    verdict("A1", total_bad == 0 && elapsed < 10.0,
            fmt("dual-route spectrum: %d/%d draws with residual >= 1e-7, %.2f s", total_bad, draws, elapsed));
    for (int g = 0; g < 3; ++g) {
        detail("omega_S = %+g rad/s: %d draws, worst residual %.3e, %d above 1e-7", omegas[g], count[g], worst[g],
               bad[g]);
    }
}

// ---------------------------------------------------------------------------

struct LineEdges {
    std::vector<std::pair<double, double>> brackets;  // consecutive samples whose phases differ
    std::vector<std::pair<Phase, Phase>> phases;
};

// Diagnostic only: components with diagonal neighbours joined, and the size of the smallest one.
std::pair<int, int> components_8(const PhaseDiagram& pd, Phase phase) {
    const int nB = static_cast<int>(pd.B0_axis.size());
    const int nR = static_cast<int>(pd.R_axis.size());
    std::vector<int> seen(pd.cells.size(), 0);
    int count = 0, smallest = 1 << 30;
    for (int start = 0; start < nB * nR; ++start) {
        if (seen[start] || pd.cells[start].classification != phase) continue;
        std::vector<int> stack{start};
        seen[start] = 1;
        int size = 0;
        while (!stack.empty()) {
            const int idx = stack.back();
            stack.pop_back();
            ++size;
            for (int dR = -1; dR <= 1; ++dR) {
                for (int dB = -1; dB <= 1; ++dB) {
                    const int iB = idx % nB + dB, iR = idx / nB + dR;
                    if (iB < 0 || iB >= nB || iR < 0 || iR >= nR) continue;
                    const int j = iR * nB + iB;
                    if (!seen[j] && pd.cells[j].classification == phase) {
                        seen[j] = 1;
                        stack.push_back(j);
                    }
                }
            }
        }
        ++count;
        smallest = std::min(smallest, size);
    }
    return {count, smallest};
}

LineEdges scan_B0(double R, int n) {
    LineEdges e;
    const auto axis = make_axis(1e-5, 1e-1, n, true);
    Phase prev = classify_params(kC, reference_params(R, axis[0])).classification;
    for (int k = 1; k < n; ++k) {
        const Phase ph = classify_params(kC, reference_params(R, axis[k])).classification;
        if (ph != prev) {
            e.brackets.emplace_back(axis[k - 1], axis[k]);
            e.phases.emplace_back(prev, ph);
        }
        prev = ph;
    }
    return e;
}

PhaseDiagram a2_phase_diagram() {
    const auto t0 = Clock::now();
    SweepSpec spec;  // 200 x 200 log grid over B0 in [1e-5, 1e-1], R in [5e-10, 1e-8]
    spec.threads = 1;
    const auto pd = sweep_grid(kC, reference_params(2e-9, 1e-3), spec);
    const double sweep_time = seconds_since(t0);

    const int stable = count_components(pd, [](const SweepCell& c) { return is_stable(c.classification); });
    const int edh = count_components(pd, [](const SweepCell& c) { return c.classification == Phase::StableEdH; });
    const int a = count_components(pd, [](const SweepCell& c) { return c.classification == Phase::StableA; });
    int marginal = 0, errors = 0;
    for (const auto& c : pd.cells) {
        marginal += c.classification == Phase::Marginal ? 1 : 0;
        errors += c.error.empty() ? 0 : 1;
    }

    const Borders b = pd.borders;
    const auto p1 = reference_params(1e-9, 1e-3);

    // Boundaries along R = 1 nm, bracketed from a 400-point scan.
    const auto edges = scan_B0(1e-9, 400);
    double edh_lower = NAN, edh_upper = NAN, a_lower = NAN;
    for (std::size_t i = 0; i < edges.brackets.size(); ++i) {
        const auto [from, to] = edges.phases[i];
        const auto [lo, hi] = edges.brackets[i];
        const double x = refine_boundary(kC, p1, 1e-9, lo, hi);
        if (from == Phase::Unstable && to == Phase::StableEdH) edh_lower = x;
        if (from == Phase::StableEdH && to == Phase::Unstable) edh_upper = x;
        if (from == Phase::Unstable && to == Phase::StableA) a_lower = x;
    }
    // R edge of the EdH region at B0 = 1 mT: scan R, refine the stable -> unstable step.
    double r_edge = NAN;
    {
        const auto axis = make_axis(5e-10, 1e-8, 300, true);
        Phase prev = classify_params(kC, reference_params(axis[0], 1e-3)).classification;
        for (std::size_t k = 1; k < axis.size(); ++k) {
            const Phase ph = classify_params(kC, reference_params(axis[k], 1e-3)).classification;
            if (prev == Phase::StableEdH && ph != Phase::StableEdH) {
                r_edge = refine_boundary_R(kC, p1, 1e-3, axis[k - 1], axis[k]);
                break;
            }
            prev = ph;
        }
    }

    const double e1 = std::abs(edh_lower / b.B_c1 - 1);
    const double e1_quoted = std::abs(edh_lower / 1.75e-4 - 1);
    const double e2 = std::abs(a_lower / b.B_c2 - 1);
    const double e3 = std::abs(r_edge / b.R_c(1e-3) - 1);

    const bool ok_components = stable == 2 && edh == 1 && a == 1;
    const bool ok_c1 = e1 < 0.25;
    const bool ok_c2 = e2 < 0.10;
    const bool ok_rc = e3 < 0.25;
    const bool ok_time = sweep_time < 60.0;
    verdict("A2", ok_components && ok_c1 && ok_c2 && ok_rc && ok_time,
            fmt("phase diagram: components %s, B_c1 %s, B_c2 %s, R_c %s, runtime %s", ok_components ? "ok" : "BAD",
                ok_c1 ? "ok" : "BAD", ok_c2 ? "ok" : "BAD", ok_rc ? "ok" : "BAD", ok_time ? "ok" : "BAD"));
    detail("200x200 sweep %.1f s; stable components %d (EdH %d, A %d); MARGINAL cells %d; error cells %d",
           sweep_time, stable, edh, a, marginal, errors);
    const auto [edh8, edh8_min] = components_8(pd, Phase::StableEdH);
    const auto [a8, a8_min] = components_8(pd, Phase::StableA);
    detail("with diagonal neighbours: EdH %d (smallest %d cells), A %d (smallest %d cells)", edh8, edh8_min, a8,
           a8_min);
    detail("R = 1 nm: unstable -> EdH at %.4e T vs B_c1 = %.4e T (%.1f%%; %.1f%% vs the quoted 1.75e-4)", edh_lower,
           b.B_c1, 100 * e1, 100 * e1_quoted);
    detail("R = 1 nm: EdH -> unstable at %.4e T", edh_upper);
    detail("R = 1 nm: unstable -> A at %.4e T vs B_c2 = %.4e T (%.1f%%)", a_lower, b.B_c2, 100 * e2);
    detail("B0 = 1 mT: EdH upper R edge at %.4e m vs R_c = %.4e m (%.1f%%)", r_edge, b.R_c(1e-3), 100 * e3);
    return pd;
}

// ---------------------------------------------------------------------------

void a3_axial() {
    int mismatches = 0, total = 0;
    std::vector<double> values = {0.0, 1e-300, -1e-300, 5e-324, -5e-324};
    for (int e = -6; e <= 8; ++e) {
        values.push_back(std::pow(10.0, e));
        values.push_back(-std::pow(10.0, e));
    }
    for (double R : {5e-10, 2e-9, 1e-8}) {
        for (double B0 : {1e-5, 1e-3, 5e-2}) {
            for (double Bpp : values) {
                auto p = reference_params(R, B0);
                p.Bpp = Bpp;
                const auto v = classify_params(kC, p);
                const bool consistent = v.z_stable == (Bpp > 0) && (Bpp > 0 || v.classification == Phase::Unstable);
                mismatches += consistent ? 0 : 1;
                ++total;
            }
        }
    }
    verdict("A3", mismatches == 0, fmt("axial criterion: %d/%d sign-sweep points inconsistent", mismatches, total));
}

// ---------------------------------------------------------------------------

std::vector<std::pair<double, double>> sample_stable(const PhaseDiagram& pd, int n) {
    std::vector<std::pair<double, double>> all;
    for (std::size_t iR = 0; iR < pd.R_axis.size(); ++iR) {
        for (std::size_t iB = 0; iB < pd.B0_axis.size(); ++iB) {
            if (is_stable(pd.at(iR, iB).classification)) {
                all.emplace_back(pd.R_axis[iR], pd.B0_axis[iB]);
            }
        }
    }
    std::vector<std::pair<double, double>> out;
    for (int k = 0; k < n && !all.empty(); ++k) {
        out.push_back(all[(static_cast<std::size_t>(k) * all.size()) / static_cast<std::size_t>(n)]);
    }
    return out;
}

void a4_symplectic(const std::vector<std::pair<double, double>>& points) {
    double w_symp = 0, w_off = 0, w_pair = 0, w_det = 0;
    int non_positive = 0, bad_purity = 0, bad_ent = 0, bad_xi = 0, thrown = 0;
    double min_omega = INFINITY;
    for (const auto& [R, B0] : points) {
        try {
            const auto model = build_model(derive_quantities(kC, reference_params(R, B0)));
            const auto t = bogoliubov_transform(model);
            w_symp = std::max(w_symp, symplectic_residual(t, metric_G()));
            const auto dr = diagonalization_residual(t, model);
            w_off = std::max(w_off, dr.off_diagonal);
            w_pair = std::max(w_pair, dr.pairing);
            bool positive = true;
            for (double w : t.omegas) {
                positive = positive && w > 0;
                min_omega = std::min(min_omega, w / model.omega_scale());
            }
            non_positive += positive ? 0 : 1;
            const auto cov = covariance(t);
            const Mat10c two = 2.0 * cov.theta;
            w_det = std::max(w_det, std::abs(two.determinant() - 1.0));
            const auto m = mode_metrics(cov);
            for (double p : m.purities) bad_purity += (p > 0 && p <= 1 + 1e-12) ? 0 : 1;
            bad_ent += m.entanglement >= -1e-12 ? 0 : 1;
            bad_xi += m.squeezing >= 1 - 1e-12 ? 0 : 1;
        } catch (const Error& e) {
            ++thrown;
        }
    }
    const bool ok_symp = w_symp < 1e-10;
    const bool ok_diag = w_off < 1e-9 && w_pair < 1e-9;
    const bool ok_pos = non_positive == 0;
    const bool ok_det = w_det < 1e-8;
    const bool ok_metrics = bad_purity == 0 && bad_ent == 0 && bad_xi == 0;
    verdict("A4", thrown == 0 && ok_symp && ok_diag && ok_pos && ok_det && ok_metrics,
            fmt("symplectic suite on %zu stable points: T^dag G T %s, diagonal %s, positive entries %s, det %s, "
                "P_a/entanglement/squeezing %s",
                points.size(), ok_symp ? "ok" : "BAD", ok_diag ? "ok" : "BAD", ok_pos ? "ok" : "BAD",
                ok_det ? "ok" : "BAD", ok_metrics ? "ok" : "BAD"));
    detail("max |T^dag G T - G| = %.3e; off-diagonal %.3e; pair mismatch %.3e; max |det(2 Theta) - 1| = %.3e", w_symp,
           w_off, w_pair, w_det);
    detail("points with a non-positive normal frequency: %d of %zu (most negative omega / scale = %.3e)",
           non_positive, points.size(), min_omega);
    detail("%s", "M_T carries -omega_L eta^2 on the m diagonal, so it is indefinite and one normal mode has "
                 "negative energy at every point");
    detail("purity violations %d, entanglement < 0: %d, squeezing < 1: %d, exceptions %d", bad_purity, bad_ent,
           bad_xi, thrown);
}

void a5_decoupled(const std::vector<std::pair<double, double>>& points) {
    double worst_ent = 0, worst_xi = 0;
    int thrown = 0;
    for (const auto& [R, B0] : points) {
        try {
            const auto d = derive_quantities(kC, reference_params(R, B0));
            auto C = build_C(d);
            const Mat5 diag = C.entries.diagonal().asDiagonal();
            C.entries = diag;
            const auto model = model_from_MT(build_MT(C), std::sqrt(Complex(d.omega_Z_sq)));
            const auto m = mode_metrics(covariance(bogoliubov_transform(model)));
            worst_ent = std::max(worst_ent, std::abs(m.entanglement));
            worst_xi = std::max(worst_xi, std::abs(m.squeezing - 1));
        } catch (const Error&) {
            ++thrown;
        }
    }
    verdict("A5", thrown == 0 && worst_ent < 1e-10 && worst_xi < 1e-10,
            fmt("decoupled limit on %zu points: max entanglement %.3e, max |xi - 1| %.3e, exceptions %d",
                points.size(), worst_ent, worst_xi, thrown));
}

// ---------------------------------------------------------------------------

void a6_state_scan() {
    const double R = 2e-9;
    const auto axis = make_axis(1e-5, 1e-1, 400, true);
    const auto rows = state_scan(kC, reference_params(R, 1e-3), R, axis, kDefaultTolerance, 1);

    int mismatched = 0, non_finite = 0;
    std::vector<bool> stable(axis.size());
    for (std::size_t k = 0; k < axis.size(); ++k) {
        stable[k] = is_stable(classify_params(kC, reference_params(R, axis[k])).classification);
        if (stable[k] != rows[k].metrics.has_value()) ++mismatched;
        if (rows[k].metrics) {
            const auto& m = *rows[k].metrics;
            if (!std::isfinite(m.entanglement) || !std::isfinite(m.squeezing)) ++non_finite;
        }
    }
    int windows = 0;
    for (std::size_t k = 0; k < axis.size(); ++k) {
        if (stable[k] && (k == 0 || !stable[k - 1])) ++windows;
    }

    // 0.1% steps at every sample at least two samples inside a window
    int checked = 0, jumps = 0;
    double worst = 0;
    for (std::size_t k = 2; k + 2 < axis.size(); ++k) {
        if (!(stable[k - 2] && stable[k - 1] && stable[k] && stable[k + 1] && stable[k + 2])) continue;
        auto metrics_at = [&](double B0) {
            return mode_metrics(covariance(bogoliubov_transform(build_model(derive_quantities(kC, reference_params(R, B0))))));
        };
        const auto here = metrics_at(axis[k]);
        const auto next = metrics_at(axis[k] * 1.001);
        const double de = std::abs(next.entanglement - here.entanglement) / std::abs(here.entanglement);
        const double dx = std::abs(next.squeezing - here.squeezing) / here.squeezing;
        worst = std::max({worst, de, dx});
        jumps += (de < 0.05 && dx < 0.05) ? 0 : 1;
        ++checked;
    }
    verdict("A6", mismatched == 0 && non_finite == 0 && jumps == 0 && windows == 2 && checked > 0,
            fmt("state scan at R = 2 nm: %d rows disagree with the classifier, %d windows, %d non-finite, "
                "%d/%d continuity violations",
                mismatched, windows, non_finite, jumps, checked));
    detail("largest relative change over a 0.1%% step: %.3e", worst);
}

// ---------------------------------------------------------------------------

void a7_sturm(const PhaseDiagram& pd) {
    int compared = 0, disagree = 0, marginal = 0;
    for (const auto& c : pd.cells) {
        if (c.classification == Phase::Marginal) {
            ++marginal;
            continue;
        }
        if (!c.error.empty()) continue;
        ++compared;
        disagree += c.companion_real_count == c.sturm_real_count ? 0 : 1;
    }
    verdict("A7", disagree == 0 && compared > 0,
            fmt("Sturm vs companion real-root counts: %d disagreements over %d cells (%d MARGINAL skipped)", disagree,
                compared, marginal));
}

}  // namespace

int main() {
    a1_spectrum_oracle();
    const auto pd = a2_phase_diagram();
    a3_axial();
    const auto points = sample_stable(pd, 100);
    a4_symplectic(points);
    a5_decoupled(points);
    a6_state_scan();
    a7_sturm(pd);
    std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
