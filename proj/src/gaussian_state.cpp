#include "maglev/gaussian_state.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include <Eigen/Eigenvalues>

namespace maglev {

namespace {

// Connected components of the nonzero pattern of K; each is an invariant
// subspace that can be diagonalized on its own.
std::vector<std::vector<int>> invariant_blocks(const Mat10c& K) {
    std::array<int, kPhaseSpaceDim> label;
    label.fill(-1);
    std::vector<std::vector<int>> blocks;
    for (int start = 0; start < kPhaseSpaceDim; ++start) {
        if (label[start] >= 0) {
            continue;
        }
        const int id = static_cast<int>(blocks.size());
        blocks.emplace_back();
        std::vector<int> stack{start};
        label[start] = id;
        while (!stack.empty()) {
            const int i = stack.back();
            stack.pop_back();
            blocks[id].push_back(i);
            for (int j = 0; j < kPhaseSpaceDim; ++j) {
                if (label[j] < 0 && (K(i, j) != 0.0 || K(j, i) != 0.0)) {
                    label[j] = id;
                    stack.push_back(j);
                }
            }
        }
        std::sort(blocks[id].begin(), blocks[id].end());
    }
    return blocks;
}

struct Eigenpair {
    double value;
    Vec10c vector;
};

Complex g_inner(const Vec10c& x, const Vec10c& y) {
    Complex acc = 0.0;
    for (int i = 0; i < kPhaseSpaceDim; ++i) {
        acc += (i % 2 == 0 ? 1.0 : -1.0) * std::conj(x(i)) * y(i);
    }
    return acc;
}

}  // namespace

BogoliubovTransform bogoliubov_transform(const QuadraticModel& model, double tol) {
    const double scale = model.omega_scale();
    if (!(scale > 0.0)) {
        throw Error(ErrorCode::NotStable, "M_T vanishes");
    }
    const Mat10c K = model.KT / scale;

    std::vector<Eigenpair> positive;
    int negative_count = 0;
    for (const auto& block : invariant_blocks(K)) {
        const int n = static_cast<int>(block.size());
        Eigen::MatrixXcd sub(n, n);
        for (int a = 0; a < n; ++a) {
            for (int b = 0; b < n; ++b) {
                sub(a, b) = K(block[a], block[b]);
            }
        }
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(sub, true);
        if (solver.info() != Eigen::Success) {
            throw Error(ErrorCode::NotStable, "eigensolve of K_T did not converge");
        }
        const auto& values = solver.eigenvalues();
        for (int a = 0; a < n; ++a) {
            if (std::abs(values(a).imag()) > tol * std::max(1.0, std::abs(values(a)))) {
                throw Error(ErrorCode::NotStable, "K_T has a complex eigenvalue");
            }
            for (int b = a + 1; b < n; ++b) {
                const double denom = std::max(std::abs(values(a)), std::abs(values(b)));
                if (std::abs(values(a) - values(b)) <= tol * denom) {
                    throw Error(ErrorCode::NotStable, "K_T has a degenerate eigenvalue within one block");
                }
            }
        }
        for (int a = 0; a < n; ++a) {
            Vec10c v = Vec10c::Zero();
            for (int r = 0; r < n; ++r) {
                v(block[r]) = solver.eigenvectors()(r, a);
            }
            const double norm = g_inner(v, v).real();
            if (std::abs(norm) <= tol * v.squaredNorm()) {
                throw Error(ErrorCode::ZeroNormVector, "eigenvector with vanishing G-norm");
            }
            v /= std::sqrt(std::abs(norm));
            if (norm > 0.0) {
                positive.push_back({values(a).real(), v});
            } else {
                ++negative_count;
            }
        }
    }
    if (positive.size() != kModeCount || negative_count != kModeCount) {
        throw Error(ErrorCode::NotStable, "eigenvectors do not split into five positive and five negative G-norms");
    }
    std::sort(positive.begin(), positive.end(),
              [](const Eigenpair& a, const Eigenpair& b) { return a.value < b.value; });

    // G-weighted Gram-Schmidt against the already accepted v_j (norm +1) and
    // u_j (norm -1).
    BogoliubovTransform out;
    std::vector<Vec10c> vs, us;
    for (const auto& pair : positive) {
        Vec10c v = pair.vector;
        for (std::size_t j = 0; j < vs.size(); ++j) {
            v -= g_inner(vs[j], v) * vs[j];
            v += g_inner(us[j], v) * us[j];
        }
        const double norm = g_inner(v, v).real();
        if (norm <= tol) {
            throw Error(ErrorCode::ZeroNormVector, "G-norm lost during orthonormalization");
        }
        v /= std::sqrt(norm);
        vs.push_back(v);
        us.push_back(particle_hole_conjugate(v));
    }
    for (int i = 0; i < kModeCount; ++i) {
        out.T.col(2 * i) = vs[i];
        out.T.col(2 * i + 1) = us[i];
    }
    const Mat10c D = out.T.adjoint() * model.MT * out.T;
    for (int i = 0; i < kModeCount; ++i) {
        out.omegas[i] = D(2 * i, 2 * i).real();
    }
    return out;
}

CovarianceMatrix covariance(const BogoliubovTransform& transform) {
    CovarianceMatrix cov;
    cov.theta = 0.5 * transform.T * transform.T.adjoint();
    return cov;
}

StateMetrics mode_metrics(const CovarianceMatrix& cov) {
    StateMetrics m;
    double total = 0.0;
    for (int a = 0; a < kModeCount; ++a) {
        const Mat2c block = cov.theta.block<2, 2>(2 * a, 2 * a);
        const double det = (block(0, 0) * block(1, 1) - block(0, 1) * block(1, 0)).real();
        if (!(det > 0.0)) {
            throw Error(ErrorCode::NonPositiveBlockDeterminant,
                        std::string("covariance block of mode ") + kModeNames[a] + " has det <= 0");
        }
        m.purities[a] = 1.0 / (2.0 * std::sqrt(det));
        total += m.purities[a];
    }
    m.entanglement = static_cast<double>(kModeCount) - total;

    Eigen::SelfAdjointEigenSolver<Mat10c> solver(cov.theta, Eigen::EigenvaluesOnly);
    const double smallest = solver.eigenvalues().minCoeff();
    if (!(smallest > 0.0)) {
        throw Error(ErrorCode::NonPositiveBlockDeterminant, "covariance matrix is not positive definite");
    }
    m.squeezing = 1.0 / std::sqrt(2.0 * smallest);
    return m;
}

double symplectic_residual(const BogoliubovTransform& t, const Mat10c& G) {
    return (t.T.adjoint() * G * t.T - G).cwiseAbs().maxCoeff();
}

DiagonalizationResidual diagonalization_residual(const BogoliubovTransform& t, const QuadraticModel& model) {
    const double scale = model.omega_scale();
    const Mat10c D = t.T.adjoint() * (model.MT / scale) * t.T;
    DiagonalizationResidual r;
    for (int i = 0; i < kPhaseSpaceDim; ++i) {
        for (int j = 0; j < kPhaseSpaceDim; ++j) {
            if (i != j) {
                r.off_diagonal = std::max(r.off_diagonal, std::abs(D(i, j)));
            }
        }
    }
    for (int a = 0; a < kModeCount; ++a) {
        r.pairing = std::max(r.pairing, std::abs(D(2 * a, 2 * a) - D(2 * a + 1, 2 * a + 1)));
    }
    return r;
}

namespace {

StateRow state_row(const PhysicalConstants& c, SystemParams p, double tol) {
    StateRow row;
    row.B0 = p.B0;
    try {
        const auto d = derive_quantities(c, p);
        const auto model = build_model(d);
        const auto verdict = classify_point(d, model, tol);
        row.phase = verdict.classification;
        if (!is_stable(verdict.classification)) {
            row.note = std::string("not stable: ") + std::string(to_string(verdict.classification));
            return row;
        }
        row.metrics = mode_metrics(covariance(bogoliubov_transform(model, tol)));
    } catch (const std::exception& e) {
        row.metrics.reset();
        row.note = e.what();
    }
    return row;
}

}  // namespace

std::vector<StateRow> state_scan(const PhysicalConstants& c, const SystemParams& p_template, double R_fixed,
                                 const std::vector<double>& B0_list, double tol, unsigned threads) {
    std::vector<StateRow> rows(B0_list.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t idx = next++; idx < rows.size(); idx = next++) {
            SystemParams p = p_template;
            p.R = R_fixed;
            p.B0 = B0_list[idx];
            rows[idx] = state_row(c, p, tol);
        }
    };
    const unsigned n = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(rows.size())));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < n; ++t) {
        pool.emplace_back(worker);
    }
    worker();
    for (auto& th : pool) {
        th.join();
    }
    return rows;
}

}  // namespace maglev
