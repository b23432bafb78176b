#include "maglev/quadratic_hamiltonian.hpp"

#include <cmath>

namespace maglev {

namespace {

// psi = (b_R^dag, k^dag, b_L, m, s): the Psi slot holding each component.
constexpr std::array<int, kPsiDim> kPsiSlot = {1, 7, 2, 4, 8};

int partner(int slot) { return slot ^ 1; }

}  // namespace

int psi_slot(int i) { return kPsiSlot.at(static_cast<std::size_t>(i)); }

double QuadraticModel::omega_scale() const { return MT.cwiseAbs().maxCoeff(); }

Mat10c metric_G() {
    Mat10c G = Mat10c::Zero();
    for (int i = 0; i < kPhaseSpaceDim; ++i) {
        G(i, i) = (i % 2 == 0) ? 1.0 : -1.0;
    }
    return G;
}

Vec10c swap_pairs(const Vec10c& x) {
    Vec10c y;
    for (int i = 0; i < kPhaseSpaceDim; ++i) {
        y(i) = x(partner(i));
    }
    return y;
}

Mat10c swap_pairs(const Mat10c& X) {
    Mat10c Y;
    for (int i = 0; i < kPhaseSpaceDim; ++i) {
        for (int j = 0; j < kPhaseSpaceDim; ++j) {
            Y(i, j) = X(partner(i), partner(j));
        }
    }
    return Y;
}

Vec10c particle_hole_conjugate(const Vec10c& v) { return swap_pairs(Vec10c(v.conjugate())); }

double hermiticity_residual(const Mat10c& MT) {
    return (MT - MT.adjoint()).cwiseAbs().maxCoeff();
}

double particle_hole_residual(const Mat10c& MT) {
    return (swap_pairs(Mat10c(MT.conjugate())) - MT).cwiseAbs().maxCoeff();
}

CouplingMatrixC build_C(const DerivedQuantities& d) {
    const double g = d.g_coupling;
    const double eta = d.eta;
    const double ge = g * eta;
    const double wl_e2 = d.omega_L * eta * eta;
    const double wk_over_eta = d.omega_k / eta;
    const double wl_e = d.omega_L * eta;

    CouplingMatrixC C;
    auto& c = C.entries;
    c << d.omega_minus, ge, -d.omega_plus, -ge, g,
         ge, d.omega_k, ge, wl_e2, wk_over_eta,
         -d.omega_plus, ge, d.omega_minus, -ge, g,
         -ge, wl_e2, -ge, -wl_e2, wl_e,
         g, wk_over_eta, g, wl_e, d.omega_mu;
    return C;
}

Mat10c build_MT(const CouplingMatrixC& C) {
    const Mat5& c = C.entries;
    const double scale = c.cwiseAbs().maxCoeff();
    if ((c - c.transpose()).cwiseAbs().maxCoeff() > 1e-13 * scale) {
        throw Error(ErrorCode::AsymmetricInput, "coupling matrix C must be symmetric");
    }

    // (psi_i)^dag C_ij psi_j = Psi_p^dag C_ij Psi_q with p, q the slots of psi_i, psi_j.
    Mat10c A = Mat10c::Zero();
    for (int i = 0; i < kPsiDim; ++i) {
        for (int j = 0; j < kPsiDim; ++j) {
            A(kPsiSlot[i], kPsiSlot[j]) += c(i, j);
        }
    }
    Mat10c MT = A + A.adjoint();
    MT = 0.5 * (MT + swap_pairs(Mat10c(MT.conjugate())));
    return MT;
}

QuadraticModel model_from_MT(const Mat10c& MT, Complex omega_Z) {
    QuadraticModel m;
    m.MT = MT;
    m.G = metric_G();
    m.KT = m.G * m.MT;
    m.MZ = omega_Z * Mat2c::Identity();
    Mat2c sigma_z = Mat2c::Zero();
    sigma_z(0, 0) = 1.0;
    sigma_z(1, 1) = -1.0;
    m.KZ = sigma_z * m.MZ;
    return m;
}

QuadraticModel build_model(const DerivedQuantities& d) {
    const Complex omega_Z = std::sqrt(Complex(d.omega_Z_sq, 0.0));
    return model_from_MT(build_MT(build_C(d)), omega_Z);
}

}  // namespace maglev
