#pragma once

// Scalar-generic kernels behind the sideband solvers. Everything here is templated on
// the real type so the same algebra can be evaluated in double or long double.

#include "omit/errors.hpp"
#include "omit/linalg.hpp"

#include <cmath>
#include <vector>

namespace omit {

/// Linearized system around a steady state, as seen by the sideband equations.
template <typename Real>
struct SidebandModel {
    Real kappa{};
    Real delta{};               // effective detuning
    std::complex<Real> alpha{}; // intracavity mean field
    std::vector<Real> g, gamma, omega;
    std::vector<Real> eta, theta; // chain couplings, size N-1

    std::size_t n() const { return g.size(); }

    template <typename Other>
    SidebandModel<Other> cast() const {
        SidebandModel<Other> out;
        out.kappa = Other(kappa);
        out.delta = Other(delta);
        out.alpha = {Other(alpha.real()), Other(alpha.imag())};
        auto conv = [](const std::vector<Real>& v) { return std::vector<Other>(v.begin(), v.end()); };
        out.g = conv(g);
        out.gamma = conv(gamma);
        out.omega = conv(omega);
        out.eta = conv(eta);
        out.theta = conv(theta);
        return out;
    }
};

/// Unknowns of one sideband order in solve order:
/// [A^-, (A^+)^*, B_1^-, ..., B_N^-, (B_1^+)^*, ..., (B_N^+)^*].
template <typename Real>
struct SidebandUnknowns {
    std::complex<Real> a_minus{};
    std::complex<Real> a_plus_conj{};
    CVector<Real> b_minus;
    CVector<Real> b_plus_conj;

    std::complex<Real> mechanical_sum(Eigen::Index l) const { return b_minus(l) + b_plus_conj(l); }
};

/// Coefficient matrix shared by both orders; `nu` is the sideband frequency (Omega or 2 Omega).
template <typename Real>
CMatrix<Real> sideband_matrix(const SidebandModel<Real>& m, Real nu) {
    using C = std::complex<Real>;
    const C i = imag_unit<Real>();
    const auto n = static_cast<Eigen::Index>(m.n());
    const Eigen::Index size = 2 * n + 2;
    const C a = m.alpha;
    const C ac = std::conj(a);
    auto bm = [](Eigen::Index l) { return 2 + l; };
    auto bp = [n](Eigen::Index l) { return 2 + n + l; };

    CMatrix<Real> mat = CMatrix<Real>::Zero(size, size);
    mat(0, 0) = C(m.kappa, m.delta - nu);
    mat(1, 1) = C(m.kappa, -(m.delta + nu));
    for (Eigen::Index l = 0; l < n; ++l) {
        const Real g = m.g[l];
        mat(0, bm(l)) = i * g * a;
        mat(0, bp(l)) = i * g * a;
        mat(1, bm(l)) = -i * g * ac;
        mat(1, bp(l)) = -i * g * ac;

        mat(bm(l), bm(l)) = C(m.gamma[l], m.omega[l] - nu);
        mat(bm(l), 0) = i * g * ac;
        mat(bm(l), 1) = i * g * a;

        mat(bp(l), bp(l)) = C(m.gamma[l], -(m.omega[l] + nu));
        mat(bp(l), 0) = -i * g * ac;
        mat(bp(l), 1) = -i * g * a;
    }
    for (Eigen::Index j = 0; j + 1 < n; ++j) {
        const C up = std::polar(Real(1), m.theta[j]);
        const C down = std::conj(up);
        const Real eta = m.eta[j];
        mat(bm(j), bm(j + 1)) = i * eta * up;
        mat(bm(j + 1), bm(j)) = i * eta * down;
        mat(bp(j), bp(j + 1)) = -i * eta * down;
        mat(bp(j + 1), bp(j)) = -i * eta * up;
    }
    return mat;
}

template <typename Real>
SidebandUnknowns<Real> unpack_unknowns(const CVector<Real>& x, Eigen::Index n) {
    SidebandUnknowns<Real> u;
    u.a_minus = x(0);
    u.a_plus_conj = x(1);
    u.b_minus = x.segment(2, n);
    u.b_plus_conj = x.segment(2 + n, n);
    return u;
}

template <typename Real>
CVector<Real> solve_dense(const CMatrix<Real>& mat, const CVector<Real>& rhs) {
    Eigen::PartialPivLU<CMatrix<Real>> lu(mat);
    if (!(lu.rcond() > Real(1e-15))) {
        throw NumericalSingularity("sideband system is numerically singular");
    }
    CVector<Real> x = lu.solve(rhs);
    if (!x.allFinite()) {
        throw NumericalSingularity("sideband system produced non-finite amplitudes");
    }
    return x;
}

/// Direct solve of the first-order group for any N (probe drives the A^- row only).
template <typename Real>
SidebandUnknowns<Real> solve_first_order_system(const SidebandModel<Real>& m, Real probe_detuning,
                                                Real eps_probe) {
    const auto n = static_cast<Eigen::Index>(m.n());
    CVector<Real> rhs = CVector<Real>::Zero(2 * n + 2);
    rhs(0) = eps_probe;
    return unpack_unknowns<Real>(solve_dense<Real>(sideband_matrix(m, probe_detuning), rhs), n);
}

/// Direct solve of the second-order group; sources are products of first-order amplitudes.
template <typename Real>
SidebandUnknowns<Real> solve_second_order_system(const SidebandModel<Real>& m, Real probe_detuning,
                                                 const SidebandUnknowns<Real>& first) {
    using C = std::complex<Real>;
    const C i = imag_unit<Real>();
    const auto n = static_cast<Eigen::Index>(m.n());
    CVector<Real> rhs = CVector<Real>::Zero(2 * n + 2);
    const C am = first.a_minus;
    const C apc = first.a_plus_conj;
    for (Eigen::Index l = 0; l < n; ++l) {
        const Real g = m.g[l];
        const C s = first.mechanical_sum(l);
        rhs(0) -= i * g * am * s;
        rhs(1) += i * g * apc * s;
        rhs(2 + l) = -i * g * apc * am;
        rhs(2 + n + l) = i * g * apc * am;
    }
    return unpack_unknowns<Real>(solve_dense<Real>(sideband_matrix(m, Real(2) * probe_detuning), rhs), n);
}

// ---------------------------------------------------------------------------
// Two-mode closed forms.

template <typename Real>
struct TCoefficients {
    std::complex<Real> t1, t2, t31, t32;
};

template <typename Real>
struct VCoefficients {
    std::complex<Real> v1, v2, v3;
};

/// T_1, T_2, T_{3,1}, T_{3,2} at frequency `w`; the second-order set is the same
/// expressions evaluated at w = 2 Omega.
template <typename Real>
TCoefficients<Real> t_coefficients(const SidebandModel<Real>& m, Real w) {
    using C = std::complex<Real>;
    const C i = imag_unit<Real>();
    const Real g1 = m.gamma[0], g2 = m.gamma[1];
    const Real w1 = m.omega[0], w2 = m.omega[1];
    const Real eta2 = m.eta[0] * m.eta[0];

    TCoefficients<Real> t;
    t.t1 = -w1 * w2 + eta2 + (g1 - i * w) * (g2 - i * w);
    t.t2 = (eta2 + (-i * g1 + w1 - w) * (i * g2 - w2 + w)) *
           (eta2 + (g1 - i * (w1 + w)) * (g2 - i * (w2 + w)));
    t.t31 = (g1 * g1 + w1 * w1 - w * w - Real(2) * i * g1 * w) * w2 - w1 * eta2;
    t.t32 = (g2 * g2 + w2 * w2 - w * w - Real(2) * i * g2 * w) * w1 - w2 * eta2;
    return t;
}

template <typename Real>
VCoefficients<Real> v_coefficients(const SidebandModel<Real>& m, Real w) {
    using C = std::complex<Real>;
    const C i = imag_unit<Real>();
    const Real g1 = m.gamma[0], g2 = m.gamma[1];
    const Real w1 = m.omega[0], w2 = m.omega[1];
    const Real eta2 = m.eta[0] * m.eta[0];
    const C cav = C(m.kappa, -(m.delta + w)); // kappa - i (Delta + Omega)

    VCoefficients<Real> v;
    v.v1 = (-eta2 + (i * g1 + w1 + w) * (i * g2 + w2 + w)) * cav * cav;
    v.v2 = (eta2 + (-i * g1 + w1 - w) * (i * g2 - w2 + w)) * cav * cav;
    v.v3 = (-eta2 + (i * g1 - w1 + w) * (i * g2 - w2 + w)) * cav;
    return v;
}

inline void require_two_modes(std::size_t n) {
    if (n != 2) {
        throw UnsupportedTopology("closed-form sideband expressions need exactly two mechanical modes");
    }
}

/// First-order amplitudes from the closed-form expressions (A_1^- in the style of the
/// standard two-mode OMIT result, plus the auxiliary (A_1^+)^*, B coefficients).
template <typename Real>
SidebandUnknowns<Real> first_order_closed(const SidebandModel<Real>& m, Real w, Real eps_probe) {
    using C = std::complex<Real>;
    require_two_modes(m.n());
    const C i = imag_unit<Real>();
    const Real k = m.kappa, d = m.delta;
    const Real g1 = m.g[0], g2 = m.g[1];
    const Real eta = m.eta[0];
    const Real cos_t = std::cos(m.theta[0]);
    const C e = std::polar(Real(1), m.theta[0]);
    const C ac = std::conj(m.alpha);
    const Real photons = std::norm(m.alpha);
    const Real gm1 = m.gamma[0], gm2 = m.gamma[1];
    const Real w1 = m.omega[0], w2 = m.omega[1];

    const auto t = t_coefficients(m, w);
    const auto v = v_coefficients(m, w);
    const C weighted = g2 * g2 * t.t31 + g1 * g1 * t.t32;
    const C cross = g1 * g2 * eta * t.t1 * cos_t;

    const C den = -t.t2 * (d * d + (C(k, -w)) * (C(k, -w))) + Real(4) * photons * d * weighted +
                  Real(8) * cross * photons * d;
    const C den_b = C(d + w, k) * den; // (i kappa + Delta + Omega) {...}

    SidebandUnknowns<Real> u;
    u.b_minus.resize(2);
    u.b_plus_conj.resize(2);
    u.a_minus = (t.t2 * C(-k, d + w) - Real(2) * i * photons * weighted - Real(4) * i * cross * photons) /
                den * eps_probe;
    u.a_plus_conj = Real(-2) * ac * ac * C(k, -(d + w)) * (Real(2) * cross + weighted) / den_b * eps_probe;
    u.b_minus(0) = (g1 * ac * v.v1 * C(gm2, w2 - w) - i * g2 * ac * v.v1 * eta * e) / den_b * eps_probe;
    u.b_minus(1) = (g2 * ac * v.v1 * C(gm1, w1 - w) - i * g1 * ac * v.v1 * eta * std::conj(e)) / den_b *
                   eps_probe;
    u.b_plus_conj(0) = -i * v.v2 * (g1 * ac * C(w2 + w, gm2) - g2 * ac * eta * std::conj(e)) / den_b *
                       eps_probe;
    u.b_plus_conj(1) = (-e * g1 * ac * eta * v.v3 + g2 * ac * v.v3 * C(w1 + w, gm1)) / den * eps_probe;
    return u;
}

template <typename Real>
struct SecondOrderClosed {
    std::complex<Real> a_minus;
    std::complex<Real> chi1;
    std::complex<Real> chi2;
};

/// Closed-form A_2^- from first-order amplitudes, through chi_1(Omega) and chi_2(Omega).
template <typename Real>
SecondOrderClosed<Real> second_order_closed(const SidebandModel<Real>& m, Real w,
                                            const SidebandUnknowns<Real>& first) {
    using C = std::complex<Real>;
    require_two_modes(m.n());
    const C i = imag_unit<Real>();
    const Real k = m.kappa, d = m.delta;
    const Real g1 = m.g[0], g2 = m.g[1];
    const Real eta = m.eta[0];
    const Real cos_t = std::cos(m.theta[0]);
    const C a = m.alpha;
    const Real photons = std::norm(a);
    const auto t = t_coefficients(m, Real(2) * w);

    const C weighted = g1 * g1 * t.t32 + g2 * g2 * t.t31;
    const C cross = g1 * g2 * eta * t.t1 * cos_t;
    const C s1 = first.mechanical_sum(0);
    const C s2 = first.mechanical_sum(1);
    const C shifted = C(d + Real(2) * w, k); // i kappa + Delta + 2 Omega

    SecondOrderClosed<Real> out;
    out.chi1 = Real(2) * i * a * (g1 * a * s1 + g2 * a * s2 - first.a_minus * shifted) *
               (Real(2) * cross + weighted) /
               ((shifted * t.t2 - Real(2) * photons * weighted) - Real(4) * photons * cross);
    out.chi2 = Real(1) / (Real(1) / C(k, -(d + Real(2) * w)) -
                          i * t.t2 / (Real(2) * photons * (weighted + Real(2) * cross)));
    out.a_minus = (out.chi1 * first.a_plus_conj + i * (g1 * s1 + g2 * s2) * first.a_minus) /
                  (out.chi2 - C(k, d - Real(2) * w));
    return out;
}

} // namespace omit
