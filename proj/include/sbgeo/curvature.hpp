#pragma once

#include "sbgeo/connections.hpp"

namespace sbgeo {

// Christoffel table together with its position derivatives:
// dgamma[m] holds d Gamma / dz^m for m < n and d Gamma / dzbar^{m-n} for
// m >= n. Analytic when the model supplies second derivatives of h, nested
// central differences of the table otherwise (documented accuracy ~1e-6).
struct GammaWithDerivs {
    Tensor3c gamma;
    std::vector<Tensor3c> dgamma;
};

GammaWithDerivs christoffel_with_derivs(Flavor flavor, const MetricModel& model,
                                        const ChartPoint& p);

// Curvature tensor at a point with the metric-lowered last slot:
// r(A,B,C,D) = < R(d/dz^A, d/dz^B) d/dz^C, d/dz^D >, assembled from
// R^D_{ABC} = d_A Gamma^D_{BC} - d_B Gamma^D_{AC}
//           + Gamma^D_{AE} Gamma^E_{BC} - Gamma^D_{BE} Gamma^E_{AC}.
struct CurvatureField {
    Flavor flavor;
    int n = 0;
    ChartPoint point;
    Tensor4c r;
    CMat h;
    CMat h_inv;
    RMat g_real;
    RMat g_real_inv;

    cplx eval_c(const CVec& xc, const CVec& yc, const CVec& zc,
                const CVec& wc) const;
    double eval(const TangentVector& x, const TangentVector& y,
                const TangentVector& z, const TangentVector& w) const;
};

CurvatureField curvature(Flavor flavor, const MetricModel& model,
                         const ChartPoint& p);

// Assembly from precomputed tables (the ODE integrators evaluate Christoffel
// and curvature at the same stage points).
CurvatureField curvature_from_tables(Flavor flavor, const MetricModel& model,
                                     const ChartPoint& p,
                                     const GammaWithDerivs& gd);

// Real Ricci curvature Ric^SB(X,Y) = g^{il} R^SB(d/dx^i, X, Y, d/dx^l),
// evaluated through its complexified form
//   h^{i lbar} R(d/dz^i, X, Y, d/dzbar^l) + h^{l ibar} R(d/dzbar^i, X, Y, d/dz^l).
double ricci_real_sb(const CurvatureField& f, const TangentVector& x,
                     const TangentVector& y);

// Both evaluation routes; their agreement is a mandatory per-model self-test.
struct RicciCrossCheck {
    double real_basis_sum;
    double complexified_sum;
    double imag_residual;
};

RicciCrossCheck ricci_real_cross_check(const CurvatureField& f,
                                       const TangentVector& x,
                                       const TangentVector& y);

// Holomorphic Ricci ric(V, Vbar) = h^{i lbar} R(d/dz^i, Vbar, V, d/dzbar^l)
// for V in T^{1,0} (v10 components). Returns the real part; imag_residual is
// zero exactly when the contracted matrix is Hermitian (balanced case).
struct HolRicciResult {
    double value;
    double imag_residual;
};

HolRicciResult ricci_hol_sb(const CurvatureField& f, const CVec& v10);

// Diagnostic only: the contraction with V and Vbar in swapped slots. The
// displayed slot order is the definition; this one is reported because pair
// symmetry fails for R^SB.
HolRicciResult ricci_hol_sb_alt(const CurvatureField& f, const CVec& v10);

// Holomorphic sectional curvature HSC(X) = R(JX, X, X, JX) / |X|^4.
double hsc_sb(const CurvatureField& f, const TangentVector& x);

// Residuals of the balanced-metric identities at the sampled points:
//   Ric^SB(X,X) = 2 (h^{i lbar} R_{i jbar k lbar}) X^k conj(X^j),
//   h^{i lbar} R_{i j k lbar} = 0,
//   (h^{i lbar} R_{i jbar k lbar}) Hermitian.
struct BalancedIdentityReport {
    struct Sample {
        double ric_identity_resid;
        double mixed_contraction_norm;  // |h^{i lbar} R_{i j k lbar}|_max
        double hermitian_resid;
        double trace_torsion_norm;
    };
    std::vector<Sample> samples;
    double max_ric_identity_resid = 0.0;
    double max_mixed_contraction = 0.0;
    double max_hermitian_resid = 0.0;
    double max_trace_torsion = 0.0;
};

BalancedIdentityReport balanced_identities(const MetricModel& model,
                                           std::span<const ChartPoint> points);

} // namespace sbgeo
