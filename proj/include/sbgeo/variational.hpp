#pragma once

#include <functional>

#include "sbgeo/geodesy.hpp"

namespace sbgeo {

// Per-node geometry along a curve, built once and shared by the quadrature
// evaluations of many (V, W) pairs.
struct CurveGeometryCache {
    std::vector<Tensor3c> gamma_lc, gamma_sb;
    std::vector<CurvatureField> curv_lc, curv_sb;
    std::vector<CMat> h;
};

CurveGeometryCache build_curve_geometry(const MetricModel& model,
                                        const Curve& curve, bool need_curvature);

// Energy E = 1/2 int |gamma'|^2 dt by composite Simpson on the curve grid.
double energy(const MetricModel& model, const Curve& curve);

// Energy of a sampled path given positions only (velocities by 4th-order
// grid differences).
double energy_of_positions(const MetricModel& model, std::span<const CVec> z,
                           double a, double b);

// |dE/ds| at s=0 for the variation alpha(t,s) = exp_{gamma(t)}(s V(t)),
// central finite difference; V must vanish at both endpoints (NotProper).
double first_variation_residual(const MetricModel& model, const Curve& geodesic,
                                const FieldAlongCurve& v, double delta = 1e-4);

// An evaluable two-parameter variation alpha(t, s1, s2) of a base geodesic.
struct VariationSurface {
    enum class Mode { LinearFields, ClosedForm };

    Mode mode = Mode::LinearFields;
    Curve base;
    FieldAlongCurve v, w;  // LinearFields: alpha = exp_{gamma(t)}(s1 V + s2 W)
    std::function<CVec(double t, double s1, double s2)> alpha;  // ClosedForm
    bool proper = true;
    int exp_steps = 12;

    static VariationSurface linear_fields(const Curve& base, FieldAlongCurve v,
                                          FieldAlongCurve w);
    static VariationSurface closed_form(
        const Curve& base, std::function<CVec(double, double, double)> alpha,
        bool proper);

    CVec position(const MetricModel& model, int node, double s1, double s2) const;
};

// Independent oracle for the second variation: central second mixed
// difference of E over the four stencil corners (+-delta, +-delta).
double mixed_partial_energy_fd(const MetricModel& model,
                               const VariationSurface& surface,
                               double delta = 1e-3);

// Quadrature of the proper-variation integrand
//   <nabla^SB V', nabla^SB W'> + T^SB(V, gamma', nabla^SB W') - R^SB(V,gamma',gamma',W).
double second_variation_sb(const MetricModel& model, const Curve& geodesic,
                           const FieldAlongCurve& v, const FieldAlongCurve& w);
double second_variation_sb(const MetricModel& model, const Curve& geodesic,
                           const FieldAlongCurve& v, const FieldAlongCurve& w,
                           const CurveGeometryCache& cache);

// Boundary term of the general (non-proper) second-variation formula,
// <nabla^SB_{ds1} alpha_*(ds2), gamma'> evaluated at b minus at a. Needs
// s-derivatives of the surface, hence ClosedForm mode only.
double general_boundary_term(const MetricModel& model,
                             const VariationSurface& surface,
                             double delta = 1e-4);

// Index form computed three ways: the classical LC expression, the SB bulk
// quadrature, and the torsion boundary term (1/2) T^SB(V,W,gamma')|_a^b.
// value_lc = value_sb_bulk + boundary_term is the reconciliation invariant.
struct IndexFormResult {
    double value_lc;
    double value_sb_bulk;
    double boundary_term;
};

IndexFormResult index_form(const MetricModel& model, const Curve& geodesic,
                           const FieldAlongCurve& v, const FieldAlongCurve& w);
IndexFormResult index_form(const MetricModel& model, const Curve& geodesic,
                           const FieldAlongCurve& v, const FieldAlongCurve& w,
                           const CurveGeometryCache& cache);

// The 2n-1 Myers test fields V_j(t) = f(t) P^SB_{0,t} e_j (j = 2..2n) from an
// SB-parallel frame, f(0) = f(L) = 0.
std::vector<FieldAlongCurve> myers_fields(
    const Curve& geodesic, const std::vector<FieldAlongCurve>& sb_frame,
    const std::function<double(double)>& f);

// Synge field V(t) = sin(pi t / L) J gamma'(t).
FieldAlongCurve synge_field(const Curve& geodesic);

} // namespace sbgeo
