#pragma once

#include "sbgeo/chart.hpp"
#include "sbgeo/linalg.hpp"

namespace sbgeo {

enum class Flavor { LC, SB };

inline const char* flavor_name(Flavor f) { return f == Flavor::LC ? "lc" : "sb"; }

// Complexified Christoffel table at one point. gamma(C, A, B) = Gamma^C_{AB}
// with A the differentiation direction and B the differentiated field:
// nabla_{d/dz^A} d/dz^B = Gamma^C_{AB} d/dz^C. Families the local formulas do
// not produce are exact zeros.
struct ConnectionField {
    Flavor flavor;
    int n = 0;
    ChartPoint point;
    Tensor3c gamma;
    CMat h;      // metric at the point, for pairings
    CMat h_inv;

    // (nabla_dir field)^C by pure table contraction (coordinate-constant
    // extensions); inputs are complexified component vectors of length 2n.
    CVec covariant_contract(const CVec& dir_c, const CVec& field_c) const;
};

// Christoffel tables from precomputed metric partials (shared by the
// curvature assembly).
Tensor3c christoffel_table(Flavor flavor, const MetricPartials& mp);

// Adds the upper-unbarred Christoffel families assembled from the given
// first-derivative tables and inverse metric. Each produced term is a product
// of exactly one (dz|dzbar) entry and one h_inv entry, so the assembly is
// separately linear in those slots; the curvature module differentiates the
// tables with the product rule through this function.
void christoffel_assemble_unbarred(Flavor flavor, const std::vector<CMat>& dz,
                                   const std::vector<CMat>& dzbar,
                                   const CMat& h_inv, Tensor3c& out);

ConnectionField christoffel(Flavor flavor, const MetricModel& model,
                            const ChartPoint& p);

// SB torsion at a point: t(k,i,j) = T^k_{ij} over unbarred indices, plus the
// conjugate family; all other component families vanish identically.
struct TorsionField {
    int n = 0;
    ChartPoint point;
    Tensor3c t;  // full complexified (1,2) table, zeros outside the two families
    CMat h;

    // Totally antisymmetric 3-form value on real vectors via metric lowering.
    double value(const TangentVector& x, const TangentVector& y,
                 const TangentVector& z) const;
    cplx value_c(const CVec& xc, const CVec& yc, const CVec& zc) const;
};

TorsionField torsion_sb(const MetricModel& model, const ChartPoint& p);

// eta_k = T^s_{sk}; vanishes identically iff the metric is balanced.
struct TraceTorsion {
    CVec eta;
    double norm() const { return eta.norm(); }
};

TraceTorsion trace_torsion(const MetricModel& model, const ChartPoint& p);

// Residuals of the defining relation of the SB connection and of the torsion
// identity, evaluated on coordinate-constant extensions of real vectors:
//   r_defn    = |g(nabla^SB_X Y, Z) - g(nabla^LC_X Y, Z) - (1/2) domega(JX,JY,JZ)|
//   r_torsion = |T(X,Y,Z) - domega(JX,JY,JZ)|
struct DefiningRelationResiduals {
    double r_defn;
    double r_torsion;
};

DefiningRelationResiduals defining_relation_residuals(const MetricModel& model,
                                                      const ChartPoint& p,
                                                      const TangentVector& x,
                                                      const TangentVector& y,
                                                      const TangentVector& z);

} // namespace sbgeo
