#pragma once

#include "sbgeo/connections.hpp"
#include "sbgeo/curvature.hpp"

namespace sbgeo {

// A sampled parametrized path: uniform grid on [a,b], chart positions and
// (1,0)-velocity components per node.
struct Curve {
    double a = 0.0, b = 0.0;
    std::vector<CVec> z;  // position per node
    std::vector<CVec> v;  // velocity v10 per node
    double geodesic_residual = std::numeric_limits<double>::quiet_NaN();

    int nodes() const { return static_cast<int>(z.size()); }
    int steps() const { return nodes() - 1; }
    double step() const { return (b - a) / steps(); }
    double t(int i) const { return a + step() * i; }
    ChartPoint point(int i) const { return ChartPoint(z[i]); }
    TangentVector velocity(int i) const { return TangentVector::from_v10(v[i]); }

    // Keep every stride-th node (stride must divide the interval count).
    Curve subsample(int stride) const;
};

// Real vector field sampled along a carrier curve ((1,0) components).
struct FieldAlongCurve {
    std::vector<CVec> v10;

    int nodes() const { return static_cast<int>(v10.size()); }
    TangentVector at(int i) const { return TangentVector::from_v10(v10[i]); }
};

// Default step count for an integration of length L (deterministic fixed-step
// classical RK4 everywhere).
inline int default_steps(double length) {
    return std::max(1000, static_cast<int>(std::ceil(std::abs(length) / 0.001)));
}

// Unit-speed geodesic from p in direction v (normalized internally), length L,
// N RK4 steps. The LC and SB geodesic equations coincide; the integration uses
// the LC Christoffels and the returned residual diagnostics cover both.
Curve integrate_geodesic(const MetricModel& model, const ChartPoint& p,
                         const TangentVector& v, double length, int steps);

// Endpoint of the geodesic with initial velocity v (not normalized) at unit
// parameter time; the workhorse of variation surfaces.
ChartPoint exp_map(const MetricModel& model, const ChartPoint& p,
                   const TangentVector& v, int steps = 16);

// Covariant derivative of a sampled field along a curve:
// (nabla V)^C = dV^C/dt + Gamma^C_{AB}(gamma(t)) gamma'^A V^B, the t-derivative
// by 4th-order differences (3rd-order one-sided at the ends).
FieldAlongCurve covariant_derivative_along(Flavor flavor, const MetricModel& model,
                                           const Curve& curve,
                                           const FieldAlongCurve& field);

// Max over nodes of |nabla_{gamma'} gamma'|_g for the given flavor.
double geodesic_residual(Flavor flavor, const MetricModel& model,
                         const Curve& curve);

// Max over nodes of | |gamma'|_g - |gamma'(a)|_g |.
double speed_drift(const MetricModel& model, const Curve& curve);

// Parallel transport of initial vectors along the curve (linear ODE
// dV^C/dt = -Gamma^C_{AB} gamma'^A V^B, RK4 with Hermite-reconstructed
// midpoints). Inner products of transported pairs are conserved; SB transport
// additionally commutes with J.
std::vector<FieldAlongCurve> transport_many(Flavor flavor, const MetricModel& model,
                                            const Curve& curve,
                                            const std::vector<TangentVector>& v0);

FieldAlongCurve parallel_transport(Flavor flavor, const MetricModel& model,
                                   const Curve& curve, const TangentVector& v0);

// 2n x 2n real transport matrices per node (images of the coordinate basis).
struct TransportOperator {
    Flavor flavor;
    std::vector<RMat> M;
};

TransportOperator transport_operator(Flavor flavor, const MetricModel& model,
                                     const Curve& curve);

// g-orthonormal frame at p adapted to the complex structure:
// e_1 = gamma_prime/|gamma_prime|, e_{i+n} = J e_i.
std::vector<TangentVector> adapted_seed_frame(const MetricModel& model,
                                              const ChartPoint& p,
                                              const TangentVector& gamma_prime);

// Transports a seed frame (validated: orthonormal, J e_i = e_{i+n},
// e_1 = gamma'(a); violations raise BadSeedFrame).
std::vector<FieldAlongCurve> parallel_frame(Flavor flavor, const MetricModel& model,
                                            const Curve& curve,
                                            const std::vector<TangentVector>& seed);

// Two-point boundary value problem by multi-start shooting with
// Levenberg-Marquardt refinement on the chart endpoint error.
struct ShootOptions {
    double max_length = 10.0;
    int starts = 16;
    int exp_steps = 400;
    int max_iterations = 80;
    double tol_scale = 1e-8;  // success: |endpoint error| <= tol_scale*(1+|q|)
    bool strict_injectivity = false;
};

struct ShootResult {
    double length = 0.0;
    TangentVector direction;    // unit initial direction
    double endpoint_error = 0.0;
    bool claims_minimal = false;  // false beyond the model's injectivity bound
};

ShootResult distance_shoot(const MetricModel& model, const ChartPoint& p,
                           const ChartPoint& q, const ShootOptions& opts = {});

// LC-parallel orthonormal frame along a geodesic together with the normal
// Jacobi basis solutions X_j: xi(0)=0, xi_dot(0)=e_{1+j} (j=1..2n-1), stored
// as frame components per node. Integrated jointly with the frame transport
// so every RK4 stage sees consistent frame and curvature data.
struct JacobiBasis {
    std::vector<FieldAlongCurve> frame;  // 2n fields, frame[0] ~ gamma'
    std::vector<RMat> xi;                // per node: 2n x (2n-1)
    std::vector<RMat> xi_dot;

    // (2n-1)x(2n-1) normal block of the basis matrix at node i.
    RMat normal_matrix(int node) const;
};

JacobiBasis jacobi_normal_basis(const MetricModel& model, const Curve& geodesic);

// Jacobi field along a unit-speed geodesic with initial data (J0, J0prime).
FieldAlongCurve jacobi_field(const MetricModel& model, const Curve& geodesic,
                             const TangentVector& j0, const TangentVector& j0prime);

// Normal Jacobian of the exponential map at radius rho in direction omega:
// A(rho) with A(rho)/rho -> I as rho -> 0; det A = sqrt(det g) o Phi * rho^{2n-1}
// up to the (orthonormal) frame determinant.
RMat exp_jacobian(const MetricModel& model, const ChartPoint& p, double rho,
                  const TangentVector& omega_dir, int steps = 0);

} // namespace sbgeo
