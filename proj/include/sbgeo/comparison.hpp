#pragma once

#include <optional>

#include "sbgeo/variational.hpp"

namespace sbgeo {

// Model-space comparison function: the solution of f'' + K f = 0 with
// f(0) = 0, f'(0) = 1.
double sn_k(double K, double t);
double sn_k_prime(double K, double t);

// (2n-1)-free quotient sn'_K(t)/sn_K(t); PoleError at zeros of sn_K.
double sn_quotient(double K, double t);

struct ModelSpace {
    double K = 0.0;
    double sn(double t) const { return sn_k(K, t); }
    double sn_prime(double t) const { return sn_k_prime(K, t); }
};

// Radial Jacobi-volume data along one direction: log theta(rho) with
// theta = det A(rho) = sqrt(det g) o Phi * rho^{2n-1}.
struct RadialVolumeData {
    Curve geodesic;
    std::vector<double> log_theta;  // per node; node 0 is -inf and unused
    std::vector<double> det_sign;

    double log_theta_at(int node) const;
};

RadialVolumeData radial_volume_data(const MetricModel& model, const ChartPoint& p,
                                    const TangentVector& omega_dir, double rho_max,
                                    int steps);

// Laplacian of the distance function at radius rho along omega_dir:
// Delta r = d/drho log(theta), the rho-derivative by 5-point finite
// differences over a node-aligned stencil of Jacobi solutions.
double laplacian_distance(const MetricModel& model, const ChartPoint& p,
                          const TangentVector& omega_dir, double rho);

// Volume density ratio lambda(rho, omega) = theta(rho) / sn_K^{2n-1}(rho).
double volume_density(const MetricModel& model, const ChartPoint& p, double rho,
                      const TangentVector& omega_dir, double K);

struct ComparisonSample {
    int direction = 0;
    double rho = 0.0;
    double delta_r = 0.0;
    double bound = 0.0;   // (2n-1) sn'_K / sn_K
    double margin = 0.0;  // bound - delta_r
    double lambda = 0.0;
    bool error = false;
    std::string message;
};

struct ComparisonReport {
    double K = 0.0;
    std::vector<ComparisonSample> samples;
    bool laplacian_ok = true;
    bool lambda_monotone = true;
    bool lambda_limit_one = true;
    double lambda_limit_value = 1.0;  // lambda at the probe radius
};

// Uniform direction grid on the unit g-sphere of T_pM: exact angles for n=1,
// seeded quasi-uniform unit vectors for n >= 2.
std::vector<TangentVector> direction_grid(const MetricModel& model,
                                          const ChartPoint& p, int count,
                                          std::uint64_t seed = 2024);

struct RhoGrid {
    double lo = 0.1, hi = 1.0;
    int count = 8;
};

ComparisonReport laplacian_comparison_check(const MetricModel& model,
                                            const ChartPoint& p, double K,
                                            const RhoGrid& rho_grid,
                                            const std::vector<TangentVector>& dirs);

// Myers / Synge diameter experiments. K estimated from curvature sampling
// when absent; both sampled minima are reported, never silently asserted.
struct MyersConfig {
    std::optional<ChartPoint> basepoint;
    std::optional<TangentVector> direction;
    std::optional<ChartPoint> antipode;  // enables the shooting diameter check
    double length_factor = 1.05;
    int curvature_samples = 24;
    int geodesic_steps = 1200;
    std::uint64_t seed = 7;
};

struct MyersReport {
    bool applicable = false;  // a positive bound constant was found or given
    double K_used = 0.0;
    double k_hsc_min = 0.0;   // sampled min holomorphic sectional curvature
    double k_ric_min = 0.0;   // sampled min ric(V,Vbar)/((2n-1)|V|^2)
    double diameter_bound = 0.0;

    double synge_value = 0.0;        // I(V,V), V = sin(pi t/L) J gamma'
    double synge_closed_form = 0.0;  // (pi^2/L^2 - K) L/2
    double myers_sum = 0.0;          // sum_j I(V_j, V_j)
    double myers_ricci_integral = 0.0;
    double synge_torsion_integral = 0.0;  // int T(V,gamma',nabla V) dt

    bool diameter_checked = false;
    double diameter_estimate = 0.0;
};

MyersReport myers_diameter_experiment(const MetricModel& model,
                                      std::optional<double> K,
                                      const MyersConfig& config);

} // namespace sbgeo
