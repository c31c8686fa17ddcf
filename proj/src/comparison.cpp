#include "sbgeo/comparison.hpp"

#include <Eigen/Dense>

#include <cmath>

#include "sbgeo/rng.hpp"

namespace sbgeo {

double sn_k(double K, double t) {
    if (K > 0.0) {
        const double s = std::sqrt(K);
        return std::sin(s * t) / s;
    }
    if (K < 0.0) {
        const double s = std::sqrt(-K);
        return std::sinh(s * t) / s;
    }
    return t;
}

double sn_k_prime(double K, double t) {
    if (K > 0.0) return std::cos(std::sqrt(K) * t);
    if (K < 0.0) return std::cosh(std::sqrt(-K) * t);
    return 1.0;
}

double sn_quotient(double K, double t) {
    const double sn = sn_k(K, t);
    if (std::abs(sn) < 1e-12)
        throw PoleError("sn'_K/sn_K evaluated at a zero of sn_K");
    return sn_k_prime(K, t) / sn;
}

double RadialVolumeData::log_theta_at(int node) const {
    if (node <= 0 || node >= static_cast<int>(log_theta.size()))
        throw GridMismatch("radial node out of range");
    if (det_sign[node] <= 0.0)
        throw ConjugatePoint("normal Jacobi determinant is not positive");
    return log_theta[node];
}

RadialVolumeData radial_volume_data(const MetricModel& model, const ChartPoint& p,
                                    const TangentVector& omega_dir, double rho_max,
                                    int steps) {
    RadialVolumeData out;
    out.geodesic = integrate_geodesic(model, p, omega_dir, rho_max, steps);
    const JacobiBasis jb = jacobi_normal_basis(model, out.geodesic);
    const int nodes = out.geodesic.nodes();
    out.log_theta.assign(nodes, -std::numeric_limits<double>::infinity());
    out.det_sign.assign(nodes, 0.0);
    for (int i = 1; i < nodes; ++i) {
        const RMat a = jb.normal_matrix(i);
        const Eigen::PartialPivLU<RMat> lu(a);
        const double det = lu.determinant();
        out.det_sign[i] = det > 0.0 ? 1.0 : (det < 0.0 ? -1.0 : 0.0);
        out.log_theta[i] = det > 0.0 ? std::log(det)
                                     : std::numeric_limits<double>::quiet_NaN();
    }
    return out;
}

namespace {

// Delta r at a node-aligned radius from one radial solve:
// five log(theta) samples spaced by 4 grid steps.
double laplacian_from_radial(const RadialVolumeData& rv, int node) {
    const double h = rv.geodesic.step();
    const double d = 4.0 * h;
    const double fm2 = rv.log_theta_at(node - 8);
    const double fm1 = rv.log_theta_at(node - 4);
    const double fp1 = rv.log_theta_at(node + 4);
    const double fp2 = rv.log_theta_at(node + 8);
    return (fm2 - 8.0 * fm1 + 8.0 * fp1 - fp2) / (12.0 * d);
}

} // namespace

double laplacian_distance(const MetricModel& model, const ChartPoint& p,
                          const TangentVector& omega_dir, double rho) {
    if (rho > model.injectivity_bound)
        throw BeyondInjectivityBound(model.spec +
                                     ": radius beyond the injectivity bound");
    const int steps = 1008;  // rho at node 1000, stencil reaches node 1008
    const double rho_max = rho * static_cast<double>(steps) / 1000.0;
    const RadialVolumeData rv =
        radial_volume_data(model, p, omega_dir, rho_max, steps);
    return laplacian_from_radial(rv, 1000);
}

double volume_density(const MetricModel& model, const ChartPoint& p, double rho,
                      const TangentVector& omega_dir, double K) {
    if (rho > model.injectivity_bound)
        throw BeyondInjectivityBound(model.spec +
                                     ": radius beyond the injectivity bound");
    const int steps = std::max(200, static_cast<int>(std::ceil(rho / 0.002)));
    const RadialVolumeData rv = radial_volume_data(model, p, omega_dir, rho, steps);
    const double log_theta = rv.log_theta_at(rv.geodesic.nodes() - 1);
    const int n = model.n;
    return std::exp(log_theta - (2 * n - 1) * std::log(sn_k(K, rho)));
}

std::vector<TangentVector> direction_grid(const MetricModel& model,
                                          const ChartPoint& p, int count,
                                          std::uint64_t seed) {
    const MetricEval ev = eval_metric(model, p);
    const int n = model.n;
    std::vector<TangentVector> dirs;
    dirs.reserve(count);
    if (n == 1) {
        for (int k = 0; k < count; ++k) {
            const double th = 2.0 * M_PI * k / count;
            RVec x(2);
            x << std::cos(th), std::sin(th);
            TangentVector v(x);
            v.x /= std::sqrt(g_norm2(ev.h, v));
            dirs.push_back(v);
        }
        return dirs;
    }
    CounterRng rng(seed);
    RngStream rs(rng, 0xD1CE);
    while (static_cast<int>(dirs.size()) < count) {
        RVec x(2 * n);
        for (int a = 0; a < 2 * n; ++a) x[a] = rs.symmetric();
        TangentVector v(x);
        const double nn = std::sqrt(g_norm2(ev.h, v));
        if (nn < 1e-3) continue;
        v.x /= nn;
        dirs.push_back(v);
    }
    return dirs;
}

ComparisonReport laplacian_comparison_check(const MetricModel& model,
                                            const ChartPoint& p, double K,
                                            const RhoGrid& rho_grid,
                                            const std::vector<TangentVector>& dirs) {
    ComparisonReport rep;
    rep.K = K;
    const int n = model.n;

    // One radial solve per direction; rho samples snapped to grid nodes so the
    // five-point stencil is node-aligned.
    const double rho_hi = rho_grid.hi;
    const int steps = 1016;
    const double rho_max = rho_hi * static_cast<double>(steps) / 1000.0;
    const double h = rho_max / steps;

    for (int di = 0; di < static_cast<int>(dirs.size()); ++di) {
        RadialVolumeData rv;
        bool radial_ok = true;
        std::string radial_msg;
        try {
            rv = radial_volume_data(model, p, dirs[di], rho_max, steps);
        } catch (const Error& e) {
            radial_ok = false;
            radial_msg = e.what();
        }
        double lambda_prev = std::numeric_limits<double>::quiet_NaN();
        for (int ri = 0; ri < rho_grid.count; ++ri) {
            const double rho_req =
                rho_grid.lo + (rho_grid.hi - rho_grid.lo) *
                                  (rho_grid.count == 1
                                       ? 0.0
                                       : static_cast<double>(ri) /
                                             (rho_grid.count - 1));
            ComparisonSample s;
            s.direction = di;
            if (!radial_ok) {
                s.rho = rho_req;
                s.error = true;
                s.message = radial_msg;
                rep.samples.push_back(s);
                continue;
            }
            const int node = std::clamp(
                static_cast<int>(std::llround(rho_req / h)), 8, steps - 8);
            s.rho = node * h;
            try {
                s.delta_r = laplacian_from_radial(rv, node);
                s.bound = (2 * n - 1) * sn_quotient(K, s.rho);
                s.margin = s.bound - s.delta_r;
                s.lambda = std::exp(rv.log_theta_at(node) -
                                    (2 * n - 1) * std::log(sn_k(K, s.rho)));
                if (s.margin < -1e-4) rep.laplacian_ok = false;
                if (!std::isnan(lambda_prev) && s.lambda > lambda_prev + 1e-5)
                    rep.lambda_monotone = false;
                lambda_prev = s.lambda;
            } catch (const Error& e) {
                s.error = true;
                s.message = e.what();
            }
            rep.samples.push_back(s);
        }
    }

    // lambda -> 1 as rho -> 0, probed at rho = 1e-2.
    try {
        rep.lambda_limit_value = volume_density(model, p, 1e-2, dirs.front(), K);
        rep.lambda_limit_one = std::abs(rep.lambda_limit_value - 1.0) <= 1e-3;
    } catch (const Error&) {
        rep.lambda_limit_one = false;
    }
    return rep;
}

MyersReport myers_diameter_experiment(const MetricModel& model,
                                      std::optional<double> K,
                                      const MyersConfig& config) {
    MyersReport rep;
    const int n = model.n;
    CounterRng rng(config.seed);
    RngStream rs(rng, 0xABBA);

    // Sampled curvature minima: HSC over random points/directions and the
    // holomorphic-Ricci quotient ric(V,Vbar)/((2n-1)|V|^2).
    double hsc_min = std::numeric_limits<double>::infinity();
    double ric_min = std::numeric_limits<double>::infinity();
    for (int s = 0; s < config.curvature_samples; ++s) {
        const ChartPoint p = model.sample_point([&rs] { return rs.uniform(); });
        const CurvatureField f = curvature(Flavor::SB, model, p);
        RVec x(2 * n);
        for (int a = 0; a < 2 * n; ++a) x[a] = rs.symmetric();
        if (x.norm() < 1e-6) x[0] = 1.0;
        const TangentVector dir(x);
        hsc_min = std::min(hsc_min, hsc_sb(f, dir));
        const CVec v10 = dir.v10();
        const double vnorm2 = (v10.transpose() * f.h * v10.conjugate())(0).real();
        const HolRicciResult hr = ricci_hol_sb(f, v10);
        ric_min = std::min(ric_min, hr.value / ((2 * n - 1) * vnorm2));
    }
    rep.k_hsc_min = hsc_min;
    rep.k_ric_min = ric_min;

    rep.K_used = K ? *K : std::min(hsc_min, ric_min);
    rep.applicable = rep.K_used > 1e-10;
    if (!rep.applicable) return rep;
    rep.diameter_bound = M_PI / std::sqrt(rep.K_used);

    // Base geodesic of length slightly above the diameter bound.
    ChartPoint p0 = config.basepoint
                        ? *config.basepoint
                        : model.sample_point([&rs] { return rs.uniform(); });
    TangentVector dir0 = TangentVector::zero(n);
    if (config.direction) {
        dir0 = *config.direction;
    } else {
        for (int a = 0; a < 2 * n; ++a) dir0.x[a] = rs.symmetric();
        if (dir0.x.norm() < 1e-6) dir0.x[0] = 1.0;
    }
    const double length = config.length_factor * rep.diameter_bound;
    const Curve geod =
        integrate_geodesic(model, p0, dir0, length, config.geodesic_steps);
    const CurveGeometryCache cache = build_curve_geometry(model, geod, true);

    // Synge field I(V,V), V = sin(pi t/L) J gamma'.
    const FieldAlongCurve vsynge = synge_field(geod);
    const IndexFormResult synge = index_form(model, geod, vsynge, vsynge, cache);
    rep.synge_value = synge.value_lc;
    rep.synge_closed_form =
        (M_PI * M_PI / (length * length) - rep.K_used) * length / 2.0;

    // Torsion-term vanishing for V = J gamma': int T(V, gamma', nabla^SB V) dt.
    {
        const FieldAlongCurve nv =
            covariant_derivative_along(Flavor::SB, model, geod, vsynge);
        std::vector<double> ft(geod.nodes());
        for (int i = 0; i < geod.nodes(); ++i) {
            const TorsionField tf = torsion_sb(model, geod.point(i));
            ft[i] = tf.value(vsynge.at(i), geod.velocity(i), nv.at(i));
        }
        rep.synge_torsion_integral = simpson(ft, geod.step());
    }

    // Myers fields from the SB-parallel frame, f = sin(pi t/L).
    const std::vector<TangentVector> seed_frame =
        adapted_seed_frame(model, geod.point(0), geod.velocity(0));
    const std::vector<FieldAlongCurve> frame =
        parallel_frame(Flavor::SB, model, geod, seed_frame);
    auto profile = [length](double t) { return std::sin(M_PI * t / length); };
    const std::vector<FieldAlongCurve> vj = myers_fields(geod, frame, profile);
    double sum = 0.0;
    for (const FieldAlongCurve& f : vj)
        sum += index_form(model, geod, f, f, cache).value_lc;
    rep.myers_sum = sum;

    // int ((2n-1) f'^2 - f^2 Ric^SB(gamma', gamma')) dt on the same grid.
    std::vector<double> fr(geod.nodes());
    for (int i = 0; i < geod.nodes(); ++i) {
        const double t = geod.t(i);
        const double fv = profile(t);
        const double fp = M_PI / length * std::cos(M_PI * t / length);
        const double ric =
            ricci_real_sb(cache.curv_sb[i], geod.velocity(i), geod.velocity(i));
        fr[i] = (2 * n - 1) * fp * fp - fv * fv * ric;
    }
    rep.myers_ricci_integral = simpson(fr, geod.step());

    if (config.antipode) {
        ShootOptions so;
        so.max_length = 1.5 * rep.diameter_bound;
        so.exp_steps = 600;
        const ShootResult sr = distance_shoot(model, p0, *config.antipode, so);
        rep.diameter_checked = true;
        rep.diameter_estimate = sr.length;
    }
    return rep;
}

} // namespace sbgeo
