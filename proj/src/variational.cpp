#include "sbgeo/variational.hpp"

#include <cmath>

namespace sbgeo {

namespace {

CVec complexify(const CVec& v10) {
    const int n = static_cast<int>(v10.size());
    CVec c(2 * n);
    c.head(n) = v10;
    c.tail(n) = v10.conjugate();
    return c;
}

// Covariant derivative along the curve using cached Christoffels.
std::vector<CVec> cov_deriv_cached(const Curve& curve, const FieldAlongCurve& f,
                                   const std::vector<Tensor3c>& gamma) {
    if (f.nodes() != curve.nodes())
        throw GridMismatch("field grid does not match curve grid");
    std::vector<CVec> d =
        grid_derivative(std::span<const CVec>(f.v10), curve.step());
    const int n = static_cast<int>(curve.v[0].size());
    for (int i = 0; i < curve.nodes(); ++i) {
        const CVec u = complexify(curve.v[i]);
        const CVec fc = complexify(f.v10[i]);
        for (int k = 0; k < n; ++k) {
            cplx s(0.0);
            for (int a = 0; a < 2 * n; ++a) {
                if (u[a] == cplx(0.0)) continue;
                for (int b = 0; b < 2 * n; ++b) {
                    const cplx gg = gamma[i](k, a, b);
                    if (gg != cplx(0.0)) s += gg * u[a] * fc[b];
                }
            }
            d[i][k] += s;
        }
    }
    return d;
}

// Lowered torsion value from the SB Christoffel table at one node.
double torsion_value(const Tensor3c& gamma_sb, const CMat& h, const CVec& xc,
                     const CVec& yc, const CVec& zc) {
    const int n = static_cast<int>(h.rows());
    CVec w = CVec::Zero(2 * n);
    for (int c = 0; c < 2 * n; ++c) {
        cplx acc(0.0);
        for (int a = 0; a < 2 * n; ++a) {
            if (xc[a] == cplx(0.0)) continue;
            for (int b = 0; b < 2 * n; ++b) {
                const cplx tt = gamma_sb(c, a, b) - gamma_sb(c, b, a);
                if (tt != cplx(0.0)) acc += tt * xc[a] * yc[b];
            }
        }
        w[c] = acc;
    }
    return g_bilinear_c(h, w, zc).real();
}

} // namespace

CurveGeometryCache build_curve_geometry(const MetricModel& model,
                                        const Curve& curve, bool need_curvature) {
    CurveGeometryCache cache;
    const int nodes = curve.nodes();
    cache.gamma_lc.resize(nodes);
    cache.gamma_sb.resize(nodes);
    cache.h.resize(nodes);
    if (need_curvature) {
        cache.curv_lc.resize(nodes);
        cache.curv_sb.resize(nodes);
    }
    for (int i = 0; i < nodes; ++i) {
        const ChartPoint p = curve.point(i);
        if (need_curvature) {
            GammaWithDerivs lc = christoffel_with_derivs(Flavor::LC, model, p);
            GammaWithDerivs sb = christoffel_with_derivs(Flavor::SB, model, p);
            cache.curv_lc[i] = curvature_from_tables(Flavor::LC, model, p, lc);
            cache.curv_sb[i] = curvature_from_tables(Flavor::SB, model, p, sb);
            cache.gamma_lc[i] = std::move(lc.gamma);
            cache.gamma_sb[i] = std::move(sb.gamma);
            cache.h[i] = cache.curv_sb[i].h;
        } else {
            MetricPartials mp = metric_partials(model, p, false);
            cache.gamma_lc[i] = christoffel_table(Flavor::LC, mp);
            cache.gamma_sb[i] = christoffel_table(Flavor::SB, mp);
            cache.h[i] = std::move(mp.h);
        }
    }
    return cache;
}

double energy(const MetricModel& model, const Curve& curve) {
    std::vector<double> f(curve.nodes());
    for (int i = 0; i < curve.nodes(); ++i)
        f[i] = 0.5 * g_norm2(model.h(curve.point(i)), curve.velocity(i));
    return simpson(f, curve.step());
}

double energy_of_positions(const MetricModel& model, std::span<const CVec> z,
                           double a, double b) {
    const int nodes = static_cast<int>(z.size());
    const double h = (b - a) / (nodes - 1);
    const std::vector<CVec> v = grid_derivative(z, h);
    std::vector<double> f(nodes);
    for (int i = 0; i < nodes; ++i) {
        const ChartPoint p{z[i]};
        f[i] = 0.5 * g_norm2(model.h(p), TangentVector::from_v10(v[i]));
    }
    return simpson(f, h);
}

double first_variation_residual(const MetricModel& model, const Curve& geodesic,
                                const FieldAlongCurve& v, double delta) {
    if (v.nodes() != geodesic.nodes())
        throw GridMismatch("field grid does not match curve grid");
    if (v.v10.front().norm() > 1e-10 || v.v10.back().norm() > 1e-10)
        throw NotProper("first variation requires V(a) = V(b) = 0");
    auto energy_at = [&](double s) {
        std::vector<CVec> z(geodesic.nodes());
        for (int i = 0; i < geodesic.nodes(); ++i)
            z[i] = exp_map(model, geodesic.point(i),
                           TangentVector::from_v10(CVec(s * v.v10[i])), 12)
                       .z;
        return energy_of_positions(model, z, geodesic.a, geodesic.b);
    };
    return std::abs(energy_at(delta) - energy_at(-delta)) / (2.0 * delta);
}

VariationSurface VariationSurface::linear_fields(const Curve& base,
                                                 FieldAlongCurve v,
                                                 FieldAlongCurve w) {
    if (v.nodes() != base.nodes() || w.nodes() != base.nodes())
        throw GridMismatch("variation fields must match the base grid");
    VariationSurface s;
    s.mode = Mode::LinearFields;
    s.base = base;
    s.v = std::move(v);
    s.w = std::move(w);
    s.proper = s.v.v10.front().norm() <= 1e-10 && s.v.v10.back().norm() <= 1e-10 &&
               s.w.v10.front().norm() <= 1e-10 && s.w.v10.back().norm() <= 1e-10;
    return s;
}

VariationSurface VariationSurface::closed_form(
    const Curve& base, std::function<CVec(double, double, double)> alpha,
    bool proper) {
    VariationSurface s;
    s.mode = Mode::ClosedForm;
    s.base = base;
    s.alpha = std::move(alpha);
    s.proper = proper;
    // alpha(t,0,0) must reproduce the base curve.
    for (int i = 0; i < base.nodes(); i += std::max(1, base.steps() / 8)) {
        if ((s.alpha(base.t(i), 0.0, 0.0) - base.z[i]).norm() > 1e-10)
            throw GridMismatch("closed-form surface does not restrict to the base");
    }
    return s;
}

CVec VariationSurface::position(const MetricModel& model, int node, double s1,
                                double s2) const {
    if (mode == Mode::ClosedForm) return alpha(base.t(node), s1, s2);
    const CVec dir = s1 * v.v10[node] + s2 * w.v10[node];
    return exp_map(model, base.point(node), TangentVector::from_v10(dir), exp_steps)
        .z;
}

double mixed_partial_energy_fd(const MetricModel& model,
                               const VariationSurface& surface, double delta) {
    const int nodes = surface.base.nodes();
    auto energy_at = [&](double s1, double s2) {
        std::vector<CVec> z(nodes);
        for (int i = 0; i < nodes; ++i) z[i] = surface.position(model, i, s1, s2);
        return energy_of_positions(model, z, surface.base.a, surface.base.b);
    };
    const double epp = energy_at(delta, delta);
    const double epm = energy_at(delta, -delta);
    const double emp = energy_at(-delta, delta);
    const double emm = energy_at(-delta, -delta);
    return (epp - epm - emp + emm) / (4.0 * delta * delta);
}

double second_variation_sb(const MetricModel&, const Curve& geodesic,
                           const FieldAlongCurve& v, const FieldAlongCurve& w,
                           const CurveGeometryCache& cache) {
    const int nodes = geodesic.nodes();
    const std::vector<CVec> dv = cov_deriv_cached(geodesic, v, cache.gamma_sb);
    const std::vector<CVec> dw = cov_deriv_cached(geodesic, w, cache.gamma_sb);
    std::vector<double> f(nodes);
    for (int i = 0; i < nodes; ++i) {
        const CVec vc = complexify(v.v10[i]);
        const CVec wc = complexify(w.v10[i]);
        const CVec dvc = complexify(dv[i]);
        const CVec dwc = complexify(dw[i]);
        const CVec uc = complexify(geodesic.v[i]);
        const double grad = g_bilinear_c(cache.h[i], dvc, dwc).real();
        const double tors = torsion_value(cache.gamma_sb[i], cache.h[i], vc, uc, dwc);
        const double curv = cache.curv_sb[i].eval_c(vc, uc, uc, wc).real();
        f[i] = grad + tors - curv;
    }
    return simpson(f, geodesic.step());
}

double second_variation_sb(const MetricModel& model, const Curve& geodesic,
                           const FieldAlongCurve& v, const FieldAlongCurve& w) {
    return second_variation_sb(model, geodesic, v, w,
                               build_curve_geometry(model, geodesic, true));
}

double general_boundary_term(const MetricModel& model,
                             const VariationSurface& surface, double delta) {
    if (surface.mode != VariationSurface::Mode::ClosedForm)
        throw NotProper(
            "general boundary term needs s-derivatives: closed_form surfaces only");
    const Curve& base = surface.base;
    auto term_at = [&](int node) {
        const double t = base.t(node);
        // dalpha/ds2 at s1 = +-delta, and the mixed second derivative.
        const CVec a_pp = surface.alpha(t, delta, delta);
        const CVec a_pm = surface.alpha(t, delta, -delta);
        const CVec a_mp = surface.alpha(t, -delta, delta);
        const CVec a_mm = surface.alpha(t, -delta, -delta);
        const CVec d2 = (a_pp - a_pm - a_mp + a_mm) / (4.0 * delta * delta);
        const CVec vdir =
            (surface.alpha(t, delta, 0.0) - surface.alpha(t, -delta, 0.0)) /
            (2.0 * delta);
        const CVec wdir =
            (surface.alpha(t, 0.0, delta) - surface.alpha(t, 0.0, -delta)) /
            (2.0 * delta);
        MetricPartials mp = metric_partials(model, base.point(node), false);
        const Tensor3c g = christoffel_table(Flavor::SB, mp);
        const int n = model.n;
        const CVec vc = complexify(vdir), wc = complexify(wdir);
        CVec nabla = d2;
        for (int k = 0; k < n; ++k) {
            cplx s(0.0);
            for (int ia = 0; ia < 2 * n; ++ia)
                for (int ib = 0; ib < 2 * n; ++ib) {
                    const cplx gg = g(k, ia, ib);
                    if (gg != cplx(0.0)) s += gg * vc[ia] * wc[ib];
                }
            nabla[k] += s;
        }
        return g_bilinear_c(mp.h, complexify(nabla), complexify(base.v[node]))
            .real();
    };
    return term_at(base.nodes() - 1) - term_at(0);
}

IndexFormResult index_form(const MetricModel&, const Curve& geodesic,
                           const FieldAlongCurve& v, const FieldAlongCurve& w,
                           const CurveGeometryCache& cache) {
    const int nodes = geodesic.nodes();
    const std::vector<CVec> dv_lc = cov_deriv_cached(geodesic, v, cache.gamma_lc);
    const std::vector<CVec> dw_lc = cov_deriv_cached(geodesic, w, cache.gamma_lc);
    const std::vector<CVec> dw_sb = cov_deriv_cached(geodesic, w, cache.gamma_sb);
    const std::vector<CVec> dv_sb = cov_deriv_cached(geodesic, v, cache.gamma_sb);

    std::vector<double> flc(nodes), fsb(nodes);
    for (int i = 0; i < nodes; ++i) {
        const CVec vc = complexify(v.v10[i]);
        const CVec wc = complexify(w.v10[i]);
        const CVec uc = complexify(geodesic.v[i]);
        flc[i] = g_bilinear_c(cache.h[i], complexify(dv_lc[i]), complexify(dw_lc[i]))
                     .real() -
                 cache.curv_lc[i].eval_c(vc, uc, uc, wc).real();
        fsb[i] = g_bilinear_c(cache.h[i], complexify(dv_sb[i]), complexify(dw_sb[i]))
                     .real() +
                 torsion_value(cache.gamma_sb[i], cache.h[i], vc, uc,
                               complexify(dw_sb[i])) -
                 cache.curv_sb[i].eval_c(vc, uc, uc, wc).real();
    }

    IndexFormResult out;
    out.value_lc = simpson(flc, geodesic.step());
    out.value_sb_bulk = simpson(fsb, geodesic.step());
    auto btm = [&](int i) {
        return 0.5 * torsion_value(cache.gamma_sb[i], cache.h[i],
                                   complexify(v.v10[i]), complexify(w.v10[i]),
                                   complexify(geodesic.v[i]));
    };
    out.boundary_term = btm(nodes - 1) - btm(0);
    return out;
}

IndexFormResult index_form(const MetricModel& model, const Curve& geodesic,
                           const FieldAlongCurve& v, const FieldAlongCurve& w) {
    return index_form(model, geodesic, v, w,
                      build_curve_geometry(model, geodesic, true));
}

std::vector<FieldAlongCurve> myers_fields(
    const Curve& geodesic, const std::vector<FieldAlongCurve>& sb_frame,
    const std::function<double(double)>& f) {
    if (sb_frame.empty() || sb_frame[0].nodes() != geodesic.nodes())
        throw BadSeedFrame("myers_fields: frame grid does not match the geodesic");
    const double fa = f(geodesic.a), fb = f(geodesic.b);
    if (std::abs(fa) > 1e-12 || std::abs(fb) > 1e-12)
        throw NotProper("myers_fields: profile must vanish at both endpoints");
    std::vector<FieldAlongCurve> out;
    for (std::size_t j = 1; j < sb_frame.size(); ++j) {
        FieldAlongCurve vj;
        vj.v10.resize(geodesic.nodes());
        for (int i = 0; i < geodesic.nodes(); ++i)
            vj.v10[i] = f(geodesic.t(i)) * sb_frame[j].v10[i];
        out.push_back(std::move(vj));
    }
    return out;
}

FieldAlongCurve synge_field(const Curve& geodesic) {
    const double length = geodesic.b - geodesic.a;
    FieldAlongCurve out;
    out.v10.resize(geodesic.nodes());
    for (int i = 0; i < geodesic.nodes(); ++i) {
        const double s = std::sin(M_PI * (geodesic.t(i) - geodesic.a) / length);
        out.v10[i] = s * (kI * geodesic.v[i]);  // J gamma' in the (1,0) view
    }
    return out;
}

} // namespace sbgeo
