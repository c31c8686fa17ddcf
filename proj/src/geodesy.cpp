#include "sbgeo/geodesy.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace sbgeo {

namespace {

Tensor3c gamma_at(const MetricModel& model, const CVec& z, Flavor flavor) {
    return christoffel_table(flavor, metric_partials(model, ChartPoint(z), false));
}

CVec complexify(const CVec& v10) {
    const int n = static_cast<int>(v10.size());
    CVec c(2 * n);
    c.head(n) = v10;
    c.tail(n) = v10.conjugate();
    return c;
}

// Geodesic acceleration: a^k = -Gamma^k_{AB} u^A u^B, u = (v, conj v).
CVec geodesic_acc(const Tensor3c& g, const CVec& v) {
    const int n = static_cast<int>(v.size());
    const CVec u = complexify(v);
    CVec acc = CVec::Zero(n);
    for (int k = 0; k < n; ++k) {
        cplx s(0.0);
        for (int a = 0; a < 2 * n; ++a)
            for (int b = 0; b < 2 * n; ++b) {
                const cplx gg = g(k, a, b);
                if (gg != cplx(0.0)) s += gg * u[a] * u[b];
            }
        acc[k] = -s;
    }
    return acc;
}

// Transport right-hand side for one field column.
CVec transport_rhs(const Tensor3c& g, const CVec& ugamma, const CVec& field_v10) {
    const int n = static_cast<int>(field_v10.size());
    const CVec f = complexify(field_v10);
    CVec d = CVec::Zero(n);
    for (int k = 0; k < n; ++k) {
        cplx s(0.0);
        for (int a = 0; a < 2 * n; ++a) {
            if (ugamma[a] == cplx(0.0)) continue;
            for (int b = 0; b < 2 * n; ++b) {
                const cplx gg = g(k, a, b);
                if (gg != cplx(0.0)) s += gg * ugamma[a] * f[b];
            }
        }
        d[k] = -s;
    }
    return d;
}

void check_finite(const CVec& z, double t) {
    if (!z.allFinite())
        throw StepTooLarge("integration diverged at t=" + std::to_string(t));
}

// Cubic Hermite reconstruction of position and velocity at a step midpoint.
void hermite_midpoint(const CVec& z0, const CVec& v0, const CVec& z1,
                      const CVec& v1, double h, CVec& zm, CVec& vm) {
    zm = 0.5 * (z0 + z1) + (h / 8.0) * (v0 - v1);
    vm = 1.5 * (z1 - z0) / h - 0.25 * (v0 + v1);
}

} // namespace

Curve Curve::subsample(int stride) const {
    if (stride < 1 || steps() % stride != 0)
        throw GridMismatch("subsample stride must divide the interval count");
    Curve out;
    out.a = a;
    out.b = b;
    out.geodesic_residual = geodesic_residual;
    for (int i = 0; i < nodes(); i += stride) {
        out.z.push_back(z[i]);
        out.v.push_back(v[i]);
    }
    return out;
}

Curve integrate_geodesic(const MetricModel& model, const ChartPoint& p,
                         const TangentVector& v, double length, int steps) {
    if (steps < 4) throw StepTooLarge("integrate_geodesic: need at least 4 steps");
    model.require_domain(p);
    const CVec vin = v.v10();
    if (vin.norm() == 0.0) throw ZeroVector("integrate_geodesic: zero direction");

    const MetricEval ev = eval_metric(model, p);
    const double speed = std::sqrt(g_norm2(ev.h, v));
    CVec vel = vin / speed;  // unit g-speed

    Curve out;
    out.a = 0.0;
    out.b = length;
    out.z.reserve(steps + 1);
    out.v.reserve(steps + 1);
    out.z.push_back(p.z);
    out.v.push_back(vel);

    const double h = length / steps;
    CVec z = p.z;
    for (int i = 0; i < steps; ++i) {
        const double t = h * i;
        const Tensor3c g1 = gamma_at(model, z, Flavor::LC);
        const CVec k1z = vel, k1v = geodesic_acc(g1, vel);

        CVec z2 = z + 0.5 * h * k1z, v2 = vel + 0.5 * h * k1v;
        const Tensor3c g2 = gamma_at(model, z2, Flavor::LC);
        const CVec k2z = v2, k2v = geodesic_acc(g2, v2);

        CVec z3 = z + 0.5 * h * k2z, v3 = vel + 0.5 * h * k2v;
        const Tensor3c g3 = gamma_at(model, z3, Flavor::LC);
        const CVec k3z = v3, k3v = geodesic_acc(g3, v3);

        CVec z4 = z + h * k3z, v4 = vel + h * k3v;
        const Tensor3c g4 = gamma_at(model, z4, Flavor::LC);
        const CVec k4z = v4, k4v = geodesic_acc(g4, v4);

        z += h / 6.0 * (k1z + 2.0 * k2z + 2.0 * k3z + k4z);
        vel += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        check_finite(z, t + h);
        if (!model.in_domain(ChartPoint(z)))
            throw DomainExit(model.spec + ": geodesic left the chart domain", t + h);
        out.z.push_back(z);
        out.v.push_back(vel);
    }
    out.geodesic_residual = geodesic_residual(Flavor::LC, model, out);
    return out;
}

ChartPoint exp_map(const MetricModel& model, const ChartPoint& p,
                   const TangentVector& v, int steps) {
    CVec z = p.z;
    CVec vel = v.v10();
    if (vel.norm() == 0.0) return p;
    const double h = 1.0 / steps;
    for (int i = 0; i < steps; ++i) {
        const Tensor3c g1 = gamma_at(model, z, Flavor::LC);
        const CVec k1z = vel, k1v = geodesic_acc(g1, vel);
        CVec z2 = z + 0.5 * h * k1z, v2 = vel + 0.5 * h * k1v;
        const Tensor3c g2 = gamma_at(model, z2, Flavor::LC);
        const CVec k2z = v2, k2v = geodesic_acc(g2, v2);
        CVec z3 = z + 0.5 * h * k2z, v3 = vel + 0.5 * h * k2v;
        const Tensor3c g3 = gamma_at(model, z3, Flavor::LC);
        const CVec k3z = v3, k3v = geodesic_acc(g3, v3);
        CVec z4 = z + h * k3z, v4 = vel + h * k3v;
        const Tensor3c g4 = gamma_at(model, z4, Flavor::LC);
        const CVec k4z = v4, k4v = geodesic_acc(g4, v4);
        z += h / 6.0 * (k1z + 2.0 * k2z + 2.0 * k3z + k4z);
        vel += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        check_finite(z, h * (i + 1));
        if (!model.in_domain(ChartPoint(z)))
            throw DomainExit(model.spec + ": exp_map left the chart domain",
                             h * (i + 1));
    }
    return ChartPoint(z);
}

FieldAlongCurve covariant_derivative_along(Flavor flavor, const MetricModel& model,
                                           const Curve& curve,
                                           const FieldAlongCurve& field) {
    if (field.nodes() != curve.nodes())
        throw GridMismatch("field grid does not match curve grid");
    const std::vector<CVec> dv =
        grid_derivative(std::span<const CVec>(field.v10), curve.step());
    FieldAlongCurve out;
    out.v10.resize(curve.nodes());
    for (int i = 0; i < curve.nodes(); ++i) {
        const Tensor3c g = gamma_at(model, curve.z[i], flavor);
        out.v10[i] = dv[i] + (-1.0) * transport_rhs(g, complexify(curve.v[i]),
                                                    field.v10[i]);
    }
    return out;
}

double geodesic_residual(Flavor flavor, const MetricModel& model,
                         const Curve& curve) {
    FieldAlongCurve vel{curve.v};
    const FieldAlongCurve acc = covariant_derivative_along(flavor, model, curve, vel);
    double worst = 0.0;
    for (int i = 0; i < curve.nodes(); ++i) {
        const CMat h = model.h(curve.point(i));
        worst = std::max(worst, std::sqrt(g_norm2(h, acc.at(i))));
    }
    return worst;
}

double speed_drift(const MetricModel& model, const Curve& curve) {
    double s0 = 0.0, worst = 0.0;
    for (int i = 0; i < curve.nodes(); ++i) {
        const CMat h = model.h(curve.point(i));
        const double s = std::sqrt(g_norm2(h, curve.velocity(i)));
        if (i == 0) s0 = s;
        worst = std::max(worst, std::abs(s - s0));
    }
    return worst;
}

std::vector<FieldAlongCurve> transport_many(Flavor flavor, const MetricModel& model,
                                            const Curve& curve,
                                            const std::vector<TangentVector>& v0) {
    const int n = model.n;
    const int m = static_cast<int>(v0.size());
    const int nodes = curve.nodes();
    const double h = curve.step();

    std::vector<FieldAlongCurve> out(m);
    for (int c = 0; c < m; ++c) {
        out[c].v10.resize(nodes);
        out[c].v10[0] = v0[c].v10();
    }

    Tensor3c g_node = gamma_at(model, curve.z[0], flavor);
    for (int i = 0; i + 1 < nodes; ++i) {
        CVec zm(n), vm(n);
        hermite_midpoint(curve.z[i], curve.v[i], curve.z[i + 1], curve.v[i + 1], h,
                         zm, vm);
        const Tensor3c g_mid = gamma_at(model, ChartPoint(zm).z, flavor);
        const Tensor3c g_next = gamma_at(model, curve.z[i + 1], flavor);
        const CVec u0 = complexify(curve.v[i]);
        const CVec um = complexify(vm);
        const CVec u1 = complexify(curve.v[i + 1]);
        for (int c = 0; c < m; ++c) {
            const CVec& y = out[c].v10[i];
            const CVec k1 = transport_rhs(g_node, u0, y);
            const CVec k2 = transport_rhs(g_mid, um, y + 0.5 * h * k1);
            const CVec k3 = transport_rhs(g_mid, um, y + 0.5 * h * k2);
            const CVec k4 = transport_rhs(g_next, u1, y + h * k3);
            out[c].v10[i + 1] = y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        g_node = g_next;
    }
    return out;
}

FieldAlongCurve parallel_transport(Flavor flavor, const MetricModel& model,
                                   const Curve& curve, const TangentVector& v0) {
    return transport_many(flavor, model, curve, {v0})[0];
}

TransportOperator transport_operator(Flavor flavor, const MetricModel& model,
                                     const Curve& curve) {
    const int n = model.n;
    std::vector<TangentVector> basis;
    for (int a = 0; a < 2 * n; ++a) {
        RVec e = RVec::Zero(2 * n);
        e[a] = 1.0;
        basis.emplace_back(e);
    }
    const auto cols = transport_many(flavor, model, curve, basis);
    TransportOperator op;
    op.flavor = flavor;
    op.M.resize(curve.nodes(), RMat(2 * n, 2 * n));
    for (int i = 0; i < curve.nodes(); ++i)
        for (int a = 0; a < 2 * n; ++a)
            op.M[i].col(a) = TangentVector::from_v10(cols[a].v10[i]).x;
    return op;
}

std::vector<TangentVector> adapted_seed_frame(const MetricModel& model,
                                              const ChartPoint& p,
                                              const TangentVector& gamma_prime) {
    const int n = model.n;
    const MetricEval ev = eval_metric(model, p);
    const double sp = std::sqrt(g_norm2(ev.h, gamma_prime));
    if (sp == 0.0) throw ZeroVector("adapted_seed_frame: zero base direction");

    std::vector<TangentVector> holo;  // e_1..e_n; J-partners appended after
    holo.push_back(TangentVector(RVec(gamma_prime.x / sp)));

    auto project_out = [&](TangentVector cand) {
        for (const TangentVector& u : holo) {
            cand.x -= g_real_pair(ev.h, cand, u) * u.x;
            const TangentVector ju = apply_J(u);
            cand.x -= g_real_pair(ev.h, cand, ju) * ju.x;
        }
        return cand;
    };

    int next_candidate = 0;
    while (static_cast<int>(holo.size()) < n) {
        TangentVector best;
        double best_norm = -1.0;
        for (int a = next_candidate; a < 2 * n; ++a) {
            RVec e = RVec::Zero(2 * n);
            e[a] = 1.0;
            TangentVector c = project_out(TangentVector(e));
            const double nn = std::sqrt(std::max(0.0, g_norm2(ev.h, c)));
            if (nn > best_norm) {
                best = c;
                best_norm = nn;
            }
        }
        if (best_norm < 1e-10)
            throw BadSeedFrame("adapted_seed_frame: degenerate candidate set");
        best.x /= best_norm;
        holo.push_back(best);
    }
    std::vector<TangentVector> frame = holo;
    for (int i = 0; i < n; ++i) frame.push_back(apply_J(holo[i]));
    return frame;
}

std::vector<FieldAlongCurve> parallel_frame(Flavor flavor, const MetricModel& model,
                                            const Curve& curve,
                                            const std::vector<TangentVector>& seed) {
    const int n = model.n;
    if (static_cast<int>(seed.size()) != 2 * n)
        throw BadSeedFrame("seed frame must have 2n vectors");
    const MetricEval ev = eval_metric(model, curve.point(0));
    for (int a = 0; a < 2 * n; ++a) {
        for (int b = 0; b < 2 * n; ++b) {
            const double gab = g_real_pair(ev.h, seed[a], seed[b]);
            if (std::abs(gab - (a == b ? 1.0 : 0.0)) > 1e-8)
                throw BadSeedFrame("seed frame is not g-orthonormal");
        }
    }
    for (int i = 0; i < n; ++i)
        if ((apply_J(seed[i]).x - seed[i + n].x).norm() > 1e-8)
            throw BadSeedFrame("seed frame does not satisfy J e_i = e_{i+n}");
    if ((seed[0].v10() - curve.v[0]).norm() > 1e-6)
        throw BadSeedFrame("seed frame must start with e_1 = gamma'(a)");
    return transport_many(flavor, model, curve, seed);
}

namespace {

RVec chart_coords(const ChartPoint& p) {
    const int n = p.n();
    RVec x(2 * n);
    for (int i = 0; i < n; ++i) {
        x[i] = p.z[i].real();
        x[i + n] = p.z[i].imag();
    }
    return x;
}

// Chart-segment length estimate used to seed the shooting length.
double segment_length_estimate(const MetricModel& model, const ChartPoint& p,
                               const ChartPoint& q) {
    const CVec dz = q.z - p.z;
    const TangentVector step_dir = TangentVector::from_v10(dz);
    double acc = 0.0;
    const int samples = 16;
    int used = 0;
    for (int s = 0; s < samples; ++s) {
        const double u = (s + 0.5) / samples;
        ChartPoint mid(CVec(p.z + u * dz));
        if (!model.in_domain(mid)) continue;
        acc += std::sqrt(g_norm2(model.h(mid), step_dir));
        ++used;
    }
    if (used == 0) return std::sqrt(g_norm2(model.h(p), step_dir));
    return acc / used;
}

} // namespace

ShootResult distance_shoot(const MetricModel& model, const ChartPoint& p,
                           const ChartPoint& q, const ShootOptions& opts) {
    model.require_domain(p);
    model.require_domain(q);
    const int n = model.n;
    const int dim = 2 * n;
    const RVec target = chart_coords(q);
    const double tol = opts.tol_scale * (1.0 + q.chart_norm());

    if ((q.z - p.z).norm() <= 1e-14) {
        ShootResult r;
        r.direction = TangentVector::zero(n);
        r.claims_minimal = true;
        return r;
    }

    const MetricEval ev = eval_metric(model, p);
    const double len0 =
        std::min(std::max(segment_length_estimate(model, p, q), 1e-6),
                 opts.max_length);

    auto endpoint = [&](const RVec& w) -> RVec {
        const ChartPoint e = exp_map(model, p, TangentVector(RVec(w)), opts.exp_steps);
        return chart_coords(e) - target;
    };

    // Deterministic start directions: the chart direction plus a fixed
    // pseudo-random spread, g-normalized.
    std::vector<RVec> starts;
    {
        CounterRng rng(0x5BD1E995u);
        RngStream rs(rng, 1);
        starts.push_back(chart_coords(q) - chart_coords(p));
        while (static_cast<int>(starts.size()) < opts.starts) {
            RVec d(dim);
            for (int a = 0; a < dim; ++a) d[a] = rs.symmetric();
            if (d.norm() > 1e-3) starts.push_back(d);
        }
    }

    bool found = false;
    ShootResult best;
    best.endpoint_error = std::numeric_limits<double>::infinity();

    for (RVec d : starts) {
        const double gn = std::sqrt(g_norm2(ev.h, TangentVector(d)));
        if (gn == 0.0) continue;
        RVec w = d * (len0 / gn);
        double lambda = 1e-3;
        RVec f;
        try {
            f = endpoint(w);
        } catch (const Error&) {
            continue;
        }
        for (int it = 0; it < opts.max_iterations; ++it) {
            if (f.norm() <= tol) break;
            // Forward-difference Jacobian of the endpoint map.
            RMat jac(dim, dim);
            const double fd = 1e-6 * (1.0 + w.norm());
            bool jac_ok = true;
            for (int a = 0; a < dim; ++a) {
                RVec wp = w;
                wp[a] += fd;
                try {
                    jac.col(a) = (endpoint(wp) - f) / fd;
                } catch (const Error&) {
                    jac_ok = false;
                    break;
                }
            }
            if (!jac_ok) break;
            bool improved = false;
            for (int tries = 0; tries < 8; ++tries) {
                const RMat a =
                    jac.transpose() * jac + lambda * RMat::Identity(dim, dim);
                const RVec delta = a.ldlt().solve(jac.transpose() * f);
                RVec wn = w - delta;
                const double glen = std::sqrt(g_norm2(ev.h, TangentVector(wn)));
                if (glen > opts.max_length) {
                    lambda *= 10.0;
                    continue;
                }
                RVec fn;
                try {
                    fn = endpoint(wn);
                } catch (const Error&) {
                    lambda *= 10.0;
                    continue;
                }
                if (fn.norm() < f.norm()) {
                    w = wn;
                    f = fn;
                    lambda = std::max(lambda / 3.0, 1e-12);
                    improved = true;
                    break;
                }
                lambda *= 10.0;
            }
            if (!improved) break;
        }
        if (f.norm() <= tol) {
            const double len = std::sqrt(g_norm2(ev.h, TangentVector(w)));
            if (!found || len < best.length) {
                found = true;
                best.length = len;
                best.direction = TangentVector(RVec(w / len));
                best.endpoint_error = f.norm();
            }
        }
    }

    if (!found)
        throw NoConvergence(model.spec + ": shooting failed to connect the points");
    best.claims_minimal = best.length <= model.injectivity_bound;
    if (opts.strict_injectivity && !best.claims_minimal)
        throw BeyondInjectivityBound(
            model.spec + ": connection length exceeds the injectivity bound");
    return best;
}

namespace {

struct JacobiStage {
    Tensor3c gamma;
    CurvatureField curv;
};

JacobiStage jacobi_stage(const MetricModel& model, const CVec& z) {
    const ChartPoint p{z};
    GammaWithDerivs gd = christoffel_with_derivs(Flavor::LC, model, p);
    JacobiStage st;
    st.curv = curvature_from_tables(Flavor::LC, model, p, gd);
    st.gamma = std::move(gd.gamma);
    return st;
}

struct JacobiState {
    CMat f;    // n x 2n frame columns (v10)
    RMat xi;   // 2n x m
    RMat xid;  // 2n x m
};

JacobiState rhs(const JacobiStage& st, const CVec& ugamma, const JacobiState& s) {
    const int n = static_cast<int>(s.f.rows());
    const int d = 2 * n;
    JacobiState out;
    out.f.resize(n, d);
    for (int a = 0; a < d; ++a)
        out.f.col(a) = transport_rhs(st.gamma, ugamma, s.f.col(a));

    // R_ab = R(E_a, gamma', gamma', E_b) in the current frame.
    std::vector<CVec> fc(d);
    for (int a = 0; a < d; ++a) fc[a] = complexify(s.f.col(a));
    RMat rmat(d, d);
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
            rmat(a, b) = st.curv.eval_c(fc[a], ugamma, ugamma, fc[b]).real();

    out.xi = s.xid;
    // Jacobi: xidot'_a = -sum_b R(E_b, gamma', gamma', E_a) xi_b.
    out.xid = -(rmat.transpose() * s.xi);
    return out;
}

JacobiState axpy(const JacobiState& s, double c, const JacobiState& d) {
    return {s.f + c * d.f, s.xi + c * d.xi, s.xid + c * d.xid};
}

} // namespace

JacobiBasis jacobi_normal_basis(const MetricModel& model, const Curve& geodesic) {
    const int n = model.n;
    const int d = 2 * n;
    const int m = d - 1;
    const int nodes = geodesic.nodes();
    const double h = geodesic.step();

    const std::vector<TangentVector> seed = adapted_seed_frame(
        model, geodesic.point(0), geodesic.velocity(0));

    JacobiState s;
    s.f.resize(n, d);
    for (int a = 0; a < d; ++a) s.f.col(a) = seed[a].v10();
    s.xi = RMat::Zero(d, m);
    s.xid = RMat::Zero(d, m);
    for (int j = 0; j < m; ++j) s.xid(j + 1, j) = 1.0;  // normal directions e_2..e_2n

    JacobiBasis out;
    out.frame.assign(d, FieldAlongCurve{});
    for (int a = 0; a < d; ++a) out.frame[a].v10.resize(nodes);
    out.xi.resize(nodes);
    out.xi_dot.resize(nodes);

    auto record = [&](int i, const JacobiState& st) {
        for (int a = 0; a < d; ++a) out.frame[a].v10[i] = st.f.col(a);
        out.xi[i] = st.xi;
        out.xi_dot[i] = st.xid;
    };
    record(0, s);

    JacobiStage st_node = jacobi_stage(model, geodesic.z[0]);
    for (int i = 0; i + 1 < nodes; ++i) {
        CVec zm(n), vm(n);
        hermite_midpoint(geodesic.z[i], geodesic.v[i], geodesic.z[i + 1],
                         geodesic.v[i + 1], h, zm, vm);
        const JacobiStage st_mid = jacobi_stage(model, zm);
        const JacobiStage st_next = jacobi_stage(model, geodesic.z[i + 1]);
        const CVec u0 = complexify(geodesic.v[i]);
        const CVec um = complexify(vm);
        const CVec u1 = complexify(geodesic.v[i + 1]);

        const JacobiState k1 = rhs(st_node, u0, s);
        const JacobiState k2 = rhs(st_mid, um, axpy(s, 0.5 * h, k1));
        const JacobiState k3 = rhs(st_mid, um, axpy(s, 0.5 * h, k2));
        const JacobiState k4 = rhs(st_next, u1, axpy(s, h, k3));

        s.f += h / 6.0 * (k1.f + 2.0 * k2.f + 2.0 * k3.f + k4.f);
        s.xi += h / 6.0 * (k1.xi + 2.0 * k2.xi + 2.0 * k3.xi + k4.xi);
        s.xid += h / 6.0 * (k1.xid + 2.0 * k2.xid + 2.0 * k3.xid + k4.xid);
        record(i + 1, s);
        st_node = st_next;
    }
    return out;
}

RMat JacobiBasis::normal_matrix(int node) const {
    const int d = static_cast<int>(xi[node].rows());
    const int m = static_cast<int>(xi[node].cols());
    return xi[node].bottomRows(d - 1).topRows(m);
}

FieldAlongCurve jacobi_field(const MetricModel& model, const Curve& geodesic,
                             const TangentVector& j0, const TangentVector& j0prime) {
    const int n = model.n;
    const int d = 2 * n;
    const int nodes = geodesic.nodes();
    const double h = geodesic.step();

    const std::vector<TangentVector> seed = adapted_seed_frame(
        model, geodesic.point(0), geodesic.velocity(0));
    const MetricEval ev = eval_metric(model, geodesic.point(0));

    JacobiState s;
    s.f.resize(n, d);
    for (int a = 0; a < d; ++a) s.f.col(a) = seed[a].v10();
    s.xi = RMat::Zero(d, 1);
    s.xid = RMat::Zero(d, 1);
    for (int a = 0; a < d; ++a) {
        s.xi(a, 0) = g_real_pair(ev.h, j0, seed[a]);
        s.xid(a, 0) = g_real_pair(ev.h, j0prime, seed[a]);
    }

    FieldAlongCurve out;
    out.v10.resize(nodes);
    auto record = [&](int i, const JacobiState& st) {
        CVec x = CVec::Zero(n);
        for (int a = 0; a < d; ++a) x += st.xi(a, 0) * st.f.col(a);
        out.v10[i] = x;
    };
    record(0, s);

    JacobiStage st_node = jacobi_stage(model, geodesic.z[0]);
    for (int i = 0; i + 1 < nodes; ++i) {
        CVec zm(n), vm(n);
        hermite_midpoint(geodesic.z[i], geodesic.v[i], geodesic.z[i + 1],
                         geodesic.v[i + 1], h, zm, vm);
        const JacobiStage st_mid = jacobi_stage(model, zm);
        const JacobiStage st_next = jacobi_stage(model, geodesic.z[i + 1]);
        const CVec u0 = complexify(geodesic.v[i]);
        const CVec um = complexify(vm);
        const CVec u1 = complexify(geodesic.v[i + 1]);

        const JacobiState k1 = rhs(st_node, u0, s);
        const JacobiState k2 = rhs(st_mid, um, axpy(s, 0.5 * h, k1));
        const JacobiState k3 = rhs(st_mid, um, axpy(s, 0.5 * h, k2));
        const JacobiState k4 = rhs(st_next, u1, axpy(s, h, k3));
        s.f += h / 6.0 * (k1.f + 2.0 * k2.f + 2.0 * k3.f + k4.f);
        s.xi += h / 6.0 * (k1.xi + 2.0 * k2.xi + 2.0 * k3.xi + k4.xi);
        s.xid += h / 6.0 * (k1.xid + 2.0 * k2.xid + 2.0 * k3.xid + k4.xid);
        record(i + 1, s);
        st_node = st_next;
    }
    return out;
}

RMat exp_jacobian(const MetricModel& model, const ChartPoint& p, double rho,
                  const TangentVector& omega_dir, int steps) {
    if (steps <= 0)
        steps = std::max(200, static_cast<int>(std::ceil(rho / 0.002)));
    const Curve geod = integrate_geodesic(model, p, omega_dir, rho, steps);
    const JacobiBasis jb = jacobi_normal_basis(model, geod);
    return jb.normal_matrix(geod.nodes() - 1);
}

} // namespace sbgeo
