#include "sbgeo/chart.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <sstream>

namespace sbgeo {

void MetricModel::require_domain(const ChartPoint& p) const {
    if (!in_domain(p)) {
        std::ostringstream os;
        os << spec << ": point outside chart domain";
        throw DomainError(os.str());
    }
}

RMat real_metric_from_h(const CMat& h) {
    const int n = static_cast<int>(h.rows());
    RMat g(2 * n, 2 * n);
    const RMat re = 2.0 * h.real();
    const RMat im = 2.0 * h.imag();
    g.topLeftCorner(n, n) = re;
    g.bottomRightCorner(n, n) = re;
    g.topRightCorner(n, n) = im;
    g.bottomLeftCorner(n, n) = im.transpose();
    return g;
}

MetricEval eval_metric(const MetricModel& model, const ChartPoint& p) {
    model.require_domain(p);
    const int n = model.n;
    MetricEval out;
    out.h = model.h(p);
    if (out.h.rows() != n || out.h.cols() != n)
        throw SingularMetric(model.spec + ": h evaluator returned wrong shape");

    const double scale = out.h.norm();
    if ((out.h - out.h.adjoint()).norm() > 1e-12 * std::max(1.0, scale))
        throw SingularMetric(model.spec + ": h is not Hermitian");

    Eigen::LLT<CMat> llt(out.h);
    if (llt.info() != Eigen::Success)
        throw SingularMetric(model.spec + ": h is not positive definite");
    out.h_inv = llt.solve(CMat::Identity(n, n));
    out.g_real = real_metric_from_h(out.h);
    return out;
}

namespace {

// Central finite differences of the h-matrix along a real coordinate
// direction. dir < n steps x^dir, dir >= n steps y^{dir-n}.
CMat fd_h_real_dir(const MetricModel& model, const ChartPoint& p, int dir,
                   double step) {
    const int n = model.n;
    ChartPoint plus = p, minus = p;
    const cplx delta = dir < n ? cplx(step, 0.0) : cplx(0.0, step);
    const int k = dir % n;
    plus.z[k] += delta;
    minus.z[k] -= delta;
    if (!model.in_domain(plus) || !model.in_domain(minus))
        throw DomainError(model.spec + ": finite-difference stencil exits domain");
    return (model.h(plus) - model.h(minus)) / (2.0 * step);
}

CMat h_at_offset(const MetricModel& model, const ChartPoint& p, int dir1,
                 int s1, int dir2, int s2, double step) {
    ChartPoint q = p;
    auto delta = [&](int dir, int s) {
        const cplx d = dir < model.n ? cplx(step, 0.0) : cplx(0.0, step);
        q.z[dir % model.n] += static_cast<double>(s) * d;
    };
    delta(dir1, s1);
    if (dir2 >= 0) delta(dir2, s2);
    if (!model.in_domain(q))
        throw DomainError(model.spec + ": finite-difference stencil exits domain");
    return model.h(q);
}

} // namespace

MetricPartials metric_partials(const MetricModel& model, const ChartPoint& p,
                               bool need_second) {
    model.require_domain(p);
    const int n = model.n;
    MetricPartials out;
    {
        MetricEval ev = eval_metric(model, p);
        out.h = std::move(ev.h);
        out.h_inv = std::move(ev.h_inv);
    }
    out.dz.resize(n);
    out.dzbar.resize(n);

    if (model.has_analytic_dh()) {
        out.dz = model.dh(p);
        for (int k = 0; k < n; ++k) out.dzbar[k] = out.dz[k].adjoint();
    } else {
        const double step = model.fd_step * std::max(1.0, p.chart_norm());
        for (int k = 0; k < n; ++k) {
            const CMat hx = fd_h_real_dir(model, p, k, step);
            const CMat hy = fd_h_real_dir(model, p, k + n, step);
            out.dz[k] = 0.5 * (hx - kI * hy);
            out.dzbar[k] = 0.5 * (hx + kI * hy);
        }
    }

    // Hermitian symmetry of h forces dzbar[k] = dz[k]^H; a violation means a
    // broken analytic evaluator.
    double herm_resid = 0.0;
    for (int k = 0; k < n; ++k)
        herm_resid = std::max(herm_resid, (out.dzbar[k] - out.dz[k].adjoint()).norm());
    if (herm_resid > 1e-10 * std::max(1.0, out.h.norm()))
        throw SingularMetric(model.spec + ": dh violates Hermitian symmetry of h");

    if (need_second) {
        if (model.has_analytic_d2h()) {
            out.d2 = model.d2h(p);
        } else {
            // Second differences of h in the real coordinates, then the
            // complex combinations
            //   d2/dz^k dz^l    = (xx - yy)/4 - i (xy + yx)/4
            //   d2/dz^k dzbar^l = (xx + yy)/4 + i (xy - yx)/4.
            const double step = model.fd_step2 * std::max(1.0, p.chart_norm());
            const CMat h0 = out.h;
            auto second = [&](int a, int b) -> CMat {
                if (a == b) {
                    return (h_at_offset(model, p, a, +1, -1, 0, step) - 2.0 * h0 +
                            h_at_offset(model, p, a, -1, -1, 0, step)) /
                           (step * step);
                }
                return (h_at_offset(model, p, a, +1, b, +1, step) -
                        h_at_offset(model, p, a, +1, b, -1, step) -
                        h_at_offset(model, p, a, -1, b, +1, step) +
                        h_at_offset(model, p, a, -1, b, -1, step)) /
                       (4.0 * step * step);
            };
            out.d2.zz.assign(n, std::vector<CMat>(n));
            out.d2.zzbar.assign(n, std::vector<CMat>(n));
            for (int k = 0; k < n; ++k) {
                for (int l = 0; l < n; ++l) {
                    const CMat xx = second(k, l);
                    const CMat yy = second(k + n, l + n);
                    const CMat xy = second(k, l + n);
                    const CMat yx = second(k + n, l);
                    out.d2.zz[k][l] = 0.25 * (xx - yy) - 0.25 * kI * (xy + yx);
                    out.d2.zzbar[k][l] = 0.25 * (xx + yy) + 0.25 * kI * (xy - yx);
                }
            }
        }
        out.has_second = true;
    }
    return out;
}

cplx g_bilinear_c(const CMat& h, const CVec& xc, const CVec& yc) {
    const int n = static_cast<int>(h.rows());
    cplx acc(0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            acc += h(i, j) * (xc[i] * yc[j + n] + yc[i] * xc[j + n]);
    return acc;
}

double g_real_pair(const CMat& h, const TangentVector& x, const TangentVector& y) {
    return g_bilinear_c(h, x.complexified(), y.complexified()).real();
}

double g_norm2(const CMat& h, const TangentVector& x) {
    const CVec v = x.v10();
    // g(X,X) = 2 sum h_{i jbar} V^i conj(V^j), real for Hermitian h.
    return 2.0 * (v.transpose() * h * v.conjugate())(0).real();
}

PairingResult pairings(const MetricModel& model, const ChartPoint& p,
                       const TangentVector& x, const TangentVector& y) {
    const MetricEval ev = eval_metric(model, p);
    PairingResult out;
    out.g_bilinear = g_bilinear_c(ev.h, x.complexified(), y.complexified());
    out.g_real_val = out.g_bilinear.real();
    out.norm2 = g_norm2(ev.h, x);
    return out;
}

TangentVector apply_J(const TangentVector& x) {
    const int n = x.n();
    RVec out(2 * n);
    out.head(n) = -x.x.tail(n);
    out.tail(n) = x.x.head(n);
    return TangentVector(std::move(out));
}

CVec apply_J_c(const CVec& xc) {
    const int n = static_cast<int>(xc.size()) / 2;
    CVec out(2 * n);
    out.head(n) = kI * xc.head(n);
    out.tail(n) = -kI * xc.tail(n);
    return out;
}

cplx omega_c(const CMat& h, const CVec& xc, const CVec& yc) {
    const int n = static_cast<int>(h.rows());
    cplx acc(0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            acc += kI * h(i, j) * (xc[i] * yc[j + n] - yc[i] * xc[j + n]);
    return acc;
}

double fundamental_form(const MetricModel& model, const ChartPoint& p,
                        const TangentVector& x, const TangentVector& y) {
    const MetricEval ev = eval_metric(model, p);
    return g_real_pair(ev.h, apply_J(x), y);
}

namespace {

inline cplx det3(cplx a1, cplx a2, cplx a3, cplx b1, cplx b2, cplx b3, cplx c1,
                 cplx c2, cplx c3) {
    return a1 * (b2 * c3 - b3 * c2) - a2 * (b1 * c3 - b3 * c1) +
           a3 * (b1 * c2 - b2 * c1);
}

} // namespace

cplx d_omega_c(const MetricPartials& mp, const CVec& xc, const CVec& yc,
               const CVec& zc) {
    const int n = static_cast<int>(mp.h.rows());
    // d omega = i dh_{i jbar}/dz^k   dz^k    ^ dz^i ^ dzbar^j
    //         + i dh_{i jbar}/dzbar^k dzbar^k ^ dz^i ^ dzbar^j,
    // wedges evaluated with the determinant convention.
    cplx acc(0.0);
    for (int k = 0; k < n; ++k) {
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                const cplx c1 = kI * mp.dz[k](i, j);
                if (c1 != cplx(0.0))
                    acc += c1 * det3(xc[k], yc[k], zc[k], xc[i], yc[i], zc[i],
                                     xc[j + n], yc[j + n], zc[j + n]);
                const cplx c2 = kI * mp.dzbar[k](i, j);
                if (c2 != cplx(0.0))
                    acc += c2 * det3(xc[k + n], yc[k + n], zc[k + n], xc[i], yc[i],
                                     zc[i], xc[j + n], yc[j + n], zc[j + n]);
            }
        }
    }
    return acc;
}

double d_omega(const MetricModel& model, const ChartPoint& p,
               const TangentVector& x, const TangentVector& y,
               const TangentVector& z) {
    const MetricPartials mp = metric_partials(model, p, false);
    return d_omega_c(mp, x.complexified(), y.complexified(), z.complexified())
        .real();
}

} // namespace sbgeo
