#include "sbgeo/curvature.hpp"

namespace sbgeo {

namespace {

// Conjugate-family completion of a table whose upper-unbarred entries are
// filled: Gamma^{cbar}_{Abar Bbar} = conj(Gamma^c_{AB}).
void fill_conjugate_families(Tensor3c& g, int n) {
    for (int k = 0; k < n; ++k)
        for (int a = 0; a < 2 * n; ++a)
            for (int b = 0; b < 2 * n; ++b)
                g(k + n, conj_index(a, n), conj_index(b, n)) = std::conj(g(k, a, b));
}

// Analytic position derivatives of the Christoffel tables by the product rule
// through the family assembly: the assembly is separately linear in the
// first-derivative tables and in h_inv, so
//   d(Gamma) = assemble(dA, dB, Hinv) + assemble(A, B, dHinv).
std::vector<Tensor3c> dgamma_analytic(Flavor flavor, const MetricPartials& mp) {
    const int n = static_cast<int>(mp.h.rows());
    const std::vector<CMat>& A = mp.dz;
    const std::vector<CMat>& B = mp.dzbar;
    const CMat& Hinv = mp.h_inv;
    const auto& C = mp.d2.zz;     // C[k][l] = d2 H / dz^k dz^l
    const auto& D = mp.d2.zzbar;  // D[k][l] = d2 H / dz^k dzbar^l

    // Unbarred-upper derivative blocks for every direction m.
    std::vector<Tensor3c> raw(2 * n, Tensor3c(2 * n));
    std::vector<CMat> dA(n), dB(n);
    for (int m = 0; m < 2 * n; ++m) {
        CMat dHinv;
        if (m < n) {
            for (int j = 0; j < n; ++j) {
                dA[j] = C[m][j];
                dB[j] = D[m][j];
            }
            dHinv = -Hinv * A[m] * Hinv;
        } else {
            const int mb = m - n;
            for (int j = 0; j < n; ++j) {
                dA[j] = D[j][mb];
                dB[j] = C[mb][j].adjoint();
            }
            dHinv = -Hinv * B[mb] * Hinv;
        }
        christoffel_assemble_unbarred(flavor, dA, dB, Hinv, raw[m]);
        christoffel_assemble_unbarred(flavor, A, B, dHinv, raw[m]);
    }

    // Barred-upper blocks: d_m Gamma^{kbar}_{AB} = conj(d_{conj m} Gamma^k_{Abar Bbar}).
    std::vector<Tensor3c> out(2 * n, Tensor3c(2 * n));
    for (int m = 0; m < 2 * n; ++m) {
        const Tensor3c& cm = raw[conj_index(m, n)];
        for (int k = 0; k < n; ++k)
            for (int a = 0; a < 2 * n; ++a)
                for (int b = 0; b < 2 * n; ++b) {
                    out[m](k, a, b) = raw[m](k, a, b);
                    out[m](k + n, a, b) =
                        std::conj(cm(k, conj_index(a, n), conj_index(b, n)));
                }
    }
    return out;
}

// Nested central differences of the full table when second derivatives of h
// are unavailable.
std::vector<Tensor3c> dgamma_fd(Flavor flavor, const MetricModel& model,
                                const ChartPoint& p) {
    const int n = model.n;
    const double step = model.fd_step2 * std::max(1.0, p.chart_norm());
    auto table_at = [&](int dir, int s) {
        ChartPoint q = p;
        q.z[dir % n] += static_cast<double>(s) *
                        (dir < n ? cplx(step, 0.0) : cplx(0.0, step));
        if (!model.in_domain(q))
            throw DomainError(model.spec +
                              ": Christoffel finite-difference stencil exits domain");
        MetricPartials mp = metric_partials(model, q, false);
        return christoffel_table(flavor, mp);
    };
    std::vector<Tensor3c> out(2 * n, Tensor3c(2 * n));
    for (int k = 0; k < n; ++k) {
        const Tensor3c xp = table_at(k, +1), xm = table_at(k, -1);
        const Tensor3c yp = table_at(k + n, +1), ym = table_at(k + n, -1);
        for (int c = 0; c < 2 * n; ++c)
            for (int a = 0; a < 2 * n; ++a)
                for (int b = 0; b < 2 * n; ++b) {
                    const cplx gx = (xp(c, a, b) - xm(c, a, b)) / (2.0 * step);
                    const cplx gy = (yp(c, a, b) - ym(c, a, b)) / (2.0 * step);
                    out[k](c, a, b) = 0.5 * (gx - kI * gy);
                    out[k + n](c, a, b) = 0.5 * (gx + kI * gy);
                }
    }
    return out;
}

} // namespace

GammaWithDerivs christoffel_with_derivs(Flavor flavor, const MetricModel& model,
                                        const ChartPoint& p) {
    GammaWithDerivs out;
    if (model.has_analytic_d2h()) {
        MetricPartials mp = metric_partials(model, p, true);
        out.gamma = christoffel_table(flavor, mp);
        out.dgamma = dgamma_analytic(flavor, mp);
    } else {
        MetricPartials mp = metric_partials(model, p, false);
        out.gamma = christoffel_table(flavor, mp);
        out.dgamma = dgamma_fd(flavor, model, p);
    }
    return out;
}

CurvatureField curvature(Flavor flavor, const MetricModel& model,
                         const ChartPoint& p) {
    return curvature_from_tables(flavor, model, p,
                                 christoffel_with_derivs(flavor, model, p));
}

CurvatureField curvature_from_tables(Flavor flavor, const MetricModel& model,
                                     const ChartPoint& p,
                                     const GammaWithDerivs& gd) {
    const int n = model.n;
    const int d = 2 * n;
    const Tensor3c& g = gd.gamma;

    CurvatureField out;
    out.flavor = flavor;
    out.n = n;
    out.point = p;
    {
        MetricEval ev = eval_metric(model, p);
        out.h = std::move(ev.h);
        out.h_inv = std::move(ev.h_inv);
        out.g_real = std::move(ev.g_real);
        out.g_real_inv = out.g_real.inverse();
    }
    out.r = Tensor4c(d);

    std::vector<cplx> rup(d);
    for (int a = 0; a < d; ++a) {
        for (int b = 0; b < d; ++b) {
            for (int c = 0; c < d; ++c) {
                for (int e = 0; e < d; ++e) {
                    cplx acc = gd.dgamma[a](e, b, c) - gd.dgamma[b](e, a, c);
                    for (int f = 0; f < d; ++f)
                        acc += g(e, a, f) * g(f, b, c) - g(e, b, f) * g(f, a, c);
                    rup[e] = acc;
                }
                // Lower the last slot with the C-bilinear metric:
                // g(d/dz^e, d/dzbar^l) = h(e,l), g(d/dzbar^e, d/dz^l) = h(l,e).
                for (int l = 0; l < n; ++l) {
                    cplx low(0.0), lowb(0.0);
                    for (int e = 0; e < n; ++e) {
                        low += rup[e + n] * out.h(l, e);
                        lowb += rup[e] * out.h(e, l);
                    }
                    out.r(a, b, c, l) = low;
                    out.r(a, b, c, l + n) = lowb;
                }
            }
        }
    }
    return out;
}

cplx CurvatureField::eval_c(const CVec& xc, const CVec& yc, const CVec& zc,
                            const CVec& wc) const {
    const int d = 2 * n;
    cplx acc(0.0);
    for (int a = 0; a < d; ++a) {
        if (xc[a] == cplx(0.0)) continue;
        for (int b = 0; b < d; ++b) {
            if (yc[b] == cplx(0.0)) continue;
            const cplx xy = xc[a] * yc[b];
            for (int c = 0; c < d; ++c) {
                if (zc[c] == cplx(0.0)) continue;
                const cplx xyz = xy * zc[c];
                for (int e = 0; e < d; ++e) {
                    const cplx rr = r(a, b, c, e);
                    if (rr != cplx(0.0)) acc += rr * xyz * wc[e];
                }
            }
        }
    }
    return acc;
}

double CurvatureField::eval(const TangentVector& x, const TangentVector& y,
                            const TangentVector& z, const TangentVector& w) const {
    return eval_c(x.complexified(), y.complexified(), z.complexified(),
                  w.complexified())
        .real();
}

namespace {

// S(A,D) = sum_{B,C} r(A,B,C,D) X^B Y^C for fixed middle slots.
CMat middle_contraction(const CurvatureField& f, const CVec& xc, const CVec& yc) {
    const int d = 2 * f.n;
    CMat s = CMat::Zero(d, d);
    for (int b = 0; b < d; ++b) {
        if (xc[b] == cplx(0.0)) continue;
        for (int c = 0; c < d; ++c) {
            if (yc[c] == cplx(0.0)) continue;
            const cplx xy = xc[b] * yc[c];
            for (int a = 0; a < d; ++a)
                for (int e = 0; e < d; ++e) s(a, e) += f.r(a, b, c, e) * xy;
        }
    }
    return s;
}

cplx complexified_ricci_from(const CurvatureField& f, const CMat& s) {
    const int n = f.n;
    cplx acc(0.0);
    // h^{i lbar} S(i, lbar) + h^{l ibar} S(ibar, l); h^{k lbar} = h_inv(l,k).
    for (int i = 0; i < n; ++i)
        for (int l = 0; l < n; ++l)
            acc += f.h_inv(l, i) * s(i, l + n) + f.h_inv(i, l) * s(i + n, l);
    return acc;
}

} // namespace

double ricci_real_sb(const CurvatureField& f, const TangentVector& x,
                     const TangentVector& y) {
    const CMat s = middle_contraction(f, x.complexified(), y.complexified());
    return complexified_ricci_from(f, s).real();
}

RicciCrossCheck ricci_real_cross_check(const CurvatureField& f,
                                       const TangentVector& x,
                                       const TangentVector& y) {
    const int n = f.n;
    const int d = 2 * n;
    const CMat s = middle_contraction(f, x.complexified(), y.complexified());

    const cplx complexified = complexified_ricci_from(f, s);

    // Real-basis sum g^{ab} R(d/dx^a, X, Y, d/dx^b) via the complexified
    // components of the coordinate vectors.
    std::vector<CVec> basis(d, CVec::Zero(d));
    for (int i = 0; i < n; ++i) {
        basis[i][i] = 1.0;
        basis[i][i + n] = 1.0;
        basis[i + n][i] = kI;
        basis[i + n][i + n] = -kI;
    }
    cplx real_sum(0.0);
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) {
            if (f.g_real_inv(a, b) == 0.0) continue;
            cplx rab(0.0);
            for (int aa = 0; aa < d; ++aa) {
                if (basis[a][aa] == cplx(0.0)) continue;
                for (int ee = 0; ee < d; ++ee)
                    rab += basis[a][aa] * basis[b][ee] * s(aa, ee);
            }
            real_sum += f.g_real_inv(a, b) * rab;
        }

    return {real_sum.real(), complexified.real(),
            std::max(std::abs(real_sum.imag()), std::abs(complexified.imag()))};
}

HolRicciResult ricci_hol_sb(const CurvatureField& f, const CVec& v10) {
    const int n = f.n;
    CVec vbar = CVec::Zero(2 * n), v = CVec::Zero(2 * n);
    v.head(n) = v10;
    vbar.tail(n) = v10.conjugate();
    const CMat s = middle_contraction(f, vbar, v);
    cplx acc(0.0);
    for (int i = 0; i < n; ++i)
        for (int l = 0; l < n; ++l) acc += f.h_inv(l, i) * s(i, l + n);
    return {acc.real(), std::abs(acc.imag())};
}

HolRicciResult ricci_hol_sb_alt(const CurvatureField& f, const CVec& v10) {
    const int n = f.n;
    CVec vbar = CVec::Zero(2 * n), v = CVec::Zero(2 * n);
    v.head(n) = v10;
    vbar.tail(n) = v10.conjugate();
    const CMat s = middle_contraction(f, v, vbar);
    cplx acc(0.0);
    for (int i = 0; i < n; ++i)
        for (int l = 0; l < n; ++l) acc += f.h_inv(l, i) * s(i, l + n);
    return {acc.real(), std::abs(acc.imag())};
}

double hsc_sb(const CurvatureField& f, const TangentVector& x) {
    const double n2 = g_norm2(f.h, x);
    if (n2 <= 0.0 || x.x.norm() == 0.0)
        throw ZeroVector("hsc_sb: zero direction vector");
    const TangentVector jx = apply_J(x);
    const double num = f.eval(jx, x, x, jx);
    return num / (n2 * n2);
}

BalancedIdentityReport balanced_identities(const MetricModel& model,
                                           std::span<const ChartPoint> points) {
    BalancedIdentityReport rep;
    const int n = model.n;
    for (const ChartPoint& p : points) {
        const CurvatureField f = curvature(Flavor::SB, model, p);
        // M_{jk} = h^{i lbar} R_{i jbar k lbar}; N_{jk} = h^{i lbar} R_{i j k lbar}.
        CMat m = CMat::Zero(n, n), nn = CMat::Zero(n, n);
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                cplx am(0.0), an(0.0);
                for (int i = 0; i < n; ++i)
                    for (int l = 0; l < n; ++l) {
                        am += f.h_inv(l, i) * f.r(i, j + n, k, l + n);
                        an += f.h_inv(l, i) * f.r(i, j, k, l + n);
                    }
                m(j, k) = am;
                nn(j, k) = an;
            }

        BalancedIdentityReport::Sample s{};
        s.mixed_contraction_norm = nn.cwiseAbs().maxCoeff();
        s.hermitian_resid = (m - m.adjoint()).cwiseAbs().maxCoeff();
        s.trace_torsion_norm = trace_torsion(model, p).norm();

        // Ric(X,X) = 2 M_{jk} X^k conj(X^j) over a small fixed direction set.
        double worst = 0.0;
        for (int dir = 0; dir < 2 * n; ++dir) {
            RVec xv = RVec::Zero(2 * n);
            xv[dir] = 1.0;
            if (dir + 1 < 2 * n) xv[dir + 1] = 0.5;
            const TangentVector x(xv);
            const CVec v = x.v10();
            cplx quad(0.0);
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k) quad += m(j, k) * v[k] * std::conj(v[j]);
            const double ric = ricci_real_sb(f, x, x);
            worst = std::max(worst, std::abs(cplx(ric, 0.0) - 2.0 * quad));
        }
        s.ric_identity_resid = worst;

        rep.samples.push_back(s);
        rep.max_ric_identity_resid =
            std::max(rep.max_ric_identity_resid, s.ric_identity_resid);
        rep.max_mixed_contraction =
            std::max(rep.max_mixed_contraction, s.mixed_contraction_norm);
        rep.max_hermitian_resid = std::max(rep.max_hermitian_resid, s.hermitian_resid);
        rep.max_trace_torsion = std::max(rep.max_trace_torsion, s.trace_torsion_norm);
    }
    return rep;
}

} // namespace sbgeo
