#include "sbgeo/connections.hpp"

namespace sbgeo {

// Fill the upper-unbarred families of the Christoffel table from the local
// formulas (h^{k lbar} = h_inv(l, k)):
//   LC: Gamma^k_{ij}    = 1/2 h^{k lbar} (dh_{i lbar}/dz^j + dh_{j lbar}/dz^i)
//       Gamma^k_{i jbar} = Gamma^k_{jbar i}
//                        = 1/2 h^{k lbar} (dh_{i lbar}/dzbar^j - dh_{i jbar}/dzbar^l)
//   SB: Gamma^k_{ij}    = h^{k lbar} dh_{i lbar}/dz^j
//       Gamma^k_{jbar i} = h^{k lbar} (dh_{i lbar}/dzbar^j - dh_{i jbar}/dzbar^l)
void christoffel_assemble_unbarred(Flavor flavor, const std::vector<CMat>& dz,
                                   const std::vector<CMat>& dzbar,
                                   const CMat& h_inv, Tensor3c& g) {
    const int n = static_cast<int>(h_inv.rows());
    for (int k = 0; k < n; ++k) {
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                cplx holo(0.0), mixed(0.0);
                for (int l = 0; l < n; ++l) {
                    const cplx hik = h_inv(l, k);
                    if (flavor == Flavor::LC) {
                        holo += 0.5 * hik * (dz[j](i, l) + dz[i](j, l));
                        mixed += 0.5 * hik * (dzbar[j](i, l) - dzbar[l](i, j));
                    } else {
                        holo += hik * dz[j](i, l);
                        mixed += hik * (dzbar[j](i, l) - dzbar[l](i, j));
                    }
                }
                g(k, i, j) += holo;
                g(k, j + n, i) += mixed;          // Gamma^k_{jbar i}
                if (flavor == Flavor::LC)
                    g(k, i, j + n) += mixed;      // LC symmetric lower indices
            }
        }
    }
}

Tensor3c christoffel_table(Flavor flavor, const MetricPartials& mp) {
    const int n = static_cast<int>(mp.h.rows());
    Tensor3c g(2 * n);
    christoffel_assemble_unbarred(flavor, mp.dz, mp.dzbar, mp.h_inv, g);
    // Conjugation symmetry Gamma^{cbar}_{Abar Bbar} = conj(Gamma^c_{AB}).
    for (int k = 0; k < n; ++k)
        for (int a = 0; a < 2 * n; ++a)
            for (int b = 0; b < 2 * n; ++b)
                g(k + n, conj_index(a, n), conj_index(b, n)) = std::conj(g(k, a, b));
    return g;
}

CVec ConnectionField::covariant_contract(const CVec& dir_c,
                                         const CVec& field_c) const {
    const int d = 2 * n;
    CVec out = CVec::Zero(d);
    for (int c = 0; c < d; ++c) {
        cplx acc(0.0);
        for (int a = 0; a < d; ++a) {
            if (dir_c[a] == cplx(0.0)) continue;
            for (int b = 0; b < d; ++b) {
                const cplx gab = gamma(c, a, b);
                if (gab != cplx(0.0)) acc += gab * dir_c[a] * field_c[b];
            }
        }
        out[c] = acc;
    }
    return out;
}

ConnectionField christoffel(Flavor flavor, const MetricModel& model,
                            const ChartPoint& p) {
    MetricPartials mp = metric_partials(model, p, false);
    ConnectionField out;
    out.flavor = flavor;
    out.n = model.n;
    out.point = p;
    out.gamma = christoffel_table(flavor, mp);
    out.h = std::move(mp.h);
    out.h_inv = std::move(mp.h_inv);
    return out;
}

TorsionField torsion_sb(const MetricModel& model, const ChartPoint& p) {
    MetricPartials mp = metric_partials(model, p, false);
    const int n = model.n;
    TorsionField out;
    out.n = n;
    out.point = p;
    out.t = Tensor3c(2 * n);
    out.h = mp.h;
    // Full complexified (1,2) torsion T^C_{AB} = Gamma^C_{AB} - Gamma^C_{BA}
    // (coordinate fields commute). The generator block reduces to the display
    // T^k_{ij} = h^{k lbar} (dh_{i lbar}/dz^j - dh_{j lbar}/dz^i); lowering
    // kills the (3,0) and (0,3) parts, leaving the two generator families.
    const Tensor3c g = christoffel_table(Flavor::SB, mp);
    for (int c = 0; c < 2 * n; ++c)
        for (int a = 0; a < 2 * n; ++a)
            for (int b = 0; b < 2 * n; ++b) out.t(c, a, b) = g(c, a, b) - g(c, b, a);
    return out;
}

cplx TorsionField::value_c(const CVec& xc, const CVec& yc, const CVec& zc) const {
    // W = T(X,Y) by table contraction, lowered against Z with the C-bilinear g.
    CVec w = CVec::Zero(2 * n);
    for (int c = 0; c < 2 * n; ++c) {
        cplx acc(0.0);
        for (int a = 0; a < 2 * n; ++a) {
            if (xc[a] == cplx(0.0)) continue;
            for (int b = 0; b < 2 * n; ++b) {
                const cplx tt = t(c, a, b);
                if (tt != cplx(0.0)) acc += tt * xc[a] * yc[b];
            }
        }
        w[c] = acc;
    }
    return g_bilinear_c(h, w, zc);
}

double TorsionField::value(const TangentVector& x, const TangentVector& y,
                           const TangentVector& z) const {
    return value_c(x.complexified(), y.complexified(), z.complexified()).real();
}

TraceTorsion trace_torsion(const MetricModel& model, const ChartPoint& p) {
    const TorsionField tf = torsion_sb(model, p);
    TraceTorsion out;
    out.eta = CVec::Zero(model.n);
    for (int k = 0; k < model.n; ++k) {
        cplx acc(0.0);
        for (int s = 0; s < model.n; ++s) acc += tf.t(s, s, k);
        out.eta[k] = acc;
    }
    return out;
}

DefiningRelationResiduals defining_relation_residuals(const MetricModel& model,
                                                      const ChartPoint& p,
                                                      const TangentVector& x,
                                                      const TangentVector& y,
                                                      const TangentVector& z) {
    MetricPartials mp = metric_partials(model, p, false);
    const Tensor3c glc = christoffel_table(Flavor::LC, mp);
    const Tensor3c gsb = christoffel_table(Flavor::SB, mp);
    const int n = model.n;

    ConnectionField lc{Flavor::LC, n, p, glc, mp.h, mp.h_inv};
    ConnectionField sb{Flavor::SB, n, p, gsb, mp.h, mp.h_inv};

    const CVec xc = x.complexified(), yc = y.complexified(), zc = z.complexified();
    const CVec dsb = sb.covariant_contract(xc, yc);
    const CVec dlc = lc.covariant_contract(xc, yc);
    const cplx lhs = g_bilinear_c(mp.h, dsb - dlc, zc);
    const cplx dom = d_omega_c(mp, apply_J_c(xc), apply_J_c(yc), apply_J_c(zc));

    const TorsionField tf = torsion_sb(model, p);
    const cplx tor = tf.value_c(xc, yc, zc);

    return {std::abs(lhs - 0.5 * dom), std::abs(tor - dom)};
}

} // namespace sbgeo
