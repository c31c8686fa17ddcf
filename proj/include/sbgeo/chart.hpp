#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sbgeo/errors.hpp"
#include "sbgeo/linalg.hpp"

namespace sbgeo {

// A point in the single holomorphic chart, n complex coordinates.
struct ChartPoint {
    CVec z;

    ChartPoint() = default;
    explicit ChartPoint(CVec zz) : z(std::move(zz)) {}
    int n() const { return static_cast<int>(z.size()); }
    double chart_norm() const { return z.norm(); }
};

// Real tangent vector with components in the coordinate basis
// {d/dx^1..d/dx^n, d/dx^{n+1}..d/dx^{2n}}, where z^i = x^i + sqrt(-1) x^{i+n}.
//
// The (1,0)-view V^i satisfies X = V^i d/dz^i + conj(V^i) d/dzbar^i with
// V^i = x_i + sqrt(-1) x_{i+n}; reconstruction is exact by construction.
struct TangentVector {
    RVec x;

    TangentVector() = default;
    explicit TangentVector(RVec xx) : x(std::move(xx)) {}

    int n() const { return static_cast<int>(x.size()) / 2; }

    static TangentVector zero(int n) { return TangentVector(RVec::Zero(2 * n)); }

    static TangentVector from_v10(const CVec& v) {
        const int n = static_cast<int>(v.size());
        RVec x(2 * n);
        for (int i = 0; i < n; ++i) {
            x[i] = v[i].real();
            x[i + n] = v[i].imag();
        }
        return TangentVector(std::move(x));
    }

    CVec v10() const {
        const int m = n();
        CVec v(m);
        for (int i = 0; i < m; ++i) v[i] = cplx(x[i], x[i + m]);
        return v;
    }

    CVec v01() const { return v10().conjugate(); }

    // Components over the full complexified index set [0, 2n).
    CVec complexified() const {
        const int m = n();
        CVec c(2 * m);
        c.head(m) = v10();
        c.tail(m) = c.head(m).conjugate();
        return c;
    }
};

struct ModelTags {
    bool kahler_expected = false;
    bool balanced_expected = false;
};

// Analytic second derivatives of h, when the model supplies them.
struct MetricSecondDerivs {
    // zz[k][l](i,j)    = d^2 h_{i jbar} / dz^k dz^l   (symmetric in k,l)
    // zzbar[k][l](i,j) = d^2 h_{i jbar} / dz^k dzbar^l
    std::vector<std::vector<CMat>> zz;
    std::vector<std::vector<CMat>> zzbar;
};

// A Hermitian metric on one chart: dimension, domain predicate, the matrix
// evaluator h_{i jbar}(z), and optional analytic derivative suppliers.
struct MetricModel {
    int n = 1;
    std::string spec;  // registry spec string, e.g. "hopf(2)"

    std::function<bool(const ChartPoint&)> domain;
    std::function<CMat(const ChartPoint&)> h;

    // dh(p)[k](i,j) = d h_{i jbar} / dz^k; the dzbar-table follows from
    // Hermitian symmetry. Null when only finite differences are available.
    std::function<std::vector<CMat>(const ChartPoint&)> dh;
    std::function<MetricSecondDerivs(const ChartPoint&)> d2h;

    double fd_step = 1e-5;   // relative step for first derivatives
    double fd_step2 = 1e-4;  // relative step for second derivatives
    ModelTags tags;

    // Geodesic experiments refuse to claim minimality past this length.
    double injectivity_bound = std::numeric_limits<double>::infinity();

    // Seeded sampler of domain points (set by the registry).
    std::function<ChartPoint(const std::function<double()>&)> sample_point;

    bool has_analytic_dh() const { return static_cast<bool>(dh); }
    bool has_analytic_d2h() const { return static_cast<bool>(d2h); }

    bool in_domain(const ChartPoint& p) const { return !domain || domain(p); }
    void require_domain(const ChartPoint& p) const;
};

struct MetricEval {
    CMat h;       // n x n Hermitian
    CMat h_inv;   // n x n, h_inv * h = I
    RMat g_real;  // 2n x 2n symmetric positive definite
};

// Evaluate h and the induced real metric. The normalization is fixed once:
// g(d/dx^i, d/dx^j) = 2 Re h_{i jbar}, so g(d/dz^i, d/dzbar^j) = h_{i jbar}.
MetricEval eval_metric(const MetricModel& model, const ChartPoint& p);

// Real metric blocks from h under the fixed normalization (no checks).
RMat real_metric_from_h(const CMat& h);

struct MetricPartials {
    CMat h;
    CMat h_inv;
    std::vector<CMat> dz;     // dz[k](i,j)    = d h_{i jbar} / dz^k
    std::vector<CMat> dzbar;  // dzbar[k](i,j) = d h_{i jbar} / dzbar^k
    MetricSecondDerivs d2;    // filled only when need_second
    bool has_second = false;
};

// First (and optionally second) derivatives of h at p: analytic evaluators
// when the model has them, central finite differences otherwise. FD stencils
// that exit the domain raise DomainError.
MetricPartials metric_partials(const MetricModel& model, const ChartPoint& p,
                               bool need_second = false);

// C-bilinear extension of g to complexified vectors (components over the
// index set [0,2n)): g(d/dz^i, d/dz^j) = 0, g(d/dz^i, d/dzbar^j) = h_{i jbar}.
cplx g_bilinear_c(const CMat& h, const CVec& xc, const CVec& yc);

// g on real tangent vectors (equals the C-bilinear value, which is real).
double g_real_pair(const CMat& h, const TangentVector& x, const TangentVector& y);

// |X|_g^2 = g(X, X) >= 0.
double g_norm2(const CMat& h, const TangentVector& x);

struct PairingResult {
    double g_real_val;
    cplx g_bilinear;
    double norm2;  // |X|^2
};

PairingResult pairings(const MetricModel& model, const ChartPoint& p,
                       const TangentVector& x, const TangentVector& y);

// Complex structure J: d/dx^i -> d/dx^{i+n}, d/dx^{i+n} -> -d/dx^i.
TangentVector apply_J(const TangentVector& x);

// J on complexified components: multiplies the (1,0) block by i and the
// (0,1) block by -i.
CVec apply_J_c(const CVec& xc);

// Fundamental form omega(X,Y) = g(JX, Y).
double fundamental_form(const MetricModel& model, const ChartPoint& p,
                        const TangentVector& x, const TangentVector& y);

// omega via the complex-coordinate expression i h_{i jbar} dz^i wedge dzbar^j;
// agreement with fundamental_form is a model self-test.
cplx omega_c(const CMat& h, const CVec& xc, const CVec& yc);

// Exterior derivative of omega evaluated on three complexified vectors, from
// the coefficient formula d(i h_{i jbar} dz^i wedge dzbar^j).
cplx d_omega_c(const MetricPartials& mp, const CVec& xc, const CVec& yc,
               const CVec& zc);

double d_omega(const MetricModel& model, const ChartPoint& p,
               const TangentVector& x, const TangentVector& y,
               const TangentVector& z);

} // namespace sbgeo
