#include "sbgeo/registry.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <sstream>

#include "sbgeo/curvature.hpp"

namespace sbgeo {

using json = nlohmann::json;

namespace {

int check_n(const json& params, int max_n = 4) {
    if (!params.contains("n")) throw BadParams("model params: missing n");
    const int n = params.at("n").get<int>();
    if (n < 1 || n > max_n)
        throw BadParams("model params: n out of supported range [1," +
                        std::to_string(max_n) + "]");
    return n;
}

MetricModel make_flat(int n) {
    MetricModel m;
    m.n = n;
    m.domain = [](const ChartPoint&) { return true; };
    m.h = [n](const ChartPoint&) { return CMat::Identity(n, n); };
    m.dh = [n](const ChartPoint&) {
        return std::vector<CMat>(n, CMat::Zero(n, n));
    };
    m.d2h = [n](const ChartPoint&) {
        MetricSecondDerivs d2;
        d2.zz.assign(n, std::vector<CMat>(n, CMat::Zero(n, n)));
        d2.zzbar = d2.zz;
        return d2;
    };
    m.tags = {true, true};
    m.sample_point = [n](const std::function<double()>& u) {
        CVec z(n);
        for (int i = 0; i < n; ++i)
            z[i] = cplx(2.0 * u() - 1.0, 2.0 * u() - 1.0);
        return ChartPoint(z);
    };
    return m;
}

// Fubini-Study h_{i jbar} = s (delta_ij / Q - zbar^i z^j / Q^2), Q = 1+|z|^2.
CMat fs_h(const CVec& z, double s) {
    const int n = static_cast<int>(z.size());
    const double q = 1.0 + z.squaredNorm();
    CMat h = CMat::Identity(n, n) / q;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            h(i, j) -= std::conj(z[i]) * z[j] / (q * q);
    return s * h;
}

std::vector<CMat> fs_dh(const CVec& z, double s) {
    const int n = static_cast<int>(z.size());
    const double q = 1.0 + z.squaredNorm();
    const double q2 = q * q, q3 = q2 * q;
    std::vector<CMat> dz(n, CMat::Zero(n, n));
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                cplx v = 2.0 * std::conj(z[i]) * z[j] * std::conj(z[k]) / q3;
                if (i == j) v -= std::conj(z[k]) / q2;
                if (j == k) v -= std::conj(z[i]) / q2;
                dz[k](i, j) = s * v;
            }
    return dz;
}

MetricSecondDerivs fs_d2h(const CVec& z, double s) {
    const int n = static_cast<int>(z.size());
    const double q = 1.0 + z.squaredNorm();
    const double q2 = q * q, q3 = q2 * q, q4 = q3 * q;
    MetricSecondDerivs d2;
    d2.zz.assign(n, std::vector<CMat>(n, CMat::Zero(n, n)));
    d2.zzbar.assign(n, std::vector<CMat>(n, CMat::Zero(n, n)));
    for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    const cplx zi = std::conj(z[i]), zk = std::conj(z[k]),
                               zl = std::conj(z[l]);
                    cplx holo = -6.0 * zi * z[j] * zk * zl / q4;
                    if (i == j) holo += 2.0 * zk * zl / q3;
                    if (j == k) holo += 2.0 * zi * zl / q3;
                    if (j == l) holo += 2.0 * zi * zk / q3;
                    d2.zz[k][l](i, j) = s * holo;

                    cplx mixed = -6.0 * zi * z[j] * zk * z[l] / q4 +
                                 2.0 * (zi * z[j] * (k == l ? 1.0 : 0.0) +
                                        (i == l ? 1.0 : 0.0) * z[j] * zk) /
                                     q3 +
                                 2.0 * ((i == j ? 1.0 : 0.0) * zk +
                                        (j == k ? 1.0 : 0.0) * zi) *
                                     z[l] / q3;
                    if (i == j && k == l) mixed -= 1.0 / q2;
                    if (j == k && i == l) mixed -= 1.0 / q2;
                    d2.zzbar[k][l](i, j) = s * mixed;
                }
    return d2;
}

MetricModel make_fubini_study(int n, double scale) {
    if (!(scale > 0.0)) throw BadParams("fubini_study: scale must be positive");
    MetricModel m;
    m.n = n;
    m.domain = [](const ChartPoint& p) { return p.chart_norm() < 1.0e3; };
    m.h = [scale](const ChartPoint& p) { return fs_h(p.z, scale); };
    m.dh = [scale](const ChartPoint& p) { return fs_dh(p.z, scale); };
    m.d2h = [scale](const ChartPoint& p) { return fs_d2h(p.z, scale); };
    m.tags = {true, true};
    m.sample_point = [n](const std::function<double()>& u) {
        CVec z(n);
        for (int i = 0; i < n; ++i)
            z[i] = cplx(1.6 * u() - 0.8, 1.6 * u() - 0.8);
        return ChartPoint(z);
    };
    return m;
}

MetricModel make_hopf(int n) {
    MetricModel m;
    m.n = n;
    m.domain = [](const ChartPoint& p) {
        const double r = p.chart_norm();
        return r >= 0.1 && r <= 10.0;
    };
    m.h = [n](const ChartPoint& p) {
        return CMat(CMat::Identity(n, n) / p.z.squaredNorm());
    };
    m.dh = [n](const ChartPoint& p) {
        const double w = p.z.squaredNorm();
        std::vector<CMat> dz(n);
        for (int k = 0; k < n; ++k)
            dz[k] = CMat(-std::conj(p.z[k]) / (w * w) * CMat::Identity(n, n));
        return dz;
    };
    m.d2h = [n](const ChartPoint& p) {
        const double w = p.z.squaredNorm();
        const double w2 = w * w, w3 = w2 * w;
        MetricSecondDerivs d2;
        d2.zz.assign(n, std::vector<CMat>(n));
        d2.zzbar.assign(n, std::vector<CMat>(n));
        for (int k = 0; k < n; ++k)
            for (int l = 0; l < n; ++l) {
                d2.zz[k][l] = CMat(2.0 * std::conj(p.z[k]) * std::conj(p.z[l]) / w3 *
                                   CMat::Identity(n, n));
                cplx c = 2.0 * std::conj(p.z[k]) * p.z[l] / w3;
                if (k == l) c -= 1.0 / w2;
                d2.zzbar[k][l] = CMat(c * CMat::Identity(n, n));
            }
        return d2;
    };
    m.tags = {false, false};
    m.injectivity_bound = 0.5;
    m.sample_point = [n](const std::function<double()>& u) {
        for (;;) {
            CVec z(n);
            for (int i = 0; i < n; ++i)
                z[i] = cplx(3.0 * u() - 1.5, 3.0 * u() - 1.5);
            const double r = z.norm();
            if (r >= 0.3 && r <= 2.5) return ChartPoint(z);
        }
    };
    return m;
}

// FS plus a diagonal real-linear perturbation eps * delta_ij * Re z^{sigma(i)},
// sigma cycling through the coordinates; non-Kahler and non-balanced for
// n >= 2, positive definite on |z| < 1 for eps <= 0.2.
MetricModel make_fs_perturbed(int n, double eps) {
    if (eps < 0.0 || eps > 0.2)
        throw BadParams("fs_perturbed: eps must lie in [0, 0.2]");
    auto sigma = [n](int i) { return (i + 1) % n; };
    MetricModel m;
    m.n = n;
    m.domain = [](const ChartPoint& p) { return p.chart_norm() < 1.0; };
    m.h = [n, eps, sigma](const ChartPoint& p) {
        CMat h = fs_h(p.z, 1.0);
        for (int i = 0; i < n; ++i) h(i, i) += eps * p.z[sigma(i)].real();
        return h;
    };
    m.dh = [n, eps, sigma](const ChartPoint& p) {
        std::vector<CMat> dz = fs_dh(p.z, 1.0);
        for (int i = 0; i < n; ++i) dz[sigma(i)](i, i) += 0.5 * eps;
        return dz;
    };
    // The perturbation is linear in (z, zbar): second derivatives are FS's.
    m.d2h = [](const ChartPoint& p) { return fs_d2h(p.z, 1.0); };
    m.tags = {eps == 0.0, eps == 0.0};
    m.injectivity_bound = 0.5;
    m.sample_point = [n](const std::function<double()>& u) {
        for (;;) {
            CVec z(n);
            for (int i = 0; i < n; ++i) z[i] = cplx(u() - 0.5, u() - 0.5);
            if (z.norm() <= 0.7) return ChartPoint(z);
        }
    };
    return m;
}

} // namespace

MetricModel make_model(const std::string& name, const json& params) {
    MetricModel m;
    if (name == "flat") {
        m = make_flat(check_n(params));
    } else if (name == "fubini_study") {
        const int n = check_n(params);
        const double scale = params.value("scale", 1.0);
        m = make_fubini_study(n, scale);
        // Conservative injectivity bound pi/(2 sqrt(K)) * 0.95 with K probed
        // from the holomorphic sectional curvature (constant for FS).
        ChartPoint probe(CVec::Zero(n));
        RVec dir = RVec::Zero(2 * n);
        dir[0] = 1.0;
        const double k = hsc_sb(curvature(Flavor::SB, m, probe), TangentVector(dir));
        m.injectivity_bound = 0.95 * M_PI / (2.0 * std::sqrt(k));
    } else if (name == "hopf") {
        m = make_hopf(check_n(params));
    } else if (name == "fs_perturbed") {
        const int n = check_n(params);
        m = make_fs_perturbed(n, params.value("eps", 0.1));
    } else {
        throw UnknownModel("unknown model name: " + name);
    }
    if (params.contains("fd_step")) m.fd_step = params.at("fd_step").get<double>();

    std::ostringstream os;
    os << name << "(" << m.n;
    if (name == "fubini_study") os << "," << params.value("scale", 1.0);
    if (name == "fs_perturbed") os << "," << params.value("eps", 0.1);
    os << ")";
    m.spec = os.str();
    return m;
}

MetricModel parse_model_spec(const std::string& spec) {
    const auto open = spec.find('(');
    std::string name = spec.substr(0, open);
    json params = json::object();
    std::vector<double> args;
    if (open != std::string::npos) {
        const auto close = spec.rfind(')');
        if (close == std::string::npos || close < open)
            throw BadParams("malformed model spec: " + spec);
        std::string inner = spec.substr(open + 1, close - open - 1);
        std::stringstream ss(inner);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            try {
                args.push_back(std::stod(tok));
            } catch (const std::exception&) {
                throw BadParams("malformed model argument '" + tok + "' in " + spec);
            }
        }
    }
    if (!args.empty()) params["n"] = static_cast<int>(args[0]);
    if (args.size() > 1) {
        if (name == "fubini_study") params["scale"] = args[1];
        else if (name == "fs_perturbed") params["eps"] = args[1];
        else throw BadParams("model " + name + " takes a single argument");
    }
    return make_model(name, params);
}

MetricModel model_from_json(const json& j) {
    if (!j.is_object() || !j.contains("name"))
        throw ConfigError("model config must be an object with a 'name'");
    for (const auto& [key, _] : j.items())
        if (key != "name" && key != "params" && key != "fd_step")
            throw ConfigError("model config: unknown key '" + key + "'");
    json params = j.value("params", json::object());
    if (j.contains("fd_step")) params["fd_step"] = j.at("fd_step").get<double>();
    return make_model(j.at("name").get<std::string>(), params);
}

ChartPoint random_domain_point(const MetricModel& model, RngStream& rs) {
    return model.sample_point([&rs] { return rs.uniform(); });
}

TangentVector random_tangent(int n, RngStream& rs) {
    RVec x(2 * n);
    for (int i = 0; i < 2 * n; ++i) x[i] = rs.symmetric();
    return TangentVector(std::move(x));
}

void verify_model(const MetricModel& model, int npoints, std::uint64_t seed) {
    CounterRng rng(seed);
    RngStream rs(rng, 0x5e1f);
    const int n = model.n;
    for (int k = 0; k < npoints; ++k) {
        const ChartPoint p = random_domain_point(model, rs);
        const MetricEval ev = eval_metric(model, p);  // Hermitian + PD checks

        // Complexification round-trip: rebuilding g_real from h must match.
        if ((real_metric_from_h(ev.h) - ev.g_real).norm() >
            1e-12 * std::max(1.0, ev.g_real.norm()))
            throw SingularMetric(model.spec + ": complexification round-trip failed");

        const TangentVector x = random_tangent(n, rs), y = random_tangent(n, rs);

        // g(JX, JY) = g(X, Y).
        const double gxy = g_real_pair(ev.h, x, y);
        if (std::abs(g_real_pair(ev.h, apply_J(x), apply_J(y)) - gxy) >
            1e-10 * std::max(1.0, std::abs(gxy)))
            throw SingularMetric(model.spec + ": J-invariance of g failed");

        // omega via complex coefficients vs the defining real formula.
        const double om_real = g_real_pair(ev.h, apply_J(x), y);
        const cplx om_cplx = omega_c(ev.h, x.complexified(), y.complexified());
        if (std::abs(om_cplx - om_real) > 1e-10 * std::max(1.0, std::abs(om_real)))
            throw SingularMetric(model.spec +
                                 ": omega complex/real evaluations disagree");
    }
    // Ricci cross-check (the factor conventions' likeliest failure point).
    const ChartPoint p = random_domain_point(model, rs);
    const CurvatureField f = curvature(Flavor::SB, model, p);
    const TangentVector x = random_tangent(n, rs), y = random_tangent(n, rs);
    const RicciCrossCheck rc = ricci_real_cross_check(f, x, y);
    const double scale = std::max(1.0, std::abs(rc.real_basis_sum));
    if (std::abs(rc.real_basis_sum - rc.complexified_sum) > 1e-8 * scale)
        throw SingularMetric(model.spec + ": Ricci real/complexified cross-check failed");
}

} // namespace sbgeo
