#pragma once

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace sbgeo {

using cplx = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;

inline constexpr cplx kI{0.0, 1.0};

// Complexified index set {1..n, 1bar..nbar} is flattened to [0, 2n):
// a < n addresses d/dz^a, a >= n addresses d/dzbar^(a-n).
inline int conj_index(int a, int n) { return a < n ? a + n : a - n; }
inline bool is_barred(int a, int n) { return a >= n; }

// Dense rank-3 tensor over the complexified index set, zero-initialized.
class Tensor3c {
public:
    Tensor3c() = default;
    explicit Tensor3c(int d) : d_(d), v_(static_cast<std::size_t>(d) * d * d, cplx(0.0)) {}

    cplx& operator()(int a, int b, int c) {
        return v_[(static_cast<std::size_t>(a) * d_ + b) * d_ + c];
    }
    cplx operator()(int a, int b, int c) const {
        return v_[(static_cast<std::size_t>(a) * d_ + b) * d_ + c];
    }

    int dim() const { return d_; }

    double max_abs() const {
        double m = 0.0;
        for (const cplx& x : v_) m = std::max(m, std::abs(x));
        return m;
    }

    Tensor3c& operator+=(const Tensor3c& o) {
        for (std::size_t i = 0; i < v_.size(); ++i) v_[i] += o.v_[i];
        return *this;
    }

private:
    int d_ = 0;
    std::vector<cplx> v_;
};

// Dense rank-4 tensor over the complexified index set, zero-initialized.
class Tensor4c {
public:
    Tensor4c() = default;
    explicit Tensor4c(int d)
        : d_(d), v_(static_cast<std::size_t>(d) * d * d * d, cplx(0.0)) {}

    cplx& operator()(int a, int b, int c, int e) {
        return v_[((static_cast<std::size_t>(a) * d_ + b) * d_ + c) * d_ + e];
    }
    cplx operator()(int a, int b, int c, int e) const {
        return v_[((static_cast<std::size_t>(a) * d_ + b) * d_ + c) * d_ + e];
    }

    int dim() const { return d_; }

    double max_abs() const {
        double m = 0.0;
        for (const cplx& x : v_) m = std::max(m, std::abs(x));
        return m;
    }

private:
    int d_ = 0;
    std::vector<cplx> v_;
};

// Composite Simpson rule over uniformly spaced samples (n nodes, spacing h).
// Odd interval counts are handled with a 3/8 tail so no grid is rejected.
inline double simpson(std::span<const double> f, double h) {
    const int nodes = static_cast<int>(f.size());
    if (nodes < 2) return 0.0;
    if (nodes == 2) return 0.5 * h * (f[0] + f[1]);
    int intervals = nodes - 1;
    double total = 0.0;
    int last = intervals;
    if (intervals % 2 != 0) {
        // Simpson 3/8 on the final three intervals.
        last = intervals - 3;
        const double* p = f.data() + last;
        total += 3.0 * h / 8.0 * (p[0] + 3.0 * p[1] + 3.0 * p[2] + p[3]);
    }
    if (last >= 2) {
        double acc = f[0] + f[last];
        for (int i = 1; i < last; i += 2) acc += 4.0 * f[i];
        for (int i = 2; i < last; i += 2) acc += 2.0 * f[i];
        total += h / 3.0 * acc;
    }
    return total;
}

// First derivative of uniformly sampled values: 4th-order central stencils on
// the interior, 3rd-order one-sided at the two nodes nearest each endpoint.
template <typename T>
std::vector<T> grid_derivative(std::span<const T> f, double h) {
    const int m = static_cast<int>(f.size());
    std::vector<T> d(m);
    if (m < 5) throw std::invalid_argument("grid_derivative: need at least 5 nodes");
    auto one_sided = [&](int i, int dir) {
        // (-11 f0 + 18 f1 - 9 f2 + 2 f3) / (6h), mirrored for dir = -1
        return (f[i] * (-11.0) + f[i + dir] * 18.0 + f[i + 2 * dir] * (-9.0) +
                f[i + 3 * dir] * 2.0) /
               (6.0 * h * dir);
    };
    d[0] = one_sided(0, +1);
    d[1] = one_sided(1, +1);
    d[m - 1] = one_sided(m - 1, -1);
    d[m - 2] = one_sided(m - 2, -1);
    for (int i = 2; i < m - 2; ++i)
        d[i] = (f[i - 2] - f[i + 2] + 8.0 * (f[i + 1] - f[i - 1])) / (12.0 * h);
    return d;
}

} // namespace sbgeo
