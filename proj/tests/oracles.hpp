#pragma once

// Independent reference computations used by the tests. Nothing here calls into the
// library's own formulas.

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <random>
#include <vector>

namespace oracle {

// e_k by summing products over every k-subset (bitmask enumeration).
inline double subset_e(const std::vector<double>& x, int k) {
    const int n = static_cast<int>(x.size());
    if (k == 0) return 1.0;
    double sum = 0.0;
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        if (__builtin_popcount(mask) != k) continue;
        double p = 1.0;
        for (int i = 0; i < n; ++i)
            if (mask & (1u << i)) p *= x[i];
        sum += p;
    }
    return sum;
}

inline double choose(int n, int k) {
    double c = 1.0;
    for (int j = 1; j <= k; ++j) c = c * (n - k + j) / j;
    return c;
}

inline double subset_H(const std::vector<double>& x, int k) { return subset_e(x, k) / choose(static_cast<int>(x.size()), k); }

inline std::vector<double> as_vector(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

// (H_k / H_l)^(1/(k-l)) straight from the subset sums; l = 0 gives the k-th root.
inline double quotient_f(const std::vector<double>& x, int k, int l) {
    return std::pow(subset_H(x, k) / subset_H(x, l), 1.0 / (k - l));
}

using Scalar = std::function<double(const Eigen::VectorXd&)>;

inline Eigen::VectorXd fd_gradient(const Scalar& f, const Eigen::VectorXd& x, double h) {
    Eigen::VectorXd g(x.size());
    for (int i = 0; i < x.size(); ++i) {
        Eigen::VectorXd p = x, m = x;
        p[i] += h;
        m[i] -= h;
        g[i] = (f(p) - f(m)) / (2 * h);
    }
    return g;
}

inline Eigen::MatrixXd fd_hessian(const Scalar& f, const Eigen::VectorXd& x, double h) {
    const int n = static_cast<int>(x.size());
    Eigen::MatrixXd H(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            auto at = [&](double si, double sj) {
                Eigen::VectorXd y = x;
                y[i] += si * h;
                y[j] += sj * h;
                return f(y);
            };
            H(i, j) = (at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) / (4 * h * h);
        }
    return H;
}

// Exact sphere cap through (R, h) with hyperbolic curvature sigma, solved from scratch:
// centre height c = -sigma r, and R^2 + (h - c)^2 = r^2.
struct Sphere {
    double r, c;
};
inline Sphere cap_sphere(double R, double sigma, double h) {
    // (1 - sigma^2) r^2 - 2 h sigma r - (R^2 + h^2) = 0
    const double A = 1 - sigma * sigma, B = -2 * h * sigma, C = -(R * R + h * h);
    const double r = (-B + std::sqrt(B * B - 4 * A * C)) / (2 * A);
    return {r, -sigma * r};
}

}  // namespace oracle
