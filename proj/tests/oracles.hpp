#pragma once
// Independent reference computations used only by the test suite.

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/binomial.hpp>
#include <boost/math/special_functions/ellint_1.hpp>
#include <boost/math/special_functions/factorials.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/hermite.hpp>
#include <boost/numeric/odeint.hpp>

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>

namespace oracle {

using std::numbers::pi;

inline double gk(const std::function<double(double)>& f, double a, double b, double tol = 1e-13, unsigned depth = 10) {
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, depth, tol);
}

inline double tanh_sinh(const std::function<double(double)>& f, double a, double b) {
    boost::math::quadrature::tanh_sinh<double> ts;
    return ts.integrate(f, a, b);
}

// L_n^{(a)}(z) = sum_k (-1)^k C(n+a, n-k) z^k / k!, summed in long double.
inline double laguerre_sum(int n, double a, double z) {
    long double s = 0.0L;
    for (int k = 0; k <= n; ++k) {
        long double c = std::tgamma(static_cast<long double>(n) + a + 1.0L) /
                        (std::tgamma(static_cast<long double>(n - k) + 1.0L) * std::tgamma(static_cast<long double>(a + k) + 1.0L));
        long double term = c * std::pow(static_cast<long double>(z), k) / std::tgamma(static_cast<long double>(k) + 1.0L);
        s += (k % 2 ? -term : term);
    }
    return static_cast<double>(s);
}

// Normalized Hermite function psi_n(x) = H_n(x) e^{-x^2/2} / sqrt(2^n n! sqrt(pi)).
inline double hermite_function(int n, double x) {
    double norm = std::sqrt(std::ldexp(1.0, n) * boost::math::factorial<double>(n) * std::sqrt(pi));
    return boost::math::hermite(n, x) * std::exp(-x * x / 2.0) / norm;
}

// Largest eigenvalue of a Hermitian matrix by cyclic Jacobi on its real 2n x 2n embedding.
inline double jacobi_max_eigenvalue(const Eigen::MatrixXcd& h) {
    const int n = static_cast<int>(h.rows());
    Eigen::MatrixXd a(2 * n, 2 * n);
    a << h.real(), -h.imag(), h.imag(), h.real();
    const int m = 2 * n;
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < m; ++i)
            for (int j = i + 1; j < m; ++j)
                off += a(i, j) * a(i, j);
        if (off < 1e-26)
            break;
        for (int p = 0; p < m; ++p)
            for (int q = p + 1; q < m; ++q) {
                if (std::abs(a(p, q)) < 1e-300)
                    continue;
                double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
                for (int k = 0; k < m; ++k) {
                    double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < m; ++k) {
                    double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
            }
    }
    return a.diagonal().maxCoeff();
}

// Shooting residual of y'' + (a - 2q cos 2u) y = 0 on [0, pi/2]. Even solutions start at
// (1, 0) and need y'(pi/2) = 0 (ce_{2r}); odd ones start at (0, 1) and need y(pi/2) = 0 (se_{2r+2}).
inline double mathieu_shoot(double a, double q, bool even) {
    using state = std::array<double, 2>;
    state y = even ? state{1.0, 0.0} : state{0.0, 1.0};
    auto rhs = [&](const state& x, state& dx, double u) {
        dx[0] = x[1];
        dx[1] = -(a - 2.0 * q * std::cos(2.0 * u)) * x[0];
    };
    namespace ode = boost::numeric::odeint;
    ode::integrate_adaptive(ode::make_controlled<ode::runge_kutta_dopri5<state>>(1e-13, 1e-13), rhs, y, 0.0,
                            pi / 2, 1e-4);
    return even ? y[1] : y[0];
}

// Characteristic value nearest `guess` for which the shooting residual vanishes.
inline double mathieu_characteristic(double guess, double q, bool even, double step) {
    double lo = guess - step, hi = guess + step;
    double flo = mathieu_shoot(lo, q, even), fhi = mathieu_shoot(hi, q, even);
    for (int k = 0; k < 40 && flo * fhi > 0; ++k) {
        lo -= step;
        hi += step;
        flo = mathieu_shoot(lo, q, even);
        fhi = mathieu_shoot(hi, q, even);
    }
    for (int it = 0; it < 200 && hi - lo > 1e-13 * (1.0 + std::abs(lo)); ++it) {
        double mid = 0.5 * (lo + hi), fm = mathieu_shoot(mid, q, even);
        if (flo * fm <= 0)
            hi = mid;
        else {
            lo = mid;
            flo = fm;
        }
    }
    return 0.5 * (lo + hi);
}

// Morse eigenfunction in z = 2 lambda e^x with its x-measure folded in: psi_n psi_m dx = f(z) dz.
inline double morse_pair_density(double lambda, int n, int m, double z) {
    auto log_norm2 = [&](int k) {
        double s = lambda - k - 0.5;
        return std::lgamma(k + 1.0) + std::log(2.0 * s) - std::lgamma(2.0 * lambda - k);
    };
    double sn = lambda - n - 0.5, sm = lambda - m - 0.5;
    double lg = 0.5 * (log_norm2(n) + log_norm2(m)) + (sn + sm - 1.0) * std::log(z) - z;
    double sign = ((n + m) % 2 == 0) ? 1.0 : -1.0;
    return sign * std::exp(lg) * laguerre_sum(n, 2 * sn, z) * laguerre_sum(m, 2 * sm, z);
}

// <n|sgn(x)|m> for the Morse oscillator; x = 0 sits at z = 2 lambda.
inline double morse_sgn(double lambda, int n, int m) {
    auto f = [&](double z) { return morse_pair_density(lambda, n, m, z); };
    double z0 = 2.0 * lambda;
    return gk(f, z0, z0 + 400.0, 1e-14) - tanh_sinh(f, 0.0, z0);
}

} // namespace oracle
