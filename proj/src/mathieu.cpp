#include "dyncert/mathieu.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "dyncert/errors.hpp"

namespace dyncert {

namespace {

struct Family {
    MathieuKind kind;
    int parity;  // 0: even harmonics, 1: odd harmonics
};

int family_harmonic(Family f, std::size_t k) {
    if (f.parity == 1)
        return static_cast<int>(2 * k + 1);
    return f.kind == MathieuKind::Even ? static_cast<int>(2 * k) : static_cast<int>(2 * k + 2);
}

// Eigen-decomposition of the symmetric tridiagonal recurrence matrix for one family,
// growing the truncation until every requested vector has a negligible tail.
Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solve_family(Family f, double q, int max_index,
                                                            const MathieuOptions& opt) {
    int n = max_index + 20 + static_cast<int>(6.0 * std::pow(std::abs(q), 0.25));
    for (;;) {
        if (n > opt.max_terms)
            throw ConvergenceError("Mathieu Fourier truncation exceeded its ceiling");
        Eigen::VectorXd d(n), e(n - 1);
        for (int k = 0; k < n; ++k) {
            double h = family_harmonic(f, k);
            d(k) = h * h;
        }
        e.setConstant(q);
        if (f.parity == 0 && f.kind == MathieuKind::Even)
            e(0) = std::sqrt(2.0) * q;
        if (f.parity == 1)
            d(0) += f.kind == MathieuKind::Even ? q : -q;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
        es.computeFromTridiagonal(d, e, Eigen::ComputeEigenvectors);
        if (es.info() != Eigen::Success)
            throw ConvergenceError("Mathieu tridiagonal eigenproblem failed");
        bool ok = true;
        for (int r = 0; r <= max_index && ok; ++r) {
            auto v = es.eigenvectors().col(r);
            double big = v.cwiseAbs().maxCoeff();
            double tail = std::max(std::abs(v(n - 1)), std::abs(v(n - 2)));
            ok = tail < opt.tail_tol * big || tail < 1e-300;
        }
        if (ok)
            return es;
        n *= 2;
    }
}

MathieuSolution extract(Family f, int order, double q, const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>& es,
                        int r) {
    MathieuSolution s;
    s.kind = f.kind;
    s.order = order;
    s.q = q;
    s.characteristic = es.eigenvalues()(r);
    Eigen::VectorXd v = es.eigenvectors().col(r);
    int last = static_cast<int>(v.size()) - 1;
    double big = v.cwiseAbs().maxCoeff();
    while (last > 0 && std::abs(v(last)) < 1e-17 * big)
        --last;
    Eigen::Index imax;
    v.cwiseAbs().maxCoeff(&imax);
    double sign = v(imax) < 0 ? -1.0 : 1.0;
    s.coeffs.resize(last + 1);
    for (int k = 0; k <= last; ++k)
        s.coeffs[k] = sign * v(k);
    if (f.parity == 0 && f.kind == MathieuKind::Even)
        s.coeffs[0] /= std::sqrt(2.0);
    return s;
}

struct Compensated {
    double sum = 0.0, c = 0.0;
    void add(double x) {
        double t = sum + x;
        if (std::abs(sum) >= std::abs(x))
            c += (sum - t) + x;
        else
            c += (x - t) + sum;
        sum = t;
    }
    double value() const { return sum + c; }
};

Family family_of(MathieuKind kind, int order) {
    return {kind, order % 2};
}

} // namespace

int MathieuSolution::harmonic(std::size_t k) const {
    return family_harmonic(family_of(kind, order), k);
}

double MathieuSolution::value(double u) const {
    bool even = kind == MathieuKind::Even;
    if (std::abs(q) > 1e4) {
        Compensated s;
        for (std::size_t k = 0; k < coeffs.size(); ++k) {
            double h = harmonic(k);
            s.add(coeffs[k] * (even ? std::cos(h * u) : std::sin(h * u)));
        }
        return s.value();
    }
    double s = 0.0;
    for (std::size_t k = 0; k < coeffs.size(); ++k) {
        double h = harmonic(k);
        s += coeffs[k] * (even ? std::cos(h * u) : std::sin(h * u));
    }
    return s;
}

double MathieuSolution::derivative(double u) const {
    bool even = kind == MathieuKind::Even;
    if (std::abs(q) > 1e4) {
        Compensated s;
        for (std::size_t k = 0; k < coeffs.size(); ++k) {
            double h = harmonic(k);
            s.add(coeffs[k] * h * (even ? -std::sin(h * u) : std::cos(h * u)));
        }
        return s.value();
    }
    double s = 0.0;
    for (std::size_t k = 0; k < coeffs.size(); ++k) {
        double h = harmonic(k);
        s += coeffs[k] * h * (even ? -std::sin(h * u) : std::cos(h * u));
    }
    return s;
}

MathieuSolution mathieu_function(MathieuKind kind, int order, double q, const MathieuOptions& opt) {
    if (order < 0 || (kind == MathieuKind::Odd && order == 0))
        throw DomainError("Mathieu order must be >= 0 (>= 1 for se)");
    if (!std::isfinite(q))
        throw DomainError("Mathieu parameter q must be finite");
    Family f = family_of(kind, order);
    int r = (kind == MathieuKind::Odd && f.parity == 0) ? order / 2 - 1 : order / 2;
    auto es = solve_family(f, q, r, opt);
    return extract(f, order, q, es, r);
}

std::vector<MathieuSolution> mathieu_eigensystem(double q, int n_max, const MathieuOptions& opt) {
    if (n_max < 0)
        throw DomainError("n_max must be >= 0");
    if (!std::isfinite(q))
        throw DomainError("Mathieu parameter q must be finite");
    Family ce{MathieuKind::Even, 0}, se{MathieuKind::Odd, 0};
    auto es_ce = solve_family(ce, q, n_max / 2, opt);
    auto es_se = n_max >= 1 ? solve_family(se, q, (n_max - 1) / 2, opt) : es_ce;
    std::vector<MathieuSolution> out;
    out.reserve(n_max + 1);
    for (int n = 0; n <= n_max; ++n) {
        if (n % 2 == 0)
            out.push_back(extract(ce, n, q, es_ce, n / 2));
        else
            out.push_back(extract(se, n + 1, q, es_se, (n - 1) / 2));
    }
    return out;
}

} // namespace dyncert
